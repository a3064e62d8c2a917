#ifndef CNSPEC_CNSPEC_HPP_
#define CNSPEC_CNSPEC_HPP_

#include "cnspec/besov.hpp"
#include "cnspec/checkpoint.hpp"
#include "cnspec/cutoff.hpp"
#include "cnspec/envelope.hpp"
#include "cnspec/errors.hpp"
#include "cnspec/experiments.hpp"
#include "cnspec/fft.hpp"
#include "cnspec/field.hpp"
#include "cnspec/grid.hpp"
#include "cnspec/interp.hpp"
#include "cnspec/lagrangian.hpp"
#include "cnspec/paraproduct.hpp"
#include "cnspec/pde.hpp"
#include "cnspec/random_fields.hpp"
#include "cnspec/spectral_ops.hpp"
#include "cnspec/trajectory.hpp"

#endif  // CNSPEC_CNSPEC_HPP_
