#ifndef CNSPEC_ERRORS_HPP_
#define CNSPEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cnspec {

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error("NumericalError: " + msg) {}
};

struct RangeError : std::runtime_error {
  explicit RangeError(const std::string& msg) : std::runtime_error("RangeError: " + msg) {}
};

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error("ShapeError: " + msg) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error("DomainError: " + msg) {}
};

struct IndexError : std::runtime_error {
  explicit IndexError(const std::string& msg) : std::runtime_error("IndexError: " + msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error("DataError: " + msg) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error("PreconditionError: " + msg) {}
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error("ConvergenceError: " + msg) {}
};

struct EllipticityError : std::runtime_error {
  explicit EllipticityError(const std::string& msg) : std::runtime_error("EllipticityError: " + msg) {}
};

struct VacuumError : std::runtime_error {
  explicit VacuumError(const std::string& msg) : std::runtime_error("VacuumError: " + msg) {}
};

struct DiffeoError : std::runtime_error {
  explicit DiffeoError(const std::string& msg) : std::runtime_error("DiffeoError: " + msg) {}
};

struct StepRejected : std::runtime_error {
  explicit StepRejected(const std::string& msg) : std::runtime_error("StepRejected: " + msg) {}
};

}  // namespace cnspec

#endif  // CNSPEC_ERRORS_HPP_
