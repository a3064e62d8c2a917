#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cnspec/paraproduct.hpp"
#include "cnspec/random_fields.hpp"

using namespace cnspec;

namespace {

Field constant(const Grid& g, double c) {
  return Field::sample(g, [c](const auto&) { return c; });
}

}  // namespace

TEST_CASE("paraproduct basics") {
  Grid g(2, 32);
  CutoffProfile cut(g);

  SECTION("constant low factor") {
    Field f = constant(g, 2.5);
    Field h = random_field(g, 0.5, 9, 1.0, 8.0);  // inside the dealias ball
    Field expect = 2.5 * (h - constant(g, h.mean()));
    CHECK(lp_norm(para(f, h) - expect, kInfExponent) < 1e-11 * lp_norm(h, kInfExponent));
  }

  SECTION("zero factor") {
    Field f = random_field(g, 0.5, 10);
    CHECK(lp_norm(para(f, Field(g, 1)), kInfExponent) == 0.0);
    CHECK(lp_norm(remainder(f, Field(g, 1)), kInfExponent) == 0.0);
  }

  SECTION("grid mismatch") {
    Field f = random_field(g, 0.5, 11);
    Field h = random_field(Grid(2, 64), 0.5, 11);
    CHECK_THROWS_AS(para(f, h), ShapeError);
    CHECK_THROWS_AS(remainder(f, h), ShapeError);
  }
}

TEST_CASE("Bony reconstruction") {
  Grid g(2, 32);
  for (int trial = 0; trial < 100; ++trial) {
    Field f = random_field(g, 0.5, 2000 + 2 * trial) + constant(g, 0.1 * (trial % 3));
    Field h = random_field(g, 0.8, 2001 + 2 * trial) + constant(g, 0.05 * (trial % 5));
    Field bony = para(f, h) + para(h, f) + remainder(f, h);
    Field direct = multiply(f, h) - constant(g, f.mean() * h.mean());
    const double scale = lp_norm(direct, 2.0) + 1e-300;
    CHECK(lp_norm(bony - direct, 2.0) <= 1e-10 * scale);
  }
}

TEST_CASE("remainder support and bilinearity") {
  Grid g(2, 64);
  CutoffProfile cut(g);

  SECTION("separated dyadic supports annihilate") {
    Field lo = random_field(g, 0.5, 51, 1.0, 2.0);    // blocks 0..1
    Field hi = random_field(g, 0.5, 52, 12.0, 16.0);  // blocks 3..4
    CHECK(lp_norm(remainder(lo, hi), 2.0) < 1e-12 * (lp_norm(lo, 2.0) * lp_norm(hi, 2.0) + 1e-300));
  }

  SECTION("single mode square") {
    Field m = Field::sample(g, [](const auto& x) { return std::cos(3.0 * x[0]); });
    Field bony = para(m, m) + para(m, m) + remainder(m, m);
    Field direct = multiply(m, m);  // mean 1/2 plus cos(6x)/2; means of m are zero
    CHECK(lp_norm(bony - direct, kInfExponent) < 1e-11);
    // the remainder carries the full square minus the paraproduct pieces
    Field rem = remainder(m, m);
    CHECK(lp_norm(rem - (direct - 2.0 * para(m, m)), kInfExponent) < 1e-11);
  }

  SECTION("bilinearity") {
    Field f = random_field(g, 0.5, 53);
    Field h = random_field(g, 0.5, 54);
    const double alpha = -1.75;
    CHECK(lp_norm(remainder(alpha * f, h) - alpha * remainder(f, h), kInfExponent) <
          1e-12 * lp_norm(remainder(f, h), kInfExponent) * std::abs(alpha) + 1e-13);
    CHECK(lp_norm(para(alpha * f, h) - alpha * para(f, h), kInfExponent) <
          1e-12 * lp_norm(para(f, h), kInfExponent) * std::abs(alpha) + 1e-13);
  }
}

TEST_CASE("paraproduct block locality") {
  Grid g(2, 64);
  CutoffProfile cut(g);
  Field f = random_field(g, 0.5, 61);
  Field h = random_field(g, 0.5, 62);
  Field full = para(f, h);
  for (int j = 2; j <= 4; ++j) {
    // keep only blocks j-4..j+4 of g (plus nothing else; mean of h irrelevant)
    Field trimmed(g, 1);
    for (int k = std::max(cut.j_min, j - 4); k <= std::min(cut.j_max, j + 4); ++k)
      trimmed += lp_block(h, k, cut);
    Field diff = lp_block(full, j, cut) - lp_block(para(f, trimmed), j, cut);
    CHECK(lp_norm(diff, 2.0) < 1e-11 * (lp_norm(full, 2.0) + 1e-300));
  }
}

TEST_CASE("composition") {
  Grid g(2, 32);

  SECTION("identity function") {
    Field f = random_field(g, 0.5, 71, 1.0, 8.0);
    CHECK(lp_norm(compose([](double x) { return x; }, f) - f, kInfExponent) < 1e-12);
  }

  SECTION("I(0) = 0") {
    Field z(g, 1);
    CHECK(lp_norm(compose([](double x) { return x / (1.0 + x); }, z), kInfExponent) == 0.0);
  }

  SECTION("Taylor remainder oracle for I(a)") {
    Field a = 0.02 * random_field(g, 1.0, 72);
    const double amax = lp_norm(a, kInfExponent);
    REQUIRE(amax < 0.1);
    const auto& av = a.physical();
    double worst = 0.0;
    for (double x : av) worst = std::max(worst, std::abs(x / (1.0 + x) - (x - x * x)));
    CHECK(worst <= amax * amax * amax / (1.0 - amax) + 1e-15);
  }

  SECTION("vacuum guard") {
    Field a = Field::sample(g, [](const auto& x) { return -1.2 + 0.1 * std::cos(x[0]); });
    CHECK_THROWS_AS(compose([](double x) { return x / (1.0 + x); }, a, 1.0, 0.5), DomainError);
  }

  SECTION("telescoping identity") {
    CutoffProfile cut(g);
    Field f = 0.3 * random_field(g, 1.0, 73);
    auto F = [](double x) { return x / (1.0 + x); };
    // F(f) = F(S_{jmin-1} f) + sum_j [F(S_{j+1} f) - F(S_j f)], telescoped to
    // the endpoints; checked pointwise without dealiasing
    auto Fof = [&](const Field& h) {
      const auto& v = h.physical();
      std::vector<double> out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = F(v[i]);
      return Field::from_physical(g, 1, std::move(out));
    };
    Field sum = Fof(low_pass(f, cut.j_min - 1, cut));
    for (int j = cut.j_min - 1; j <= cut.j_max + 1; ++j)
      sum += Fof(low_pass(f, j + 1, cut)) - Fof(low_pass(f, j, cut));
    CHECK(lp_norm(sum - Fof(f), kInfExponent) < 1e-12);
  }

  SECTION("Lemma 2.4 ratio stays bounded over an ensemble") {
    AcceptableWeight w;
    w.delta0 = 0.5;
    for (int i = 0; i <= 8; ++i) w.values[i] = i <= 0 ? 1.0 : std::exp2(0.4 * i);
    const BesovIndex idx(1.0, 2.0, 1.0);
    double sup = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      Field f = random_field(g, 1.0, 900 + trial);
      f *= 0.2 / (lp_norm(f, kInfExponent) + 1e-300);
      const double nf = besov_norm(f, idx, &w);
      if (nf < 1e-14) continue;
      Field If = compose([](double x) { return x / (1.0 + x); }, f, 1.0, 0.5);
      sup = std::max(sup, besov_norm(If, idx, &w) / nf);
    }
    CHECK(sup > 0.0);
    CHECK(sup < 5.0);
  }
}

TEST_CASE("product estimate ratios") {
  Grid g32(2, 32);
  Grid g64(2, 64);
  AcceptableWeight w;
  w.delta0 = 0.5;
  for (int i = 0; i <= 8; ++i) w.values[i] = i <= 0 ? 1.0 : std::exp2(0.5 * i);

  SECTION("zero input gives zero ratio") {
    EstimateParams prm;
    prm.p = 2.0;
    CHECK(estimate_ratio(ProductEstimateKind::Bfg, Field(g32, 1), random_field(g32, 0.5, 1), prm,
                         &w) == 0.0);
  }

  SECTION("hypothesis enforcement") {
    Field f = random_field(g32, 0.5, 2);
    Field h = random_field(g32, 0.5, 3);
    EstimateParams prm;
    prm.t = 0.5;  // Tfg1 needs t <= 0
    CHECK_THROWS_AS(estimate_ratio(ProductEstimateKind::Tfg1, f, h, prm, &w), PreconditionError);
    prm.t = -0.25;  // t + delta0 = 0.25 > 0
    CHECK_THROWS_AS(estimate_ratio(ProductEstimateKind::Tfg4, f, h, prm, &w), PreconditionError);
    CHECK_NOTHROW(estimate_ratio(ProductEstimateKind::Tfg4, f, h, prm, &w, false));
    EstimateParams bad;
    bad.p = 2.0;
    bad.t1 = -1.0;
    bad.t2 = -0.5;  // t1 + t2 = -1.5 <= -min(d/p,d/p') = -1
    CHECK_THROWS_AS(estimate_ratio(ProductEstimateKind::Rfg3, f, h, bad, &w), PreconditionError);
    EstimateParams r22;
    r22.p = 2.0;  // R22a needs d > 2 (here d = 2)
    CHECK_THROWS_AS(estimate_ratio(ProductEstimateKind::R22a, f, h, r22, nullptr), PreconditionError);
  }

  SECTION("bfg ratio stable under refinement") {
    EstimateParams prm;
    prm.p = 2.0;
    auto sup_ratio = [&](const Grid& g) {
      double sup = 0.0;
      for (int trial = 0; trial < 30; ++trial) {
        Field f = random_field(g, 1.0, 400 + 2 * trial, 1.0, 8.0);
        Field h = random_field(g, 1.0, 401 + 2 * trial, 1.0, 8.0);
        sup = std::max(sup, estimate_ratio(ProductEstimateKind::Bfg, f, h, prm, &w));
      }
      return sup;
    };
    const double s32 = sup_ratio(g32);
    const double s64 = sup_ratio(g64);
    CHECK(s32 > 0.0);
    CHECK(std::abs(s64 - s32) <= 0.2 * std::max(s32, s64));
  }

  SECTION("Cfg inside the admissible p range") {
    EstimateParams prm;
    prm.p = 3.0;  // p = 2d - 1 for d = 2
    double sup = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Field f = random_field(g32, 1.0, 500 + 2 * trial, 1.0, 8.0);
      Field h = random_field(g32, 0.5, 501 + 2 * trial, 1.0, 8.0);
      sup = std::max(sup, estimate_ratio(ProductEstimateKind::Cfg, f, h, prm, &w));
    }
    CHECK(sup > 0.0);
    CHECK(std::isfinite(sup));
  }

  SECTION("violated hypothesis grows under refinement") {
    // s1 + s2 = -1/2 < 0 violates the (4) sum condition at p = 2.  The pair
    // cos((lambda+1)x), cos(lambda x) leaves an O(1) coefficient at frequency
    // one, so the ratio grows like lambda^{1/2} under refinement.
    EstimateParams prm;
    prm.p = 2.0;
    prm.s1 = -0.25;
    prm.s2 = -0.25;
    auto ratio_at = [&](const Grid& g) {
      const double lambda = std::floor(g.points_per_dim / 3.0) - 1.0;
      Field f = Field::sample(g, [&](const auto& x) { return std::cos((lambda + 1.0) * x[0]); });
      Field h = Field::sample(g, [&](const auto& x) { return std::cos(lambda * x[0]); });
      return estimate_ratio(ProductEstimateKind::Product4, f, h, prm, nullptr, false);
    };
    CHECK(ratio_at(g64) > 1.2 * ratio_at(g32));
  }
}
