#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vexlab/exponent.hpp"
#include "vexlab/random.hpp"

using namespace vexlab;

namespace {

std::vector<VariableExponent> families() {
  return {make_constant(2.5),
          make_lerner(0.1, 0.05),
          make_lerner(0.3, 0.2, 2),
          make_piecewise({-1.0, 1.0}, {3.0, 2.0, 3.0}),
          make_piecewise({1.0}, {2.0, 3.0}, 3, true),
          make_expression("2.5 + 0.5*sin(x)", 2.0, 3.0),
          make_nekvinda_radial(RadialProfile::log_decay(2.0, 1.0), 2),
          make_nekvinda_radial(RadialProfile::log_decay(2.0, 1.0), 1, Perturbation{1.0, 0.5}),
          conjugate_exponent(make_lerner(0.1, 0.05))};
}

double L(double r) { return r >= std::numbers::e ? std::log(std::log(r)) : 0.0; }

}  // namespace

TEST(Exponent, ConstantExamples) {
  const auto p = make_constant(2.0);
  EXPECT_EQ(p({0.3}), 2.0);
  EXPECT_EQ(make_constant(3.0, 2)({5.0, -2.0}), 3.0);
  EXPECT_EQ(p.lower(), 2.0);
  EXPECT_EQ(p.upper(), 2.0);
}

TEST(Exponent, LernerExamples) {
  const auto p = make_lerner(0.1, 0.05);
  EXPECT_NEAR(p({std::numbers::e}), 2.1, 1e-15);
  EXPECT_NEAR(p({1.0}), 2.1, 1e-15);
  EXPECT_NEAR(p({std::exp(std::exp(std::numbers::pi / 2))}), 2.15, 1e-12);
  EXPECT_NEAR(p.at_log_radius(std::exp(std::numbers::pi / 2)), 2.15, 1e-15);
  EXPECT_DOUBLE_EQ(p.lower(), 2.05);
  EXPECT_DOUBLE_EQ(p.upper(), 2.15);
}

TEST(Exponent, LogRadialAgreesWithDirect) {
  for (const auto& p : families()) {
    if (!p.is_radial()) continue;
    for (double r : {0.5, 1.0, 3.0, 17.0, 1e5, 1e200}) {
      std::vector<double> x(static_cast<std::size_t>(p.dimension()), 0.0);
      x[0] = r;
      EXPECT_NEAR(p(x), p.at_log_radius(std::log(r)), 1e-12) << p.family() << " r=" << r;
    }
  }
}

TEST(Exponent, ConstructionRejectsBadBounds) {
  EXPECT_THROW(make_constant(1.0), BoundViolation);
  EXPECT_THROW(make_constant(0.5), BoundViolation);
  EXPECT_THROW(make_constant(INFINITY), BoundViolation);
  EXPECT_THROW(make_lerner(0.05, 0.1), BadParameter);
  EXPECT_THROW(make_lerner(0.1, 0.0), BadParameter);
  EXPECT_THROW(make_piecewise({0.0}, {1.0, 2.0}), BoundViolation);
  EXPECT_THROW(make_expression("2 + sin(x)", 2.0, 3.0), BoundViolation);
  EXPECT_THROW(make_expression("2 + x2", 2.0, 3.0, 1), SpecError);
  try {
    make_constant(1.0);
  } catch (const BoundViolation& e) {
    EXPECT_NE(std::string(e.what()).find("p_- must exceed 1"), std::string::npos);
  }
}

TEST(Exponent, ConjugateExamples) {
  EXPECT_NEAR(conjugate_exponent(make_constant(2.0))({1.0}), 2.0, 1e-15);
  EXPECT_NEAR(conjugate_exponent(make_constant(3.0))({1.0}), 1.5, 1e-15);
  EXPECT_NEAR(conjugate_exponent(make_constant(4.0 / 3.0))({1.0}), 4.0, 1e-14);
}

TEST(Exponent, ConjugationIsInvolution) {
  SamplerConfig cfg;
  cfg.samples = 2000;
  for (const auto& p : families()) {
    const auto pp = conjugate_exponent(conjugate_exponent(p));
    for (const auto& s : draw_samples(cfg, p.dimension())) {
      const auto a = p.at(s), b = pp.at(s);
      ASSERT_TRUE(a && b);
      EXPECT_NEAR(*a, *b, 1e-12);
    }
  }
}

TEST(Exponent, StaysWithinDeclaredBounds) {
  SamplerConfig cfg;
  cfg.samples = 1000000;
  cfg.max_log_log_radius = 6.5;
  for (const auto& p : families()) {
    std::size_t evaluated = 0;
    for (const auto& s : draw_samples(cfg, p.dimension())) {
      const auto v = p.at(s);
      if (!v) continue;
      ++evaluated;
      ASSERT_GE(*v, p.lower() - kBoundsTol) << p.family();
      ASSERT_LE(*v, p.upper() + kBoundsTol) << p.family();
    }
    EXPECT_EQ(evaluated, cfg.samples);
  }
}

TEST(Exponent, EstimatedBounds) {
  SamplerConfig cfg;
  cfg.samples = 1000;
  auto c = estimate_bounds(make_constant(2.5), cfg);
  EXPECT_EQ(c.lower, 2.5);
  EXPECT_EQ(c.upper, 2.5);

  cfg.samples = 100000;
  cfg.max_log_log_radius = 4 * std::numbers::pi;
  const auto l = estimate_bounds(make_lerner(0.1, 0.05), cfg);
  EXPECT_NEAR(l.lower, 2.05, 1e-3);
  EXPECT_NEAR(l.upper, 2.15, 1e-3);
  // Oracle: a dense scan of sin over the sampled range of L.
  double lo = 1.0, hi = -1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double v = std::sin(4 * std::numbers::pi * i / 100000.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_NEAR(l.lower, 2.1 + 0.05 * lo, 1e-3);
  EXPECT_NEAR(l.upper, 2.1 + 0.05 * hi, 1e-3);

  cfg = SamplerConfig{};
  const auto pw = estimate_bounds(make_piecewise({1.0}, {2.0, 3.0}, 1, true), cfg);
  EXPECT_EQ(pw.lower, 2.0);
  EXPECT_EQ(pw.upper, 3.0);
}

TEST(Exponent, LernerIsBetaLipschitzInL) {
  const double beta = 0.05;
  const auto p = make_lerner(0.1, beta);
  Rng rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.log_uniform(1e-3, 1e12), y = rng.log_uniform(1e-3, 1e12);
    EXPECT_LE(std::abs(p({x}) - p({y})), beta * std::abs(L(x) - L(y)) + 1e-15);
  }
}

TEST(Exponent, SpecRoundTrip) {
  SamplerConfig cfg;
  cfg.samples = 500;
  for (const auto& p : families()) {
    const auto q = build_exponent(p.spec());
    EXPECT_EQ(q.spec(), p.spec());
    for (const auto& s : draw_samples(cfg, p.dimension())) EXPECT_EQ(*p.at(s), *q.at(s));
  }
}

TEST(Exponent, SpecErrors) {
  EXPECT_THROW(build_exponent(Json{{"family", "nope"}}), SpecError);
  EXPECT_THROW(build_exponent(Json{{"family", "constant"}}), SpecError);
  EXPECT_THROW(build_exponent(Json{{"family", "constant"}, {"params", {{"value", 2}}}, {"dimension", 4}}),
               SpecError);
  const auto custom = make_custom("c", 2.0, 2.0, 1, [](std::span<const double>) { return 2.0; });
  EXPECT_THROW(build_exponent(custom.spec()), SpecError);
  // Out-of-range values surface as the construction error.
  EXPECT_THROW(build_exponent(Json{{"family", "constant"}, {"params", {{"value", 1.0}}}}), BoundViolation);
}

TEST(Exponent, PiecewiseExamples) {
  const auto p = make_piecewise({0.0, 1.0}, {2.0, 4.0, 3.0});
  EXPECT_EQ(p({-0.5}), 2.0);
  EXPECT_EQ(p({0.0}), 4.0);
  EXPECT_EQ(p({0.99}), 4.0);
  EXPECT_EQ(p({1.0}), 3.0);
  const auto q = make_piecewise({1.0}, {2.0, 3.0}, 2, false, 1);
  EXPECT_EQ(q({5.0, 0.5}), 2.0);
  EXPECT_EQ(q({0.0, 1.5}), 3.0);
}
