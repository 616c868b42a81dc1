#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vexlab/expression.hpp"
#include "vexlab/oscillation.hpp"

using namespace vexlab;

namespace {

const ScalarField L = [](std::span<const double> x) { return loglog_or_zero(euclidean_norm(x)); };
const ScalarField identity = [](std::span<const double> x) { return x[0]; };

Cube cube1(double c, double side) { return Cube{{c}, side}; }

}  // namespace

TEST(Oscillation, Examples) {
  const ScalarField constant = [](std::span<const double>) { return 4.0; };
  EXPECT_EQ(mean_oscillation(constant, cube1(3.0, 2.0)), 0.0);
  for (double s : {1e-3, 1.0, 40.0})
    EXPECT_NEAR(mean_oscillation(identity, cube1(7.0, s)), s / 4, 1e-12 * (7 + s));
  const ScalarField step = [](std::span<const double> x) { return x[0] > 0 ? 1.0 : 0.0; };
  EXPECT_DOUBLE_EQ(mean_oscillation(step, cube1(0.0, 2.0)), 0.5);
  EXPECT_DOUBLE_EQ(cube_mean(identity, cube1(3.0, 2.0)), 3.0);

  const ScalarField first = [](std::span<const double> x) { return x[0]; };
  EXPECT_NEAR(mean_oscillation(first, Cube{{1.0, -2.0}, 0.5}, 32), 0.125, 1e-14);
}

TEST(Oscillation, QuadraticClosedForm) {
  const ScalarField sq = [](std::span<const double> x) { return x[0] * x[0]; };
  const double exact = 4.0 / (9.0 * std::sqrt(3.0));
  EXPECT_NEAR(mean_oscillation_adaptive(sq, cube1(0.5, 1.0), 64, 1024), exact, 1e-4);
  EXPECT_NEAR(mean_oscillation(sq, cube1(0.5, 1.0), 4096), exact, 1e-6);
}

TEST(Oscillation, InvariantUnderConstantShift) {
  const ScalarField shifted = [](std::span<const double> x) { return loglog_or_zero(std::abs(x[0])) + 9.0; };
  for (double c : {0.0, 5.0, 1e4})
    EXPECT_NEAR(mean_oscillation(L, cube1(c, 30.0)), mean_oscillation(shifted, cube1(c, 30.0)), 1e-12);
}

TEST(Oscillation, CubeWeight) {
  EXPECT_DOUBLE_EQ(cube_weight(cube1(0.0, 1.0)), std::log(std::numbers::e + 1.0));
  EXPECT_DOUBLE_EQ(cube_weight(Cube{{3.0, 4.0}, 2.0}), std::log(std::numbers::e + 5.0));
  EXPECT_DOUBLE_EQ(cube_weight(cube1(0.0, 0.01)), std::log(std::numbers::e + 100.0));
  EXPECT_NEAR(cube_weight(cube1(1e300, 1.0)), std::log(1e300), 1e-10);
}

TEST(Oscillation, Errors) {
  EXPECT_THROW(mean_oscillation(identity, cube1(0.0, 0.0)), BadParameter);
  EXPECT_THROW(mean_oscillation(identity, cube1(NAN, 1.0)), BadParameter);
  EXPECT_THROW(mean_oscillation(identity, Cube{{}, 1.0}), BadParameter);
  EXPECT_THROW(mean_oscillation(identity, cube1(0.0, 1.0), 1), BadParameter);
  const ScalarField bad = [](std::span<const double> x) { return std::log(x[0]); };
  EXPECT_THROW(mean_oscillation(bad, cube1(0.0, 1.0)), NonFiniteSample);
}

TEST(LipschitzCheck, SineOfLogLog) {
  const double alpha = 0.1, beta = 0.05;
  const auto cubes = random_cubes(1000, 1e-4, 1e4, 1e8, 1, 1);
  const auto rep = lipschitz_oscillation_check(
      [&](double t) { return alpha + beta * std::sin(t); }, beta, L, cubes);
  EXPECT_EQ(rep.entries.size(), 1000u);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_LE(rep.max_ratio, 1.0);
  EXPECT_GT(rep.max_ratio, 0.0);
}

TEST(LipschitzCheck, DetectsWrongConstant) {
  const auto cubes = random_cubes(50, 1.0, 10.0, 5.0, 1, 2);
  // F(t) = 3t has constant 3; claiming 1 must fail on cubes with positive oscillation.
  const auto rep = lipschitz_oscillation_check([](double t) { return 3 * t; }, 1.0, identity, cubes);
  EXPECT_EQ(rep.violations, cubes.size());
  EXPECT_NEAR(rep.max_ratio, 1.5, 1e-12);
  EXPECT_THROW(lipschitz_oscillation_check([](double t) { return t; }, 0.0, identity, cubes), BadParameter);
}

TEST(OscillationSup, LogLogIsFinite) {
  const auto r = oscillation_sup(L, SupSearchConfig{});
  EXPECT_GE(r.cubes, 10000u);
  EXPECT_FALSE(r.divergent);
  EXPECT_LT(r.tail_change, kStableTailChange);
  EXPECT_NEAR(r.sup, 1.503245034882974, 1e-12);
  EXPECT_EQ(r.trace.size(), 12u);
  EXPECT_EQ(r.trace.front().first, -6);
  EXPECT_EQ(r.trace.back().first, 5);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i].second, r.trace[i - 1].second);
  SupSearchConfig cfg;
  EXPECT_DOUBLE_EQ(weighted_oscillation(L, r.witness, cfg), r.sup);
}

TEST(OscillationSup, IdentityDiverges) {
  const auto r = oscillation_sup(identity, SupSearchConfig{});
  EXPECT_TRUE(r.divergent);
  EXPECT_GT(r.tail_change, 0.5);
}

TEST(OscillationSup, MonotoneInSampleCount) {
  SupSearchConfig small;
  small.samples_per_decade = 200;
  small.side_lo = 1e-2;
  small.side_hi = 1e4;
  SupSearchConfig big = small;
  big.samples_per_decade = 600;
  const auto a = oscillation_sup(L, small), b = oscillation_sup(L, big);
  EXPECT_LE(a.sup, b.sup);
  for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_LE(a.trace[i].second, b.trace[i].second);
}

TEST(OscillationSup, Deterministic) {
  SupSearchConfig cfg;
  cfg.samples_per_decade = 100;
  cfg.dimension = 2;
  const auto a = oscillation_sup(L, cfg), b = oscillation_sup(L, cfg);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  cfg.seed = 2;
  EXPECT_NE(oscillation_sup(L, cfg).to_json().dump(), a.to_json().dump());
}

TEST(OscillationSup, ConfigErrors) {
  SupSearchConfig cfg;
  cfg.side_lo = 2.0;
  cfg.side_hi = 1.0;
  EXPECT_THROW(oscillation_sup(L, cfg), BadConfig);
  cfg = SupSearchConfig{};
  cfg.samples_per_decade = 0;
  EXPECT_THROW(oscillation_sup(L, cfg), BadConfig);
  cfg = SupSearchConfig{};
  cfg.dimension = 0;
  EXPECT_THROW(oscillation_sup(L, cfg), BadConfig);
}
