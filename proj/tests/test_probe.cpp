#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "vexlab/expression.hpp"
#include "vexlab/probe.hpp"

using namespace vexlab;

namespace {

ProbeConfig single(const char* fn, ScaleSet scales) {
  ProbeConfig c;
  c.kinds = {};
  c.functions = {fn};
  c.scales = scales;
  c.half_resolution = false;
  return c;
}

// ||Mf||_2 / ||f||_2 with M over every interval of whole cells, by direct enumeration.
double brute_force_l2_ratio(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> m(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = a; b < n; ++b) {
      sum += std::abs(f[b]);
      const double avg = sum / static_cast<double>(b - a + 1);
      for (std::size_t i = a; i <= b; ++i) m[i] = std::max(m[i], avg);
    }
  }
  double nf = 0.0, nm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nf += f[i] * f[i];
    nm += m[i] * m[i];
  }
  return std::sqrt(nm / nf);
}

}  // namespace

TEST(Probe, IndicatorAllScalesMatchesBruteForce) {
  const auto grid = GridSpec::parse("-16:16:256");
  const auto t = boundedness_probe(make_constant(2.0), single("indicator(0,1)", ScaleSet::all), grid);
  const auto f = sample_function(Expression::parse("indicator(0,1)"), grid);
  const double oracle = brute_force_l2_ratio(f.values);
  EXPECT_NEAR(t.max_ratio, oracle, 1e-9);
  EXPECT_NEAR(t.max_ratio, 1.66112249506583, 1e-12);
  EXPECT_EQ(t.witness, "fn0");
}

TEST(Probe, DyadicBelowAllScales) {
  const auto grid = GridSpec::parse("-16:16:256");
  const auto p = make_constant(2.0);
  const auto dy = boundedness_probe(p, single("indicator(0,1)", ScaleSet::dyadic), grid);
  EXPECT_NEAR(dy.max_ratio, 1.50353079730131, 1e-12);
  for (const char* fn : {"exp(-x^2)", "indicator(-3,5)", "1/(1+x^2)"}) {
    const double a = boundedness_probe(p, single(fn, ScaleSet::dyadic), grid).max_ratio;
    const double b = boundedness_probe(p, single(fn, ScaleSet::all), grid).max_ratio;
    EXPECT_GE(a, 1.0 - 1e-12) << fn;
    EXPECT_GE(b, a * (1 - 1e-12)) << fn;
  }
}

TEST(Probe, ConstantFunctionHasRatioOne) {
  const auto t = boundedness_probe(make_lerner(0.1, 0.05), single("1", ScaleSet::dyadic),
                                   GridSpec::parse("-16:16:256"));
  EXPECT_NEAR(t.max_ratio, 1.0, 1e-9);
}

TEST(Probe, LernerStableUnderRefinement) {
  const auto p = make_lerner(0.1, 0.05);
  const ProbeConfig cfg;
  const auto a = boundedness_probe(p, cfg, GridSpec::parse("-16:16:4096"));
  const auto b = boundedness_probe(p, cfg, GridSpec::parse("-16:16:8192"));
  EXPECT_EQ(a.rows.size() + a.skipped, 50u);
  for (const auto& row : a.rows) EXPECT_GE(row.ratio, 1.0 - 1e-9) << row.id;
  EXPECT_LT(std::abs(a.max_ratio - b.max_ratio) / b.max_ratio, 0.10);
  ASSERT_TRUE(a.half_max_ratio.has_value());
  EXPECT_LT(std::abs(a.max_ratio - *a.half_max_ratio) / a.max_ratio, 0.10);
  EXPECT_NEAR(a.max_ratio, 1.605398258, 1e-8);
  EXPECT_EQ(a.witness, "random-steps-16");
}

TEST(Probe, FamiliesAreIndependentAndDeterministic) {
  const auto grid = GridSpec::parse("-4:4:64,-4:4:64");
  ProbeConfig cfg;
  cfg.count = 10;
  cfg.kinds = {ProbeKind::indicators, ProbeKind::gaussians, ProbeKind::random_steps};
  const auto all = probe_functions(grid, cfg);
  ASSERT_EQ(all.size(), 30u);
  std::set<std::string> ids;
  for (const auto& f : all) ids.insert(f.id);
  EXPECT_EQ(ids.size(), 30u);

  cfg.kinds = {ProbeKind::gaussians};
  const auto only = probe_functions(grid, cfg);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(only[k].id, all[10 + k].id);
    EXPECT_EQ(only[k].description.dump(), all[10 + k].description.dump());
  }
  const auto p = make_lerner(0.3, 0.2, 2);
  cfg.half_resolution = false;
  EXPECT_EQ(boundedness_probe(p, cfg, grid).to_json().dump(), boundedness_probe(p, cfg, grid).to_json().dump());
}

TEST(Probe, GaussiansVanishOutsideCutoff) {
  const auto grid = GridSpec::parse("-16:16:256");
  ProbeConfig cfg;
  cfg.count = 20;
  cfg.kinds = {ProbeKind::gaussians};
  for (const auto& fn : probe_functions(grid, cfg)) {
    const auto c = fn.description["center"][0].get<double>();
    const auto s = fn.description["sigma"].get<double>();
    const std::vector<double> far{c + 4.01 * s}, near{c + 3.99 * s};
    EXPECT_EQ(fn.f(far), 0.0);
    EXPECT_GT(fn.f(near), 0.0);
  }
}

TEST(Probe, Errors) {
  EXPECT_THROW(boundedness_probe(make_constant(2.0, 2), ProbeConfig{}, GridSpec::parse("0:1:8")), BadParameter);
  EXPECT_THROW(probe_kind_from_string("steps"), SpecError);
  EXPECT_EQ(probe_kind_from_string("random-steps"), ProbeKind::random_steps);
  EXPECT_STREQ(to_string(ProbeKind::gaussians), "gaussians");
}
