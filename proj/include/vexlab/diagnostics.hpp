#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/iterated_log.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"
#include "vexlab/profile.hpp"
#include "vexlab/random.hpp"
#include "vexlab/sampling.hpp"

namespace vexlab {

// Each scale bin must raise the running maximum by more than this factor
// for the trace to count as growing.
inline constexpr double kGrowthFactor = 1.01;
// Number of trailing bins that must all grow to set the divergence flag.
inline constexpr std::size_t kGrowthBins = 4;

struct ModulusEstimate {
  double c_est = 0.0;
  SamplePoint witness_x;
  std::optional<SamplePoint> witness_y;  // pair estimates only
  double p_inf = 0.0;                    // infinity modulus only
  bool p_inf_auto = false;
  std::size_t samples = 0;
  // (scale label, running max) ordered from coarse to fine (or near to far).
  std::vector<std::pair<double, double>> trace;
  bool divergent = false;

  Json to_json() const {
    Json tr = Json::array();
    for (const auto& [s, m] : trace) tr.push_back({s, m});
    Json j = {{"c_est", c_est}, {"witness_x", vexlab::to_json(witness_x)}};
    if (witness_y) j["witness_y"] = vexlab::to_json(*witness_y);
    else {
      j["p_inf"] = p_inf;
      j["p_inf_auto"] = p_inf_auto;
    }
    j["samples"] = samples;
    j["trace"] = tr;
    j["divergent"] = divergent;
    return j;
  }
};

namespace detail {

// Running max over bins; true when each of the last kGrowthBins bins raised
// it by more than kGrowthFactor.
inline bool grows_at_tail(const std::vector<std::pair<double, double>>& running) {
  if (running.size() < kGrowthBins + 1) return false;
  for (std::size_t i = running.size() - kGrowthBins; i < running.size(); ++i) {
    const double prev = running[i - 1].second;
    const double cur = running[i].second;
    if (!(cur > 0.0) || !(cur > kGrowthFactor * prev)) return false;
  }
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Local log-Hoelder modulus: sup |p(x) - p(y)| log(e + 1/|x - y|).

struct PairSamplerConfig {
  std::size_t pairs_per_decade = 2000;
  double delta_min = 1e-12;
  double delta_max = 1.0;
  double box_radius = 16.0;
  int zoom_pairs = 8;  // bisection descendants tracked per decade
  int refine_steps = 20;
  std::uint64_t seed = 1;

  Json to_json() const {
    return {{"pairs_per_decade", pairs_per_decade},
            {"delta_range", {delta_min, delta_max}},
            {"box_radius", box_radius},
            {"zoom_pairs", zoom_pairs},
            {"refine_steps", refine_steps},
            {"seed", seed}};
  }
};

namespace detail {

struct PointPair {
  std::vector<double> x, y;
  double jump = 0.0;
  double value = 0.0;
};

inline double pair_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline void score(const VariableExponent& p, PointPair& pr) {
  pr.jump = std::abs(p(std::span<const double>(pr.x)) - p(std::span<const double>(pr.y)));
  pr.value = pr.jump * log_e_plus(1.0 / pair_distance(pr.x, pr.y));
}

inline PointPair make_pair_at(const VariableExponent& p, std::vector<double> x,
                              std::span<const double> dir, double delta) {
  PointPair pr;
  pr.y = x;
  for (std::size_t a = 0; a < x.size(); ++a) pr.y[a] += delta * dir[a];
  pr.x = std::move(x);
  score(p, pr);
  return pr;
}

// Coordinate search over (x, log delta) with the direction fixed, delta kept
// in [lo, hi] and x in the box. Only improvements are accepted.
inline PointPair refine_pair(const VariableExponent& p, PointPair start, double lo, double hi,
                             double box, int steps) {
  const std::size_t n = start.x.size();
  double delta = pair_distance(start.x, start.y);
  std::vector<double> dir(n);
  for (std::size_t a = 0; a < n; ++a) dir[a] = (start.y[a] - start.x[a]) / delta;
  double log_step = 0.25;
  double shift = 0.25;  // in units of delta
  for (int sweep = 0; sweep < steps; ++sweep) {
    bool improved = false;
    for (std::size_t coord = 0; coord <= n && !improved; ++coord) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> x = start.x;
        double d = delta;
        if (coord == 0) d = delta * std::exp(sign * log_step);
        else x[coord - 1] += sign * shift * delta;
        if (d < lo || d > hi || std::abs(x[coord == 0 ? 0 : coord - 1]) > box) continue;
        PointPair trial = make_pair_at(p, std::move(x), dir, d);
        if (trial.value > start.value) {
          start = std::move(trial);
          delta = d;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      log_step *= 0.5;
      shift *= 0.5;
    }
  }
  return start;
}

}  // namespace detail

// Pairs are drawn per decade of |x - y|, from the coarsest decade down to
// delta_min, each decade from its own RNG stream. A uniform pair in the box
// that sets a decade record is refined by coordinate search inside the
// decade. Each decade also halves the best pairs of the previous decade,
// keeping the half with the larger jump, so a discontinuity is followed
// down to every scale.
inline ModulusEstimate log_holder_modulus(const VariableExponent& p,
                                          const PairSamplerConfig& cfg = {}) {
  if (!(cfg.delta_min > 0.0 && cfg.delta_min < cfg.delta_max))
    throw BadConfig("log_holder_modulus: need 0 < delta_min < delta_max");
  using detail::PointPair;
  ModulusEstimate est;
  const std::size_t n = static_cast<std::size_t>(p.dimension());
  std::vector<double> dir(n);

  const int d_hi = static_cast<int>(std::ceil(std::log10(cfg.delta_max) - 1e-12));
  const int d_lo = static_cast<int>(std::floor(std::log10(cfg.delta_min) + 1e-12));
  std::vector<PointPair> zoom;
  double running = 0.0;
  bool have_witness = false;
  for (int d = d_hi - 1; d >= d_lo; --d) {
    const double lo = std::max(std::pow(10.0, d), cfg.delta_min);
    const double hi = std::min(std::pow(10.0, d + 1), cfg.delta_max);
    if (!(lo < hi)) continue;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(d) + (1 << 20)));
    std::vector<PointPair> decade;
    double record = -1.0;
    for (std::size_t k = 0; k < cfg.pairs_per_decade; ++k) {
      std::vector<double> x(n);
      for (auto& c : x) c = rng.uniform(-cfg.box_radius, cfg.box_radius);
      const double delta = rng.log_uniform(lo, hi);
      rng.direction(dir);
      PointPair pr = detail::make_pair_at(p, std::move(x), dir, delta);
      ++est.samples;
      if (pr.value > record) {
        pr = detail::refine_pair(p, std::move(pr), lo, hi, cfg.box_radius, cfg.refine_steps);
        record = pr.value;
      }
      decade.push_back(std::move(pr));
    }
    for (auto pr : zoom) {
      while (detail::pair_distance(pr.x, pr.y) >= hi) {
        std::vector<double> mid(n);
        for (std::size_t a = 0; a < n; ++a) mid[a] = 0.5 * (pr.x[a] + pr.y[a]);
        const double pm = p(std::span<const double>(mid));
        const double left = std::abs(p(std::span<const double>(pr.x)) - pm);
        const double right = std::abs(pm - p(std::span<const double>(pr.y)));
        if (left >= right) pr.y = mid;
        else pr.x = mid;
      }
      detail::score(p, pr);
      ++est.samples;
      decade.push_back(std::move(pr));
    }
    double best = 0.0;
    for (const auto& pr : decade) {
      best = std::max(best, pr.value);
      if (!have_witness || pr.value > est.c_est) {
        est.c_est = pr.value;
        est.witness_x = point_at(pr.x);
        est.witness_y = point_at(pr.y);
        have_witness = true;
      }
    }
    running = std::max(running, best);
    est.trace.emplace_back(std::pow(10.0, d), running);
    std::stable_sort(decade.begin(), decade.end(),
                     [](const PointPair& a, const PointPair& b) { return a.jump > b.jump; });
    decade.resize(std::min<std::size_t>(decade.size(), static_cast<std::size_t>(cfg.zoom_pairs)));
    zoom = std::move(decade);
  }
  est.divergent = detail::grows_at_tail(est.trace);
  return est;
}

// ---------------------------------------------------------------------------
// Decay modulus at infinity: sup |p(x) - p_inf| log(e + |x|).

// Radial-exponent samples are evaluated through log|x|, so schedules such
// as |x| = exp(exp(pi/2 + 2 pi m)) are reachable. Bins are unit intervals of
// log log |x| (or each explicit radius); the running max is traced in order
// of growing |x|. With p_inf = nullopt the mean of p over the outermost bin
// is used.
inline ModulusEstimate infinity_modulus(const VariableExponent& p, std::optional<double> p_inf,
                                        const SamplerConfig& cfg) {
  ModulusEstimate est;
  struct Sample {
    SamplePoint point;
    double value;
    double bin;
  };
  std::vector<Sample> samples;
  for (auto& s : draw_samples(cfg, p.dimension())) {
    const auto v = p.at(s);
    if (!v || !std::isfinite(s.log_radius)) continue;
    const double ll = s.log_radius > 0.0 ? std::log(s.log_radius) : -1.0;
    const double bin = cfg.log_log_radii.empty() ? std::floor(std::max(ll, -1.0)) : ll;
    samples.push_back({s, *v, bin});
  }
  if (samples.empty()) throw BadConfig("infinity_modulus: no evaluable samples");
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) { return a.bin < b.bin; });
  if (p_inf) {
    est.p_inf = *p_inf;
  } else {
    const double outer = samples.back().bin;
    std::vector<double> shell;
    for (const auto& s : samples)
      if (s.bin == outer) shell.push_back(s.value);
    est.p_inf = pairwise_sum(shell) / static_cast<double>(shell.size());
    est.p_inf_auto = true;
  }
  double running = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const double v = std::abs(s.value - est.p_inf) * log_e_plus_exp(s.point.log_radius);
    ++est.samples;
    if (v > running || i == 0) {
      running = std::max(running, v);
      if (v >= est.c_est) {
        est.c_est = v;
        est.witness_x = s.point;
      }
    }
    if (i + 1 == samples.size() || samples[i + 1].bin != s.bin)
      est.trace.emplace_back(s.bin, running);
  }
  est.divergent = detail::grows_at_tail(est.trace);
  return est;
}

// ---------------------------------------------------------------------------
// Nekvinda conditions (N1)-(N3)

struct NekvindaConfig {
  int k = 1;
  double alpha = 1.0;
  double c = 0.5;
  int annuli = 40;
  double x_max = 1e12;             // right end of the (N2) sampling range
  std::size_t points_per_decade = 200;
  int quad_points = 128;           // radial midpoint nodes per annulus

  Json to_json() const {
    return {{"k", k},
            {"alpha", alpha},
            {"c", c},
            {"annuli", annuli},
            {"x_max", x_max},
            {"points_per_decade", points_per_decade},
            {"quad_points", quad_points}};
  }
};

struct NekvindaReport {
  struct N1 {
    double s_lower, s_upper;
    std::string monotone;
    bool monotone_on_ladder;
    bool pass;
  } n1;
  struct N2 {
    int k;
    double alpha;
    double K_est;
    double witness_x;
    std::vector<std::pair<int, double>> trace;  // (decade of x, running sup)
    double tail_change;
    bool numeric_derivative;
    bool pass;
  } n2;
  struct N3 {
    double c;
    double ball_integral;                // |x| < 1
    std::vector<double> annulus_integrals;  // [2^m, 2^{m+1}), m = 0..
    double partial_sum;
    std::vector<double> tail_ratios;
    bool pass;
  } n3;
  bool pass = false;

  Json to_json() const {
    Json tr = Json::array();
    for (const auto& [d, v] : n2.trace) tr.push_back({d, v});
    return {{"n1",
             {{"s_lower", n1.s_lower},
              {"s_upper", n1.s_upper},
              {"monotone", n1.monotone},
              {"monotone_on_ladder", n1.monotone_on_ladder},
              {"pass", n1.pass}}},
            {"n2",
             {{"k", n2.k},
              {"alpha", n2.alpha},
              {"K_est", n2.K_est},
              {"witness_x", n2.witness_x},
              {"trace", tr},
              {"tail_change", n2.tail_change},
              {"numeric_derivative", n2.numeric_derivative},
              {"pass", n2.pass}}},
            {"n3",
             {{"c", n3.c},
              {"ball_integral", n3.ball_integral},
              {"annulus_integrals", n3.annulus_integrals},
              {"partial_sum", n3.partial_sum},
              {"tail_ratios", n3.tail_ratios},
              {"pass", n3.pass}}},
            {"pass", pass}};
  }
};

// Points of R^n where the radial integrand of (N3) is sampled at radius r:
// both signs in 1-D, the 2n axis directions otherwise.
namespace detail {

inline double angular_mean(const VariableExponent& p, const RadialProfile& s, double r,
                           double c) {
  const std::size_t n = static_cast<std::size_t>(p.dimension());
  const double sr = s(r);
  double total = 0.0;
  std::vector<double> x(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (double sign : {1.0, -1.0}) {
      std::fill(x.begin(), x.end(), 0.0);
      x[a] = sign * r;
      const double gap = std::abs(p(std::span<const double>(x)) - sr);
      // The set E = {p != s}; floating equality is replaced by a threshold.
      total += gap > 1e-14 ? std::pow(c, 1.0 / gap) : 0.0;
    }
  }
  return total / static_cast<double>(2 * n);
}

// int_{a <= |x| < b} c^{1/|p - s|} dx by a midpoint rule in r times the
// sphere area r^{n-1} |S^{n-1}|.
inline double shell_integral(const VariableExponent& p, const RadialProfile& s, double a,
                             double b, double c, int nodes) {
  const int n = p.dimension();
  const double h = (b - a) / nodes;
  std::vector<double> terms(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const double r = a + (i + 0.5) * h;
    terms[static_cast<std::size_t>(i)] =
        angular_mean(p, s, r, c) * unit_sphere_area(n) * std::pow(r, n - 1) * h;
  }
  return pairwise_sum(terms);
}

}  // namespace detail

// Geometric decay test for the (N3) partial integrals: ratio < 0.9 over the
// last 5 annuli (or all of them zero).
inline constexpr double kN3Ratio = 0.9;
inline constexpr int kN3TailAnnuli = 5;

inline NekvindaReport nekvinda_check(const RadialProfile& s, const VariableExponent& p,
                                     const NekvindaConfig& cfg) {
  if (!(cfg.c > 0.0 && cfg.c < 1.0)) throw BadConfig("nekvinda_check: c must lie in (0, 1)");
  if (cfg.k < 1) throw BadConfig("nekvinda_check: k must be at least 1");
  if (!(cfg.alpha > 0.0)) throw BadConfig("nekvinda_check: alpha must be positive");
  if (cfg.annuli < kN3TailAnnuli + 1) throw BadConfig("nekvinda_check: too few annuli");
  NekvindaReport rep;

  const double ek = iterated_exp(cfg.k);
  if (!std::isfinite(ek) || !(ek < cfg.x_max))
    throw BadConfig("nekvinda_check: e_k exceeds the sampling range");

  // (N1) and monotonicity on a log-spaced ladder.
  rep.n1.s_lower = s.lower();
  rep.n1.s_upper = s.upper();
  rep.n1.monotone = to_string(s.monotonicity());
  {
    const int steps = 1000;
    bool up = true, down = true;
    double prev = s(0.0);
    for (int i = 1; i <= steps; ++i) {
      const double r = std::expm1(std::log1p(cfg.x_max) * i / steps);
      const double v = s(r);
      up = up && v >= prev;
      down = down && v <= prev;
      prev = v;
    }
    rep.n1.monotone_on_ladder =
        s.monotonicity() == Monotonicity::nondecreasing   ? up
        : s.monotonicity() == Monotonicity::nonincreasing ? down
                                                          : false;
  }
  rep.n1.pass = rep.n1.s_lower > 1.0 && std::isfinite(rep.n1.s_upper) &&
                rep.n1.s_lower <= rep.n1.s_upper && rep.n1.monotone_on_ladder;

  // (N2): K_est = sup |s'(x)| / b_{k,alpha}(x) on x in [e_k, x_max].
  rep.n2.k = cfg.k;
  rep.n2.alpha = cfg.alpha;
  rep.n2.numeric_derivative = s.numeric_derivative();
  rep.n2.K_est = 0.0;
  rep.n2.witness_x = ek;
  {
    const double l0 = std::log10(ek), l1 = std::log10(cfg.x_max);
    const auto total = static_cast<std::size_t>(std::ceil((l1 - l0) * cfg.points_per_decade));
    double running = 0.0;
    int decade = static_cast<int>(std::floor(l0));
    for (std::size_t i = 0; i <= total; ++i) {
      const double lx = l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(total);
      const double x = std::max(ek, std::pow(10.0, lx));
      const int d = static_cast<int>(std::floor(lx));
      if (d != decade) {
        rep.n2.trace.emplace_back(decade, running);
        decade = d;
      }
      const double ratio = std::abs(s.derivative(x)) / b_weight(cfg.k, cfg.alpha, x);
      if (ratio > running) {
        running = ratio;
        rep.n2.K_est = ratio;
        rep.n2.witness_x = x;
      }
    }
    rep.n2.trace.emplace_back(decade, running);
    rep.n2.tail_change = 0.0;
    if (rep.n2.trace.size() >= 3) {
      const double last = rep.n2.trace.back().second;
      const double before = rep.n2.trace[rep.n2.trace.size() - 3].second;
      rep.n2.tail_change = last > 0.0 ? (last - before) / last : 0.0;
    }
    rep.n2.pass = rep.n2.trace.size() >= 3 && rep.n2.tail_change < 0.05;
  }

  // (N3): partial integrals over |x| < 1 and dyadic annuli.
  rep.n3.c = cfg.c;
  rep.n3.ball_integral = detail::shell_integral(p, s, 0.0, 1.0, cfg.c, cfg.quad_points);
  double sum = rep.n3.ball_integral;
  for (int m = 0; m < cfg.annuli; ++m) {
    const double a = std::ldexp(1.0, m);
    const double v = detail::shell_integral(p, s, a, 2 * a, cfg.c, cfg.quad_points);
    rep.n3.annulus_integrals.push_back(v);
    sum += v;
  }
  rep.n3.partial_sum = sum;
  {
    const auto& A = rep.n3.annulus_integrals;
    bool ok = true;
    for (std::size_t i = A.size() - kN3TailAnnuli; i < A.size(); ++i) {
      if (A[i - 1] == 0.0) {
        rep.n3.tail_ratios.push_back(0.0);
        ok = ok && A[i] == 0.0;
        continue;
      }
      const double ratio = A[i] / A[i - 1];
      rep.n3.tail_ratios.push_back(ratio);
      ok = ok && ratio < kN3Ratio;
    }
    rep.n3.pass = ok;
  }

  rep.pass = rep.n1.pass && rep.n2.pass && rep.n3.pass;
  return rep;
}

// Analytic verdicts for the (N3) integral used as ground truth in tests.
enum class GapModel {
  inverse_log,      // |p - s| = 1 / log r: integrand r^{log c}
  bounded_support,  // E bounded
};

inline bool n3_oracle(GapModel model, double c, int n) {
  if (!(c > 0.0 && c < 1.0)) throw BadConfig("n3_oracle: c must lie in (0, 1)");
  switch (model) {
    case GapModel::inverse_log: return std::log(c) < -static_cast<double>(n);
    case GapModel::bounded_support: return true;
  }
  return false;
}

}  // namespace vexlab
