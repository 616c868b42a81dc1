#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"
#include "vexlab/random.hpp"

namespace vexlab {

using ScalarField = std::function<double(std::span<const double>)>;

// Axis-parallel cube.
struct Cube {
  std::vector<double> center;
  double side = 1.0;

  int dimension() const noexcept { return static_cast<int>(center.size()); }
  double measure() const { return std::pow(side, dimension()); }
};

inline Json to_json(const Cube& q) { return {{"center", q.center}, {"side", q.side}}; }

inline void validate(const Cube& q) {
  if (!(q.side > 0.0) || !std::isfinite(q.side)) throw BadParameter("cube side must be positive");
  if (q.center.empty()) throw BadParameter("cube needs a center");
  for (double c : q.center)
    if (!std::isfinite(c)) throw BadParameter("cube center must be finite");
}

// f at the points-per-axis midpoint nodes of Q, row-major.
inline std::vector<double> node_values(const ScalarField& f, const Cube& q, std::size_t points) {
  if (points < 2) throw BadParameter("quadrature needs at least 2 points per axis");
  validate(q);
  const std::size_t n = q.center.size();
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= points;
  std::vector<double> out(total);
  std::vector<double> x(n);
  const double h = q.side / static_cast<double>(points);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t a = n; a-- > 0;) {
      const std::size_t j = rest % points;
      rest /= points;
      x[a] = q.center[a] - 0.5 * q.side + (static_cast<double>(j) + 0.5) * h;
    }
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite value " << v << " inside cube of side " << q.side;
      throw NonFiniteSample(os.str());
    }
    out[i] = v;
  }
  return out;
}

inline double mean_of(std::span<const double> v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

// Mean oscillation of node values: average of |v - mean(v)|.
inline double oscillation_of(std::span<const double> v) {
  const double m = mean_of(v);
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - m);
  return mean_of(dev);
}

// f_Q by the midpoint rule.
inline double cube_mean(const ScalarField& f, const Cube& q, std::size_t points = 64) {
  return mean_of(node_values(f, q, points));
}

// Omega(f, Q) = |Q|^-1 int_Q |f - f_Q|, both integrals on the same nodes.
inline double mean_oscillation(const ScalarField& f, const Cube& q, std::size_t points = 64) {
  return oscillation_of(node_values(f, q, points));
}

// Omega with automatic refinement: the rule doubles while the coarse and fine
// estimates disagree by more than 1%, up to max_points per axis.
inline double mean_oscillation_adaptive(const ScalarField& f, const Cube& q,
                                        std::size_t points = 64, std::size_t max_points = 1024) {
  double coarse = mean_oscillation(f, q, std::max<std::size_t>(2, points / 2));
  double fine = mean_oscillation(f, q, points);
  while (std::abs(fine - coarse) > 0.01 * std::abs(fine) + 1e-14 && points * 2 <= max_points) {
    points *= 2;
    coarse = fine;
    fine = mean_oscillation(f, q, points);
  }
  return fine;
}

// l(Q) = log(e + max{|Q|, |Q|^-1, |cen_Q|}).
inline double cube_weight(const Cube& q) {
  validate(q);
  const double m = q.measure();
  return std::log(std::numbers::e + std::max({m, 1.0 / m, euclidean_norm(q.center)}));
}

// ---------------------------------------------------------------------------
// Supremum search for l(Q) Omega(f, Q)

struct SupSearchConfig {
  int dimension = 1;
  double side_lo = 1e-6;
  double side_hi = 1e6;
  double center_radius = 1e8;
  std::size_t samples_per_decade = 1000;
  int refine_steps = 20;
  std::size_t quad_points = 64;
  std::size_t max_quad_points = 1024;
  std::uint64_t seed = 1;

  Json to_json() const {
    return {{"dimension", dimension},
            {"side_range", {side_lo, side_hi}},
            {"center_radius", center_radius},
            {"samples_per_decade", samples_per_decade},
            {"refine_steps", refine_steps},
            {"quad_points", quad_points},
            {"max_quad_points", max_quad_points},
            {"seed", seed}};
  }
};

struct SupSearchResult {
  double sup = 0.0;
  Cube witness;
  // (decade, running sup) in increasing decade order.
  std::vector<std::pair<int, double>> trace;
  // Relative change of the running sup over the last two decades.
  double tail_change = 0.0;
  bool divergent = false;
  std::size_t cubes = 0;
  SupSearchConfig config;

  Json to_json() const {
    Json tr = Json::array();
    for (const auto& [d, s] : trace) tr.push_back({d, s});
    return {{"sup", sup},
            {"witness", vexlab::to_json(witness)},
            {"trace", tr},
            {"tail_change", tail_change},
            {"divergent", divergent},
            {"cubes", cubes},
            {"seed", config.seed},
            {"config", config.to_json()}};
  }
};

// The "finite sup" criterion: running sup moved less than 5% over the
// last two scale decades.
inline constexpr double kStableTailChange = 0.05;

namespace detail {

// Trace tail change: (T[last] - T[last-2]) / T[last], 0 when all zero.
inline double tail_change(const std::vector<std::pair<int, double>>& trace) {
  if (trace.size() < 2) return 0.0;
  const double last = trace.back().second;
  const double before = trace[trace.size() >= 3 ? trace.size() - 3 : 0].second;
  if (last <= 0.0) return 0.0;
  return (last - before) / last;
}

struct Candidate {
  Cube cube;
  double value;
};

}  // namespace detail

inline double weighted_oscillation(const ScalarField& f, const Cube& q,
                                   const SupSearchConfig& cfg) {
  return cube_weight(q) * mean_oscillation_adaptive(f, q, cfg.quad_points, cfg.max_quad_points);
}

// Coordinate search in (log side, center) from `start` with side kept in
// [side_lo, side_hi] and |center| <= center_radius. Only improvements are
// accepted.
inline detail::Candidate refine_cube(const ScalarField& f, detail::Candidate start,
                                     const SupSearchConfig& cfg, double side_lo, double side_hi,
                                     std::size_t& evaluations) {
  const std::size_t n = start.cube.center.size();
  double log_step = 0.25;
  double center_frac = 0.25;
  auto admissible = [&](const Cube& q) {
    return q.side >= side_lo && q.side <= side_hi &&
           euclidean_norm(q.center) <= cfg.center_radius;
  };
  for (int sweep = 0; sweep < cfg.refine_steps; ++sweep) {
    bool improved = false;
    for (std::size_t coord = 0; coord <= n; ++coord) {
      for (double sign : {1.0, -1.0}) {
        Cube trial = start.cube;
        if (coord == 0) trial.side = start.cube.side * std::exp(sign * log_step);
        else trial.center[coord - 1] += sign * center_frac * start.cube.side;
        if (!admissible(trial)) continue;
        const double v = weighted_oscillation(f, trial, cfg);
        ++evaluations;
        if (v > start.value) {
          start = {trial, v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      log_step *= 0.5;
      center_frac *= 0.5;
    }
  }
  return start;
}

// Estimates sup_Q l(Q) Omega(f, Q) over cubes with side in [side_lo, side_hi]
// and |center| <= center_radius.
//
// Each scale decade is a stratum with its own RNG stream (seed, decade), so
// the cube set of a decade does not depend on the other decades. Within a
// stratum, sides are log-uniform; a quarter of the centers are uniform in a
// ball of radius 4*side + 2e around the origin, the rest have log-uniform
// norm in [1e-3, center_radius]. Every sample that sets a new stratum record
// is refined by coordinate search inside the stratum. Records of a prefix stay records when the
// sample count grows, so the estimate is monotone in the configuration.
inline SupSearchResult oscillation_sup(const ScalarField& f, const SupSearchConfig& cfg) {
  if (!(cfg.side_lo > 0.0 && cfg.side_lo < cfg.side_hi))
    throw BadConfig("oscillation_sup: need 0 < side_lo < side_hi");
  if (cfg.samples_per_decade < 1) throw BadConfig("oscillation_sup: need at least one sample");
  if (cfg.dimension < 1) throw BadConfig("oscillation_sup: dimension must be positive");
  SupSearchResult res;
  res.config = cfg;
  const std::size_t n = static_cast<std::size_t>(cfg.dimension);
  const int d_lo = static_cast<int>(std::floor(std::log10(cfg.side_lo) + 1e-12));
  const int d_hi = static_cast<int>(std::ceil(std::log10(cfg.side_hi) - 1e-12));
  detail::Candidate best{Cube{std::vector<double>(n, 0.0), cfg.side_lo}, -1.0};
  std::vector<double> dir(n);
  for (int d = d_lo; d < d_hi; ++d) {
    const double lo = std::max(std::pow(10.0, d), cfg.side_lo);
    const double hi = std::min(std::pow(10.0, d + 1), cfg.side_hi);
    if (!(lo < hi)) continue;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(d) + (1 << 20)));
    detail::Candidate stratum_best{Cube{}, -1.0};
    std::vector<detail::Candidate> records;
    for (std::size_t k = 0; k < cfg.samples_per_decade; ++k) {
      Cube q;
      q.side = rng.log_uniform(lo, hi);
      const bool local = rng.uniform() < 0.25;
      const double radius =
          local ? rng.uniform(0.0, std::min(cfg.center_radius, 4.0 * q.side + 2.0 * std::numbers::e))
                : rng.log_uniform(std::min(1e-3, cfg.center_radius), cfg.center_radius);
      rng.direction(dir);
      q.center.resize(n);
      for (std::size_t a = 0; a < n; ++a) q.center[a] = radius * dir[a];
      const double v = weighted_oscillation(f, q, cfg);
      ++res.cubes;
      if (v > stratum_best.value) {
        stratum_best = {q, v};
        records.push_back(stratum_best);
      }
    }
    for (const auto& r : records) {
      const auto refined = refine_cube(f, r, cfg, lo, hi, res.cubes);
      if (refined.value > stratum_best.value) stratum_best = refined;
    }
    if (stratum_best.value > best.value) best = stratum_best;
    res.trace.emplace_back(d, std::max(0.0, best.value));
  }
  res.sup = std::max(0.0, best.value);
  res.witness = best.cube;
  res.tail_change = detail::tail_change(res.trace);
  res.divergent = res.tail_change >= kStableTailChange;
  return res;
}

// Random cubes with log-uniform side in [side_lo, side_hi] and log-uniform
// center norm in [1e-3, center_radius].
inline std::vector<Cube> random_cubes(std::size_t count, double side_lo, double side_hi,
                                      double center_radius, int dim, std::uint64_t seed) {
  Rng rng(seed, 7);
  std::vector<Cube> out;
  std::vector<double> dir(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < count; ++k) {
    Cube q;
    q.side = rng.log_uniform(side_lo, side_hi);
    const double r = rng.log_uniform(std::min(1e-3, center_radius), center_radius);
    rng.direction(dir);
    for (double c : dir) q.center.push_back(r * c);
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Omega(F o f, Q) <= 2 c Omega(f, Q) for Lipschitz F with constant c.

struct LipschitzCheckEntry {
  Cube cube;
  double lhs;
  double rhs;
  double slack;
  bool violation;
};

struct LipschitzCheckReport {
  std::vector<LipschitzCheckEntry> entries;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max lhs / rhs over cubes with rhs > 0

  Json to_json() const {
    return {{"cubes", entries.size()}, {"violations", violations}, {"max_ratio", max_ratio}};
  }
};

inline LipschitzCheckReport lipschitz_oscillation_check(const std::function<double(double)>& F,
                                                        double c, const ScalarField& f,
                                                        std::span<const Cube> cubes,
                                                        std::size_t points = 64) {
  if (!(c > 0.0)) throw BadParameter("lipschitz check: constant must be positive");
  LipschitzCheckReport rep;
  for (const auto& q : cubes) {
    auto v = node_values(f, q, points);
    const double osc = oscillation_of(v);
    for (auto& t : v) t = F(t);
    const double lhs = oscillation_of(v);
    const double rhs = 2.0 * c * osc;
    const bool bad = lhs > rhs + 1e-9 * (1.0 + rhs);
    rep.entries.push_back({q, lhs, rhs, rhs - lhs, bad});
    if (bad) ++rep.violations;
    if (rhs > 0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
  }
  return rep;
}

}  // namespace vexlab
