#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/grid.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/random.hpp"

namespace vexlab {

enum class ProbeKind { indicators, gaussians, random_steps };

inline const char* to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::indicators: return "indicators";
    case ProbeKind::gaussians: return "gaussians";
    case ProbeKind::random_steps: return "random-steps";
  }
  return "?";
}

inline ProbeKind probe_kind_from_string(const std::string& s) {
  if (s == "indicators") return ProbeKind::indicators;
  if (s == "gaussians") return ProbeKind::gaussians;
  if (s == "random-steps") return ProbeKind::random_steps;
  throw SpecError("unknown probe family '" + s + "'");
}

enum class ScaleSet { dyadic, all };

struct ProbeConfig {
  std::size_t count = 50;  // per family
  std::vector<ProbeKind> kinds{ProbeKind::random_steps};
  std::vector<std::string> functions;  // extra expressions, probed as given
  ScaleSet scales = ScaleSet::dyadic;
  bool half_resolution = true;
  std::uint64_t seed = 1;

  Json to_json() const {
    Json k = Json::array();
    for (auto kind : kinds) k.push_back(to_string(kind));
    return {{"count", count},
            {"kinds", k},
            {"functions", functions},
            {"scales", scales == ScaleSet::dyadic ? "dyadic" : "all"},
            {"half_resolution", half_resolution},
            {"seed", seed}};
  }
};

struct ProbeFunction {
  std::string id;
  std::string kind;
  Json description;
  ScalarField f;
};

struct ProbeRow {
  std::string id;
  double norm_f;
  double norm_mf;
  double ratio;
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  std::size_t skipped = 0;  // functions that vanish on the grid
  double max_ratio = 0.0;
  std::string witness;
  Json witness_description;
  std::optional<double> half_max_ratio;
  GridSpec grid;
  ProbeConfig config;

  Json to_json() const {
    Json r = Json::array();
    for (const auto& row : rows)
      r.push_back({{"id", row.id}, {"norm_f", row.norm_f}, {"norm_Mf", row.norm_mf}, {"ratio", row.ratio}});
    Json j = {{"grid", grid.to_json()},
              {"config", config.to_json()},
              {"rows", r},
              {"skipped", skipped},
              {"max_ratio", max_ratio},
              {"witness", witness},
              {"witness_function", witness_description}};
    if (half_max_ratio) {
      j["half_resolution"] = {{"grid", grid.rescaled(0.5).to_string()},
                              {"max_ratio", *half_max_ratio},
                              {"relative_change", max_ratio > 0 ? std::abs(max_ratio - *half_max_ratio) / max_ratio : 0.0}};
    }
    return j;
  }
};

namespace detail {

struct Box {
  std::vector<double> lo, hi;
};

inline bool inside(std::span<const double> x, const Box& b) {
  for (std::size_t a = 0; a < x.size(); ++a)
    if (x[a] < b.lo[a] || x[a] >= b.hi[a]) return false;
  return true;
}

inline Json box_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

}  // namespace detail

// Test functions drawn from stream (seed, 100 + kind), so each family is
// independent of the others.
inline std::vector<ProbeFunction> probe_functions(const GridSpec& grid, const ProbeConfig& cfg) {
  std::vector<ProbeFunction> out;
  const std::size_t n = static_cast<std::size_t>(grid.dimension());
  double width = std::numeric_limits<double>::infinity();
  for (const auto& a : grid.axes()) width = std::min(width, a.hi - a.lo);

  for (std::size_t i = 0; i < cfg.functions.size(); ++i) {
    auto e = std::make_shared<const Expression>(Expression::parse(cfg.functions[i]));
    out.push_back({"fn" + std::to_string(i), "expression", cfg.functions[i],
                   [e](std::span<const double> x) { return (*e)(x); }});
  }

  for (auto kind : cfg.kinds) {
    Rng rng(cfg.seed, 100 + static_cast<std::uint64_t>(kind));
    for (std::size_t k = 0; k < cfg.count; ++k) {
      const std::string id = std::string(to_string(kind)) + "-" + std::to_string(k);
      if (kind == ProbeKind::indicators) {
        const double side = rng.log_uniform(width * 1e-3, width);
        detail::Box b;
        for (const auto& a : grid.axes()) {
          const double lo = rng.uniform(a.lo, a.hi - side);
          b.lo.push_back(lo);
          b.hi.push_back(lo + side);
        }
        out.push_back({id, "indicator", detail::box_json(b),
                       [b](std::span<const double> x) { return detail::inside(x, b) ? 1.0 : 0.0; }});
      } else if (kind == ProbeKind::gaussians) {
        // Truncated at 4 sigma, with the cut cube inside the box.
        const double sigma = rng.log_uniform(width * 1e-3, width / 8.0);
        std::vector<double> c;
        detail::Box b;
        for (const auto& a : grid.axes()) {
          c.push_back(rng.uniform(a.lo + 4 * sigma, a.hi - 4 * sigma));
          b.lo.push_back(c.back() - 4 * sigma);
          b.hi.push_back(c.back() + 4 * sigma);
        }
        Json d = {{"center", c}, {"sigma", sigma}, {"cutoff", 4.0}};
        out.push_back({id, "gaussian", d, [c, sigma, b](std::span<const double> x) {
                         if (!detail::inside(x, b)) return 0.0;
                         double r2 = 0.0;
                         for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
                         return std::exp(-r2 / (2 * sigma * sigma));
                       }});
      } else {
        // Up to 8 dyadic cubes of the box with log-uniform amplitudes.
        const std::size_t pieces = 1 + rng.below(8);
        std::vector<detail::Box> boxes;
        std::vector<double> amps;
        Json d = Json::array();
        for (std::size_t m = 0; m < pieces; ++m) {
          const int level = 1 + static_cast<int>(rng.below(6));
          const std::uint64_t cells = std::uint64_t{1} << level;
          detail::Box b;
          for (std::size_t a = 0; a < n; ++a) {
            const auto& ax = grid.axis(static_cast<int>(a));
            const double len = (ax.hi - ax.lo) / static_cast<double>(cells);
            const double lo = ax.lo + len * static_cast<double>(rng.below(cells));
            b.lo.push_back(lo);
            b.hi.push_back(lo + len);
          }
          amps.push_back(rng.log_uniform(1e-3, 1e3));
          d.push_back({{"level", level}, {"box", detail::box_json(b)}, {"amplitude", amps.back()}});
          boxes.push_back(std::move(b));
        }
        // Overlapping pieces: the later piece wins.
        out.push_back({id, "random-step", d, [boxes, amps](std::span<const double> x) {
                         double v = 0.0;
                         for (std::size_t m = 0; m < boxes.size(); ++m)
                           if (detail::inside(x, boxes[m])) v = amps[m];
                         return v;
                       }});
      }
    }
  }
  return out;
}

inline double probe_ratio(const ScalarField& f, const VariableExponent& p, const GridSpec& grid,
                          ScaleSet scales, double* norm_f = nullptr, double* norm_mf = nullptr) {
  const auto g = sample_function(f, grid);
  const double nf = luxemburg_norm(g, p);
  if (norm_f) *norm_f = nf;
  if (nf == 0.0) return 0.0;
  const auto mf = scales == ScaleSet::dyadic ? maximal_function(g)
                                             : maximal_function(g, all_scales(grid));
  const double nm = luxemburg_norm(mf, p);
  if (norm_mf) *norm_mf = nm;
  return nm / nf;
}

// Ratios ||Mf|| / ||f|| of the discretized maximal operator over a test
// family; the maximum is a lower estimate of the operator norm on the grid.
inline ProbeTable boundedness_probe(const VariableExponent& p, const ProbeConfig& cfg,
                                    const GridSpec& grid) {
  if (p.dimension() != grid.dimension())
    throw BadParameter("probe: exponent and grid dimensions differ");
  ProbeTable t;
  t.grid = grid;
  t.config = cfg;
  const auto fns = probe_functions(grid, cfg);
  bool have = false;
  for (const auto& fn : fns) {
    double nf = 0.0, nm = 0.0;
    const double ratio = probe_ratio(fn.f, p, grid, cfg.scales, &nf, &nm);
    if (nf == 0.0) {
      ++t.skipped;
      continue;
    }
    t.rows.push_back({fn.id, nf, nm, ratio});
    if (!have || ratio > t.max_ratio) {
      t.max_ratio = ratio;
      t.witness = fn.id;
      t.witness_description = fn.description;
      have = true;
    }
  }
  if (cfg.half_resolution) {
    const GridSpec half = grid.rescaled(0.5);
    double m = 0.0;
    for (const auto& fn : fns) m = std::max(m, probe_ratio(fn.f, p, half, cfg.scales));
    t.half_max_ratio = m;
  }
  return t;
}

}  // namespace vexlab
