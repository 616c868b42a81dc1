#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"
#include "vexlab/random.hpp"

namespace vexlab {

// A sample location. Points with |x| beyond the double range are kept only
// through their log-radius; `x` is empty for them.
struct SamplePoint {
  std::vector<double> x;
  double log_radius = -std::numeric_limits<double>::infinity();

  bool representable() const noexcept { return !x.empty(); }
};

inline Json to_json(const SamplePoint& p) {
  Json j;
  if (p.representable()) j["x"] = p.x;
  else j["x"] = nullptr;
  j["log_radius"] = std::isfinite(p.log_radius) ? Json(p.log_radius) : Json(nullptr);
  return j;
}

// Point sampling over R^n at both ordinary and iterated-log scales.
//
// Half of the points are uniform in the box [-box_radius, box_radius]^n; the
// rest sit at |x| = exp(exp(v)) with v uniform in [-1, max_log_log_radius]
// and a uniform direction. An explicit `log_log_radii` list replaces the
// random radii (each entry v yields points at |x| = exp(exp(v))).
struct SamplerConfig {
  std::size_t samples = 10000;
  double box_radius = 16.0;
  double max_log_log_radius = 3.0;
  std::vector<double> log_log_radii;
  std::uint64_t seed = 1;

  Json to_json() const {
    return {{"samples", samples},
            {"box_radius", box_radius},
            {"max_log_log_radius", max_log_log_radius},
            {"log_log_radii", log_log_radii},
            {"seed", seed}};
  }
};

// Largest log-radius at which coordinates are still stored.
inline constexpr double kMaxRepresentableLogRadius = 700.0;

inline SamplePoint point_at_log_radius(double u, std::span<const double> direction) {
  SamplePoint p;
  p.log_radius = u;
  if (u <= kMaxRepresentableLogRadius) {
    const double r = std::exp(u);
    p.x.resize(direction.size());
    for (std::size_t i = 0; i < direction.size(); ++i) p.x[i] = r * direction[i];
  }
  return p;
}

inline SamplePoint point_at(std::vector<double> x) {
  SamplePoint p;
  const double r = euclidean_norm(x);
  p.log_radius = r > 0 ? std::log(r) : -std::numeric_limits<double>::infinity();
  p.x = std::move(x);
  return p;
}

// Samples in the order described above; stream 0 feeds the box, stream 1 the
// radial part, so changing one count does not perturb the other.
inline std::vector<SamplePoint> draw_samples(const SamplerConfig& cfg, int dim) {
  std::vector<SamplePoint> out;
  const auto n = static_cast<std::size_t>(dim);
  std::vector<double> dir(n);
  if (!cfg.log_log_radii.empty()) {
    Rng rng(cfg.seed, 1);
    const std::size_t per =
        std::max<std::size_t>(1, cfg.samples / cfg.log_log_radii.size());
    for (double v : cfg.log_log_radii) {
      for (std::size_t k = 0; k < per; ++k) {
        rng.direction(dir);
        out.push_back(point_at_log_radius(std::exp(v), dir));
      }
    }
    return out;
  }
  const std::size_t box = (cfg.samples + 1) / 2;
  Rng box_rng(cfg.seed, 0);
  for (std::size_t k = 0; k < box; ++k) {
    std::vector<double> x(n);
    for (auto& c : x) c = box_rng.uniform(-cfg.box_radius, cfg.box_radius);
    out.push_back(point_at(std::move(x)));
  }
  Rng rad_rng(cfg.seed, 1);
  for (std::size_t k = box; k < cfg.samples; ++k) {
    const double v = rad_rng.uniform(-1.0, cfg.max_log_log_radius);
    rad_rng.direction(dir);
    out.push_back(point_at_log_radius(std::exp(v), dir));
  }
  return out;
}

}  // namespace vexlab
