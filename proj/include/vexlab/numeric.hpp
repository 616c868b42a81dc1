#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace vexlab {

// Pairwise summation in a fixed split order: the result depends only on the
// input sequence, so repeated runs are bit-identical.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kLeaf = 8;
  if (v.size() <= kLeaf) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Error-free sum: a + b == s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

// Overflow-safe for coordinates near the top of the double range.
inline double euclidean_norm(std::span<const double> x) {
  switch (x.size()) {
    case 0: return 0.0;
    case 1: return std::abs(x[0]);
    case 2: return std::hypot(x[0], x[1]);
    case 3: return std::hypot(x[0], x[1], x[2]);
  }
  double scale = 0.0;
  for (double c : x) scale = std::max(scale, std::abs(c));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double c : x) s += (c / scale) * (c / scale);
  return scale * std::sqrt(s);
}

// log(e + exp(u)) without overflowing for large u.
inline double log_e_plus_exp(double u) {
  if (u > 1.0) return u + std::log1p(std::exp(1.0 - u));
  return std::log(std::numbers::e + std::exp(u));
}

// log(e + t) for t >= 0.
inline double log_e_plus(double t) { return std::log(std::numbers::e + t); }

// Volume of the unit ball and surface area of the unit sphere in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

}  // namespace vexlab
