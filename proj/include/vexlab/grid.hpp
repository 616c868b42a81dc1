#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"

namespace vexlab {

using ScalarField = std::function<double(std::span<const double>)>;

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;

  double step() const noexcept { return (hi - lo) / static_cast<double>(count); }
  double center(std::size_t i) const noexcept {
    return lo + (static_cast<double>(i) + 0.5) * step();
  }
};

// Uniform cell-centred grid over a box in R^n, n <= 3. Flat indices are
// row-major with the first axis slowest.
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 3) throw BadParameter("grid dimension must be 1, 2 or 3");
    for (const auto& a : axes_) {
      if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi))
        throw BadParameter("grid axis needs finite lo < hi");
      if (a.count < 2) throw BadParameter("grid axis needs at least 2 cells");
    }
  }

  // "lo:hi:count" per axis, axes separated by commas.
  static GridSpec parse(std::string_view text) {
    std::vector<Axis> axes;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string part(text.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start));
      double lo = 0, hi = 0;
      long long count = 0;
      char tail = 0;
      if (std::sscanf(part.c_str(), "%lf:%lf:%lld%c", &lo, &hi, &count, &tail) != 3 || count < 0)
        throw SpecError("grid axis must be lo:hi:count, got '" + part + "'");
      axes.push_back({lo, hi, static_cast<std::size_t>(count)});
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    try {
      return GridSpec(std::move(axes));
    } catch (const BadParameter& e) {
      throw SpecError(std::string("grid: ") + e.what());
    }
  }

  int dimension() const noexcept { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }

  std::size_t size() const noexcept {
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.count;
    return n;
  }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    for (const auto& a : axes_) d.push_back(a.count);
    return d;
  }

  double cell_volume() const noexcept {
    double h = 1.0;
    for (const auto& a : axes_) h *= a.step();
    return h;
  }

  void center(std::size_t flat, std::span<double> out) const {
    for (std::size_t k = axes_.size(); k-- > 0;) {
      out[k] = axes_[k].center(flat % axes_[k].count);
      flat /= axes_[k].count;
    }
  }

  std::vector<double> center(std::size_t flat) const {
    std::vector<double> x(axes_.size());
    center(flat, x);
    return x;
  }

  // Same box with every cell count multiplied (factor 2) or divided (1/2).
  GridSpec rescaled(double factor) const {
    auto axes = axes_;
    for (auto& a : axes)
      a.count = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(a.count * factor)));
    return GridSpec(std::move(axes));
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (i) os << ',';
      os << axes_[i].lo << ':' << axes_[i].hi << ':' << axes_[i].count;
    }
    return os.str();
  }

  Json to_json() const {
    Json axes = Json::array();
    for (const auto& a : axes_) axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}});
    return {{"axes", axes}, {"cell_volume", cell_volume()}};
  }

 private:
  std::vector<Axis> axes_;
};

// Cell-centre samples of a function on a grid.
struct GridFunction {
  GridSpec grid;
  std::vector<double> values;

  double at(std::size_t flat) const { return values.at(flat); }
};

inline GridFunction sample_function(const ScalarField& f, const GridSpec& grid) {
  GridFunction out{grid, std::vector<double>(grid.size())};
  std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    grid.center(i, x);
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite sample " << v << " at cell " << i;
      throw NonFiniteSample(os.str());
    }
    out.values[i] = v;
  }
  return out;
}

inline GridFunction sample_function(const Expression& e, const GridSpec& grid) {
  return sample_function(ScalarField([&e](std::span<const double> x) { return e(x); }), grid);
}

// CSV with header "x1[,x2[,x3]],value".
inline std::string to_csv(const GridFunction& f) {
  std::string out;
  const int n = f.grid.dimension();
  for (int k = 0; k < n; ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "value\n";
  std::vector<double> x(static_cast<std::size_t>(n));
  char buf[32];
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.grid.center(i, x);
    for (double c : x) {
      std::snprintf(buf, sizeof buf, "%.17g,", c);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", f.values[i]);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Modular and Luxemburg norm

// Midpoint-rule modular lambda -> sum_i |f_i / lambda|^{p(x_i)} h with the
// exponent evaluated once per cell.
class Modular {
 public:
  Modular(const GridFunction& f, const VariableExponent& p)
      : h_(f.grid.cell_volume()), abs_(f.values.size()), exps_(f.values.size()) {
    std::vector<double> x(static_cast<std::size_t>(f.grid.dimension()));
    for (std::size_t i = 0; i < abs_.size(); ++i) {
      abs_[i] = std::abs(f.values[i]);
      f.grid.center(i, x);
      exps_[i] = p(x);
    }
    terms_.resize(abs_.size());
  }

  double operator()(double lambda) const {
    if (!(lambda > 0.0)) throw BadLambda("modular needs lambda > 0");
    for (std::size_t i = 0; i < abs_.size(); ++i)
      terms_[i] = abs_[i] == 0.0 ? 0.0 : std::pow(abs_[i] / lambda, exps_[i]);
    return pairwise_sum(terms_) * h_;
  }

  bool zero() const {
    return std::all_of(abs_.begin(), abs_.end(), [](double v) { return v == 0.0; });
  }

 private:
  double h_;
  std::vector<double> abs_;
  std::vector<double> exps_;
  mutable std::vector<double> terms_;
};

inline double modular_value(const GridFunction& f, const VariableExponent& p, double lambda) {
  if (!(lambda > 0.0)) throw BadLambda("modular needs lambda > 0");
  return Modular(f, p)(lambda);
}

struct NormResult {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int expansions = 0;
  int bisections = 0;

  Json to_json() const {
    return {{"norm", value},
            {"bracket", {bracket_lo, bracket_hi}},
            {"expansions", expansions},
            {"bisections", bisections}};
  }
};

// Luxemburg norm inf{lambda > 0 : I(f/lambda) <= 1}. The bracket starts at
// lambda = 1 and doubles (or halves) until the modular crosses 1, then
// bisects to relative width tol. Returns the bracket midpoint.
inline NormResult luxemburg_norm_detailed(const GridFunction& f, const VariableExponent& p,
                                          double tol = 1e-10) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw BadParameter("luxemburg_norm: tol must be in (0, 1e-3]");
  NormResult r;
  const Modular I(f, p);
  if (I.zero()) return r;
  constexpr int kMaxExpansions = 1023;
  double lo = 1.0, hi = 1.0;
  if (I(1.0) > 1.0) {
    while (I(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++r.expansions > kMaxExpansions || !std::isfinite(hi))
        throw BracketFailure("luxemburg_norm: modular stays above 1 up to 2^1023");
    }
  } else {
    while (I(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++r.expansions > kMaxExpansions || lo == 0.0)
        throw BracketFailure("luxemburg_norm: modular stays below 1 down to 2^-1023");
    }
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (I(mid) > 1.0) lo = mid;
    else hi = mid;
    ++r.bisections;
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.value = 0.5 * (lo + hi);
  return r;
}

inline double luxemburg_norm(const GridFunction& f, const VariableExponent& p,
                             double tol = 1e-10) {
  return luxemburg_norm_detailed(f, p, tol).value;
}

// ---------------------------------------------------------------------------
// Maximal function

namespace detail {

// Calls fn(offset, stride) for every line of `dims` running along `axis`.
template <class Fn>
void for_each_line(const std::vector<std::size_t>& dims, std::size_t axis, Fn&& fn) {
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < dims.size(); ++k) stride *= dims[k];
  std::size_t outer = 1;
  for (std::size_t k = 0; k < axis; ++k) outer *= dims[k];
  const std::size_t block = stride * dims[axis];
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t s = 0; s < stride; ++s) fn(o * block + s, stride);
}

inline std::size_t product(const std::vector<std::size_t>& d) {
  std::size_t n = 1;
  for (auto v : d) n *= v;
  return n;
}

// Sums of every length-k window along `axis` via compensated 1-D prefix
// sums, so each window is accurate relative to its own size; the axis
// shrinks from N to N - k + 1. Applied once per axis this is the
// summed-area-table box sum.
inline std::vector<double> window_sums(const std::vector<double>& in,
                                       std::vector<std::size_t>& dims, std::size_t axis,
                                       std::size_t k) {
  const std::size_t n = dims[axis];
  auto out_dims = dims;
  out_dims[axis] = n - k + 1;
  std::vector<double> out(product(out_dims));
  std::vector<double> hi(n + 1), lo(n + 1);
  std::size_t out_stride = 1;
  for (std::size_t a = axis + 1; a < dims.size(); ++a) out_stride *= dims[a];
  const std::size_t in_block = out_stride * n;
  const std::size_t out_block = out_stride * (n - k + 1);
  for_each_line(dims, axis, [&](std::size_t off, std::size_t stride) {
    hi[0] = lo[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      two_sum(hi[i], in[off + i * stride], hi[i + 1], e);
      lo[i + 1] = lo[i] + e;
    }
    const std::size_t o = off / in_block, s = off % in_block;
    const std::size_t out_off = o * out_block + s;
    for (std::size_t i = 0; i + k <= n; ++i) {
      double d = 0.0, e = 0.0;
      two_sum(hi[i + k], -hi[i], d, e);
      out[out_off + i * stride] = d + (e + (lo[i + k] - lo[i]));
    }
  });
  dims = out_dims;
  return out;
}

// Reverses window_sums' shrink: cell i receives the max over window starts
// s with s <= i <= s + k - 1 (monotone deque, O(N) per line).
inline std::vector<double> window_max_cover(const std::vector<double>& starts,
                                            std::vector<std::size_t>& dims, std::size_t axis,
                                            std::size_t k) {
  const std::size_t m = dims[axis];
  const std::size_t n = m + k - 1;
  auto out_dims = dims;
  out_dims[axis] = n;
  std::vector<double> out(product(out_dims));
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < dims.size(); ++a) stride *= dims[a];
  const std::size_t in_block = stride * m;
  const std::size_t out_block = stride * n;
  std::deque<std::size_t> dq;
  for_each_line(dims, axis, [&](std::size_t off, std::size_t st) {
    const std::size_t out_off = (off / in_block) * out_block + off % in_block;
    dq.clear();
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // admissible starts: max(0, i-k+1) .. min(i, m-1)
      while (next < m && next <= i) {
        while (!dq.empty() && starts[off + dq.back() * st] <= starts[off + next * st])
          dq.pop_back();
        dq.push_back(next++);
      }
      while (dq.front() + k <= i) dq.pop_front();
      out[out_off + i * st] = starts[off + dq.front() * st];
    }
  });
  dims = out_dims;
  return out;
}

}  // namespace detail

// Cube sides 2^j times the axis-0 cell side, up to the shortest box side,
// keeping only sides that are whole multiples of every axis step.
inline std::vector<double> dyadic_scales(const GridSpec& grid) {
  const double step = grid.axis(0).step();
  double box = std::numeric_limits<double>::infinity();
  for (const auto& a : grid.axes()) box = std::min(box, a.hi - a.lo);
  std::vector<double> out;
  for (double s = step; s <= box * (1 + 1e-12); s *= 2.0) {
    bool ok = true;
    for (const auto& a : grid.axes()) {
      const double k = s / a.step();
      ok = ok && std::abs(k - std::round(k)) <= 1e-9 * k;
    }
    if (ok) out.push_back(s);
  }
  return out;
}

// Every whole-cell side length 1..N cells (1-D family of all intervals).
inline std::vector<double> all_scales(const GridSpec& grid) {
  std::vector<double> out;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& a : grid.axes()) n = std::min(n, a.count);
  for (std::size_t k = 1; k <= n; ++k) out.push_back(static_cast<double>(k) * grid.axis(0).step());
  return out;
}

// Discretized Hardy-Littlewood maximal function: at each cell, the largest
// average of |f| over grid-aligned cubes from `scales` that contain the cell
// and lie inside the box. Sides longer than the box are skipped.
inline GridFunction maximal_function(const GridFunction& f, std::span<const double> scales) {
  if (scales.empty()) throw BadScale("maximal_function: empty scale set");
  const auto& grid = f.grid;
  const std::size_t n = static_cast<std::size_t>(grid.dimension());
  std::vector<double> absf(f.values.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.values[i]);
  GridFunction out{grid, std::vector<double>(f.values.size(), 0.0)};
  bool any = false;
  for (double side : scales) {
    std::vector<std::size_t> ks(n);
    bool fits = true;
    for (std::size_t a = 0; a < n; ++a) {
      const double step = grid.axis(static_cast<int>(a)).step();
      const double k = side / step;
      if (!(side > 0.0) || std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k) ||
          std::round(k) < 1.0)
        throw BadScale("maximal_function: side " + std::to_string(side) +
                       " is not a whole multiple of the cell side " + std::to_string(step));
      ks[a] = static_cast<std::size_t>(std::llround(k));
      fits = fits && ks[a] <= grid.axis(static_cast<int>(a)).count;
    }
    if (!fits) continue;
    any = true;
    auto dims = grid.dims();
    std::vector<double> sums = absf;
    for (std::size_t a = 0; a < n; ++a) sums = detail::window_sums(sums, dims, a, ks[a]);
    double cells = 1.0;
    for (auto k : ks) cells *= static_cast<double>(k);
    for (auto& s : sums) s /= cells;
    for (std::size_t a = 0; a < n; ++a) sums = detail::window_max_cover(sums, dims, a, ks[a]);
    for (std::size_t i = 0; i < sums.size(); ++i) out.values[i] = std::max(out.values[i], sums[i]);
  }
  if (!any) throw BadScale("maximal_function: no cube side fits inside the box");
  return out;
}

inline GridFunction maximal_function(const GridFunction& f) {
  const auto scales = dyadic_scales(f.grid);
  return maximal_function(f, scales);
}

}  // namespace vexlab
