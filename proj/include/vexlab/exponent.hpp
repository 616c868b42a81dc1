#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"
#include "vexlab/profile.hpp"
#include "vexlab/sampling.hpp"

namespace vexlab {

// Slack allowed between sampled values and declared bounds.
inline constexpr double kBoundsTol = 1e-12;

struct LernerParams {
  double alpha;
  double beta;
};

// An exponent p: R^n -> (1, inf) with declared bounds p_- <= p <= p_+.
//
// Instances are immutable and cheap to copy; evaluation is thread-safe.
// Radial families additionally evaluate from log|x| so diagnostics can
// probe radii like exp(exp(40)).
class VariableExponent {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;
  using LogRadialEvaluator = std::function<double(double)>;

  struct Parts {
    int dimension = 1;
    std::string family;
    Json params;
    double lower = 0.0;
    double upper = 0.0;
    Evaluator eval;
    LogRadialEvaluator log_radial;
    std::optional<RadialProfile> profile;
    std::optional<LernerParams> lerner;
  };

  explicit VariableExponent(Parts parts) {
    if (parts.dimension < 1) throw BadParameter("dimension must be positive");
    if (!(parts.lower > 1.0))
      throw BoundViolation("p_- must exceed 1 (got " + std::to_string(parts.lower) + ")");
    if (!std::isfinite(parts.upper))
      throw BoundViolation("p_+ must be finite");
    if (!(parts.lower <= parts.upper)) throw BoundViolation("p_- exceeds p_+");
    impl_ = std::make_shared<const Parts>(std::move(parts));
  }

  double operator()(std::span<const double> x) const { return impl_->eval(x); }
  double operator()(std::initializer_list<double> x) const {
    return impl_->eval(std::span<const double>(x.begin(), x.size()));
  }

  // p at any point of norm exp(u); only for radial families.
  double at_log_radius(double u) const { return impl_->log_radial(u); }
  bool is_radial() const noexcept { return static_cast<bool>(impl_->log_radial); }

  // Evaluates at a sample point, through the log-radius when coordinates
  // are not representable. Empty when neither route is available.
  std::optional<double> at(const SamplePoint& s) const {
    if (s.representable()) return (*this)(std::span<const double>(s.x));
    if (is_radial()) return at_log_radius(s.log_radius);
    return std::nullopt;
  }

  int dimension() const noexcept { return impl_->dimension; }
  double lower() const noexcept { return impl_->lower; }
  double upper() const noexcept { return impl_->upper; }
  const std::string& family() const noexcept { return impl_->family; }
  const std::optional<RadialProfile>& profile() const noexcept { return impl_->profile; }
  const std::optional<LernerParams>& lerner() const noexcept { return impl_->lerner; }

  // The exponent-spec document: {"family", "params", "dimension", "bounds"}.
  Json spec() const {
    return {{"family", impl_->family},
            {"params", impl_->params},
            {"dimension", impl_->dimension},
            {"bounds", {impl_->lower, impl_->upper}}};
  }

 private:
  std::shared_ptr<const Parts> impl_;
};

// ---------------------------------------------------------------------------
// Builders

inline VariableExponent make_constant(double value, int dim = 1) {
  if (!(value > 1.0)) throw BoundViolation("p_- must exceed 1 (constant " + std::to_string(value) + ")");
  if (!std::isfinite(value)) throw BoundViolation("p_+ must be finite");
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "constant";
  p.params = {{"value", value}};
  p.lower = p.upper = value;
  p.eval = [value](std::span<const double>) { return value; };
  p.log_radial = [value](double) { return value; };
  return VariableExponent(std::move(p));
}

// p(x) = 2 + alpha + beta * sin(L(x)),  L(x) = log log |x| for |x| >= e, else 0.
inline VariableExponent make_lerner(double alpha, double beta, int dim = 1) {
  if (!(beta > 0.0 && beta < alpha))
    throw BadParameter("lerner exponent: require 0<β<α (got α=" + std::to_string(alpha) +
                       ", β=" + std::to_string(beta) + ")");
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "lerner";
  p.params = {{"alpha", alpha}, {"beta", beta}};
  p.lower = 2.0 + alpha - beta;
  p.upper = 2.0 + alpha + beta;
  p.eval = [alpha, beta](std::span<const double> x) {
    return 2.0 + alpha + beta * std::sin(loglog_or_zero(euclidean_norm(x)));
  };
  p.log_radial = [alpha, beta](double u) {
    const double l = u >= 1.0 ? std::log(u) : 0.0;
    return 2.0 + alpha + beta * std::sin(l);
  };
  p.lerner = LernerParams{alpha, beta};
  return VariableExponent(std::move(p));
}

// values[i] on breaks[i-1] <= t < breaks[i], with t = |x| (radial) or x[axis].
inline VariableExponent make_piecewise(std::vector<double> breaks, std::vector<double> values,
                                       int dim = 1, bool radial = false, int axis = 0) {
  if (values.size() != breaks.size() + 1)
    throw BadParameter("piecewise-constant: need exactly one more value than breaks");
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
    throw BadParameter("piecewise-constant: breaks must be strictly increasing");
  if (axis < 0 || axis >= dim) throw BadParameter("piecewise-constant: axis out of range");
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "piecewise-constant";
  p.params = {{"breaks", breaks}, {"values", values}, {"radial", radial}, {"axis", axis}};
  p.lower = *std::min_element(values.begin(), values.end());
  p.upper = *std::max_element(values.begin(), values.end());
  auto pick = [breaks, values](double t) {
    const auto i = std::upper_bound(breaks.begin(), breaks.end(), t) - breaks.begin();
    return values[static_cast<std::size_t>(i)];
  };
  if (radial) {
    p.eval = [pick](std::span<const double> x) { return pick(euclidean_norm(x)); };
    p.log_radial = [pick](double u) { return pick(std::exp(u)); };
  } else {
    p.eval = [pick, axis](std::span<const double> x) {
      return pick(x[static_cast<std::size_t>(axis)]);
    };
  }
  return VariableExponent(std::move(p));
}

namespace detail {

// Spot-check declared bounds of a user-supplied evaluator.
inline void verify_declared_bounds(const VariableExponent& p, std::size_t samples,
                                   std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  for (const auto& s : draw_samples(cfg, p.dimension())) {
    const auto v = p.at(s);
    if (!v) continue;
    if (!std::isfinite(*v))
      throw BoundViolation(p.family() + " exponent is not finite at a sampled point");
    if (*v < p.lower() - kBoundsTol || *v > p.upper() + kBoundsTol)
      throw BoundViolation(p.family() + " exponent leaves its declared bounds [" +
                           std::to_string(p.lower()) + ", " + std::to_string(p.upper()) +
                           "]: value " + std::to_string(*v));
  }
}

}  // namespace detail

// Closed-form expression with caller-declared bounds, spot-verified on 4096
// sampled points.
inline VariableExponent make_expression(const std::string& text, double lower, double upper,
                                        int dim = 1) {
  auto expr = std::make_shared<const Expression>(Expression::parse(text));
  if (expr->max_coordinate() > dim)
    throw SpecError("expression uses x" + std::to_string(expr->max_coordinate()) +
                    " but dimension is " + std::to_string(dim));
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "expression";
  p.params = {{"expr", text}};
  p.lower = lower;
  p.upper = upper;
  p.eval = [expr](std::span<const double> x) { return (*expr)(x); };
  if (expr->radial())
    p.log_radial = [expr](double u) { return expr->at_radius(std::exp(u)); };
  VariableExponent out(std::move(p));
  detail::verify_declared_bounds(out, 4096, 0x5eed);
  return out;
}

struct Perturbation {
  double radius = 0.0;
  double delta = 0.0;
};

// p(x) = s(|x|) + delta * [|x| < radius].
inline VariableExponent make_nekvinda_radial(const RadialProfile& s, int dim = 1,
                                             std::optional<Perturbation> bump = std::nullopt) {
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "nekvinda-radial";
  p.params = {{"profile", s.to_json()}};
  const double radius = bump ? bump->radius : 0.0;
  const double delta = bump ? bump->delta : 0.0;
  if (bump) p.params["perturbation"] = {{"radius", radius}, {"delta", delta}};
  p.lower = s.lower();
  p.upper = s.upper();
  if (bump && radius > 0.0) {
    p.lower = std::min(p.lower, s.lower() + delta);
    p.upper = std::max(p.upper, s.upper() + delta);
  }
  p.eval = [s, radius, delta](std::span<const double> x) {
    const double r = euclidean_norm(x);
    return s(r) + (r < radius ? delta : 0.0);
  };
  p.log_radial = [s, radius, delta](double u) {
    return s.at_log_radius(u) + (std::exp(u) < radius ? delta : 0.0);
  };
  p.profile = s;
  return VariableExponent(std::move(p));
}

// Programmatic exponent from any evaluator. The spec records only `label`,
// so such exponents cannot be rebuilt from their document.
inline VariableExponent make_custom(std::string label, double lower, double upper, int dim,
                                    VariableExponent::Evaluator eval,
                                    VariableExponent::LogRadialEvaluator log_radial = {}) {
  VariableExponent::Parts p;
  p.dimension = dim;
  p.family = "custom";
  p.params = {{"label", std::move(label)}};
  p.lower = lower;
  p.upper = upper;
  p.eval = std::move(eval);
  p.log_radial = std::move(log_radial);
  return VariableExponent(std::move(p));
}

// p'(x) = p(x) / (p(x) - 1).
inline VariableExponent conjugate_exponent(const VariableExponent& p) {
  auto conj = [](double v) { return v / (v - 1.0); };
  VariableExponent::Parts c;
  c.dimension = p.dimension();
  c.family = "derived";
  c.params = {{"parent", p.spec()}, {"transform", {{"kind", "conjugate"}}}};
  c.lower = conj(p.upper());
  c.upper = conj(p.lower());
  c.eval = [p, conj](std::span<const double> x) { return conj(p(x)); };
  if (p.is_radial()) c.log_radial = [p, conj](double u) { return conj(p.at_log_radius(u)); };
  return VariableExponent(std::move(c));
}

namespace detail {

// p1 = p0 (1 - theta) p / (p0 - theta p); increasing in p when the
// denominator stays positive, so bounds map endpoint to endpoint.
inline double decomposition_map(double p, double p0, double theta) {
  return p0 * (1.0 - theta) * p / (p0 - theta * p);
}

inline VariableExponent decomposed_exponent(const VariableExponent& p, double p0, double theta) {
  VariableExponent::Parts c;
  c.dimension = p.dimension();
  c.family = "derived";
  c.params = {{"parent", p.spec()},
              {"transform", {{"kind", "decomposition"}, {"p0", p0}, {"theta", theta}}}};
  c.lower = decomposition_map(p.lower(), p0, theta);
  c.upper = decomposition_map(p.upper(), p0, theta);
  c.eval = [p, p0, theta](std::span<const double> x) {
    return decomposition_map(p(x), p0, theta);
  };
  if (p.is_radial())
    c.log_radial = [p, p0, theta](double u) {
      return decomposition_map(p.at_log_radius(u), p0, theta);
    };
  return VariableExponent(std::move(c));
}

}  // namespace detail

// Builds an exponent from its spec document. Analytic families recompute
// their bounds; the expression family takes them from "bounds".
inline VariableExponent build_exponent(const Json& spec) {
  try {
    const std::string family = spec.at("family").get<std::string>();
    const int dim = spec.value("dimension", 1);
    if (dim < 1 || dim > 3) throw SpecError("dimension must be 1, 2 or 3");
    const Json params = spec.value("params", Json::object());
    if (family == "constant") return make_constant(params.at("value").get<double>(), dim);
    if (family == "lerner")
      return make_lerner(params.at("alpha").get<double>(), params.at("beta").get<double>(), dim);
    if (family == "piecewise-constant")
      return make_piecewise(params.at("breaks").get<std::vector<double>>(),
                            params.at("values").get<std::vector<double>>(), dim,
                            params.value("radial", false), params.value("axis", 0));
    if (family == "expression") {
      const auto& b = spec.at("bounds");
      return make_expression(params.at("expr").get<std::string>(), b.at(0).get<double>(),
                             b.at(1).get<double>(), dim);
    }
    if (family == "nekvinda-radial") {
      std::optional<Perturbation> bump;
      if (params.contains("perturbation")) {
        const auto& pj = params.at("perturbation");
        bump = Perturbation{pj.at("radius").get<double>(), pj.at("delta").get<double>()};
      }
      return make_nekvinda_radial(RadialProfile::from_json(params.at("profile")), dim, bump);
    }
    if (family == "derived") {
      const VariableExponent parent = build_exponent(params.at("parent"));
      const auto& t = params.at("transform");
      const std::string kind = t.at("kind").get<std::string>();
      if (kind == "conjugate") return conjugate_exponent(parent);
      if (kind == "decomposition") {
        const double p0 = t.at("p0").get<double>();
        const double theta = t.at("theta").get<double>();
        if (!(p0 - theta * parent.upper() > 0.0))
          throw SpecError("decomposition transform has a nonpositive denominator");
        return detail::decomposed_exponent(parent, p0, theta);
      }
      throw SpecError("unknown transform '" + kind + "'");
    }
    if (family == "custom") throw SpecError("custom exponents cannot be rebuilt from a spec");
    throw SpecError("unknown exponent family '" + family + "'");
  } catch (const Json::exception& e) {
    throw SpecError(std::string("malformed exponent spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct BoundsEstimate {
  double lower = std::numeric_limits<double>::infinity();
  double upper = -std::numeric_limits<double>::infinity();
  SamplePoint lower_witness;
  SamplePoint upper_witness;
  std::size_t samples = 0;

  Json to_json() const {
    return {{"lower", lower},
            {"upper", upper},
            {"lower_witness", vexlab::to_json(lower_witness)},
            {"upper_witness", vexlab::to_json(upper_witness)},
            {"samples", samples}};
  }
};

// Sampled range of p; both ends are attained values with their points.
inline BoundsEstimate estimate_bounds(const VariableExponent& p, const SamplerConfig& cfg) {
  BoundsEstimate est;
  for (auto& s : draw_samples(cfg, p.dimension())) {
    const auto v = p.at(s);
    if (!v) continue;
    ++est.samples;
    if (*v < est.lower) {
      est.lower = *v;
      est.lower_witness = s;
    }
    if (*v > est.upper) {
      est.upper = *v;
      est.upper_witness = s;
    }
  }
  return est;
}

}  // namespace vexlab
