#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "vexlab/error.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/numeric.hpp"

namespace vexlab {

enum class Monotonicity { nondecreasing, nonincreasing, unknown };

inline const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::nondecreasing: return "nondecreasing";
    case Monotonicity::nonincreasing: return "nonincreasing";
    case Monotonicity::unknown: return "unknown";
  }
  return "unknown";
}

inline Monotonicity monotonicity_from_string(const std::string& s) {
  if (s == "nondecreasing") return Monotonicity::nondecreasing;
  if (s == "nonincreasing") return Monotonicity::nonincreasing;
  if (s == "unknown") return Monotonicity::unknown;
  throw SpecError("unknown monotonicity '" + s + "'");
}

// A radial profile s: [0, inf) -> R with its derivative and bounds.
//
// Built-in kinds carry closed-form derivatives. Expression profiles fall back
// to a central difference with step max(1, r) * 2^-26 and report it through
// numeric_derivative().
class RadialProfile {
 public:
  // base + amp / log(e + r)
  static RadialProfile log_decay(double base, double amp) {
    RadialProfile p(Kind::log_decay);
    p.base_ = base;
    p.amp_ = amp;
    p.lower_ = std::min(base, base + amp);
    p.upper_ = std::max(base, base + amp);
    p.mono_ = amp > 0 ? Monotonicity::nonincreasing : Monotonicity::nondecreasing;
    return p;
  }

  // base + amp * sin(r)
  static RadialProfile sine(double base, double amp) {
    RadialProfile p(Kind::sine);
    p.base_ = base;
    p.amp_ = amp;
    p.lower_ = base - std::abs(amp);
    p.upper_ = base + std::abs(amp);
    p.mono_ = amp == 0.0 ? Monotonicity::nondecreasing : Monotonicity::unknown;
    return p;
  }

  static RadialProfile constant(double value) {
    RadialProfile p(Kind::constant);
    p.base_ = value;
    p.lower_ = p.upper_ = value;
    p.mono_ = Monotonicity::nondecreasing;
    return p;
  }

  // Expression in r (or |x|); bounds and monotonicity are declared by the
  // caller.
  static RadialProfile expression(const std::string& text, double lower, double upper,
                                  Monotonicity mono) {
    RadialProfile p(Kind::expression);
    p.expr_ = std::make_shared<const Expression>(Expression::parse(text));
    if (!p.expr_->radial())
      throw SpecError("profile expression must depend on r = |x| only: " + text);
    if (!(lower <= upper)) throw SpecError("profile bounds out of order");
    p.lower_ = lower;
    p.upper_ = upper;
    p.mono_ = mono;
    return p;
  }

  static RadialProfile from_json(const Json& j) {
    try {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "log-decay")
        return log_decay(j.at("base").get<double>(), j.at("amp").get<double>());
      if (kind == "sine") return sine(j.at("base").get<double>(), j.at("amp").get<double>());
      if (kind == "constant") return constant(j.at("value").get<double>());
      if (kind == "expression") {
        const auto& b = j.at("bounds");
        return expression(j.at("expr").get<std::string>(), b.at(0).get<double>(),
                          b.at(1).get<double>(),
                          monotonicity_from_string(j.value("monotone", std::string("unknown"))));
      }
      throw SpecError("unknown profile kind '" + kind + "'");
    } catch (const Json::exception& e) {
      throw SpecError(std::string("malformed profile spec: ") + e.what());
    }
  }

  Json to_json() const {
    switch (kind_) {
      case Kind::log_decay: return {{"kind", "log-decay"}, {"base", base_}, {"amp", amp_}};
      case Kind::sine: return {{"kind", "sine"}, {"base", base_}, {"amp", amp_}};
      case Kind::constant: return {{"kind", "constant"}, {"value", base_}};
      case Kind::expression:
        return {{"kind", "expression"},
                {"expr", expr_->text()},
                {"bounds", {lower_, upper_}},
                {"monotone", to_string(mono_)}};
    }
    return {};
  }

  double operator()(double r) const {
    switch (kind_) {
      case Kind::log_decay: return base_ + amp_ / log_e_plus(r);
      case Kind::sine: return base_ + amp_ * std::sin(r);
      case Kind::constant: return base_;
      case Kind::expression: return expr_->at_radius(r);
    }
    return base_;
  }

  // s(exp(u)); stays finite for radii beyond the double range where the
  // profile has a limit.
  double at_log_radius(double u) const {
    if (kind_ == Kind::log_decay) return base_ + amp_ / log_e_plus_exp(u);
    return (*this)(std::exp(u));
  }

  double derivative(double r) const {
    switch (kind_) {
      case Kind::log_decay: {
        const double l = log_e_plus(r);
        return -amp_ / ((std::numbers::e + r) * l * l);
      }
      case Kind::sine: return amp_ * std::cos(r);
      case Kind::constant: return 0.0;
      case Kind::expression: {
        const double h = std::max(1.0, std::abs(r)) * 0x1.0p-26;
        if (r - h < 0.0) return ((*this)(r + 2 * h) - (*this)(r)) / (2 * h);
        return ((*this)(r + h) - (*this)(r - h)) / (2 * h);
      }
    }
    return 0.0;
  }

  bool numeric_derivative() const noexcept { return kind_ == Kind::expression; }
  Monotonicity monotonicity() const noexcept { return mono_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  enum class Kind { log_decay, sine, constant, expression };
  explicit RadialProfile(Kind k) : kind_(k) {}

  Kind kind_;
  double base_ = 0.0;
  double amp_ = 0.0;
  double lower_ = 0.0;
  double upper_ = 0.0;
  Monotonicity mono_ = Monotonicity::unknown;
  std::shared_ptr<const Expression> expr_;
};

}  // namespace vexlab
