#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vexlab/error.hpp"
#include "vexlab/exponent.hpp"
#include "vexlab/expression.hpp"
#include "vexlab/json_types.hpp"
#include "vexlab/oscillation.hpp"
#include "vexlab/random.hpp"
#include "vexlab/sampling.hpp"

namespace vexlab {

enum class DecomposeMode { strict, free };

inline const char* to_string(DecomposeMode m) { return m == DecomposeMode::strict ? "strict" : "free"; }

// Denominators p0 - theta p within this distance of 1 still count as >= 1.
inline constexpr double kDenominatorTol = 1e-12;

// p1 from 1/p = theta/p0 + (1 - theta)/p1. Strict mode demands
// p0 - theta p_+ >= 1; free mode only a positive denominator.
inline VariableExponent decompose(const VariableExponent& p, double p0, double theta,
                                  DecomposeMode mode = DecomposeMode::strict) {
  if (!(theta > 0.0 && theta < 1.0)) throw BadParameter("theta must lie in (0, 1)");
  if (!(p0 > 1.0) || !std::isfinite(p0)) throw BadParameter("p0 must lie in (1, inf)");
  const double denom = p0 - theta * p.upper();
  if (!(denom > 0.0))
    throw DenominatorViolation("p0 - theta p_+ = " + std::to_string(denom) + " is not positive");
  if (mode == DecomposeMode::strict && denom < 1.0 - kDenominatorTol)
    throw DenominatorViolation("strict mode needs p0 - theta p_+ >= 1 (got " +
                               std::to_string(denom) + ")");
  return detail::decomposed_exponent(p, p0, theta);
}

// p recovered from (p0, theta, p1) through the identity.
inline double recompose(double p0, double theta, double p1) {
  return 1.0 / (theta / p0 + (1.0 - theta) / p1);
}

// ---------------------------------------------------------------------------
// Parameter selection

struct RsStrategy {};
struct NekvindaStrategy {
  double s_lower;
  double s_upper;
};
struct LernerStrategy {
  double alpha;
  double beta;
};
using Strategy = std::variant<RsStrategy, NekvindaStrategy, LernerStrategy>;

inline std::string strategy_tag(const Strategy& s) {
  switch (s.index()) {
    case 0: return "rs";
    case 1: return "nekvinda";
    default: return "lerner";
  }
}

struct DecompositionParameters {
  double p0;
  double theta;
  std::string strategy;
};

inline DecompositionParameters select_parameters(const VariableExponent& p, const Strategy& s) {
  if (!(p.lower() > 1.0)) throw BoundViolation("p_- must exceed 1");
  if (std::holds_alternative<RsStrategy>(s))
    return {p.upper(), 0.5 * (1.0 - 1.0 / p.lower()), "rs"};
  if (const auto* n = std::get_if<NekvindaStrategy>(&s)) {
    if (!(n->s_lower > 1.0)) throw BoundViolation("s_- must exceed 1");
    if (!(n->s_lower <= n->s_upper) || !std::isfinite(n->s_upper))
      throw BoundViolation("profile bounds out of order");
    const double theta = 0.5 * std::min(1.0 - 1.0 / p.lower(), 1.0 - 1.0 / n->s_lower);
    return {std::max(p.upper(), n->s_upper), theta, "nekvinda"};
  }
  const auto& l = std::get<LernerStrategy>(s);
  if (!(l.beta > 0.0 && l.beta < l.alpha)) throw BadParameter("require 0<β<α");
  return {2.0, 1.0 / (2.0 + l.alpha + l.beta), "lerner"};
}

// ---------------------------------------------------------------------------
// Lerner companion

struct LernerCompanion {
  double alpha;
  double beta;
  double theta;
  std::function<double(double)> F;
  std::function<double(double)> G;
  ScalarField q1;     // G(L(y))
  double q1_lower;    // G at F = alpha - beta
  double q1_upper;    // G at F = alpha + beta
  VariableExponent p1;  // 2 + q1
};

inline LernerCompanion lerner_companion(double alpha, double beta, int dim = 1) {
  if (!(beta > 0.0 && beta < alpha)) throw BadParameter("lerner companion: require 0<β<α");
  const double theta = 1.0 / (2.0 + alpha + beta);
  auto F = [alpha, beta](double t) { return alpha + beta * std::sin(t); };
  auto G_of_F = [theta](double f) { return 2.0 * f / (2.0 - theta * (2.0 + f)); };
  auto G = [F, G_of_F](double t) { return G_of_F(F(t)); };
  auto q1 = [G](std::span<const double> y) { return G(loglog_or_zero(euclidean_norm(y))); };
  return {alpha,
          beta,
          theta,
          F,
          G,
          q1,
          G_of_F(alpha - beta),
          G_of_F(alpha + beta),
          decompose(make_lerner(alpha, beta, dim), 2.0, theta)};
}

// ---------------------------------------------------------------------------
// Certificate

struct CertificateCheck {
  std::string name;
  std::string inequality;
  std::size_t samples = 0;
  double max_violation = 0.0;  // max of (lhs - rhs), clipped at 0
  double tolerance = 0.0;
  bool pass = true;

  Json to_json() const {
    return {{"name", name},
            {"inequality", inequality},
            {"samples", samples},
            {"max_violation", max_violation},
            {"tolerance", tolerance},
            {"pass", pass}};
  }
};

struct VerifyConfig {
  std::size_t samples = 10000;
  std::size_t pairs = 10000;
  std::size_t ladder = 1000;
  std::size_t lerner_points = 10000;
  double ladder_max = 1e12;
  double box_radius = 16.0;
  double max_log_log_radius = 6.5;
  std::optional<double> p_inf;
  std::uint64_t seed = 1;

  Json to_json() const {
    Json j = {{"samples", samples},
              {"pairs", pairs},
              {"ladder", ladder},
              {"lerner_points", lerner_points},
              {"ladder_max", ladder_max},
              {"box_radius", box_radius},
              {"max_log_log_radius", max_log_log_radius}};
    j["p_inf"] = p_inf ? Json(*p_inf) : Json(nullptr);
    j["seed"] = seed;
    return j;
  }
};

struct DecompositionCertificate {
  Json p_spec;
  double p0 = 0.0;
  double theta = 0.0;
  Json p1_spec;
  std::vector<CertificateCheck> checks;
  std::vector<std::string> notes;
  std::string strategy = "manual";
  std::string mode = "strict";
  bool proof_conforming = false;
  std::uint64_t seed = 0;
  VerifyConfig config;
  bool pass = false;

  const CertificateCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  Json to_json() const {
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(c.to_json());
    return {{"p", p_spec},
            {"p0", p0},
            {"theta", theta},
            {"p1", p1_spec},
            {"strategy", strategy},
            {"mode", mode},
            {"proof_conforming", proof_conforming},
            {"checks", cs},
            {"notes", notes},
            {"seed", seed},
            {"config", config.to_json()},
            {"pass", pass}};
  }
};

namespace detail {

class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, std::string inequality, double tolerance)
      : check_{std::move(name), std::move(inequality), 0, 0.0, tolerance, true} {}

  // Records lhs <= rhs.
  void le(double lhs, double rhs) {
    ++check_.samples;
    const double v = lhs - rhs;
    if (std::isnan(v)) check_.max_violation = std::numeric_limits<double>::infinity();
    else check_.max_violation = std::max(check_.max_violation, v);
  }

  CertificateCheck done() {
    check_.pass = check_.max_violation <= check_.tolerance;
    return check_;
  }

 private:
  CertificateCheck check_;
};

inline std::vector<std::pair<std::vector<double>, std::vector<double>>> certificate_pairs(
    const std::vector<SamplePoint>& points, std::size_t count, int dim, std::uint64_t seed) {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  std::vector<const SamplePoint*> usable;
  for (const auto& s : points)
    if (s.representable()) usable.push_back(&s);
  if (usable.empty()) return out;
  Rng rng(seed, 3);
  std::vector<double> dir(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < count; ++k) {
    const auto& x = usable[rng.below(usable.size())]->x;
    if (k % 2 == 0) {
      // Near pair at a log-uniform distance.
      const double delta = rng.log_uniform(1e-8, 1e2);
      rng.direction(dir);
      std::vector<double> y = x;
      for (std::size_t a = 0; a < y.size(); ++a) y[a] += delta * dir[a];
      out.emplace_back(x, std::move(y));
    } else {
      out.emplace_back(x, usable[rng.below(usable.size())]->x);
    }
  }
  return out;
}

}  // namespace detail

// Samples every inequality of the decomposition argument for (p, p0, theta, p1).
//
// Groups: identity residual; bound sandwich and (p1)_- > 1; modulus transfer;
// for exponents with a radial profile s, the s1 checks (monotone transfer,
// derivative bound, set equality, two-sided gap); for Lerner exponents the
// companion checks; with cfg.p_inf, the transfer of the limit at infinity.
// Failures are recorded in the certificate, never thrown.
inline DecompositionCertificate verify_decomposition(const VariableExponent& p, double p0,
                                                     double theta, const VariableExponent& p1,
                                                     const VerifyConfig& cfg = {}) {
  DecompositionCertificate cert;
  cert.p_spec = p.spec();
  cert.p1_spec = p1.spec();
  cert.p0 = p0;
  cert.theta = theta;
  cert.seed = cfg.seed;
  cert.config = cfg;
  cert.proof_conforming = p0 - theta * p.upper() >= 1.0 - kDenominatorTol && theta > 0.0 &&
                          theta < 1.0 - 1.0 / p.lower();
  const double L = p0 * p0 * (1.0 - theta);

  SamplerConfig sc;
  sc.samples = cfg.samples;
  sc.box_radius = cfg.box_radius;
  sc.max_log_log_radius = cfg.max_log_log_radius;
  sc.seed = cfg.seed;
  const auto points = draw_samples(sc, p.dimension());

  struct Value {
    const SamplePoint* at;
    double p, p1;
  };
  std::vector<Value> values;
  for (const auto& s : points) {
    const auto a = p.at(s);
    const auto b = p1.at(s);
    if (a && b) values.push_back({&s, *a, *b});
  }

  // (a) identity
  {
    detail::CheckAccumulator acc("identity", "|theta/p0 + (1-theta)/p1(x) - 1/p(x)| <= 1e-12",
                                 1e-12);
    for (const auto& v : values)
      acc.le(std::abs(theta / p0 + (1.0 - theta) / v.p1 - 1.0 / v.p), 0.0);
    cert.checks.push_back(acc.done());
  }

  // (b) bounds
  {
    detail::CheckAccumulator acc("bounds.sandwich",
                                 "(1-theta)p(x) <= p1(x) <= p0(1-theta)p(x)", 1e-12);
    for (const auto& v : values) {
      acc.le((1.0 - theta) * v.p, v.p1);
      acc.le(v.p1, p0 * (1.0 - theta) * v.p);
    }
    cert.checks.push_back(acc.done());
  }
  {
    // The strict margin keeps the boundary theta = 1 - 1/p_- out.
    detail::CheckAccumulator acc("bounds.lower", "(1-theta)p_- > 1", 0.0);
    acc.le(1.0 + 1e-12, (1.0 - theta) * p.lower());
    cert.checks.push_back(acc.done());
  }
  {
    detail::CheckAccumulator acc("bounds.upper", "(p1)_+ <= p0(1-theta)p_+ < inf", 1e-12);
    acc.le(p1.upper(), p0 * (1.0 - theta) * p.upper());
    for (const auto& v : values) acc.le(v.p1, p0 * (1.0 - theta) * p.upper());
    cert.checks.push_back(acc.done());
  }

  // (c) modulus transfer
  {
    detail::CheckAccumulator acc("modulus",
                                 "|p1(x)-p1(y)| <= p0^2(1-theta)|p(x)-p(y)|", 1e-10);
    for (const auto& [x, y] : detail::certificate_pairs(points, cfg.pairs, p.dimension(), cfg.seed)) {
      const std::span<const double> sx(x), sy(y);
      acc.le(std::abs(p1(sx) - p1(sy)), L * std::abs(p(sx) - p(sy)));
    }
    cert.checks.push_back(acc.done());
  }

  // (d) radial profile
  if (const auto& prof = p.profile()) {
    const RadialProfile& s = *prof;
    auto s1 = [&](double r) { return detail::decomposition_map(s(r), p0, theta); };
    {
      detail::CheckAccumulator acc("profile.lower", "(1-theta)s_- > 1", 0.0);
      acc.le(1.0 + 1e-12, (1.0 - theta) * s.lower());
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("profile.denominator", "p0 - theta s_+ >= 1", kDenominatorTol);
      acc.le(1.0, p0 - theta * s.upper());
      cert.checks.push_back(acc.done());
    }
    std::vector<double> ladder(cfg.ladder);
    for (std::size_t i = 0; i < cfg.ladder; ++i)
      ladder[i] = std::expm1(std::log1p(cfg.ladder_max) * static_cast<double>(i + 1) /
                             static_cast<double>(cfg.ladder));
    {
      detail::CheckAccumulator acc("profile.monotone",
                                   "s1 moves with s along an increasing ladder", 0.0);
      for (std::size_t i = 1; i < ladder.size(); ++i) {
        const double ds = s(ladder[i]) - s(ladder[i - 1]);
        const double ds1 = s1(ladder[i]) - s1(ladder[i - 1]);
        const double sign = ds > 0 ? 1.0 : ds < 0 ? -1.0 : 0.0;
        // A step of s1 against s, or a move of s1 while s is flat.
        acc.le(sign == 0.0 ? std::abs(ds1) : -sign * ds1, 0.0);
      }
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("profile.derivative", "|ds1/dx| <= p0^2 |ds/dx|", 0.0);
      for (double x : ladder) {
        const double h = std::max(1.0, x) * 0x1p-18;
        const double lo = std::max(0.0, x - h);
        const double fd = (s1(x + h) - s1(lo)) / (x + h - lo);
        const double bound = p0 * p0 * std::abs(s.derivative(x));
        acc.le(std::abs(fd), bound * (1.0 + 1e-6) + 1e-12);
      }
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("profile.set-equality", "{p != s} = {p1 != s1}", 0.0);
      detail::CheckAccumulator gap("profile.gap",
                                   "(1-theta)|p-s| <= |p1-s1| <= p0^2(1-theta)|p-s|", 1e-10);
      for (const auto& v : values) {
        const double sr = s.at_log_radius(v.at->log_radius);
        const double s1r = detail::decomposition_map(sr, p0, theta);
        const bool in_e = std::abs(v.p - sr) > 1e-14;
        const bool in_e1 = std::abs(v.p1 - s1r) > (1.0 - theta) * 1e-14;
        acc.le(in_e == in_e1 ? 0.0 : 1.0, 0.0);
        const double g = std::abs(v.p - sr);
        const double g1 = std::abs(v.p1 - s1r);
        gap.le((1.0 - theta) * g, g1);
        gap.le(g1, L * g);
      }
      cert.checks.push_back(acc.done());
      cert.checks.push_back(gap.done());
    }
  }

  // (e) Lerner companion
  const auto& lp = p.lerner();
  const bool companion_pair =
      lp && p0 == 2.0 && std::abs(theta - 1.0 / (2.0 + lp->alpha + lp->beta)) <= 1e-15;
  if (lp && !companion_pair)
    cert.notes.push_back("lerner companion checks skipped: (p0, theta) is not (2, 1/(2+alpha+beta))");
  if (companion_pair) {
    const auto comp = lerner_companion(lp->alpha, lp->beta, p.dimension());
    const double twopi = 2.0 * std::numbers::pi;
    const auto n = cfg.lerner_points;
    {
      detail::CheckAccumulator acc("lerner.sandwich", "F(t) <= G(t) <= 2F(t)", 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = twopi * static_cast<double>(i) / static_cast<double>(n);
        const double f = comp.F(t), g = comp.G(t);
        acc.le(f, g);
        acc.le(g, 2.0 * f);
      }
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("lerner.lipschitz", "|G(t)-G(u)| <= 4 beta |t-u|", 1e-8);
      Rng rng(cfg.seed, 5);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, twopi);
        const double u = t + (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.log_uniform(1e-6, 1.0);
        acc.le(std::abs(comp.G(t) - comp.G(u)) / std::abs(t - u), 4.0 * lp->beta);
      }
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("lerner.q1-bounds",
                                   "alpha-beta <= q1 <= 2(alpha+beta)", 1e-12);
      for (const auto& v : values) {
        const double q1 = v.p1 - 2.0;
        acc.le(lp->alpha - lp->beta, q1);
        acc.le(q1, 2.0 * (lp->alpha + lp->beta));
      }
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("lerner.companion", "|p1(x) - 2 - G(L(x))| <= 1e-12", 1e-12);
      for (const auto& v : values) {
        const double u = v.at->log_radius;
        const double l = u >= 1.0 ? std::log(u) : 0.0;
        acc.le(std::abs(v.p1 - 2.0 - comp.G(l)), 0.0);
      }
      cert.checks.push_back(acc.done());
    }
  }

  // Limit at infinity
  if (cfg.p_inf) {
    const double pi = *cfg.p_inf;
    const double p1i = detail::decomposition_map(pi, p0, theta);
    {
      detail::CheckAccumulator acc("infinity.range", "p_- <= p_inf <= p_+", 1e-12);
      acc.le(p.lower(), pi);
      acc.le(pi, p.upper());
      cert.checks.push_back(acc.done());
    }
    {
      detail::CheckAccumulator acc("infinity.transfer",
                                   "|p1(x)-(p1)_inf| <= p0^2(1-theta)|p(x)-p_inf|", 1e-10);
      for (const auto& v : values) acc.le(std::abs(v.p1 - p1i), L * std::abs(v.p - pi));
      cert.checks.push_back(acc.done());
    }
  } else {
    cert.notes.push_back("limit-at-infinity transfer skipped: no p_inf supplied");
  }

  cert.pass = std::all_of(cert.checks.begin(), cert.checks.end(),
                          [](const CertificateCheck& c) { return c.pass; });
  return cert;
}

// Selects parameters, decomposes and verifies in one call.
inline DecompositionCertificate certify(const VariableExponent& p, const Strategy& strategy,
                                        const VerifyConfig& cfg = {},
                                        DecomposeMode mode = DecomposeMode::strict) {
  const auto params = select_parameters(p, strategy);
  const auto p1 = decompose(p, params.p0, params.theta, mode);
  auto cert = verify_decomposition(p, params.p0, params.theta, p1, cfg);
  cert.strategy = params.strategy;
  cert.mode = to_string(mode);
  return cert;
}

// ---------------------------------------------------------------------------
// Smallness threshold for the Lerner family

struct EpsilonReport {
  double epsilon;
  double mu_n;
  double c_l;
  bool alpha_within;
  // ||q||_inf + sup l(Q) Omega(q, Q) <= mu_n with the analytic sup-norm.
  double q_lhs;
  bool q_hypothesis;
  double q1_lhs;
  bool q1_hypothesis;
  // alpha+beta+2 beta C_L < 2 alpha (1+C_L) and its q1 counterpart.
  double q_chain_lhs, q_chain_rhs;
  bool q_chain;
  double q1_chain_lhs, q1_chain_rhs;
  bool q1_chain;
  bool sup_searches_finite;

  Json to_json() const {
    return {{"epsilon", epsilon},
            {"mu_n", mu_n},
            {"C_L", c_l},
            {"alpha_within_epsilon", alpha_within},
            {"q", {{"lhs", q_lhs}, {"hypothesis", q_hypothesis}}},
            {"q1", {{"lhs", q1_lhs}, {"hypothesis", q1_hypothesis}}},
            {"q_chain", {{"lhs", q_chain_lhs}, {"rhs", q_chain_rhs}, {"holds", q_chain}}},
            {"q1_chain", {{"lhs", q1_chain_lhs}, {"rhs", q1_chain_rhs}, {"holds", q1_chain}}},
            {"sup_searches_finite", sup_searches_finite}};
  }
};

inline EpsilonReport epsilon_threshold(double alpha, double beta, double mu_n, double c_l,
                                       const SupSearchResult& q_sup,
                                       const SupSearchResult& q1_sup) {
  if (!(mu_n > 0.0)) throw BadParameter("mu_n must be positive");
  if (!(beta > 0.0 && beta < alpha)) throw BadParameter("require 0<β<α");
  EpsilonReport r{};
  r.mu_n = mu_n;
  r.c_l = c_l;
  r.epsilon = mu_n / (8.0 * (1.0 + c_l));
  r.alpha_within = alpha <= r.epsilon;
  r.q_lhs = alpha + beta + q_sup.sup;
  r.q_hypothesis = r.q_lhs <= mu_n && !q_sup.divergent;
  r.q1_lhs = 2.0 * (alpha + beta) + q1_sup.sup;
  r.q1_hypothesis = r.q1_lhs <= mu_n && !q1_sup.divergent;
  r.q_chain_lhs = alpha + beta + 2.0 * beta * c_l;
  r.q_chain_rhs = 2.0 * alpha * (1.0 + c_l);
  r.q_chain = r.q_chain_lhs < r.q_chain_rhs;
  r.q1_chain_lhs = 2.0 * (alpha + beta) + 8.0 * beta * c_l;
  r.q1_chain_rhs = 8.0 * alpha * (1.0 + c_l);
  r.q1_chain = r.q1_chain_lhs < r.q1_chain_rhs;
  r.sup_searches_finite = !q_sup.divergent && !q1_sup.divergent;
  return r;
}

}  // namespace vexlab
