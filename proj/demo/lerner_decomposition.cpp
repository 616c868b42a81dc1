// Decomposes the Lerner exponent p = 2 + 0.1 + 0.05 sin(log log |x|) into
// (p0, theta, p1), certifies the pair and prints the smallness threshold.

#include <cstdio>

#include "vexlab/vexlab.hpp"

using namespace vexlab;

int main() {
  const double alpha = 0.1, beta = 0.05;
  const auto p = make_lerner(alpha, beta);
  const auto companion = lerner_companion(alpha, beta);
  std::printf("p in [%.4f, %.4f], theta = %.10f\n", p.lower(), p.upper(), companion.theta);
  std::printf("q1 in [%.6f, %.6f], G(0) = %.10f\n", companion.q1_lower, companion.q1_upper, companion.G(0.0));

  const auto cert = certify(p, LernerStrategy{alpha, beta});
  for (const auto& c : cert.checks)
    std::printf("  %-22s %6zu samples  max violation %.3g  %s\n", c.name.c_str(), c.samples, c.max_violation,
                c.pass ? "ok" : "FAILED");
  for (const auto& n : cert.notes) std::printf("  note: %s\n", n.c_str());

  const ScalarField L = [](std::span<const double> x) { return loglog_or_zero(euclidean_norm(x)); };
  const ScalarField q = [&](std::span<const double> x) { return alpha + beta * std::sin(L(x)); };
  const auto cl = oscillation_sup(L, SupSearchConfig{});
  const auto qs = oscillation_sup(q, SupSearchConfig{});
  const auto q1s = oscillation_sup(companion.q1, SupSearchConfig{});
  const auto eps = epsilon_threshold(alpha, beta, 1.0, cl.sup, qs, q1s);
  std::printf("C_L ~ %.6f, epsilon(mu_n = 1) = %.6f, chains %s/%s\n", cl.sup, eps.epsilon,
              eps.q_chain ? "hold" : "fail", eps.q1_chain ? "hold" : "fail");
  std::printf("certificate %s\n", cert.pass ? "PASS" : "FAIL");
  return cert.pass ? 0 : 1;
}
