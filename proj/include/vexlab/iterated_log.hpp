#pragma once

#include <cmath>
#include <string>

#include "vexlab/error.hpp"

namespace vexlab {

// Tower e_0 = 1, e_{k+1} = exp(e_k). Overflows to +inf from k = 4 on.
inline double iterated_exp(int k) {
  if (k < 0) throw DomainError("iterated_exp: k must be nonnegative");
  double e = 1.0;
  for (int i = 0; i < k; ++i) e = std::exp(e);
  return e;
}

// log_0 x = x, log_{k+1} x = log(log_k x), defined for x >= e_k.
// At x = e_k the value is exactly log_0 e_0 = 1, so the closed endpoint is
// admitted.
inline double iterated_log(int k, double x) {
  if (k < 0) throw DomainError("iterated_log: k must be nonnegative");
  if (!(x >= iterated_exp(k)))
    throw DomainError("iterated_log: log_" + std::to_string(k) + " needs x >= e_" +
                      std::to_string(k));
  double v = x;
  for (int i = 0; i < k; ++i) v = std::log(v);
  return v;
}

// log_k of exp(u), i.e. the iterated logarithm at a point given through its
// natural logarithm. Lets callers reach radii far beyond the double range.
inline double iterated_log_of_exp(int k, double u) {
  if (k == 0) return std::exp(u);
  return iterated_log(k - 1, u);
}

// b_{k,alpha}(x) = -(1/alpha) d/dx (log_k x)^(-alpha)
//               = (log_k x)^(-alpha-1) / prod_{j<k} log_j x     (x >= e_k).
inline double b_weight(int k, double alpha, double x) {
  if (!(alpha > 0.0)) throw DomainError("b_weight: alpha must be positive");
  if (k < 0) throw DomainError("b_weight: k must be nonnegative");
  if (!(x >= iterated_exp(k)))
    throw DomainError("b_weight: x must be >= e_" + std::to_string(k));
  double v = x;
  double denom = 1.0;
  for (int j = 0; j < k; ++j) {
    denom *= v;
    v = std::log(v);
  }
  return std::pow(v, -alpha - 1.0) / denom;
}

}  // namespace vexlab
