#pragma once

// Shared fixtures and brute-force oracles. The oracles only use closed
// forms and plain loops, never the library's sum or weight code paths.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "modified_sums.hpp"

namespace testing {

using namespace modsum;

inline RealFunction fn(const std::string& text, Interval domain, std::optional<double> bound = std::nullopt,
                       std::optional<double> lipschitz = std::nullopt) {
  return RealFunction::from_expr(Expr::parse(text), domain, bound, lipschitz);
}

inline Weight density(const std::string& psi, Interval domain) { return Weight::from_density(fn(psi, domain)); }

inline Weight density(const std::string& psi, const std::string& Psi, Interval domain) {
  return Weight::from_density(fn(psi, domain), fn(Psi, domain));
}

inline Weight unit_weight(Interval domain = {0.0, 1.0}) { return density("1", "x", domain); }

// Midpoint rule for integral of g dPsi with Psi given in closed form.
inline double brute_stieltjes(const std::function<double(double)>& g, const std::function<double(double)>& Psi,
                              double a, double b, long n = 1 << 20) {
  long double acc = 0.0L;
  const double h = (b - a) / static_cast<double>(n);
  for (long k = 0; k < n; ++k) {
    const double lo = a + h * static_cast<double>(k);
    const double hi = k + 1 == n ? b : a + h * static_cast<double>(k + 1);
    acc += static_cast<long double>(g(0.5 * (lo + hi))) * (Psi(hi) - Psi(lo));
  }
  return static_cast<double>(acc);
}

inline double ulp_scale(double x) { return std::numeric_limits<double>::epsilon() * std::fabs(x); }

}  // namespace testing
