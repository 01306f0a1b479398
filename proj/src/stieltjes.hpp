#pragma once

// Classic Riemann-Stieltjes machinery: functions with declared bounds,
// weights (density + indefinite integral), Darboux and sample sums,
// oscillation sums, dyadic refinement and the brute-force oracle.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "expr.hpp"

namespace modsum {

// Samples per cell used to estimate sup and inf: both endpoints plus
// kSupSamples - 2 equispaced interior points.
inline constexpr std::size_t kSupSamples = 17;

class RealFunction {
 public:
  using Fn = std::function<double(double)>;

  // `bound` is M_f = sup |f| on the domain; when absent it is estimated by
  // sampling. `lipschitz` is L_f; when present, bounds derived from f are
  // certified. Declared values are checked against 4097 samples.
  static RealFunction from_expr(const Expr& e, Interval domain, std::optional<double> bound = std::nullopt,
                                std::optional<double> lipschitz = std::nullopt);
  static RealFunction from_callable(Fn fn, Interval domain, std::string label,
                                    std::optional<double> bound = std::nullopt,
                                    std::optional<double> lipschitz = std::nullopt);

  // Pointwise product; bound and Lipschitz constant combine as
  // M = Ma*Mb and L = La*Mb + Ma*Lb (the latter only if both are declared).
  static RealFunction product(const RealFunction& a, const RealFunction& b);

  double operator()(double x) const { return fn_(x); }
  double bound() const noexcept { return bound_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  bool certified() const noexcept { return lipschitz_.has_value(); }
  const Interval& domain() const noexcept { return domain_; }
  const std::string& label() const noexcept { return label_; }

 private:
  RealFunction(Fn fn, Interval domain, std::string label, std::optional<double> bound,
               std::optional<double> lipschitz);

  Fn fn_;
  Interval domain_;
  std::string label_;
  double bound_ = 0.0;
  std::optional<double> lipschitz_;
};

// Sup/inf enclosure of f on one interval. When f declares a Lipschitz
// constant the sampled extremes are widened by L*width/(kSupSamples-1);
// `extra` adds one more sample point (used to keep a chosen tag inside the
// bracket).
struct CellBounds {
  double sup = 0.0;
  double inf = 0.0;
  double osc() const noexcept { return sup - inf; }
};

CellBounds estimate_bounds(const RealFunction& f, const Interval& cell, std::optional<double> extra = std::nullopt);

class Weight {
 public:
  // Nodes of the cumulative table built when no closed form is supplied.
  static constexpr std::size_t kTableCells = std::size_t{1} << 18;

  // Psi(x) = anchor + integral of psi over [a, x], tabulated with the
  // composite midpoint rule and interpolated linearly.
  static Weight from_density(RealFunction psi, double anchor = 0.0);
  // Psi supplied in closed form; checked for monotonicity and against the
  // midpoint integral of psi.
  static Weight from_density(RealFunction psi, RealFunction closed_form);
  // Integrator without a density (used for d Lambda). Must be nondecreasing.
  static Weight from_cumulative(RealFunction cumulative);

  const Interval& base() const noexcept { return base_; }
  bool has_density() const noexcept { return psi_.has_value(); }
  const RealFunction& density() const;
  bool closed_form() const noexcept { return closed_.has_value(); }

  double cumulative(double x) const;
  // |j|_Psi = Psi(j.hi) - Psi(j.lo); invalid-argument if j leaves the base.
  double length(const Interval& j) const;

 private:
  Weight() = default;

  Interval base_;
  std::optional<RealFunction> psi_;
  std::optional<RealFunction> closed_;
  std::shared_ptr<const std::vector<double>> table_;
};

inline double psi_length(const Weight& w, const Interval& j) { return w.length(j); }

struct SumReport {
  double lower = 0.0;
  double upper = 0.0;
  double sample_sum = 0.0;
  double oscillation_sum = 0.0;
  std::size_t n_cells = 0;
  double mesh = 0.0;
  // Sum of |sup|*dPsi + |inf|*dPsi; scale for rounding tolerances.
  double magnitude = 0.0;
  bool certified = false;
};

// Darboux sums, oscillation sum and the tagged sum for `rule`. The tag is
// added to each cell's sample set so lower <= sample_sum <= upper holds even
// for uncertified estimates.
SumReport darboux_report(const RealFunction& f, const Weight& w, const Partition& p, const SamplePointRule& rule);

double upper_sum(const RealFunction& f, const Weight& w, const Partition& p);
double lower_sum(const RealFunction& f, const Weight& w, const Partition& p);
double riemann_sum(const RealFunction& f, const Weight& w, const Partition& p, const SamplePointRule& rule);
double oscillation_sum(const RealFunction& f, const Weight& w, const Partition& p);

struct RefineResult {
  Partition partition;
  SumReport report;
  bool converged = false;
};

// First dyadic uniform partition (n = 2, 4, 8, ...) with upper - lower <= eps;
// stops at n_cap (rounded down to a power of two) with converged = false.
RefineResult refine_until(const RealFunction& f, const Weight& w, double eps, std::size_t n_cap);

struct OracleResult {
  double lower = 0.0;
  double upper = 0.0;
  double midpoint = 0.0;
  double width() const noexcept { return upper - lower; }
};

inline constexpr std::size_t kOracleCells = std::size_t{1} << 16;

OracleResult oracle_integral(const RealFunction& g, const Weight& w, std::size_t n_oracle = kOracleCells);

}  // namespace modsum
