#pragma once

// Modified upper/lower/tagged sums over mapped cells, predicted limits, the
// convergence study engine and the A/C/D decomposition diagnostics for
// lengthphi maps.

#include <cstddef>
#include <optional>
#include <vector>

#include "mapping.hpp"
#include "stieltjes.hpp"

namespace modsum {

struct ModifiedSumReport {
  double u_val = 0.0;
  double l_val = 0.0;
  double s_val = 0.0;
  std::size_t n_cells = 0;
  double mesh = 0.0;
  std::size_t skipped_empty = 0;
  std::size_t multiple_root_cells = 0;
  double magnitude = 0.0;
  bool certified = false;
};

// u = sum sup_{I_k^1} f |I_k^1|_Psi, l with inf, s with f at the rule's tag
// inside each image. Empty images contribute 0. For certified f the image
// enclosure is intersected with the enclosure of the source cell (valid
// because the image lies inside the cell), so the per-cell oscillation never
// exceeds the classic one.
ModifiedSumReport modified_sums(const RealFunction& f, const Weight& w, const Partition& p, const IntervalMap& m,
                                const SamplePointRule& rule);

// Integrand and weight actually summed for a map kind: f*lambda against Psi
// for targetc maps, f against Upsilon for targetd maps, f
// against Psi otherwise.
struct SumSetup {
  RealFunction integrand;
  Weight weight;
};

SumSetup sum_setup(const RealFunction& f, const Weight& w, const IntervalMap& m);

enum class Theorem { Gamma, B, C, D, E };
const char* to_string(Theorem t) noexcept;

struct LimitPrediction {
  Theorem theorem = Theorem::Gamma;
  double value = 0.0;
  double factor = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

// Limit of the modified sums computed from the oracle, independently of
// the sums themselves.
LimitPrediction predict_limit(const RealFunction& f, const Weight& w, const IntervalMap& m,
                              std::size_t n_oracle = kOracleCells);

struct StudyRow {
  std::size_t n = 0;
  double mesh = 0.0;
  double s = 0.0;
  double u = 0.0;
  double l = 0.0;
  double gap = 0.0;
  double ul_gap = 0.0;
  double abs_error = 0.0;
  // u - l <= U - L up to accumulated rounding (4 n eps * magnitude).
  bool dominated = true;
};

struct ConvergenceReport {
  std::vector<StudyRow> rows;
  LimitPrediction prediction;
  std::optional<double> fitted_rate;  // slope of log error vs log n, tail half
  bool gaps_monotone = true;          // tail gaps nonincreasing within 10%
  double tolerance = 0.0;             // absolute tolerance used for the verdict
  bool converged = false;
};

// Schedule of uniform partition sizes; every n must satisfy |I|/n < eta.
ConvergenceReport convergence_study(const RealFunction& f, const Weight& w, const IntervalMap& m,
                                    const std::vector<std::size_t>& schedule, const SamplePointRule& rule,
                                    double tol = 1e-3);

std::vector<std::size_t> dyadic_schedule(unsigned kmin, unsigned kmax);

struct TheoremBDiagnostics {
  double a_n = 0.0;
  double c_n = 0.0;
  double d_n = 0.0;
  double s = 0.0;
  double identity_residual = 0.0;  // |s - (A + C + D)|
  double a_bound = 0.0;            // M_f * sum osc(psi, I_k) |I_k|
};

TheoremBDiagnostics theorem_b_diagnostics(const RealFunction& f, const Weight& w, const IntervalMap& m,
                                          const Partition& p, const SamplePointRule& rule);

}  // namespace modsum
