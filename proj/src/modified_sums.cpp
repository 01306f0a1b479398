#include "modified_sums.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace modsum {

const char* to_string(Theorem t) noexcept {
  switch (t) {
    case Theorem::Gamma: return "Gamma";
    case Theorem::B: return "B";
    case Theorem::C: return "C";
    case Theorem::D: return "D";
    case Theorem::E: return "E";
  }
  return "?";
}

ModifiedSumReport modified_sums(const RealFunction& f, const Weight& w, const Partition& p, const IntervalMap& m,
                                const SamplePointRule& rule) {
  const std::size_t n = p.size();
  std::vector<double> up(n), lo(n), sm(n), mag(n);
  std::vector<unsigned char> empty(n), multi(n);
  parallel_for(n, [&](std::size_t k) {
    const Interval cell = p.cell(k);
    const CellImage img = m.apply(w, cell, k);
    multi[k] = img.multiple_roots;
    if (!img.image) {
      empty[k] = 1;
      return;
    }
    const double x = sample_point(rule, k, *img.image);
    const double fx = f(x);
    CellBounds b = estimate_bounds(f, *img.image, x);
    if (f.certified()) {
      const CellBounds outer = estimate_bounds(f, cell);
      b.sup = std::max(std::min(b.sup, outer.sup), fx);
      b.inf = std::min(std::max(b.inf, outer.inf), fx);
    }
    up[k] = b.sup * img.psi_len;
    lo[k] = b.inf * img.psi_len;
    sm[k] = fx * img.psi_len;
    mag[k] = (std::fabs(b.sup) + std::fabs(b.inf)) * img.psi_len;
  });

  ModifiedSumReport r;
  r.u_val = pairwise_sum(up);
  r.l_val = pairwise_sum(lo);
  r.s_val = pairwise_sum(sm);
  r.magnitude = pairwise_sum(mag);
  r.n_cells = n;
  r.mesh = p.mesh();
  for (std::size_t k = 0; k < n; ++k) {
    r.skipped_empty += empty[k];
    r.multiple_root_cells += multi[k];
  }
  r.certified = f.certified();
  return r;
}

SumSetup sum_setup(const RealFunction& f, const Weight& w, const IntervalMap& m) {
  if (m.kind() == MapKind::WeightedTargetC) return {RealFunction::product(f, m.target_params()->lambda), w};
  if (m.kind() == MapKind::WeightedTargetD) return {f, *m.target_params()->upsilon};
  return {f, w};
}

LimitPrediction predict_limit(const RealFunction& f, const Weight& w, const IntervalMap& m, std::size_t n_oracle) {
  LimitPrediction out;
  out.factor = m.factor();
  OracleResult oracle;
  switch (m.kind()) {
    case MapKind::GammaLeft: out.theorem = Theorem::Gamma; break;
    case MapKind::LengthPhi: out.theorem = Theorem::B; break;
    case MapKind::WeightedTargetC: out.theorem = Theorem::C; break;
    case MapKind::WeightedTargetD: out.theorem = Theorem::D; break;
    case MapKind::LipschitzImage: out.theorem = Theorem::E; break;
  }
  if (m.kind() == MapKind::LipschitzImage) {
    // Stieltjes integral of f*psi against Lambda increments.
    const RealFunction g = RealFunction::product(f, w.density());
    const Weight dLambda = Weight::from_cumulative(m.lipschitz_params()->Lambda);
    oracle = oracle_integral(g, dLambda, n_oracle);
  } else {
    oracle = oracle_integral(f, w, n_oracle);
  }
  out.value = out.factor * oracle.midpoint;
  out.bracket_lo = std::min(out.factor * oracle.lower, out.factor * oracle.upper);
  out.bracket_hi = std::max(out.factor * oracle.lower, out.factor * oracle.upper);
  return out;
}

std::vector<std::size_t> dyadic_schedule(unsigned kmin, unsigned kmax) {
  require(kmin <= kmax && kmax < 40, "dyadic schedule requires kmin <= kmax < 40");
  std::vector<std::size_t> out;
  for (unsigned k = kmin; k <= kmax; ++k) out.push_back(std::size_t{1} << k);
  return out;
}

namespace {

std::optional<double> tail_slope(const std::vector<StudyRow>& rows) {
  std::vector<double> xs, ys;
  for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
    if (rows[i].abs_error > 0.0 && std::isfinite(rows[i].abs_error)) {
      xs.push_back(std::log(static_cast<double>(rows[i].n)));
      ys.push_back(std::log(rows[i].abs_error));
    }
  }
  if (xs.size() < 2) return std::nullopt;
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace

ConvergenceReport convergence_study(const RealFunction& f, const Weight& w, const IntervalMap& m,
                                    const std::vector<std::size_t>& schedule, const SamplePointRule& rule,
                                    double tol) {
  require(!schedule.empty(), "convergence_study needs a non-empty schedule");
  require(tol > 0.0, "convergence_study needs tol > 0");
  std::vector<Partition> partitions;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require(schedule[i] >= 1, "schedule entries must be positive");
    require(i == 0 || schedule[i] > schedule[i - 1], "schedule must be strictly increasing");
    Partition p = uniform_partition(w.base(), schedule[i]);
    if (!(p.mesh() < m.eta())) {
      std::ostringstream os;
      os.precision(17);
      os << "schedule entry n = " << schedule[i] << " gives mesh " << p.mesh() << " >= eta = " << m.eta();
      fail(ErrorCode::ScheduleTooCoarse, os.str());
    }
    partitions.push_back(std::move(p));
  }

  const SumSetup setup = sum_setup(f, w, m);
  ConvergenceReport rep;
  rep.prediction = predict_limit(f, w, m);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const Partition& p = partitions[i];
    const ModifiedSumReport ms = modified_sums(setup.integrand, setup.weight, p, m, rule);
    const SumReport classic = darboux_report(setup.integrand, setup.weight, p, rule);
    StudyRow row;
    row.n = schedule[i];
    row.mesh = p.mesh();
    row.s = ms.s_val;
    row.u = ms.u_val;
    row.l = ms.l_val;
    row.gap = ms.u_val - ms.l_val;
    row.ul_gap = classic.upper - classic.lower;
    row.abs_error = std::fabs(ms.s_val - rep.prediction.value);
    const double slack = 4.0 * static_cast<double>(row.n) * eps * (classic.magnitude + ms.magnitude);
    row.dominated = row.gap <= row.ul_gap + slack;
    rep.rows.push_back(row);
  }

  for (std::size_t i = std::max<std::size_t>(1, rep.rows.size() / 2); i < rep.rows.size(); ++i)
    if (rep.rows[i].gap > 1.1 * rep.rows[i - 1].gap + 1e-12) rep.gaps_monotone = false;

  rep.fitted_rate = tail_slope(rep.rows);
  rep.tolerance = tol * std::max(1.0, std::fabs(rep.prediction.value));
  rep.converged = rep.rows.back().abs_error <= rep.tolerance;
  return rep;
}

TheoremBDiagnostics theorem_b_diagnostics(const RealFunction& f, const Weight& w, const IntervalMap& m,
                                          const Partition& p, const SamplePointRule& rule) {
  const auto* params = m.length_phi_params();
  require(params != nullptr, "decomposition diagnostics need a lengthphi map");
  const RealFunction& psi = w.density();
  const double rate = params->derivative;

  const std::size_t n = p.size();
  std::vector<double> s_t(n), a_t(n), c_t(n), d_t(n), osc_t(n);
  parallel_for(n, [&](std::size_t k) {
    const Interval cell = p.cell(k);
    const CellImage img = m.apply(w, cell, k);
    const double x = img.image ? sample_point(rule, k, *img.image) : cell.lo;
    const double fx = f(x);
    const double px = psi(x);
    const double wk = cell.width();
    const double len = img.nominal_length;
    const double width = img.image ? img.image->width() : 0.0;
    s_t[k] = fx * img.psi_len;
    a_t[k] = fx * (img.psi_len - px * width);
    c_t[k] = fx * px * (len / wk - rate) * wk;
    d_t[k] = fx * px * wk;
    osc_t[k] = estimate_bounds(psi, cell).osc() * wk;
  });

  TheoremBDiagnostics out;
  out.s = pairwise_sum(s_t);
  out.a_n = pairwise_sum(a_t);
  out.c_n = pairwise_sum(c_t);
  out.d_n = rate * pairwise_sum(d_t);
  out.identity_residual = std::fabs(out.s - (out.a_n + out.c_n + out.d_n));
  out.a_bound = f.bound() * pairwise_sum(osc_t);
  return out;
}

}  // namespace modsum
