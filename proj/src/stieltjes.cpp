#include "stieltjes.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace modsum {

namespace {

constexpr std::size_t kValidationSamples = 4096;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double grid_point(const Interval& d, std::size_t i, std::size_t n) {
  if (i == n) return d.hi;
  return d.lo + d.width() * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace

RealFunction::RealFunction(Fn fn, Interval domain, std::string label, std::optional<double> bound,
                           std::optional<double> lipschitz)
    : fn_(std::move(fn)), domain_(domain), label_(std::move(label)), bound_(bound.value_or(0.0)),
      lipschitz_(lipschitz) {}

RealFunction RealFunction::from_callable(Fn fn, Interval domain, std::string label, std::optional<double> bound,
                                         std::optional<double> lipschitz) {
  require(static_cast<bool>(fn), "RealFunction requires a callable");
  require(!bound || (std::isfinite(*bound) && *bound >= 0.0), "declared bound must be finite and >= 0");
  require(!lipschitz || (std::isfinite(*lipschitz) && *lipschitz >= 0.0),
          "declared Lipschitz constant must be finite and >= 0");

  std::vector<double> xs(kValidationSamples + 1), ys(kValidationSamples + 1);
  double sampled_bound = 0.0;
  for (std::size_t i = 0; i <= kValidationSamples; ++i) {
    xs[i] = grid_point(domain, i, kValidationSamples);
    ys[i] = fn(xs[i]);
    if (!std::isfinite(ys[i]))
      fail(ErrorCode::DomainError, label + " is not finite at x = " + fmt(xs[i]));
    sampled_bound = std::max(sampled_bound, std::fabs(ys[i]));
  }
  if (bound) {
    const double slack = 1e-12 * std::max(1.0, *bound);
    for (std::size_t i = 0; i <= kValidationSamples; ++i)
      if (std::fabs(ys[i]) > *bound + slack)
        fail(ErrorCode::HypothesisViolation, "declared bound |" + label + "| <= " + fmt(*bound) +
                                                 " violated at x = " + fmt(xs[i]) + " (value " + fmt(ys[i]) + ")");
  }
  if (lipschitz) {
    for (std::size_t i = 0; i < kValidationSamples; ++i) {
      const double dy = std::fabs(ys[i + 1] - ys[i]);
      const double allowed = *lipschitz * (xs[i + 1] - xs[i]) * (1.0 + 1e-9) + 1e-15 * std::max(1.0, sampled_bound);
      if (dy > allowed)
        fail(ErrorCode::HypothesisViolation, "declared Lipschitz constant " + fmt(*lipschitz) + " of " + label +
                                                 " violated on [" + fmt(xs[i]) + ", " + fmt(xs[i + 1]) + "]");
    }
  }
  return RealFunction(std::move(fn), domain, std::move(label), bound ? *bound : sampled_bound, lipschitz);
}

RealFunction RealFunction::from_expr(const Expr& e, Interval domain, std::optional<double> bound,
                                     std::optional<double> lipschitz) {
  return from_callable([e](double x) { return e.eval(x); }, domain, e.str(), bound, lipschitz);
}

RealFunction RealFunction::product(const RealFunction& a, const RealFunction& b) {
  require(a.domain() == b.domain(), "product of functions with different domains");
  std::optional<double> lip;
  if (a.lipschitz_ && b.lipschitz_) lip = *a.lipschitz_ * b.bound_ + a.bound_ * *b.lipschitz_;
  return RealFunction([fa = a.fn_, fb = b.fn_](double x) { return fa(x) * fb(x); }, a.domain_,
                      "(" + a.label_ + " * " + b.label_ + ")", a.bound_ * b.bound_, lip);
}

CellBounds estimate_bounds(const RealFunction& f, const Interval& cell, std::optional<double> extra) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  const auto visit = [&](double x) {
    const double y = f(x);
    hi = std::max(hi, y);
    lo = std::min(lo, y);
  };
  if (cell.width() == 0.0) {
    visit(cell.lo);
  } else {
    for (std::size_t i = 0; i < kSupSamples; ++i) visit(grid_point(cell, i, kSupSamples - 1));
  }
  if (extra) visit(*extra);
  if (f.lipschitz()) {
    const double pad = *f.lipschitz() * cell.width() / static_cast<double>(kSupSamples - 1);
    hi += pad;
    lo -= pad;
  }
  return {hi, lo};
}

Weight Weight::from_density(RealFunction psi, double anchor) {
  require(std::isfinite(anchor), "weight anchor must be finite");
  Weight w;
  w.base_ = psi.domain();
  require(w.base_.width() > 0.0, "weight base interval must have positive width");

  const std::size_t n = kTableCells;
  const double h = w.base_.width() / static_cast<double>(n);
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = w.base_.lo + (static_cast<double>(i) + 0.5) * h;
    values[i] = psi(x);
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!(values[i] > 0.0))
      fail(ErrorCode::HypothesisViolation, "psi > 0 violated at x = " + fmt(w.base_.lo + (i + 0.5) * h) +
                                               " (value " + fmt(values[i]) + ")");

  auto table = std::make_shared<std::vector<double>>(n + 1);
  (*table)[0] = anchor;
  double sum = anchor, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double term = values[i] * h;
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    (*table)[i + 1] = sum + comp;
  }
  w.table_ = std::move(table);
  w.psi_ = std::move(psi);
  return w;
}

Weight Weight::from_density(RealFunction psi, RealFunction closed_form) {
  require(psi.domain() == closed_form.domain(), "psi and its closed-form integral need the same domain");
  Weight w;
  w.base_ = psi.domain();
  require(w.base_.width() > 0.0, "weight base interval must have positive width");

  constexpr std::size_t n = 4096;
  const double h = w.base_.width() / n;
  const double a_val = closed_form(w.base_.lo);
  double running = 0.0, prev = a_val, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = w.base_.lo + (i + 0.5) * h;
    const double dens = psi(mid);
    if (!(dens > 0.0)) fail(ErrorCode::HypothesisViolation, "psi > 0 violated at x = " + fmt(mid));
    scale = std::max(scale, dens);
    running += dens * h;
    const double x = grid_point(w.base_, i + 1, n);
    const double cur = closed_form(x);
    if (cur < prev - 1e-12 * std::max(1.0, std::fabs(prev)))
      fail(ErrorCode::HypothesisViolation, "closed-form Psi is not nondecreasing near x = " + fmt(x));
    prev = cur;
    if ((i + 1) % 256 == 0) {
      const double tol = 1e-6 * scale * w.base_.width() + 1e-12 * std::fabs(cur - a_val);
      if (std::fabs((cur - a_val) - running) > tol)
        fail(ErrorCode::HypothesisViolation, "closed-form Psi disagrees with the integral of psi at x = " + fmt(x) +
                                                 " (" + fmt(cur - a_val) + " vs " + fmt(running) + ")");
    }
  }
  w.psi_ = std::move(psi);
  w.closed_ = std::move(closed_form);
  return w;
}

Weight Weight::from_cumulative(RealFunction cumulative) {
  Weight w;
  w.base_ = cumulative.domain();
  require(w.base_.width() > 0.0, "weight base interval must have positive width");
  double prev = cumulative(w.base_.lo);
  for (std::size_t i = 1; i <= kValidationSamples; ++i) {
    const double x = grid_point(w.base_, i, kValidationSamples);
    const double cur = cumulative(x);
    if (cur < prev - 1e-12 * std::max(1.0, std::fabs(prev)))
      fail(ErrorCode::HypothesisViolation, "integrator " + cumulative.label() + " is not nondecreasing near x = " + fmt(x));
    prev = cur;
  }
  w.closed_ = std::move(cumulative);
  return w;
}

const RealFunction& Weight::density() const {
  if (!psi_) fail(ErrorCode::InvalidArgument, "weight has no density");
  return *psi_;
}

double Weight::cumulative(double x) const {
  if (closed_) return (*closed_)(x);
  const auto& t = *table_;
  const double n = static_cast<double>(kTableCells);
  const double pos = (x - base_.lo) / base_.width() * n;
  if (!(pos > 0.0)) return t.front();
  if (pos >= n) return t.back();
  const std::size_t i = std::min(static_cast<std::size_t>(pos), kTableCells - 1);
  const double frac = pos - static_cast<double>(i);
  const double v = t[i] + (t[i + 1] - t[i]) * frac;
  return std::clamp(v, t[i], t[i + 1]);
}

double Weight::length(const Interval& j) const {
  if (!base_.contains(j))
    fail(ErrorCode::InvalidArgument, "interval " + to_string(j) + " is outside the base " + to_string(base_));
  if (j.width() == 0.0) return 0.0;
  return std::max(0.0, cumulative(j.hi) - cumulative(j.lo));
}

namespace {

SumReport darboux_impl(const RealFunction& f, const Weight& w, const Partition& p,
                       std::optional<SamplePointRule> rule) {
  const std::size_t n = p.size();
  std::vector<double> up(n), lo(n), sm(n), osc(n), mag(n);
  parallel_for(n, [&](std::size_t k) {
    const Interval cell = p.cell(k);
    std::optional<double> tag;
    if (rule) tag = sample_point(*rule, k, cell);
    const CellBounds b = estimate_bounds(f, cell, tag);
    const double dpsi = w.length(cell);
    up[k] = b.sup * dpsi;
    lo[k] = b.inf * dpsi;
    osc[k] = b.osc() * dpsi;
    mag[k] = (std::fabs(b.sup) + std::fabs(b.inf)) * dpsi;
    sm[k] = tag ? f(*tag) * dpsi : 0.0;
  });
  SumReport r;
  r.upper = pairwise_sum(up);
  r.lower = pairwise_sum(lo);
  r.oscillation_sum = pairwise_sum(osc);
  r.magnitude = pairwise_sum(mag);
  r.sample_sum = rule ? pairwise_sum(sm) : std::numeric_limits<double>::quiet_NaN();
  r.n_cells = n;
  r.mesh = p.mesh();
  r.certified = f.certified();
  return r;
}

}  // namespace

SumReport darboux_report(const RealFunction& f, const Weight& w, const Partition& p, const SamplePointRule& rule) {
  return darboux_impl(f, w, p, rule);
}

double upper_sum(const RealFunction& f, const Weight& w, const Partition& p) {
  return darboux_impl(f, w, p, std::nullopt).upper;
}

double lower_sum(const RealFunction& f, const Weight& w, const Partition& p) {
  return darboux_impl(f, w, p, std::nullopt).lower;
}

double oscillation_sum(const RealFunction& f, const Weight& w, const Partition& p) {
  return darboux_impl(f, w, p, std::nullopt).oscillation_sum;
}

double riemann_sum(const RealFunction& f, const Weight& w, const Partition& p, const SamplePointRule& rule) {
  const std::size_t n = p.size();
  std::vector<double> terms(n);
  parallel_for(n, [&](std::size_t k) {
    const Interval cell = p.cell(k);
    terms[k] = f(sample_point(rule, k, cell)) * w.length(cell);
  });
  return pairwise_sum(terms);
}

RefineResult refine_until(const RealFunction& f, const Weight& w, double eps, std::size_t n_cap) {
  require(eps > 0.0 && std::isfinite(eps), "refine_until requires eps > 0");
  require(n_cap >= 2, "refine_until requires n_cap >= 2");
  std::size_t n = 2;
  for (;;) {
    Partition p = uniform_partition(w.base(), n);
    SumReport r = darboux_report(f, w, p, SamplePointRule::mid());
    const bool done = r.upper - r.lower <= eps;
    if (done || n > n_cap / 2) return {std::move(p), r, done};
    n *= 2;
  }
}

OracleResult oracle_integral(const RealFunction& g, const Weight& w, std::size_t n_oracle) {
  require(n_oracle >= 2, "oracle_integral requires at least two cells");
  const SumReport r = darboux_report(g, w, uniform_partition(w.base(), n_oracle), SamplePointRule::mid());
  return {r.lower, r.upper, r.sample_sum};
}

}  // namespace modsum
