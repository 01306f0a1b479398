#include "modsum/modsum.h"

#include <new>
#include <string>

#include "modified_sums.hpp"
#include "signal.hpp"

struct msum_function {
  modsum::RealFunction fn;
  std::string text;
};

struct msum_weight {
  modsum::Weight w;
};

struct msum_map {
  modsum::IntervalMap m;
  std::string text;
};

struct msum_study {
  modsum::ConvergenceReport report;
};

namespace {

thread_local std::string t_last_error;
thread_local int64_t t_last_offset = -1;

msum_status to_status(modsum::ErrorCode code) {
  using modsum::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MSUM_E_INVALID_ARGUMENT;
    case ErrorCode::SyntaxError: return MSUM_E_SYNTAX;
    case ErrorCode::UnknownIdentifier: return MSUM_E_UNKNOWN_IDENTIFIER;
    case ErrorCode::DomainError: return MSUM_E_DOMAIN;
    case ErrorCode::HypothesisViolation: return MSUM_E_HYPOTHESIS;
    case ErrorCode::CellTooWide: return MSUM_E_CELL_TOO_WIDE;
    case ErrorCode::NoRoot: return MSUM_E_NO_ROOT;
    case ErrorCode::ScheduleTooCoarse: return MSUM_E_SCHEDULE_TOO_COARSE;
    case ErrorCode::DerivativeDisagreement: return MSUM_E_DERIVATIVE;
  }
  return MSUM_E_INTERNAL;
}

template <class Body>
msum_status guarded(Body&& body) {
  t_last_error.clear();
  t_last_offset = -1;
  try {
    body();
    return MSUM_OK;
  } catch (const modsum::Error& e) {
    t_last_error = e.what();
    if (e.offset()) t_last_offset = static_cast<int64_t>(*e.offset());
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return MSUM_E_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return MSUM_E_INTERNAL;
  }
}

msum_status null_argument(const char* what) {
  t_last_error = std::string("null argument: ") + what;
  t_last_offset = -1;
  return MSUM_E_INVALID_ARGUMENT;
}

modsum::SamplePointRule to_rule(msum_rule r) {
  switch (r.kind) {
    case MSUM_RULE_LEFT: return modsum::SamplePointRule::left();
    case MSUM_RULE_RIGHT: return modsum::SamplePointRule::right();
    case MSUM_RULE_MID: return modsum::SamplePointRule::mid();
    case MSUM_RULE_SEEDED: return modsum::SamplePointRule::seeded(r.seed);
  }
  modsum::fail(modsum::ErrorCode::InvalidArgument, "unknown sample rule kind");
}

std::size_t to_count(int64_t n, const char* what) {
  modsum::require(n >= 1, std::string(what) + " must be >= 1");
  return static_cast<std::size_t>(n);
}

std::vector<std::size_t> to_schedule(const int64_t* values, size_t len) {
  std::vector<std::size_t> out;
  out.reserve(len);
  for (size_t i = 0; i < len; ++i) out.push_back(to_count(values[i], "schedule entry"));
  return out;
}

msum_prediction to_c(const modsum::LimitPrediction& p) {
  return {static_cast<msum_theorem>(p.theorem), p.value, p.factor, p.bracket_lo, p.bracket_hi};
}

}  // namespace

extern "C" {

const char* msum_version(void) { return "0.1.0"; }

const char* msum_status_name(msum_status status) {
  switch (status) {
    case MSUM_OK: return "ok";
    case MSUM_E_INVALID_ARGUMENT: return "invalid-argument";
    case MSUM_E_SYNTAX: return "syntax-error";
    case MSUM_E_UNKNOWN_IDENTIFIER: return "unknown-identifier";
    case MSUM_E_DOMAIN: return "domain-error";
    case MSUM_E_HYPOTHESIS: return "hypothesis-violation";
    case MSUM_E_CELL_TOO_WIDE: return "cell-too-wide";
    case MSUM_E_NO_ROOT: return "no-root";
    case MSUM_E_SCHEDULE_TOO_COARSE: return "schedule-too-coarse";
    case MSUM_E_DERIVATIVE: return "derivative-disagreement";
    case MSUM_E_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* msum_last_error(void) { return t_last_error.c_str(); }
int64_t msum_last_error_offset(void) { return t_last_offset; }

void msum_set_threads(unsigned n) { modsum::set_thread_count(n); }
unsigned msum_get_threads(void) { return modsum::thread_count(); }

msum_status msum_parse_rule(const char* text, msum_rule* out) {
  if (!text || !out) return null_argument("text/out");
  return guarded([&] {
    const auto r = modsum::parse_rule(text);
    out->seed = r.seed;
    switch (r.kind) {
      case modsum::SamplePointRule::Kind::Left: out->kind = MSUM_RULE_LEFT; break;
      case modsum::SamplePointRule::Kind::Right: out->kind = MSUM_RULE_RIGHT; break;
      case modsum::SamplePointRule::Kind::Mid: out->kind = MSUM_RULE_MID; break;
      case modsum::SamplePointRule::Kind::Seeded: out->kind = MSUM_RULE_SEEDED; break;
    }
  });
}

msum_status msum_function_parse(const char* text, double a, double b, const double* bound, const double* lipschitz,
                                msum_function** out) {
  if (!text || !out) return null_argument("text/out");
  *out = nullptr;
  return guarded([&] {
    const modsum::Expr e = modsum::Expr::parse(text);
    std::optional<double> m, l;
    if (bound) m = *bound;
    if (lipschitz) l = *lipschitz;
    auto fn = modsum::RealFunction::from_expr(e, modsum::Interval(a, b), m, l);
    *out = new msum_function{std::move(fn), e.str()};
  });
}

void msum_function_free(msum_function* f) { delete f; }

msum_status msum_function_eval(const msum_function* f, double x, double* out) {
  if (!f || !out) return null_argument("f/out");
  return guarded([&] { *out = f->fn(x); });
}

double msum_function_bound(const msum_function* f) { return f ? f->fn.bound() : 0.0; }
const char* msum_function_text(const msum_function* f) { return f ? f->text.c_str() : ""; }

msum_status msum_weight_create(const msum_function* psi, const msum_function* closed_form, msum_weight** out) {
  if (!psi || !out) return null_argument("psi/out");
  *out = nullptr;
  return guarded([&] {
    if (closed_form)
      *out = new msum_weight{modsum::Weight::from_density(psi->fn, closed_form->fn)};
    else
      *out = new msum_weight{modsum::Weight::from_density(psi->fn)};
  });
}

void msum_weight_free(msum_weight* w) { delete w; }

msum_status msum_weight_length(const msum_weight* w, double lo, double hi, double* out) {
  if (!w || !out) return null_argument("w/out");
  return guarded([&] { *out = w->w.length(modsum::Interval(lo, hi)); });
}

msum_status msum_map_parse(const char* descriptor, const msum_weight* w, msum_map** out) {
  if (!descriptor || !w || !out) return null_argument("descriptor/w/out");
  *out = nullptr;
  return guarded([&] {
    auto m = modsum::parse_map(descriptor, w->w);
    std::string text = m.describe();
    *out = new msum_map{std::move(m), std::move(text)};
  });
}

void msum_map_free(msum_map* m) { delete m; }

msum_status msum_map_info_get(const msum_map* m, msum_map_info* out) {
  if (!m || !out) return null_argument("m/out");
  out->kind = static_cast<msum_map_kind>(m->m.kind());
  out->eta = m->m.eta();
  out->factor = m->m.factor();
  return MSUM_OK;
}

const char* msum_map_text(const msum_map* m) { return m ? m->text.c_str() : ""; }

msum_status msum_map_apply(const msum_map* m, const msum_weight* w, double lo, double hi, msum_cell_image* out) {
  if (!m || !w || !out) return null_argument("m/w/out");
  return guarded([&] {
    const auto img = m->m.apply(w->w, modsum::Interval(lo, hi));
    out->empty = img.image ? 0 : 1;
    out->lo = img.image ? img.image->lo : lo;
    out->hi = img.image ? img.image->hi : lo;
    out->psi_len = img.psi_len;
    out->multiple_roots = img.multiple_roots ? 1 : 0;
  });
}

msum_status msum_darboux(const msum_function* f, const msum_weight* w, int64_t n, msum_rule rule,
                         msum_sum_report* out) {
  if (!f || !w || !out) return null_argument("f/w/out");
  return guarded([&] {
    const auto p = modsum::uniform_partition(w->w.base(), to_count(n, "n"));
    const auto r = modsum::darboux_report(f->fn, w->w, p, to_rule(rule));
    *out = {r.lower, r.upper, r.sample_sum, r.oscillation_sum, static_cast<int64_t>(r.n_cells), r.mesh,
            r.certified ? 1 : 0};
  });
}

msum_status msum_refine_until(const msum_function* f, const msum_weight* w, double eps, int64_t n_cap,
                              msum_sum_report* out, int* converged) {
  if (!f || !w || !out || !converged) return null_argument("f/w/out/converged");
  return guarded([&] {
    const auto r = modsum::refine_until(f->fn, w->w, eps, to_count(n_cap, "n_cap"));
    *out = {r.report.lower, r.report.upper, r.report.sample_sum, r.report.oscillation_sum,
            static_cast<int64_t>(r.report.n_cells), r.report.mesh, r.report.certified ? 1 : 0};
    *converged = r.converged ? 1 : 0;
  });
}

msum_status msum_oracle_integral(const msum_function* g, const msum_weight* w, int64_t n_oracle, msum_oracle* out) {
  if (!g || !w || !out) return null_argument("g/w/out");
  return guarded([&] {
    const auto r = modsum::oracle_integral(g->fn, w->w, to_count(n_oracle, "n_oracle"));
    *out = {r.lower, r.upper, r.midpoint};
  });
}

msum_status msum_modified_sums(const msum_function* f, const msum_weight* w, const msum_map* m, int64_t n,
                               msum_rule rule, msum_modsum_report* out) {
  if (!f || !w || !m || !out) return null_argument("f/w/m/out");
  return guarded([&] {
    const auto setup = modsum::sum_setup(f->fn, w->w, m->m);
    const auto p = modsum::uniform_partition(w->w.base(), to_count(n, "n"));
    const auto r = modsum::modified_sums(setup.integrand, setup.weight, p, m->m, to_rule(rule));
    *out = {r.u_val,
            r.l_val,
            r.s_val,
            static_cast<int64_t>(r.n_cells),
            r.mesh,
            static_cast<int64_t>(r.skipped_empty),
            static_cast<int64_t>(r.multiple_root_cells),
            r.certified ? 1 : 0};
  });
}

msum_status msum_predict_limit(const msum_function* f, const msum_weight* w, const msum_map* m,
                               msum_prediction* out) {
  if (!f || !w || !m || !out) return null_argument("f/w/m/out");
  return guarded([&] { *out = to_c(modsum::predict_limit(f->fn, w->w, m->m)); });
}

msum_status msum_study_run(const msum_function* f, const msum_weight* w, const msum_map* m, const int64_t* schedule,
                           size_t schedule_len, msum_rule rule, double tol, msum_study** out) {
  if (!f || !w || !m || !schedule || !out) return null_argument("f/w/m/schedule/out");
  *out = nullptr;
  return guarded([&] {
    auto r = modsum::convergence_study(f->fn, w->w, m->m, to_schedule(schedule, schedule_len), to_rule(rule), tol);
    *out = new msum_study{std::move(r)};
  });
}

void msum_study_free(msum_study* s) { delete s; }

size_t msum_study_size(const msum_study* s) { return s ? s->report.rows.size() : 0; }

msum_status msum_study_row_get(const msum_study* s, size_t i, msum_study_row* out) {
  if (!s || !out) return null_argument("s/out");
  if (i >= s->report.rows.size()) {
    t_last_error = "study row index out of range";
    return MSUM_E_INVALID_ARGUMENT;
  }
  const auto& r = s->report.rows[i];
  *out = {static_cast<int64_t>(r.n), r.mesh, r.s, r.u, r.l, r.gap, r.ul_gap, r.abs_error, r.dominated ? 1 : 0};
  return MSUM_OK;
}

msum_status msum_study_summary_get(const msum_study* s, msum_study_summary* out) {
  if (!s || !out) return null_argument("s/out");
  const auto& r = s->report;
  out->prediction = to_c(r.prediction);
  out->has_fitted_rate = r.fitted_rate ? 1 : 0;
  out->fitted_rate = r.fitted_rate.value_or(0.0);
  out->gaps_monotone = r.gaps_monotone ? 1 : 0;
  out->tolerance = r.tolerance;
  out->converged = r.converged ? 1 : 0;
  return MSUM_OK;
}

msum_status msum_theorem_b_diagnostics(const msum_function* f, const msum_weight* w, const msum_map* m, int64_t n,
                                       msum_rule rule, msum_diagnostics* out) {
  if (!f || !w || !m || !out) return null_argument("f/w/m/out");
  return guarded([&] {
    const auto p = modsum::uniform_partition(w->w.base(), to_count(n, "n"));
    const auto d = modsum::theorem_b_diagnostics(f->fn, w->w, m->m, p, to_rule(rule));
    *out = {d.a_n, d.c_n, d.d_n, d.s, d.identity_residual, d.a_bound};
  });
}

msum_status msum_gated_integral(const msum_function* f, const msum_weight* w, int64_t carrier_n, double duty,
                                double* out) {
  if (!f || !w || !out) return null_argument("f/w/out");
  return guarded([&] {
    *out = modsum::gated_integral({f->fn, to_count(carrier_n, "carrier_n"), duty}, w->w);
  });
}

msum_status msum_gated_reference(const msum_function* f, const msum_weight* w, int64_t carrier_n, double duty,
                                 double* out) {
  if (!f || !w || !out) return null_argument("f/w/out");
  return guarded([&] {
    *out = modsum::gated_integral_reference({f->fn, to_count(carrier_n, "carrier_n"), duty}, w->w);
  });
}

msum_status msum_retrieval_study(const msum_function* f, const msum_weight* w, const int64_t* carrier_n, size_t len,
                                 double duty, double tol, msum_study** out) {
  if (!f || !w || !carrier_n || !out) return null_argument("f/w/carrier_n/out");
  *out = nullptr;
  return guarded([&] {
    auto r = modsum::retrieval_study(f->fn, w->w, to_schedule(carrier_n, len), duty, tol);
    *out = new msum_study{std::move(r)};
  });
}

}  // extern "C"
