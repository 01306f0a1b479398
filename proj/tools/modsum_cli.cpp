// Command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modsum/modsum.h"

namespace {

using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kHypothesis = 2, kNotConverged = 3 };

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(msum_status st) {
  switch (st) {
    case MSUM_E_HYPOTHESIS:
    case MSUM_E_NO_ROOT:
    case MSUM_E_DERIVATIVE: return kHypothesis;
    default: return kUsage;
  }
}

// Throws a CliError for a failed call. When `source` is the text that was
// being parsed, a caret marks the offending byte.
void check(msum_status st, const std::string& what, const std::string& source = {}) {
  if (st == MSUM_OK) return;
  std::string msg = what + ": " + msum_status_name(st) + ": " + msum_last_error();
  const int64_t offset = msum_last_error_offset();
  if (offset >= 0 && !source.empty() && static_cast<std::size_t>(offset) <= source.size())
    msg += "\n  " + source + "\n  " + std::string(static_cast<std::size_t>(offset), ' ') + "^";
  throw CliError{exit_code_for(st), msg};
}

struct FunctionFree {
  void operator()(msum_function* f) const { msum_function_free(f); }
};
struct WeightFree {
  void operator()(msum_weight* w) const { msum_weight_free(w); }
};
struct MapFree {
  void operator()(msum_map* m) const { msum_map_free(m); }
};
struct StudyFree {
  void operator()(msum_study* s) const { msum_study_free(s); }
};
using FunctionPtr = std::unique_ptr<msum_function, FunctionFree>;
using WeightPtr = std::unique_ptr<msum_weight, WeightFree>;
using MapPtr = std::unique_ptr<msum_map, MapFree>;
using StudyPtr = std::unique_ptr<msum_study, StudyFree>;

struct Config {
  std::string command;
  std::vector<double> interval{0.0, 1.0};
  std::string f_text;
  std::string psi_text = "1";
  std::string Psi_text;
  std::string map_spec;
  std::string schedule_text;
  int64_t n = 0;
  std::string rule_text = "mid";
  double tol = 1e-3;
  std::string output = "table";
  std::string out_path;
  double lf = 0.0;
  double mf = 0.0;
  double eps = 0.0;
  int64_t n_cap = int64_t{1} << 20;
  double duty = 0.5;

  // Flags that were actually given.
  bool has_psi_closed = false, has_lf = false, has_mf = false, has_n = false, has_eps = false;
  bool has_schedule = false;
};

std::string rule_name(const msum_rule& r) {
  switch (r.kind) {
    case MSUM_RULE_LEFT: return "left";
    case MSUM_RULE_RIGHT: return "right";
    case MSUM_RULE_MID: return "mid";
    case MSUM_RULE_SEEDED: return "seeded:" + std::to_string(r.seed);
  }
  return "?";
}

const char* theorem_name(msum_theorem t) {
  switch (t) {
    case MSUM_THEOREM_GAMMA: return "Gamma";
    case MSUM_THEOREM_B: return "B";
    case MSUM_THEOREM_C: return "C";
    case MSUM_THEOREM_D: return "D";
    case MSUM_THEOREM_E: return "E";
  }
  return "?";
}

std::vector<int64_t> parse_schedule(const std::string& text) {
  std::vector<int64_t> out;
  const auto bad = [&] { return CliError{kUsage, "invalid --schedule '" + text + "' (use dyadic:kmin:kmax or n1,n2,...)"}; };
  if (text.rfind("dyadic:", 0) == 0) {
    unsigned kmin = 0, kmax = 0;
    char tail = 0;
    if (std::sscanf(text.c_str() + 7, "%u:%u%c", &kmin, &kmax, &tail) != 2 || kmin > kmax || kmax > 40) throw bad();
    for (unsigned k = kmin; k <= kmax; ++k) out.push_back(int64_t{1} << k);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != item.size() || v <= 0) throw bad();
    out.push_back(v);
  }
  if (out.empty()) throw bad();
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json oracle_json(const msum_prediction& p) {
  return {{"value", number_or_null(p.value)},
          {"bracket_lo", number_or_null(p.bracket_lo)},
          {"bracket_hi", number_or_null(p.bracket_hi)}};
}

struct Column {
  const char* key;
  const char* header;
};

struct Report {
  json doc;
  std::vector<Column> columns;
  std::vector<std::string> notes;  // extra lines for table output
  int exit_code = kOk;
};

class Session {
 public:
  explicit Session(const Config& cfg) : cfg_(cfg) {
    if (cfg.interval.size() != 2) throw CliError{kUsage, "--interval expects two numbers a b"};
    a_ = cfg.interval[0];
    b_ = cfg.interval[1];
    if (!(a_ < b_)) throw CliError{kUsage, "--interval requires a < b"};
    check(msum_parse_rule(cfg.rule_text.c_str(), &rule_), "--rule", cfg.rule_text);

    if (!cfg.f_text.empty()) f_ = function(cfg.f_text, "--f", cfg.has_mf ? &cfg.mf : nullptr,
                                           cfg.has_lf ? &cfg.lf : nullptr);
    FunctionPtr psi = function(cfg.psi_text, "--psi", nullptr, nullptr);
    FunctionPtr Psi = cfg.has_psi_closed ? function(cfg.Psi_text, "--Psi", nullptr, nullptr) : FunctionPtr();
    msum_weight* w = nullptr;
    check(msum_weight_create(psi.get(), Psi.get(), &w), "weight");
    w_.reset(w);
  }

  const msum_function* f() const {
    if (!f_) throw CliError{kUsage, cfg_.command + " requires --f"};
    return f_.get();
  }
  const msum_weight* w() const { return w_.get(); }
  const msum_rule& rule() const { return rule_; }

  MapPtr map() const {
    if (cfg_.map_spec.empty()) throw CliError{kUsage, cfg_.command + " requires --map"};
    msum_map* m = nullptr;
    check(msum_map_parse(cfg_.map_spec.c_str(), w_.get(), &m), "--map");
    return MapPtr(m);
  }

  json config_echo() const {
    json c;
    c["command"] = cfg_.command;
    c["interval"] = {a_, b_};
    c["f"] = cfg_.f_text.empty() ? json(nullptr) : json(cfg_.f_text);
    c["psi"] = cfg_.psi_text;
    c["Psi"] = cfg_.has_psi_closed ? json(cfg_.Psi_text) : json(nullptr);
    c["Lf"] = cfg_.has_lf ? json(cfg_.lf) : json(nullptr);
    c["Mf"] = cfg_.has_mf ? json(cfg_.mf) : json(nullptr);
    return c;
  }

 private:
  FunctionPtr function(const std::string& text, const char* flag, const double* bound, const double* lip) const {
    msum_function* out = nullptr;
    check(msum_function_parse(text.c_str(), a_, b_, bound, lip, &out), flag, text);
    return FunctionPtr(out);
  }

  const Config& cfg_;
  double a_ = 0.0, b_ = 1.0;
  msum_rule rule_{MSUM_RULE_MID, 0};
  FunctionPtr f_;
  WeightPtr w_;
};

json base_doc(const Session& s) {
  json doc;
  doc["schema_version"] = MODSUM_SCHEMA_VERSION;
  doc["command"] = s.config_echo()["command"];
  doc["config"] = s.config_echo();
  return doc;
}

Report run_integrate(const Config& cfg) {
  Session s(cfg);
  Report r;
  r.doc = base_doc(s);
  if (cfg.has_n == cfg.has_eps) throw CliError{kUsage, "integrate needs exactly one of --n or --eps"};
  msum_sum_report sr;
  std::string verdict = "ok";
  if (cfg.has_n) {
    r.doc["config"]["n"] = cfg.n;
    r.doc["config"]["rule"] = rule_name(s.rule());
    check(msum_darboux(s.f(), s.w(), cfg.n, s.rule(), &sr), "integrate");
  } else {
    r.doc["config"]["eps"] = cfg.eps;
    r.doc["config"]["n_cap"] = cfg.n_cap;
    int converged = 0;
    check(msum_refine_until(s.f(), s.w(), cfg.eps, cfg.n_cap, &sr, &converged), "integrate");
    verdict = converged ? "converged" : "inconclusive";
    if (!converged) r.exit_code = kNotConverged;
  }
  r.doc["results"] = json::array({{{"n", sr.n_cells},
                                   {"mesh", sr.mesh},
                                   {"lower", sr.lower},
                                   {"upper", sr.upper},
                                   {"sample", sr.sample_sum},
                                   {"oscillation", sr.oscillation_sum},
                                   {"certified", sr.certified != 0}}});
  r.doc["verdict"] = verdict;
  msum_oracle o;
  check(msum_oracle_integral(s.f(), s.w(), int64_t{1} << 16, &o), "oracle");
  r.doc["oracle"] = {{"value", o.midpoint}, {"bracket_lo", o.lower}, {"bracket_hi", o.upper}};
  r.columns = {{"n", "n"},           {"mesh", "mesh"},   {"lower", "L"},
               {"upper", "U"},       {"sample", "S"},    {"oscillation", "osc"}};
  return r;
}

Report run_modsum(const Config& cfg) {
  Session s(cfg);
  const MapPtr m = s.map();
  Report r;
  r.doc = base_doc(s);
  const int64_t n = cfg.has_n ? cfg.n : 1024;
  r.doc["config"]["map"] = cfg.map_spec;
  r.doc["config"]["n"] = n;
  r.doc["config"]["rule"] = rule_name(s.rule());
  msum_modsum_report ms;
  check(msum_modified_sums(s.f(), s.w(), m.get(), n, s.rule(), &ms), "modsum");
  msum_prediction p;
  check(msum_predict_limit(s.f(), s.w(), m.get(), &p), "prediction");
  r.doc["results"] = json::array({{{"n", ms.n_cells},
                                   {"mesh", ms.mesh},
                                   {"s", ms.s},
                                   {"u", ms.u},
                                   {"l", ms.l},
                                   {"gap", ms.u - ms.l},
                                   {"predicted", p.value},
                                   {"skipped_empty", ms.skipped_empty},
                                   {"multiple_root_cells", ms.multiple_root_cells}}});
  r.doc["summary"] = {{"map", msum_map_text(m.get())}, {"theorem", theorem_name(p.theorem)}, {"factor", p.factor}};
  r.doc["verdict"] = "ok";
  r.doc["oracle"] = oracle_json(p);
  r.columns = {{"n", "n"}, {"mesh", "mesh"}, {"s", "s"},       {"u", "u"},
               {"l", "l"}, {"gap", "gap"},   {"predicted", "predicted"}, {"skipped_empty", "empty"}};
  r.notes.push_back(std::string("map: ") + msum_map_text(m.get()));
  return r;
}

json study_rows(const msum_study* st, const msum_study_summary& sum, bool* all_dominated) {
  json rows = json::array();
  *all_dominated = true;
  for (std::size_t i = 0; i < msum_study_size(st); ++i) {
    msum_study_row row;
    check(msum_study_row_get(st, i, &row), "study");
    *all_dominated = *all_dominated && row.dominated;
    rows.push_back({{"n", row.n},
                    {"mesh", row.mesh},
                    {"s", row.s},
                    {"u", row.u},
                    {"l", row.l},
                    {"gap", row.gap},
                    {"ul_gap", row.ul_gap},
                    {"predicted", sum.prediction.value},
                    {"abs_error", row.abs_error},
                    {"dominated", row.dominated != 0}});
  }
  return rows;
}

const std::vector<Column> kStudyColumns{{"n", "n"},       {"mesh", "mesh"},         {"s", "s"},
                                        {"u", "u"},       {"l", "l"},               {"gap", "gap"},
                                        {"ul_gap", "UL_gap"}, {"predicted", "predicted"}, {"abs_error", "abs_error"}};

void finish_study(Report& r, const msum_study* st) {
  msum_study_summary sum;
  check(msum_study_summary_get(st, &sum), "study");
  bool all_dominated = true;
  r.doc["results"] = study_rows(st, sum, &all_dominated);
  r.doc["summary"]["theorem"] = theorem_name(sum.prediction.theorem);
  r.doc["summary"]["factor"] = sum.prediction.factor;
  r.doc["summary"]["fitted_rate"] = sum.has_fitted_rate ? number_or_null(sum.fitted_rate) : json(nullptr);
  r.doc["summary"]["gaps_monotone"] = sum.gaps_monotone != 0;
  r.doc["summary"]["all_dominated"] = all_dominated;
  r.doc["summary"]["tolerance"] = sum.tolerance;
  r.doc["verdict"] = sum.converged ? "converged" : "inconclusive";
  r.doc["oracle"] = oracle_json(sum.prediction);
  r.columns = kStudyColumns;
  if (!sum.converged) r.exit_code = kNotConverged;
}

Report run_study(const Config& cfg) {
  Session s(cfg);
  const MapPtr m = s.map();
  const auto schedule = parse_schedule(cfg.has_schedule ? cfg.schedule_text : "dyadic:4:12");
  Report r;
  r.doc = base_doc(s);
  r.doc["config"]["map"] = cfg.map_spec;
  r.doc["config"]["schedule"] = schedule;
  r.doc["config"]["rule"] = rule_name(s.rule());
  r.doc["config"]["tol"] = cfg.tol;
  msum_study* raw = nullptr;
  check(msum_study_run(s.f(), s.w(), m.get(), schedule.data(), schedule.size(), s.rule(), cfg.tol, &raw), "study");
  const StudyPtr st(raw);
  r.doc["summary"] = {{"map", msum_map_text(m.get())}};
  finish_study(r, st.get());
  r.notes.push_back(std::string("map: ") + msum_map_text(m.get()));
  return r;
}

Report run_diagnose(const Config& cfg) {
  Session s(cfg);
  const MapPtr m = s.map();
  const auto schedule = parse_schedule(cfg.has_schedule ? cfg.schedule_text : "dyadic:6:10");
  Report r;
  r.doc = base_doc(s);
  r.doc["config"]["map"] = cfg.map_spec;
  r.doc["config"]["schedule"] = schedule;
  r.doc["config"]["rule"] = rule_name(s.rule());
  json rows = json::array();
  bool consistent = true;
  constexpr double eps = 2.220446049250313e-16;
  for (int64_t n : schedule) {
    msum_diagnostics d;
    check(msum_theorem_b_diagnostics(s.f(), s.w(), m.get(), n, s.rule(), &d), "diagnose");
    const double scale = std::max({std::fabs(d.s), std::fabs(d.a_n) + std::fabs(d.c_n) + std::fabs(d.d_n)});
    const bool identity_ok = d.identity_residual <= 8.0 * static_cast<double>(n) * eps * scale;
    const bool bound_ok = std::fabs(d.a_n) <= d.a_bound;
    consistent = consistent && identity_ok && bound_ok;
    rows.push_back({{"n", n},
                    {"A", d.a_n},
                    {"C", d.c_n},
                    {"D", d.d_n},
                    {"s", d.s},
                    {"identity_residual", d.identity_residual},
                    {"A_bound", d.a_bound}});
  }
  msum_prediction p;
  check(msum_predict_limit(s.f(), s.w(), m.get(), &p), "prediction");
  r.doc["results"] = rows;
  r.doc["summary"] = {{"map", msum_map_text(m.get())}, {"theorem", theorem_name(p.theorem)}, {"factor", p.factor}};
  r.doc["verdict"] = consistent ? "ok" : "inconsistent";
  r.doc["oracle"] = oracle_json(p);
  if (!consistent) r.exit_code = kNotConverged;
  r.columns = {{"n", "n"}, {"A", "A_n"}, {"C", "C_n"}, {"D", "D_n"},
               {"s", "s"}, {"identity_residual", "residual"}, {"A_bound", "A_bound"}};
  r.notes.push_back(std::string("map: ") + msum_map_text(m.get()));
  return r;
}

Report run_signal(const Config& cfg) {
  Session s(cfg);
  const auto carriers = parse_schedule(cfg.has_schedule ? cfg.schedule_text : "dyadic:4:12");
  Report r;
  r.doc = base_doc(s);
  r.doc["config"]["duty"] = cfg.duty;
  r.doc["config"]["schedule"] = carriers;
  r.doc["config"]["tol"] = cfg.tol;
  msum_study* raw = nullptr;
  check(msum_retrieval_study(s.f(), s.w(), carriers.data(), carriers.size(), cfg.duty, cfg.tol, &raw), "signal");
  const StudyPtr st(raw);
  finish_study(r, st.get());
  for (std::size_t i = 0; i < carriers.size(); ++i) {
    double ref = 0.0;
    check(msum_gated_reference(s.f(), s.w(), carriers[i], cfg.duty, &ref), "signal");
    json& row = r.doc["results"][i];
    json out = {{"carrier_n", row["n"]}, {"gated", row["s"]}, {"reference", ref}};
    for (const char* key : {"predicted", "abs_error", "gap"}) out[key] = row[key];
    row = out;
  }
  r.columns = {{"carrier_n", "carrier_n"}, {"gated", "gated"},        {"reference", "reference"},
               {"predicted", "predicted"}, {"abs_error", "abs_error"}};
  return r;
}

std::string cell_text(const json& v, bool full_precision) {
  if (v.is_null()) return full_precision ? "" : "-";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.10g", v.get<double>());
    return buf;
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string render(const Report& r, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << r.doc.dump(2) << "\n";
    return os.str();
  }
  if (format == "csv") {
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i].header;
    os << "\n";
    for (const auto& row : r.doc["results"]) {
      for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << cell_text(row[r.columns[i].key], true);
      os << "\n";
    }
    return os.str();
  }

  os << r.doc["command"].get<std::string>() << "  f = " << cell_text(r.doc["config"]["f"], false)
     << "  psi = " << r.doc["config"]["psi"].get<std::string>() << "  on ["
     << cell_text(r.doc["config"]["interval"][0], false) << ", " << cell_text(r.doc["config"]["interval"][1], false)
     << "]\n";
  for (const auto& note : r.notes) os << note << "\n";
  if (r.doc.contains("summary")) {
    const json& s = r.doc["summary"];
    if (s.contains("theorem"))
      os << "limit formula: " << s["theorem"].get<std::string>() << "  factor = " << cell_text(s["factor"], false)
         << "\n";
    if (s.contains("fitted_rate"))
      os << "fitted rate: " << cell_text(s["fitted_rate"], false)
         << "  gaps monotone: " << cell_text(s["gaps_monotone"], false)
         << "  u-l <= U-L: " << cell_text(s["all_dominated"], false) << "\n";
  }
  const json& o = r.doc["oracle"];
  os << "oracle: " << cell_text(o["value"], false) << "  in [" << cell_text(o["bracket_lo"], false) << ", "
     << cell_text(o["bracket_hi"], false) << "]\n\n";

  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(r.columns.size());
  for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = std::string(r.columns[i].header).size();
  for (const auto& row : r.doc["results"]) {
    std::vector<std::string> line;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
      line.push_back(cell_text(row[r.columns[i].key], false));
      width[i] = std::max(width[i], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  const auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i)
      os << (i ? "  " : "") << std::string(width[i] - line[i].size(), ' ') << line[i];
    os << "\n";
  };
  std::vector<std::string> header;
  for (const auto& c : r.columns) header.emplace_back(c.header);
  emit(header);
  for (const auto& line : cells) emit(line);
  os << "\nverdict: " << r.doc["verdict"].get<std::string>() << "\n";
  return os.str();
}

void add_common(CLI::App* sub, Config& cfg, bool needs_map) {
  sub->add_option("--f", cfg.f_text, "integrand f(x), e.g. \"x^2\"")->required();
  sub->add_option("--psi", cfg.psi_text, "density psi(x) of the integrator (default 1)");
  sub->add_option_function<std::string>(
      "--Psi",
      [&cfg](const std::string& v) {
        cfg.Psi_text = v;
        cfg.has_psi_closed = true;
      },
      "closed-form Psi(x); tabulated from psi when absent");
  sub->add_option("--interval", cfg.interval, "interval endpoints a b (default 0 1)")->expected(2);
  sub->add_option_function<double>(
      "--Lf",
      [&cfg](double v) {
        cfg.lf = v;
        cfg.has_lf = true;
      },
      "declared Lipschitz constant of f (enables certified bounds)");
  sub->add_option_function<double>(
      "--Mf",
      [&cfg](double v) {
        cfg.mf = v;
        cfg.has_mf = true;
      },
      "declared bound sup|f|");
  sub->add_option("--output", cfg.output, "table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  sub->add_option("--out", cfg.out_path, "write the report to this file instead of stdout");
  if (needs_map) sub->add_option("--map", cfg.map_spec, "set mapping descriptor, e.g. gamma:0.5")->required();
}

void add_rule(CLI::App* sub, Config& cfg) {
  sub->add_option("--rule", cfg.rule_text, "tag rule: left, right, mid or seeded:<int> (default mid)");
}

void add_n(CLI::App* sub, Config& cfg, const char* help) {
  sub->add_option_function<int64_t>(
      "--n",
      [&cfg](int64_t v) {
        cfg.n = v;
        cfg.has_n = true;
      },
      help);
}

void add_schedule(CLI::App* sub, Config& cfg, const char* help) {
  sub->add_option_function<std::string>(
      "--schedule",
      [&cfg](const std::string& v) {
        cfg.schedule_text = v;
        cfg.has_schedule = true;
      },
      help);
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Classic and modified Riemann-Stieltjes sums"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(msum_version()));

  auto* integrate = app.add_subcommand("integrate", "upper, lower and tagged sums of f against Psi");
  add_common(integrate, cfg, false);
  add_rule(integrate, cfg);
  add_n(integrate, cfg, "number of uniform cells");
  integrate->add_option_function<double>(
      "--eps",
      [&cfg](double v) {
        cfg.eps = v;
        cfg.has_eps = true;
      },
      "refine dyadically until U - L <= eps");
  integrate->add_option("--n-cap", cfg.n_cap, "largest n tried with --eps");

  auto* modsum = app.add_subcommand("modsum", "modified sums u, l, s over mapped cells");
  add_common(modsum, cfg, true);
  add_rule(modsum, cfg);
  add_n(modsum, cfg, "number of uniform cells (default 1024)");

  auto* study = app.add_subcommand("study", "convergence of modified sums toward the predicted limit");
  add_common(study, cfg, true);
  add_rule(study, cfg);
  add_schedule(study, cfg, "dyadic:kmin:kmax or n1,n2,... (default dyadic:4:12)");
  study->add_option("--tol", cfg.tol, "verdict tolerance relative to max(1, |predicted|)");

  auto* diagnose = app.add_subcommand("diagnose", "A/C/D decomposition of lengthphi modified sums");
  add_common(diagnose, cfg, true);
  add_rule(diagnose, cfg);
  add_schedule(diagnose, cfg, "dyadic:kmin:kmax or n1,n2,... (default dyadic:6:10)");

  auto* signal = app.add_subcommand("signal", "square-wave gated integration");
  add_common(signal, cfg, false);
  add_schedule(signal, cfg, "carrier periods: dyadic:kmin:kmax or n1,n2,... (default dyadic:4:12)");
  signal->add_option("--duty", cfg.duty, "gate duty cycle in (0, 1)");
  signal->add_option("--tol", cfg.tol, "verdict tolerance relative to max(1, |predicted|)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Report report;
    if (integrate->parsed()) {
      cfg.command = "integrate";
      report = run_integrate(cfg);
    } else if (modsum->parsed()) {
      cfg.command = "modsum";
      report = run_modsum(cfg);
    } else if (study->parsed()) {
      cfg.command = "study";
      report = run_study(cfg);
    } else if (diagnose->parsed()) {
      cfg.command = "diagnose";
      report = run_diagnose(cfg);
    } else {
      cfg.command = "signal";
      report = run_signal(cfg);
    }

    const std::string text = render(report, cfg.output);
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out_path, std::ios::binary);
      if (!out) throw CliError{kUsage, "cannot open --out file '" + cfg.out_path + "'"};
      out << text;
    }
    if (report.exit_code == kNotConverged)
      std::cerr << "modsum: verdict " << report.doc["verdict"].get<std::string>() << "\n";
    return report.exit_code;
  } catch (const CliError& e) {
    std::cerr << "modsum: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "modsum: " << e.what() << "\n";
    return kUsage;
  }
}
