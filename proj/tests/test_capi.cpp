#include <cmath>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "modsum/modsum.h"

namespace {

struct FunctionDeleter {
  void operator()(msum_function* f) const { msum_function_free(f); }
};
struct WeightDeleter {
  void operator()(msum_weight* w) const { msum_weight_free(w); }
};
struct MapDeleter {
  void operator()(msum_map* m) const { msum_map_free(m); }
};
struct StudyDeleter {
  void operator()(msum_study* s) const { msum_study_free(s); }
};

using Function = std::unique_ptr<msum_function, FunctionDeleter>;
using WeightPtr = std::unique_ptr<msum_weight, WeightDeleter>;
using Map = std::unique_ptr<msum_map, MapDeleter>;
using Study = std::unique_ptr<msum_study, StudyDeleter>;

Function parse(const char* text, const double* bound = nullptr, const double* lipschitz = nullptr) {
  msum_function* f = nullptr;
  const msum_status st = msum_function_parse(text, 0.0, 1.0, bound, lipschitz, &f);
  REQUIRE_MESSAGE(st == MSUM_OK, std::string(msum_last_error()));
  return Function(f);
}

WeightPtr weight(const char* psi, const char* Psi = nullptr) {
  const Function d = parse(psi);
  const Function c = Psi ? parse(Psi) : Function();
  msum_weight* w = nullptr;
  REQUIRE(msum_weight_create(d.get(), c.get(), &w) == MSUM_OK);
  return WeightPtr(w);
}

Map map(const char* descriptor, const msum_weight* w) {
  msum_map* m = nullptr;
  const msum_status st = msum_map_parse(descriptor, w, &m);
  REQUIRE_MESSAGE(st == MSUM_OK, std::string(msum_last_error()));
  return Map(m);
}

constexpr msum_rule kLeft{MSUM_RULE_LEFT, 0};
constexpr msum_rule kMid{MSUM_RULE_MID, 0};

}  // namespace

TEST_CASE("metadata and status names") {
  CHECK(std::string(msum_version()) == "0.1.0");
  CHECK(std::string(msum_status_name(MSUM_OK)) == "ok");
  CHECK(std::string(msum_status_name(MSUM_E_HYPOTHESIS)) == "hypothesis-violation");
  CHECK(std::string(msum_status_name(static_cast<msum_status>(99))) == "unknown");
}

TEST_CASE("parse errors report status and offset") {
  msum_function* f = nullptr;
  CHECK(msum_function_parse("x*", 0.0, 1.0, nullptr, nullptr, &f) == MSUM_E_SYNTAX);
  CHECK(f == nullptr);
  CHECK(msum_last_error_offset() == 2);
  CHECK(std::strlen(msum_last_error()) > 0);

  CHECK(msum_function_parse("y", 0.0, 1.0, nullptr, nullptr, &f) == MSUM_E_UNKNOWN_IDENTIFIER);
  CHECK(msum_function_parse("x", 1.0, 0.0, nullptr, nullptr, &f) == MSUM_E_INVALID_ARGUMENT);
  CHECK(msum_function_parse(nullptr, 0.0, 1.0, nullptr, nullptr, &f) == MSUM_E_INVALID_ARGUMENT);

  const Function ok = parse("2*x+1");
  CHECK(msum_last_error_offset() == -1);
  CHECK(std::string(msum_last_error()).empty());
  double v = 0.0;
  CHECK(msum_function_eval(ok.get(), 0.25, &v) == MSUM_OK);
  CHECK(v == 1.5);

  // Validation samples hit the pole.
  CHECK(msum_function_parse("1/(x-0.5)", 0.0, 1.0, nullptr, nullptr, &f) == MSUM_E_DOMAIN);
  const Function root = parse("sqrt(x)");
  CHECK(msum_function_eval(root.get(), -1.0, &v) == MSUM_E_DOMAIN);

  msum_rule r;
  CHECK(msum_parse_rule("seeded:12", &r) == MSUM_OK);
  CHECK(r.kind == MSUM_RULE_SEEDED);
  CHECK(r.seed == 12);
  CHECK(msum_parse_rule("sideways", &r) == MSUM_E_INVALID_ARGUMENT);
}

TEST_CASE("declared bounds and Lipschitz constants are checked") {
  const double m = 0.5;
  msum_function* f = nullptr;
  CHECK(msum_function_parse("x", 0.0, 1.0, &m, nullptr, &f) == MSUM_E_HYPOTHESIS);
  const double l = 2.0;
  const double big = 3.0;
  const Function g = parse("x^2", &big, &l);
  CHECK(msum_function_bound(g.get()) == 3.0);
  CHECK(std::string(msum_function_text(g.get())) == "(x ^ 2)");
}

TEST_CASE("classic sums through the handle interface") {
  const auto w = weight("1", "x");
  const auto f = parse("x");
  msum_sum_report r;
  REQUIRE(msum_darboux(f.get(), w.get(), 4, kLeft, &r) == MSUM_OK);
  CHECK(r.n_cells == 4);
  CHECK(r.mesh == 0.25);
  CHECK(r.sample_sum == 0.375);
  CHECK(r.lower == 0.375);
  CHECK(r.upper == 0.625);

  int converged = 0;
  REQUIRE(msum_refine_until(f.get(), w.get(), 1e-2, 1 << 12, &r, &converged) == MSUM_OK);
  CHECK(converged == 1);
  CHECK(r.upper - r.lower <= 1e-2);

  msum_oracle o;
  REQUIRE(msum_oracle_integral(f.get(), w.get(), 1 << 12, &o) == MSUM_OK);
  CHECK(o.lower <= 0.5);
  CHECK(o.upper >= 0.5);

  double len = 0.0;
  CHECK(msum_weight_length(w.get(), 0.25, 0.75, &len) == MSUM_OK);
  CHECK(len == 0.5);
  CHECK(msum_weight_length(w.get(), 0.5, 2.0, &len) == MSUM_E_INVALID_ARGUMENT);
  CHECK(msum_darboux(f.get(), w.get(), 0, kLeft, &r) == MSUM_E_INVALID_ARGUMENT);
  CHECK(msum_darboux(f.get(), w.get(), -3, kLeft, &r) == MSUM_E_INVALID_ARGUMENT);
}

TEST_CASE("maps, modified sums and predictions") {
  const auto w = weight("1");
  const auto half = map("gamma:0.5", w.get());
  msum_map_info info;
  REQUIRE(msum_map_info_get(half.get(), &info) == MSUM_OK);
  CHECK(info.kind == MSUM_MAP_GAMMA_LEFT);
  CHECK(info.factor == 0.5);
  CHECK(std::strlen(msum_map_text(half.get())) > 0);

  msum_cell_image img;
  REQUIRE(msum_map_apply(half.get(), w.get(), 0.2, 0.4, &img) == MSUM_OK);
  CHECK(img.empty == 0);
  CHECK(img.lo == 0.2);
  CHECK(std::fabs(img.hi - 0.3) <= 1e-16);

  const auto one = parse("1");
  const auto lip = map("lipschitz:x/2", w.get());
  msum_modsum_report r;
  REQUIRE(msum_modified_sums(one.get(), w.get(), lip.get(), 64, kMid, &r) == MSUM_OK);
  CHECK(std::fabs(r.s - 0.5) <= 1e-14);
  CHECK(r.n_cells == 64);

  msum_prediction p;
  REQUIRE(msum_predict_limit(one.get(), w.get(), lip.get(), &p) == MSUM_OK);
  CHECK(p.theorem == MSUM_THEOREM_E);
  CHECK(std::fabs(p.value - 0.5) <= 1e-12);

  msum_map* bad = nullptr;
  CHECK(msum_map_parse("lengthphi:t+0.1:alpha=0", w.get(), &bad) == MSUM_E_HYPOTHESIS);
  CHECK(std::string(msum_last_error()).find("φ(α)=0 violated") != std::string::npos);
  CHECK(msum_map_parse("lipschitz:2*x", w.get(), &bad) == MSUM_E_HYPOTHESIS);
  CHECK(msum_map_parse("targetc:0.5:gamma=0.5", w.get(), &bad) == MSUM_E_HYPOTHESIS);
  CHECK(msum_map_parse("lipschitz:x*", w.get(), &bad) == MSUM_E_SYNTAX);
  CHECK(bad == nullptr);

  const auto narrow = map("gamma:0.5:eta=0.1", w.get());
  CHECK(msum_modified_sums(one.get(), w.get(), narrow.get(), 4, kMid, &r) == MSUM_E_CELL_TOO_WIDE);
}

TEST_CASE("study handles") {
  const auto w = weight("1");
  const auto f = parse("x");
  const auto m = map("gamma:0.5", w.get());
  const std::vector<int64_t> schedule{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  msum_study* raw = nullptr;
  REQUIRE(msum_study_run(f.get(), w.get(), m.get(), schedule.data(), schedule.size(), kMid, 1e-3, &raw) == MSUM_OK);
  const Study s(raw);
  REQUIRE(msum_study_size(s.get()) == schedule.size());
  msum_study_row row;
  REQUIRE(msum_study_row_get(s.get(), schedule.size() - 1, &row) == MSUM_OK);
  CHECK(row.n == 4096);
  CHECK(row.abs_error <= 1e-3);
  CHECK(msum_study_row_get(s.get(), schedule.size(), &row) == MSUM_E_INVALID_ARGUMENT);
  msum_study_summary sum;
  REQUIRE(msum_study_summary_get(s.get(), &sum) == MSUM_OK);
  CHECK(sum.converged == 1);
  CHECK(std::fabs(sum.prediction.value - 0.25) <= 1e-9);

  const auto kinked = map("lengthphi:min(t,0.3):alpha=0", w.get());
  const int64_t coarse[] = {2, 4};
  CHECK(msum_study_run(f.get(), w.get(), kinked.get(), coarse, 2, kMid, 1e-3, &raw) ==
        MSUM_E_SCHEDULE_TOO_COARSE);
}

TEST_CASE("diagnostics and gated integrals") {
  const auto w = weight("1 + x", "x + x^2/2");
  const double one = 1.0;
  const auto f = parse("x", &one, &one);
  const auto sine = map("lengthphi:sin(t):alpha=0", w.get());
  msum_diagnostics d;
  REQUIRE(msum_theorem_b_diagnostics(f.get(), w.get(), sine.get(), 256, kMid, &d) == MSUM_OK);
  CHECK(std::fabs(d.a_n) <= d.a_bound);
  CHECK(d.identity_residual <= 1e-12 * std::fabs(d.s));

  const auto unit = weight("1");
  const auto t = parse("t");
  double v = 0.0;
  REQUIRE(msum_gated_integral(t.get(), unit.get(), 4, 0.5, &v) == MSUM_OK);
  CHECK(v == 0.1875);
  REQUIRE(msum_gated_reference(t.get(), unit.get(), 4, 0.5, &v) == MSUM_OK);
  CHECK(std::fabs(v - 0.21875) <= 1e-15);
  CHECK(msum_gated_integral(t.get(), unit.get(), 4, 1.5, &v) == MSUM_E_INVALID_ARGUMENT);

  const int64_t carriers[] = {16, 64, 256, 1024, 4096};
  msum_study* raw = nullptr;
  REQUIRE(msum_retrieval_study(t.get(), unit.get(), carriers, 5, 0.5, 1e-3, &raw) == MSUM_OK);
  const Study s(raw);
  msum_study_summary sum;
  REQUIRE(msum_study_summary_get(s.get(), &sum) == MSUM_OK);
  CHECK(sum.converged == 1);
}

TEST_CASE("thread count setting") {
  msum_set_threads(3);
  CHECK(msum_get_threads() == 3);
  msum_set_threads(0);
  CHECK(msum_get_threads() >= 1);
}
