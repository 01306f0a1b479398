#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

// Runs the CLI with the given arguments; stderr is merged into `out` when
// `merge_stderr` is set and discarded otherwise.
Run cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = "\"" MODSUM_CLI_PATH "\" " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json json_of(const Run& r) {
  REQUIRE_MESSAGE(r.exit_code != -1, r.out);
  return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_CASE("study example converges with exit 0") {
  const Run r = cli(
      "study --f \"x\" --psi \"1\" --interval 0 1 --map \"gamma:0.5\" --schedule dyadic:4:12 --tol 1e-3 --output json");
  CHECK(r.exit_code == 0);
  const auto doc = json_of(r);
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "study");
  CHECK(doc["verdict"] == "converged");
  CHECK(doc["results"].size() == 9);
  CHECK(doc["results"].back()["n"] == 4096);
  CHECK(doc["results"].back()["abs_error"].get<double>() <= 1e-3);
  CHECK(std::fabs(doc["oracle"]["value"].get<double>() - 0.25) <= 1e-9);
  CHECK(doc["oracle"]["bracket_lo"].get<double>() <= 0.25);
  CHECK(doc["oracle"]["bracket_hi"].get<double>() >= 0.25);
  CHECK(doc["config"]["map"] == "gamma:0.5");
  CHECK_FALSE(doc["config"].contains("threads"));
}

TEST_CASE("modsum example with a Lipschitz image") {
  const Run r = cli("modsum --f \"1\" --psi \"1\" --interval 0 1 --map \"lipschitz:x/2\" --n 64 --output json");
  CHECK(r.exit_code == 0);
  const auto doc = json_of(r);
  CHECK(std::fabs(doc["results"][0]["s"].get<double>() - 0.5) <= 1e-14);
  CHECK(doc["results"][0]["n"] == 64);
}

TEST_CASE("hypothesis violations exit 2 and name the condition") {
  const Run r = cli("study --f \"x\" --map \"lengthphi:t+0.1:alpha=0\"", true);
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("φ(α)=0 violated") != std::string::npos);

  const Run lip = cli("modsum --f \"1\" --map \"lipschitz:2*x\" --n 8", true);
  CHECK(lip.exit_code == 2);
  CHECK(lip.out.find("Lipschitz constant 1 violated") != std::string::npos);

  CHECK(cli("modsum --f 1 --map \"targetd:0.5:gamma=0.5\" --n 8").exit_code == 2);
  CHECK(cli("integrate --f x --Lf 0.5 --n 8").exit_code == 2);
}

TEST_CASE("usage and parse errors exit 1 with a token position") {
  const Run r = cli("integrate --f \"2*x*\" --n 4", true);
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("offset 4") != std::string::npos);
  CHECK(r.out.find("^") != std::string::npos);

  CHECK(cli("study --f x").exit_code == 1);
  CHECK(cli("study --f x --map spiral:1").exit_code == 1);
  CHECK(cli("study --f x --map gamma:0.5 --schedule dyadic:9:3").exit_code == 1);
  CHECK(cli("study --f x --map gamma:0.5 --rule sideways").exit_code == 1);
  CHECK(cli("integrate --f x --interval 1 0 --n 4").exit_code == 1);
  CHECK(cli("integrate --f x").exit_code == 1);
  CHECK(cli("frobnicate").exit_code == 1);
  CHECK(cli("study --f x --map \"lengthphi:min(t,0.3):alpha=0\" --schedule 2,4").exit_code == 1);
}

TEST_CASE("non-convergence exits 3") {
  const Run r = cli("study --f x --map gamma:0.5 --schedule 4,8 --tol 1e-9 --output json");
  CHECK(r.exit_code == 3);
  CHECK(json_of(r)["verdict"] == "inconclusive");
  CHECK(cli("integrate --f \"x\" --eps 1e-9 --n-cap 64").exit_code == 3);
}

TEST_CASE("csv columns and full-precision values match the json report") {
  const std::string args =
      "study --f \"x^2\" --psi \"1 + x\" --map \"lengthphi:sin(t):alpha=0\" --schedule 32,64,128 --rule seeded:3";
  const Run csv = cli(args + " --output csv");
  const Run js = cli(args + " --output json");
  REQUIRE(csv.exit_code == js.exit_code);
  std::istringstream lines(csv.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "n,mesh,s,u,l,gap,UL_gap,predicted,abs_error");
  const auto doc = json_of(js);
  const char* keys[] = {"n", "mesh", "s", "u", "l", "gap", "ul_gap", "predicted", "abs_error"};
  std::string line;
  std::size_t row = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    for (const char* key : keys) {
      REQUIRE(std::getline(fields, field, ','));
      CHECK(std::stod(field) == doc["results"][row][key].get<double>());
    }
    ++row;
  }
  CHECK(row == 3);
}

TEST_CASE("json numbers reparse to the same values") {
  const Run r = cli("diagnose --f \"x\" --psi \"1 + x\" --map \"lengthphi:sin(t):alpha=0\" --output json");
  REQUIRE(r.exit_code == 0);
  const auto doc = json_of(r);
  CHECK(nlohmann::json::parse(doc.dump()) == doc);
  CHECK(doc["results"].size() == 5);
  for (const auto& row : doc["results"]) CHECK(std::fabs(row["A"].get<double>()) <= row["A_bound"].get<double>());
}

TEST_CASE("signal and integrate reports") {
  const auto sig = json_of(cli("signal --f t --duty 0.5 --schedule 4,4096 --output json"));
  CHECK(sig["results"][0]["gated"] == 0.1875);
  CHECK(std::fabs(sig["results"][0]["reference"].get<double>() - 0.21875) <= 1e-15);
  CHECK(sig["verdict"] == "converged");

  const auto in = json_of(cli("integrate --f x --n 4 --rule left --output json"));
  CHECK(in["results"][0]["lower"] == 0.375);
  CHECK(in["results"][0]["upper"] == 0.625);
  CHECK(in["results"][0]["sample"] == 0.375);
}

TEST_CASE("out flag writes the report to a file") {
  const std::string path = "cli_out_test.json";
  std::remove(path.c_str());
  const Run r = cli("modsum --f 1 --map gamma:0.5 --n 16 --output json --out " + path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["results"][0]["s"] == 0.5);
  std::remove(path.c_str());
}

TEST_CASE("table output is the default") {
  const Run r = cli("modsum --f x --map gamma:0.5 --n 2 --rule left");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("verdict: ok") != std::string::npos);
  CHECK(r.out.find("0.125") != std::string::npos);
}
