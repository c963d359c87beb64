// End-to-end checks of the command-line tool: output schemas, reproducible
// bytes, and exit codes (0 success, 1 verification failure, 2 bad config).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <sys/wait.h>

namespace {

const char* cli_path() { return INVMEAS_CLI_PATH; }

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("eigenphase csv: header, row count, range, reproducible bytes") {
  const std::string base =
      "sample --group U --n 3 --count 50 --stat eigenphases --seed 7";
  REQUIRE(run_cli(base + " --out cli_phases_a.csv") == 0);
  REQUIRE(run_cli(base + " --out cli_phases_b.csv") == 0);
  const std::string a = slurp("cli_phases_a.csv");
  CHECK(a == slurp("cli_phases_b.csv"));

  const std::vector<std::string> rows = lines_of(a);
  REQUIRE(rows.size() == 151);  // header + 50 samples x 3 phases
  CHECK(rows[0] == "sample,phase");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    REQUIRE(comma != std::string::npos);
    const long sample = std::stol(rows[i].substr(0, comma));
    const double phase = std::stod(rows[i].substr(comma + 1));
    CHECK(sample == static_cast<long>((i - 1) / 3));
    CHECK(phase >= 0.0);
    CHECK(phase < 2.0 * 3.14159265358979324);
  }
  std::remove("cli_phases_a.csv");
  std::remove("cli_phases_b.csv");
}

TEST_CASE("count zero writes an empty file and exits cleanly") {
  REQUIRE(run_cli("sample --group SO --n 4 --count 0 --seed 2 "
                  "--out cli_empty.csv") == 0);
  CHECK(slurp("cli_empty.csv").empty());
  std::remove("cli_empty.csv");
}

TEST_CASE("poisson sample json: schema, counts, window") {
  REQUIRE(run_cli("sample --process poisson --mass 2 --count 40 --seed 1 "
                  "--out cli_poisson.json") == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp("cli_poisson.json"));
  CHECK(j.at("schema") == 1);
  CHECK(j.at("process") == "poisson");
  const auto& configs = j.at("configurations");
  REQUIRE(configs.size() == 40);
  for (const auto& w : configs)
    for (const auto& x : w) {
      CHECK(x.get<double>() >= 0.0);
      CHECK(x.get<double>() <= 1.0);
    }
  std::remove("cli_poisson.json");
}

TEST_CASE("ewens sample json carries permutations and cycle counts") {
  REQUIRE(run_cli("sample --process ewens --n 6 --t 1.5 --count 25 --seed 9 "
                  "--out cli_ewens.json") == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp("cli_ewens.json"));
  CHECK(j.at("schema") == 1);
  REQUIRE(j.at("permutations").size() == 25);
  REQUIRE(j.at("cycle_counts").size() == 25);
  for (const auto& p : j.at("permutations")) {
    REQUIRE(p.size() == 6);
    std::vector<bool> seen(6, false);
    for (const auto& v : p) seen.at(v.get<int>()) = true;
    for (bool s : seen) CHECK(s);
  }
  for (const auto& c : j.at("cycle_counts")) {
    CHECK(c.get<int>() >= 1);
    CHECK(c.get<int>() <= 6);
  }
  std::remove("cli_ewens.json");
}

TEST_CASE("bad configurations exit with code 2") {
  CHECK(run_cli("sample --group U --count 5") == 2);        // no seed
  CHECK(run_cli("sample --group Q --count 5 --seed 1") == 2);
  CHECK(run_cli("sample --count 5 --seed 1") == 2);         // no source
  CHECK(run_cli("sample --group U --process ewens --count 5 --seed 1") == 2);
  CHECK(run_cli("sample --process poisson --mass -1 --count 5 --seed 1") == 2);
  CHECK(run_cli("sample --group U --stat cycles --count 5 --seed 1") == 2);
  CHECK(run_cli("verify nosuchsuite --seed 1") == 2);
  CHECK(run_cli("verify haar --seed 1 --format csv") == 2);
  CHECK(run_cli("verify haar") == 2);                       // no seed
  CHECK(run_cli("verify ewens --seed 1 --group-file missing.json") == 2);
  CHECK(run_cli("spectra --family Sp --n 3 --seed 1") == 2);  // odd size
  CHECK(run_cli("nosuchcommand") == 2);
}

TEST_CASE("verification report: schema, sorted ids, passing suite exits 0") {
  REQUIRE(run_cli("verify polymorph --seed 3 --samples 60000 "
                  "--out cli_report.json") == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp("cli_report.json"));
  CHECK(j.at("schema") == 1);
  CHECK(j.at("suite") == "polymorph");
  CHECK(j.at("seed") == 3);
  CHECK(j.at("failed") == 0);
  const auto& checks = j.at("checks");
  REQUIRE(checks.size() >= 4);
  std::string prev;
  for (const auto& c : checks) {
    const std::string id = c.at("id").get<std::string>();
    CHECK(prev < id);
    prev = id;
    CHECK(c.at("pass") == true);
    CHECK(c.at("claim").get<std::string>().size() > 10);
    CHECK(c.contains("measured"));
    CHECK(c.contains("reference"));
  }
  std::remove("cli_report.json");
}

TEST_CASE("exact rational checks report pass at small budgets") {
  REQUIRE(run_cli("verify ewens --seed 3 --samples 6000 "
                  "--out cli_ewens_report.json") == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp("cli_ewens_report.json"));
  bool found = false;
  for (const auto& c : j.at("checks"))
    if (c.at("id") == "ewens/exact_pushforward") {
      found = true;
      CHECK(c.at("pass") == true);
      CHECK(c.at("measured") == c.at("reference"));
    }
  CHECK(found);
  std::remove("cli_ewens_report.json");
}

TEST_CASE("supplied group tables are verified alongside the fourier suite") {
  {
    std::ofstream f("cli_z3.json");
    f << R"({"table": [[0,1,2],[1,2,0],[2,0,1]]})";
  }
  REQUIRE(run_cli("verify fourier --seed 5 --group-file cli_z3.json "
                  "--out cli_fourier_report.json") == 0);
  const nlohmann::json j =
      nlohmann::json::parse(slurp("cli_fourier_report.json"));
  int custom = 0;
  for (const auto& c : j.at("checks")) {
    const std::string id = c.at("id").get<std::string>();
    if (id == "fourier/group_table_identities" ||
        id == "fourier/group_transform_identities") {
      ++custom;
      CHECK(c.at("pass") == true);
    }
  }
  CHECK(custom == 2);
  std::remove("cli_z3.json");
  std::remove("cli_fourier_report.json");
}

TEST_CASE("spectra histogram: totals and the constant rank-one overlay") {
  REQUIRE(run_cli("spectra --family U --n 1 --samples 20000 --bins 10 "
                  "--seed 4 --out cli_u1.csv") == 0);
  const std::vector<std::string> rows = lines_of(slurp("cli_u1.csv"));
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == "bin_left,bin_right,count,analytic_density");
  long total = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ss(rows[i]);
    std::string left, right, count, density;
    std::getline(ss, left, ',');
    std::getline(ss, right, ',');
    std::getline(ss, count, ',');
    std::getline(ss, density, ',');
    total += std::stol(count);
    CHECK(std::stod(density) == doctest::Approx(1.0 / (2.0 * 3.14159265358979324)));
  }
  CHECK(total == 20000);
  std::remove("cli_u1.csv");
}

TEST_CASE("spectra json for a folded rank-two family pools every phase") {
  REQUIRE(run_cli("spectra --family SO --n 4 --samples 5000 --bins 12 "
                  "--seed 4 --format json --out cli_so4.json") == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp("cli_so4.json"));
  CHECK(j.at("schema") == 1);
  long total = 0;
  double mass = 0.0;
  for (const auto& b : j.at("bins")) {
    total += b.at("count").get<long>();
    mass += (b.at("bin_right").get<double>() - b.at("bin_left").get<double>()) *
            b.at("analytic_density").get<double>();
  }
  CHECK(total == 10000);  // two phases per matrix
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  std::remove("cli_so4.json");
}
