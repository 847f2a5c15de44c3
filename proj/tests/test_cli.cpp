#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qsteer/gaussian.hpp"
#include "sweep_config.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + QSTEER_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const fs::path& tmp_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "qsteer_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tmp_file(const std::string& name) { return (tmp_dir() / name).string(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream ss(line);
  while (std::getline(ss, token, sep)) out.push_back(token);
  return out;
}

std::vector<std::string> data_lines(const std::string& text) {
  auto lines = split(text, '\n');
  std::vector<std::string> out;
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) out.push_back(lines[i]);
  return out;
}

}  // namespace

TEST_CASE("free-particle with no sweep flags emits the single pinned row") {
  const auto out = tmp_file("fp_default.csv");
  const auto r = run_cli("free-particle --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(read_file(out) ==
        "z,R,theta,k,gamma,violation\n"
        "1.000000000000,1.000000000000,0.000000000000,0.000000000000,2.449489742783,0\n");
}

TEST_CASE("free-particle sweep rows match the library and straddle the boundary") {
  const auto out = tmp_file("fp_sweep.csv");
  const auto r = run_cli(
      "free-particle --z-min 0.2 --z-max 0.32 --z-steps 7 "
      "--r-min 0.001 --r-max 0.001 --r-steps 1 "
      "--theta 0.7853981633974483 --k 0 --out " +
      out);
  REQUIRE(r.exit_code == 0);

  qsteer::cli::Range z_range{0.2, 0.32, 7};
  const auto zs = qsteer::cli::grid(z_range);
  const auto rows = data_lines(read_file(out));
  REQUIRE(rows.size() == zs.size());

  bool saw_violation = false;
  bool saw_silence = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto cols = split(rows[i], ',');
    REQUIRE(cols.size() == 6);
    CHECK(cols[0] == qsteer::cli::fmt12(zs[i]));
    const double gamma =
        qsteer::gaussian::gamma_free_particle(zs[i], 0.7853981633974483, 0.0, 0.001);
    CHECK(cols[4] == qsteer::cli::fmt12(gamma));
    const bool violated = gamma < 1.0 - 1e-12;
    CHECK(cols[5] == (violated ? "1" : "0"));
    (violated ? saw_violation : saw_silence) = true;
  }
  // the z = 2 - sqrt(3) boundary sits inside this grid
  CHECK(saw_violation);
  CHECK(saw_silence);
}

TEST_CASE("ghz rows carry the pinned thresholds and witness verdicts") {
  const auto out = tmp_file("ghz_row.csv");
  auto r = run_cli("ghz --n 1 --p 0.5 --dt 0.01 --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(read_file(out) ==
        "N,p,mu,p_c,time_bound,qfi_closed,qfi_dense,var_bound,var_dense,violation_at_dt\n"
        "1,0.500000000000,1.000000000000,0.390388203202,0.577350269190,0.250000000000,"
        "0.250000000000,0.125000000000,0.187500000000,0\n");

  r = run_cli("ghz --n 2 --p 1 --dt 0.01 --out " + out);
  REQUIRE(r.exit_code == 0);
  const auto rows = data_lines(read_file(out));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] ==
        "2,1.000000000000,1.000000000000,0.242535625036,inf,4.000000000000,"
        "4.000000000000,0.000000000000,0.000000000000,1");
}

TEST_CASE("ghz size guard points at the closed-form escape hatch") {
  const auto out = tmp_file("ghz_guard.csv");
  const auto refused = run_cli("ghz --n 12 --p 0.5 --dt 0.01 --out " + out);
  CHECK(refused.exit_code == 2);
  CHECK(refused.output.find("--closed-form-only") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  const auto allowed = run_cli("ghz --n 12 --p 0.5 --dt 0.01 --closed-form-only --out " + out);
  REQUIRE(allowed.exit_code == 0);
  const auto rows = data_lines(read_file(out));
  REQUIRE(rows.size() == 1);
  const auto cols = split(rows[0], ',');
  REQUIRE(cols.size() == 10);
  CHECK(cols[0] == "12");
  CHECK(cols[6] == "nan");
  CHECK(cols[8] == "nan");

  // the small-dt fallback agrees with the dense verdict where both run
  const auto dense = run_cli("ghz --n 2 --p 1 --dt 0.01 --out " + out);
  REQUIRE(dense.exit_code == 0);
  const auto dense_cols = split(data_lines(read_file(out))[0], ',');
  const auto fast = run_cli("ghz --n 2 --p 1 --dt 0.01 --closed-form-only --out " + out);
  REQUIRE(fast.exit_code == 0);
  const auto fast_cols = split(data_lines(read_file(out))[0], ',');
  CHECK(dense_cols[9] == fast_cols[9]);
}

TEST_CASE("config files drive sweeps and explicit flags override them") {
  const auto cfg_path = tmp_file("sweep.json");
  const auto cfg_out = tmp_file("from_config.csv");
  {
    std::ofstream cfg(cfg_path);
    cfg << "{\n"
        << "  \"scenario\": \"ghz\",\n"
        << "  \"n\": 1,\n"
        << "  \"p\": {\"min\": 0.0, \"max\": 1.0, \"steps\": 3},\n"
        << "  \"dt\": 0.01,\n"
        << "  \"out\": \"" << cfg_out << "\"\n"
        << "}\n";
  }

  const auto r = run_cli("ghz --config " + cfg_path);
  REQUIRE(r.exit_code == 0);
  const auto rows = data_lines(read_file(cfg_out));
  REQUIRE(rows.size() == 3);
  CHECK(split(rows[0], ',')[1] == "0.000000000000");
  CHECK(split(rows[1], ',')[1] == "0.500000000000");
  CHECK(split(rows[2], ',')[1] == "1.000000000000");
  // p = 0: no steering anywhere, all thresholds collapse
  CHECK(split(rows[0], ',')[4] == "0.000000000000");
  CHECK(split(rows[0], ',')[9] == "0");

  const auto override_out = tmp_file("overridden.csv");
  const auto r2 = run_cli("ghz --config " + cfg_path + " --p 0.5 --out " + override_out);
  REQUIRE(r2.exit_code == 0);
  const auto overridden = data_lines(read_file(override_out));
  REQUIRE(overridden.size() == 1);
  CHECK(split(overridden[0], ',')[1] == "0.500000000000");

  const auto unknown_key = tmp_file("bad.json");
  {
    std::ofstream cfg(unknown_key);
    cfg << "{\"scenario\": \"ghz\", \"bogus\": 1}\n";
  }
  CHECK(run_cli("ghz --config " + unknown_key).exit_code == 2);
}

TEST_CASE("scenario names must match the subcommand") {
  const auto cfg_path = tmp_file("mismatch.json");
  {
    std::ofstream cfg(cfg_path);
    cfg << "{\"scenario\": \"free-particle\"}\n";
  }
  const auto r = run_cli("ghz --config " + cfg_path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("does not match") != std::string::npos);

  const auto disp = tmp_file("displacement.json");
  {
    std::ofstream cfg(disp);
    cfg << "{\"scenario\": \"displacement\"}\n";
  }
  const auto r2 = run_cli("free-particle --config " + disp);
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("library API") != std::string::npos);

  const auto junk = tmp_file("junk.json");
  {
    std::ofstream cfg(junk);
    cfg << "{\"scenario\": \"teleportation\"}\n";
  }
  CHECK(run_cli("free-particle --config " + junk).exit_code == 2);
}

TEST_CASE("invalid ranges are usage errors and write nothing") {
  const auto out = tmp_file("never_written.csv");
  CHECK(run_cli("free-particle --z-steps 0 --out " + out).exit_code == 2);
  CHECK(run_cli("free-particle --z-min 0.5 --z-max 0.2 --z-steps 3 --out " + out).exit_code == 2);
  CHECK(run_cli("free-particle --z-min 0 --z-max 1 --z-steps 2 --out " + out).exit_code == 2);
  CHECK(run_cli("ghz --p 1.5 --out " + out).exit_code == 2);
  CHECK(run_cli("ghz --n 0 --out " + out).exit_code == 2);
  CHECK(run_cli("ghz --dt 0 --out " + out).exit_code == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("verification runs clean, writes its report, and is bitwise reproducible") {
  const auto report_a = tmp_file("verify_a.json");
  const auto report_b = tmp_file("verify_b.json");
  const auto a = run_cli("verify --seed 7 --out " + report_a);
  const auto b = run_cli("verify --seed 7 --out " + report_b);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(read_file(report_a) == read_file(report_b));
  CHECK(a.output.find("FAIL") == std::string::npos);
  CHECK(a.output.find("checks passed") != std::string::npos);

  const auto parsed = nlohmann::json::parse(read_file(report_a));
  REQUIRE(parsed.is_array());
  CHECK(parsed.size() >= 25);
  for (const auto& entry : parsed) {
    CHECK(entry.at("passed").get<bool>());
    CHECK(entry.at("tolerance").is_number());
    CHECK(entry.at("measured").is_number());
  }
}

TEST_CASE("the coupling audit makes exactly the agreement check fail") {
  const auto report = tmp_file("verify_audit.json");
  const auto r = run_cli("verify --seed 7 --audit-momentum-scaled-xx --out " + report);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("FAIL gamma_closed_form_vs_pipeline") != std::string::npos);

  const auto parsed = nlohmann::json::parse(read_file(report));
  int failed = 0;
  for (const auto& entry : parsed) {
    if (!entry.at("passed").get<bool>()) {
      ++failed;
      CHECK(entry.at("check_id").get<std::string>() == "gamma_closed_form_vs_pipeline");
    }
  }
  CHECK(failed == 1);
}

TEST_CASE("usage errors exit with code 2 and help with zero") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("free-particle --bogus").exit_code == 2);
  CHECK(run_cli("teleport").exit_code == 2);

  const auto help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.output.find("free-particle") != std::string::npos);
  CHECK(help.output.find("ghz") != std::string::npos);
  CHECK(help.output.find("verify") != std::string::npos);
}
