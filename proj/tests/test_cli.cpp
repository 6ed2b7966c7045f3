// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "l0bnb/io.hpp"
#include "l0bnb/oracle.hpp"

using namespace l0bnb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    const auto ticks =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() /
           ("l0bnb_cli_test_" + std::to_string(ticks));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Runs the solver binary named by L0BNB_CLI with the given arguments,
// capturing standard output (and standard error when merge_stderr is set).
RunResult run_cli(const std::string& args, bool merge_stderr = false) {
  const char* binary = std::getenv("L0BNB_CLI");
  REQUIRE_MESSAGE(binary != nullptr, "L0BNB_CLI must point at the CLI binary");
  std::string command = std::string("'") + binary + "' " + args;
  command += merge_stderr ? " 2>&1" : " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Value printed after "<key> " on its own line; empty when absent.
std::string output_value(const std::string& output, const std::string& key) {
  std::istringstream stream(output);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.rfind(key + ' ', 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

std::string read_text(const fs::path& p) {
  std::ifstream file(p, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return std::move(buffer).str();
}

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> out;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, delim)) out.push_back(item);
  return out;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("gen emits a readable file and is deterministic in the seed") {
  TempDir dir;
  const fs::path first = dir.path / "a.txt";
  const RunResult gen = run_cli(
      "gen --setup gaussian --m 10 --n 14 --k 2 --seed 5 --out " +
      quoted(first));
  CHECK(gen.exit_code == 0);
  const std::string lambda_text = output_value(gen.output, "lambda");
  const std::string m_text = output_value(gen.output, "M");
  const std::string sigma_text = output_value(gen.output, "sigma");
  CHECK_FALSE(lambda_text.empty());
  CHECK_FALSE(m_text.empty());
  CHECK_FALSE(sigma_text.empty());

  const InstanceData data = read_instance(first);
  CHECK(data.instance.rows() == 10);
  CHECK(data.instance.cols() == 14);
  CHECK(std::stod(lambda_text) == data.instance.lambda());
  CHECK(std::stod(m_text) == data.instance.big_m());
  CHECK(data.metadata.at("seed") == "5");
  CHECK(std::stod(data.metadata.at("sigma")) == std::stod(sigma_text));

  const fs::path second = dir.path / "b.txt";
  const RunResult again = run_cli(
      "gen --setup gaussian --m 10 --n 14 --k 2 --seed 5 --out " +
      quoted(second));
  CHECK(again.exit_code == 0);
  CHECK(read_text(first) == read_text(second));

  const fs::path other = dir.path / "c.txt";
  run_cli("gen --setup gaussian --m 10 --n 14 --k 2 --seed 6 --out " +
          quoted(other));
  CHECK(read_text(first) != read_text(other));
}

TEST_CASE("gen rejects an impossible specification") {
  TempDir dir;
  const fs::path out = dir.path / "bad.txt";
  const RunResult result = run_cli(
      "gen --setup gaussian --m 10 --n 14 --k 7 --seed 1 --out " + quoted(out),
      true);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  const RunResult missing = run_cli("gen --setup gaussian --m 10", true);
  CHECK(missing.exit_code != 0);
}

TEST_CASE("solve finds the same optimum with screening on and off") {
  TempDir dir;
  const fs::path file = dir.path / "inst.txt";
  REQUIRE(run_cli("gen --setup gaussian --m 16 --n 12 --k 2 --seed 9 --out " +
                  quoted(file))
              .exit_code == 0);

  const RunResult on =
      run_cli("solve --instance " + quoted(file) + " --screening on");
  const RunResult off =
      run_cli("solve --instance " + quoted(file) + " --screening off");
  CHECK(on.exit_code == 0);
  CHECK(off.exit_code == 0);
  CHECK(output_value(on.output, "optimal") == "true");
  CHECK(output_value(off.output, "optimal") == "true");

  const double objective_on = std::stod(output_value(on.output, "objective"));
  const double objective_off = std::stod(output_value(off.output, "objective"));
  CHECK(std::abs(objective_on - objective_off) <= 1e-9);

  CHECK(std::stol(output_value(on.output, "nodes_processed")) >= 1);
  CHECK(std::stol(output_value(off.output, "nodes_screened_out")) == 0);
  CHECK(std::stol(output_value(off.output, "variables_fixed_by_screening")) ==
        0);

  // Both agree with the brute-force reference on this small instance.
  const InstanceData data = read_instance(file);
  const OracleSolution reference = exhaustive_solve(data.instance);
  CHECK(std::abs(objective_on - reference.objective) <= 1e-6);
}

TEST_CASE("solve reports a timeout through the exit code") {
  TempDir dir;
  const fs::path file = dir.path / "big.txt";
  REQUIRE(run_cli("gen --setup gaussian --m 100 --n 200 --k 5 --seed 3 --out " +
                  quoted(file))
              .exit_code == 0);
  const RunResult result = run_cli("solve --instance " + quoted(file) +
                                   " --time-limit 0.01");
  CHECK(result.exit_code == 2);
  CHECK(output_value(result.output, "optimal") == "false");
  const std::string objective = output_value(result.output, "objective");
  CHECK_FALSE(objective.empty());
  CHECK(std::isfinite(std::stod(objective)));
}

TEST_CASE("solve exits cleanly on unreadable input") {
  TempDir dir;
  const RunResult missing = run_cli(
      "solve --instance " + quoted(dir.path / "absent.txt"), true);
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("error:") != std::string::npos);

  const fs::path corrupt = dir.path / "corrupt.txt";
  std::ofstream(corrupt) << "not an instance\n";
  const RunResult bad = run_cli("solve --instance " + quoted(corrupt), true);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("line 1") != std::string::npos);
}

TEST_CASE("bench writes per-trial rows, aggregates, and is reproducible") {
  TempDir dir;
  const fs::path csv_path = dir.path / "bench.csv";
  const RunResult result = run_cli(
      "bench --setup gaussian --m 14 --n 10 --k 2 --trials 4 --seed0 11"
      " --time-limit 60 --out " +
      quoted(csv_path));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("k 2 bnb mean_nodes") != std::string::npos);
  CHECK(result.output.find("k 2 bnb_scr mean_nodes") != std::string::npos);

  const std::vector<std::string> lines = split(read_text(csv_path), '\n');
  REQUIRE(lines.size() == 11);  // header + 4*2 data rows + 2 aggregate rows
  CHECK(lines[0] == "setup,m,n,k,seed,method,nodes,time_seconds,failed,objective");

  double node_sum_bnb = 0.0;
  double node_sum_scr = 0.0;
  for (int row = 1; row <= 8; ++row) {
    const std::vector<std::string> fields = split(lines[row], ',');
    REQUIRE(fields.size() == 10);
    CHECK(fields[0] == "gaussian");
    CHECK(fields[1] == "14");
    CHECK(fields[2] == "10");
    CHECK(fields[3] == "2");
    const int trial = (row - 1) / 2;
    CHECK(fields[4] == std::to_string(11 + trial));
    CHECK(fields[5] == (row % 2 == 1 ? "bnb" : "bnb_scr"));
    CHECK(fields[8] == "false");
    (row % 2 == 1 ? node_sum_bnb : node_sum_scr) += std::stod(fields[6]);
  }
  const std::vector<std::string> agg_bnb = split(lines[9], ',');
  const std::vector<std::string> agg_scr = split(lines[10], ',');
  CHECK(agg_bnb[4] == "aggregate");
  CHECK(agg_scr[4] == "aggregate");
  CHECK(agg_bnb[5] == "bnb");
  CHECK(agg_scr[5] == "bnb_scr");
  CHECK(std::stod(agg_bnb[6]) == doctest::Approx(node_sum_bnb / 4).epsilon(1e-12));
  CHECK(std::stod(agg_scr[6]) == doctest::Approx(node_sum_scr / 4).epsilon(1e-12));
  CHECK(agg_bnb[8] == "0");
  CHECK(agg_scr[8] == "0");
  CHECK(std::stod(agg_scr[6]) <= std::stod(agg_bnb[6]));

  // Same seeds, same trees: only the timing columns may differ across runs.
  const fs::path csv_again = dir.path / "bench2.csv";
  REQUIRE(run_cli("bench --setup gaussian --m 14 --n 10 --k 2 --trials 4"
                  " --seed0 11 --time-limit 60 --out " +
                  quoted(csv_again))
              .exit_code == 0);
  const std::vector<std::string> lines_again =
      split(read_text(csv_again), '\n');
  REQUIRE(lines_again.size() == lines.size());
  for (std::size_t row = 0; row < lines.size(); ++row) {
    std::vector<std::string> a = split(lines[row], ',');
    std::vector<std::string> b = split(lines_again[row], ',');
    if (row > 0 && !a.empty()) {
      a[7].clear();
      b[7].clear();
    }
    CHECK(a == b);
  }
}

TEST_CASE("bench covers every sparsity in the list") {
  TempDir dir;
  const fs::path csv_path = dir.path / "multi.csv";
  const RunResult result = run_cli(
      "bench --setup gaussian --m 14 --n 10 --k 1,2 --trials 2 --seed0 3"
      " --time-limit 60 --parallel 2 --out " +
      quoted(csv_path));
  CHECK(result.exit_code == 0);
  const std::vector<std::string> lines = split(read_text(csv_path), '\n');
  REQUIRE(lines.size() == 13);  // header + 2*2*2 data rows + 4 aggregate rows
  int aggregates = 0;
  for (const std::string& line : lines) {
    if (line.find(",aggregate,") != std::string::npos) ++aggregates;
  }
  CHECK(aggregates == 4);
  CHECK(result.output.find("k 1 bnb mean_nodes") != std::string::npos);
  CHECK(result.output.find("k 2 bnb_scr mean_nodes") != std::string::npos);
}

TEST_CASE("bench validates the trial count") {
  TempDir dir;
  const RunResult result = run_cli(
      "bench --setup gaussian --m 14 --n 10 --k 2 --trials 0 --seed0 1"
      " --out " +
      quoted(dir.path / "x.csv"),
      true);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("trials must be at least 1") != std::string::npos);
}
