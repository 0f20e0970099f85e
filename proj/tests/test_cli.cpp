// Exercises the installed command-line binary end to end. The test runner
// receives two positional arguments — the binary path and the reference
// scenario file — before any framework options.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;

namespace {

std::string g_cli;
std::string g_cfg;

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

long count_lines(const std::string& text) {
  long lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

// Scratch directory per call site, wiped before use.
fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path capture = scratch / "console.txt";
  const std::string cmd =
      "\"" + g_cli + "\" " + args + " >\"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
#ifdef __unix__
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
  result.code = status;
#endif
  if (fs::exists(capture)) result.output = slurp(capture);
  return result;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

TEST_CASE("usage errors exit with the usage code") {
  const fs::path dir = fresh_dir("usage");
  REQUIRE(run_cli("--help", dir).code == 0);
  REQUIRE(run_cli("", dir).code == 1);                      // missing subcommand
  REQUIRE(run_cli("run", dir).code == 1);                   // missing --config
  REQUIRE(run_cli("run --bogus-flag x", dir).code == 1);    // unknown flag
  REQUIRE(run_cli("frobnicate", dir).code == 1);            // unknown subcommand
}

TEST_CASE("run writes a deterministic trace and summary") {
  const fs::path dir1 = fresh_dir("run1");
  const fs::path dir2 = fresh_dir("run2");
  const fs::path dir3 = fresh_dir("run3");
  const std::string base = "run --config " + quote(g_cfg) + " --slots 40";

  const CliResult first =
      run_cli(base + " --seed 5 --out " + quote(dir1.string()), dir1);
  CAPTURE(first.output);
  REQUIRE(first.code == 0);
  REQUIRE(fs::exists(dir1 / "trace.csv"));
  REQUIRE(fs::exists(dir1 / "summary.json"));
  REQUIRE_FALSE(fs::exists(dir1 / "channel_trace.csv"));

  const std::string trace1 = slurp(dir1 / "trace.csv");
  REQUIRE(count_lines(trace1) == 41);  // header + one row per slot
  REQUIRE(trace1.rfind("n,lambda,mu_1,mu_2,mu_3,mu_4,mu_5,P_inst,", 0) == 0);

  const CliResult second =
      run_cli(base + " --seed 5 --out " + quote(dir2.string()), dir2);
  REQUIRE(second.code == 0);
  REQUIRE(slurp(dir2 / "trace.csv") == trace1);
  REQUIRE(slurp(dir2 / "summary.json") == slurp(dir1 / "summary.json"));

  const CliResult third =
      run_cli(base + " --seed 6 --out " + quote(dir3.string()), dir3);
  REQUIRE(third.code == 0);
  REQUIRE(slurp(dir3 / "trace.csv") != trace1);
}

TEST_CASE("overrides reshape the scenario") {
  const fs::path dir = fresh_dir("override");
  const CliResult result = run_cli(
      "run --config " + quote(g_cfg) +
          " --set K=3 --set \"phi=0.5, 0.3, 0.2\" --slots 10 --out " +
          quote(dir.string()),
      dir);
  CAPTURE(result.output);
  REQUIRE(result.code == 0);
  const std::string summary = slurp(dir / "summary.json");
  REQUIRE(summary.find("\"K\": 3") != std::string::npos);
  const std::string trace = slurp(dir / "trace.csv");
  REQUIRE(trace.rfind("n,lambda,mu_1,mu_2,mu_3,P_inst,", 0) == 0);
}

TEST_CASE("configuration mistakes exit with the config code") {
  const fs::path dir = fresh_dir("bad_config");

  const CliResult bad_key = run_cli(
      "run --config " + quote(g_cfg) + " --set bogus=1 --slots 1 --out " +
          quote(dir.string()),
      dir);
  REQUIRE(bad_key.code == 2);
  REQUIRE(bad_key.output.find("unknown key") != std::string::npos);

  const CliResult bad_value = run_cli(
      "run --config " + quote(g_cfg) + " --set K=0 --slots 1 --out " +
          quote(dir.string()),
      dir);
  REQUIRE(bad_value.code == 2);

  const CliResult missing = run_cli(
      "run --config /does/not/exist.cfg --out " + quote(dir.string()), dir);
  REQUIRE(missing.code == 2);

  // Malformed file: the error names the file and line.
  const fs::path broken = dir / "broken.cfg";
  std::ofstream(broken) << "K = 2\ngarbage line\n";
  const CliResult malformed = run_cli(
      "run --config " + quote(broken.string()) + " --out " +
          quote(dir.string()),
      dir);
  REQUIRE(malformed.code == 2);
  REQUIRE(malformed.output.find("broken.cfg:2") != std::string::npos);
}

TEST_CASE("sweep writes one row per axis value") {
  const fs::path dir = fresh_dir("sweep");
  const CliResult result = run_cli(
      "sweep --config " + quote(g_cfg) +
          " --axis snr --values 0,10 --slots 10 --out " + quote(dir.string()),
      dir);
  CAPTURE(result.output);
  REQUIRE(result.code == 0);
  REQUIRE(fs::exists(dir / "sweep.csv"));
  REQUIRE(fs::exists(dir / "sweep.json"));
  const std::string csv = slurp(dir / "sweep.csv");
  REQUIRE(count_lines(csv) == 3);  // header + two points
  REQUIRE(csv.find("snr_db,0,") != std::string::npos);
  REQUIRE(csv.find("snr_db,10,") != std::string::npos);

  const CliResult bad_axis = run_cli(
      "sweep --config " + quote(g_cfg) +
          " --axis bogus --values 1 --slots 1 --out " + quote(dir.string()),
      dir);
  REQUIRE(bad_axis.code == 2);
}

TEST_CASE("rate region requires two users and writes its curve") {
  const fs::path dir = fresh_dir("region");

  // The reference scenario has five users, so the region is refused.
  const CliResult refused = run_cli(
      "rate-region --config " + quote(g_cfg) + " --phi1 0.5 --slots 5 --out " +
          quote(dir.string()),
      dir);
  REQUIRE(refused.code == 2);

  const CliResult traced = run_cli(
      "rate-region --config " + quote(g_cfg) +
          " --set K=2 --set phi=uniform --phi1 0.3,0.5,0.7 --slots 10 --out " +
          quote(dir.string()),
      dir);
  CAPTURE(traced.output);
  REQUIRE(traced.code == 0);
  const std::string csv = slurp(dir / "rate_region.csv");
  REQUIRE(count_lines(csv) == 4);  // header + three pairs
  REQUIRE(csv.rfind("phi_1,phi_2,R_1,R_2", 0) == 0);
}

TEST_CASE("channel trace dumps one row per coefficient") {
  const fs::path dir = fresh_dir("channel");
  const CliResult result = run_cli(
      "run --config " + quote(g_cfg) +
          " --set channel_trace=on --set K=2 --set phi=uniform --set M=4" +
          " --slots 3 --out " + quote(dir.string()),
      dir);
  CAPTURE(result.output);
  REQUIRE(result.code == 0);
  const std::string csv = slurp(dir / "channel_trace.csv");
  // header + slots * K * M * t rows
  REQUIRE(count_lines(csv) == 1 + 3L * 2 * 4 * 4);
  REQUIRE(csv.rfind("slot,k,m,antenna,re,im", 0) == 0);
}

TEST_CASE("self-verification passes") {
  const fs::path dir = fresh_dir("verify");
  const CliResult result = run_cli("verify --seed 3", dir);
  CAPTURE(result.output);
  REQUIRE(result.code == 0);
  REQUIRE(result.output.find("[PASS]") != std::string::npos);
  REQUIRE(result.output.find("[FAIL]") == std::string::npos);
}

int main(int argc, char* argv[]) {
  if (argc < 3) {
    std::cerr << "usage: test_cli <cli-binary> <reference-config> "
                 "[framework options]\n";
    return 2;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_cfg = fs::absolute(argv[2]).string();
  std::vector<char*> args;
  args.push_back(argv[0]);
  for (int i = 3; i < argc; ++i) args.push_back(argv[i]);
  return Catch::Session().run(static_cast<int>(args.size()), args.data());
}
