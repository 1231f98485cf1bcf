// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dwsl/error.hpp"
#include "dwsl_cli/commands.hpp"
#include "dwsl_cli/run_config.hpp"

using namespace dwsl;
using namespace dwsl::cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dwsl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

Invocation parse(std::vector<std::string> args) {
  args.insert(args.begin(), "dwsl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args_and_config(static_cast<int>(argv.size()), argv.data());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("branch flags") {
  const auto inv = parse({"branch", "--Btilde", "1", "--sigma", "0.25", "--parity", "even", "--m", "0",
                          "--h", "0.02,0.01,0.005"});
  const auto& c = inv.config;
  CHECK(c.command == Command::Branch);
  CHECK(c.profile == DampingProfile::strip(1.0, 0.25));
  CHECK(c.knob("parity") == "even");
  CHECK(c.knob_int("m") == 0);
  CHECK(c.knob_list("h") == std::vector<double>{0.02, 0.01, 0.005});
  CHECK(c.geometry.domain == Domain::Torus);
}

TEST_CASE("usage errors") {
  CHECK(code_of([] { parse({"branch", "--domain", "square", "--boundary", "periodic"}); }) ==
        ErrorCode::UsageError);
  CHECK(code_of([] { parse({}); }) == ErrorCode::UsageError);
  CHECK(code_of([] { parse({"branch", "--bogus", "1"}); }) == ErrorCode::UsageError);
  CHECK(code_of([] { parse({"quasimode", "--profile", "constant", "--sigma", "0.2"}); }) ==
        ErrorCode::UsageError);
  CHECK(invoke({"branch", "--domain", "square", "--boundary", "periodic"}).code == 2);
  const auto none = invoke({});
  CHECK(none.code == 2);
  CHECK(none.err.find("branch") != std::string::npos);
  const auto unknown = invoke({"simulate", "--tfinal", "3"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("tfinal") != std::string::npos);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"branch", "--help"}).code == 0);
}

TEST_CASE("config file precedence and unknown keys") {
  const auto file = temp_file("dwsl_cli_precedence.cfg",
                              "[run]\ncommand = quasimode\n\n[profile]\nkind = strip\nstrength = 2\n"
                              "half_width = 0.3\n\n[quasimode]\nmargin = 0.1\nn = 1..4\n");
  const auto a = parse({"quasimode", "--config", file.string()});
  CHECK(a.config.profile == DampingProfile::strip(2.0, 0.3));
  CHECK(a.config.knob_double("margin") == 0.1);
  CHECK(a.config.knob("samples") == "8193");
  const auto b = parse({"quasimode", "--config", file.string(), "--margin", "0.02", "--sigma", "0.35"});
  CHECK(b.config.knob_double("margin") == 0.02);
  CHECK(b.config.profile == DampingProfile::strip(2.0, 0.35));
  const auto c = parse({"quasimode", "--config", file.string(), "--profile", "zero"});
  CHECK(c.config.profile == DampingProfile::zero());

  const auto bad = temp_file("dwsl_cli_bad.cfg", "[quasimode]\nmargn = 0.1\n");
  CHECK(invoke({"quasimode", "--config", bad.string()}).code == 2);
  const auto wrong = temp_file("dwsl_cli_wrong.cfg", "[run]\ncommand = branch\n");
  CHECK(invoke({"quasimode", "--config", wrong.string()}).code == 2);
  std::filesystem::remove(file);
  std::filesystem::remove(bad);
  std::filesystem::remove(wrong);
}

TEST_CASE("config round trip") {
  for (Command cmd : all_commands()) {
    const auto d = default_config(cmd);
    CHECK(parse_config_text(serialize(d)) == d);
    for (const auto& k : knob_specs(cmd)) {
      CHECK(d.knobs.count(k.key) == 1);
      CHECK(!k.help.empty());
    }
  }
  const auto inv = parse({"simulate", "--profile", "smooth_exp", "--alpha", "0.5", "--t-final", "3",
                          "--domain", "torus"});
  CHECK(parse_config_text(serialize(inv.config)) == inv.config);
  const auto printed = invoke({"resolvent-scan", "--grid-n", "512", "--print-config"});
  CHECK(printed.code == 0);
  CHECK(parse_config_text(printed.out).knob("grid_n") == "512");
}

TEST_CASE("ranges") {
  CHECK(parse_range_list("1..4") == std::vector<double>{1, 2, 3, 4});
  CHECK(parse_range_list("5..20:5,33") == std::vector<double>{5, 10, 15, 20, 33});
  CHECK(parse_range_list("0.5") == std::vector<double>{0.5});
  CHECK(code_of([] { parse_range_list("1..x"); }) == ErrorCode::UsageError);
}

TEST_CASE("data terms") {
  const auto d = parse_data_terms("fourier:1:0:1;bump:4:0.5:0.2");
  REQUIRE(d.size() == 2);
  CHECK(d[0].shape == DataShape::Fourier);
  CHECK(d[0].n == 1);
  CHECK(d[1].shape == DataShape::Bump);
  CHECK(d[1].amplitude == 0.5);
  CHECK(d[1].support == 0.2);
  CHECK(code_of([] { parse_data_terms("wave:1"); }) == ErrorCode::UsageError);
}

TEST_CASE("quasimode table") {
  const auto r = invoke({"quasimode", "--n", "1..100"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 101);
  CHECK(rows[0] == std::vector<std::string>{"n", "frequency", "ratio", "lower_bound_C"});
  const double first = std::stod(rows[1][2]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stoi(rows[i][0]) == static_cast<int>(i));
    CHECK(std::abs(std::stod(rows[i][2]) - first) <= 1e-10 * first);
  }
}

TEST_CASE("undamped resolvent scan carries the oracle") {
  const auto r = invoke(
      {"resolvent-scan", "--profile", "zero", "--s", "1.3,4.1,7.7", "--grid-n", "1024", "--richardson", "--fit", "false"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  REQUIRE(rows[0].back() == "oracle_norm");
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][1]) == doctest::Approx(std::stod(rows[i].back())).epsilon(1e-6));
}

TEST_CASE("deterministic across thread counts") {
  const std::vector<std::string> args = {"resolvent-scan", "--s", "3..12", "--grid-n", "256", "--fit", "false"};
  setenv("DWSL_THREADS", "1", 1);
  const auto one = invoke(args);
  setenv("DWSL_THREADS", "4", 1);
  const auto four = invoke(args);
  unsetenv("DWSL_THREADS");
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == invoke(args).out);
}

TEST_CASE("numerical errors exit 1 with the name") {
  const auto r = invoke({"branch", "--parity", "odd", "--m", "0", "--h", "0.01"});
  CHECK(r.code == 1);
  CHECK(r.err.find("OddMZero") != std::string::npos);
  const auto q = invoke({"quasimode", "--profile", "constant", "--value", "1"});
  CHECK(q.code == 1);
  CHECK(q.err.find("NoGap") != std::string::npos);
}

TEST_CASE("output file") {
  const auto p = std::filesystem::temp_directory_path() / "dwsl_cli_branch.csv";
  const auto r = invoke({"branch", "--h", "0.02,0.01", "--output", p.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(p, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = csv_rows(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "h");
  CHECK(rows[1][0] == "0.02");
  std::filesystem::remove(p);
}

TEST_CASE("semigroup report") {
  const auto r = invoke({"semigroup-verify", "--cutoff", "6", "--s", "5,10", "--z-count", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("sandwich") != std::string::npos);
}

}
