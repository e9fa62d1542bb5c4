#include "doctest.h"

#include "cli_app.hpp"
#include "hypadams/errors.hpp"
#include "hypadams/kernels.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hypadams;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

} // namespace

TEST_CASE("kernel CSV has a header and round-trips at 17 significant digits") {
  const auto r = run_cli({"kernel", "--kind", "green", "--rho", "0.5:4:5"});
  REQUIRE(r.code == cli::ok);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "rho,value,err_estimate");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    REQUIRE(f.size() == 3);
    const double rho = std::stod(f[0]), value = std::stod(f[1]);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    CHECK(f[1] == buf);
    CHECK(value == doctest::Approx(green_kernel(rho)).epsilon(1e-10));
  }
}

TEST_CASE("heat CSV carries the mass column") {
  const auto r = run_cli({"kernel", "--kind", "heat", "--t", "1", "--rho", "1:2:2"});
  REQUIRE(r.code == cli::ok);
  CHECK(lines(r.out).front() == "rho,value,err_estimate,mass");
}

TEST_CASE("bad arguments exit with code 1") {
  CHECK(run_cli({"kernel", "--kind", "half_power", "--alpha", "-3", "--rho", "1:2:2"}).code == cli::bad_args);
  CHECK(run_cli({"kernel", "--rho", "1:x"}).code == cli::bad_args);
  CHECK(run_cli({"kernel", "--kind", "heat", "--t", "-1"}).code == cli::bad_args);
  const auto unknown = run_cli({"verify", "--target", "9.9"});
  CHECK(unknown.code == cli::bad_args);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run_cli({"frobnicate"}).code == cli::bad_args);
}

TEST_CASE("library exceptions map onto exit codes") {
  std::ostringstream err;
  CHECK(cli::exit_code_for(std::make_exception_ptr(DomainError("x")), err) == cli::bad_args);
  CHECK(cli::exit_code_for(std::make_exception_ptr(DivergentMode("x")), err) == cli::bad_args);
  CHECK(cli::exit_code_for(std::make_exception_ptr(NonConvergent("x")), err) == cli::numerical_failure);
  CHECK(cli::exit_code_for(std::make_exception_ptr(NonFinite("x")), err) == cli::numerical_failure);
  CHECK(cli::exit_code_for(std::make_exception_ptr(ConstraintViolated("x")), err) == cli::margin_failure);
  CHECK_THROWS_AS(cli::exit_code_for(std::make_exception_ptr(std::logic_error("x")), err), std::logic_error);
}

TEST_CASE("theorem JSON has the report keys and --expect drives the exit code") {
  const auto bounded = run_cli({"theorem", "--id", "1.6", "--beta", "315.827", "--expect", "bounded"});
  CHECK(bounded.code == cli::ok);
  const auto j = report::Json::parse(bounded.out);
  for (const char* key : {"theorem", "family", "rows", "verdict", "fitted_constants"}) CHECK(j.contains(key));
  CHECK(j["theorem"] == "1.6");
  CHECK(j["verdict"] == "BOUNDED");

  CHECK(run_cli({"theorem", "--id", "1.6", "--beta", "379", "--expect", "bounded"}).code == cli::margin_failure);
  CHECK(run_cli({"theorem", "--id", "1.6", "--beta", "379", "--expect", "growing"}).code == cli::ok);
}

TEST_CASE("verify target reports pass") {
  const auto r = run_cli({"verify", "--target", "plancherel"});
  CHECK(r.code == cli::ok);
  CHECK(report::Json::parse(r.out)["passed"] == true);
}

TEST_CASE("printed config reproduces the run when read back") {
  const auto path = std::filesystem::temp_directory_path() / "hypadams_test_cli.toml";
  const auto printed = run_cli({"--print-config", "kernel", "--kind", "heat", "--t", "0.25", "--rho", "1:3:3"});
  REQUIRE(printed.code == cli::ok);
  {
    std::ofstream f(path);
    f << printed.out;
  }
  const auto direct = run_cli({"kernel", "--kind", "heat", "--t", "0.25", "--rho", "1:3:3"});
  const auto from_config = run_cli({"--config", path.string(), "kernel"});
  CHECK(from_config.code == cli::ok);
  CHECK(from_config.out == direct.out);
  // Command-line values override the file.
  const auto overridden = run_cli({"--config", path.string(), "kernel", "--t", "1"});
  CHECK(overridden.out != direct.out);
  std::filesystem::remove(path);
}
