#pragma once

#include "hypadams/report.hpp"

#include <cstddef>
#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace hypadams::cli {

enum ExitCode : int { ok = 0, bad_args = 1, numerical_failure = 2, margin_failure = 3 };

// "min:max:count" is linear, "min:max:countL" logarithmic; "min:max" uses the defaults.
struct Range {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  bool log = false;
  std::vector<double> values() const;
};
Range parse_range(const std::string& text, std::size_t default_count, bool default_log);

struct VerifyOptions {
  double t = 0.5;     // heat time for the Plancherel target
  double alpha = 1.0; // shift for the kernel, rearrangement and potential targets
  int trials = 10;
  unsigned seed = 2024;
};

struct Outcome {
  report::Json json;
  bool passed = false;
};

const std::vector<std::string>& verify_targets();
// Throws DomainError for an unknown target and NumericalError subclasses on numerical failure.
Outcome verify_target(const std::string& target, const VerifyOptions& opts = {});

// Every verify target and theorem probe at default settings, as one JSON document.
std::string full_suite_report();

// Maps a library exception to an exit code and prints it; anything unrecognised is rethrown.
int exit_code_for(std::exception_ptr failure, std::ostream& err);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hypadams::cli
