#include "cli_app.hpp"

#include "hypadams/adams.hpp"
#include "hypadams/errors.hpp"
#include "hypadams/rearrange.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace hypadams::cli {

namespace {

using report::Json;

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

std::vector<BoundReport> kernel_reports(double alpha) {
  KernelBoundOptions o;
  o.decay_alpha = alpha;
  return verify_kernel_bounds(o);
}

std::vector<BoundReport> rearrangement_reports(double alpha) {
  RearrangeOptions o;
  o.alpha = alpha;
  return verify_rearrangement_bounds(o);
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

Outcome bound_target(const std::string& target, const std::vector<BoundReport>& all,
                     const std::vector<std::string>& prefixes) {
  Outcome o;
  o.passed = true;
  Json checks = Json::array();
  for (const auto& r : all)
    if (std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) { return starts_with(r.name, p); })) {
      checks.push_back(report::to_json(r));
      o.passed = o.passed && r.passed();
    }
  o.json = {{"target", target}, {"checks", std::move(checks)}, {"passed", o.passed}};
  return o;
}

struct Bump {
  double radius, modulation;
};

std::vector<Bump> random_bumps(unsigned seed, int count, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(lo, hi), modulation(-0.5, 2.0);
  std::vector<Bump> out;
  for (int i = 0; i < count; ++i) {
    const double r = radius(rng);
    out.push_back({r, modulation(rng)});
  }
  return out;
}

constexpr double kSpreadingTolerance = 0.05;
const std::vector<double> kSpreadingRadii{10.0, 20.0, 48.0};

Outcome paneitz_target(const VerifyOptions& opts) {
  Outcome o;
  o.passed = true;
  Json rows = Json::array();
  for (const auto& b : random_bumps(opts.seed, opts.trials, 0.5, 0.9)) {
    const auto u = TrialFunction::smooth_bump(b.radius, b.modulation);
    const double bilap = euclid_bilap_energy(u), paneitz = paneitz_form(u), hardy = hardy_term(u);
    const double err = std::abs(paneitz - bilap) / bilap;
    const bool pass = err <= 1e-3 && bilap >= 9.0 * hardy;
    o.passed = o.passed && pass;
    rows.push_back({{"radius", b.radius}, {"modulation", b.modulation}, {"bilaplacian", bilap}, {"paneitz", paneitz},
                    {"relative_error", err}, {"hardy_ratio", bilap / hardy}, {"passed", pass}});
  }
  Json spreading = Json::array();
  double last = INFINITY;
  for (double radius : kSpreadingRadii) {
    const auto u = TrialFunction::spreading(radius);
    last = euclid_bilap_energy(u) / hardy_term(u);
    o.passed = o.passed && last >= 9.0;
    spreading.push_back({{"radius", radius}, {"hardy_ratio", last}});
  }
  const bool close = last <= 9.0 * (1.0 + kSpreadingTolerance);
  o.passed = o.passed && close;
  o.json = {{"target", "1.3"}, {"trials", std::move(rows)}, {"spreading", std::move(spreading)},
            {"sharpness_within_tolerance", close}, {"passed", o.passed}};
  return o;
}

Outcome gap_target(const VerifyOptions& opts) {
  Outcome o;
  o.passed = true;
  Json rows = Json::array();
  for (const auto& b : random_bumps(opts.seed + 1, opts.trials, 0.5, 6.0)) {
    const auto u = TrialFunction::smooth_bump(b.radius, b.modulation, 1.0, Chart::hyperbolic);
    const double ratio = hyperbolic_dirichlet(u) / hyperbolic_moment(u);
    const double spectral = spectral_form(u, Multiplier::laplacian_power(1.0)) / spectral_form(u, Multiplier::identity());
    const bool pass = ratio >= 2.25 && std::abs(spectral / ratio - 1.0) <= 1e-6;
    o.passed = o.passed && pass;
    rows.push_back({{"radius", b.radius}, {"modulation", b.modulation}, {"rayleigh_quotient", ratio},
                    {"spectral_quotient", spectral}, {"passed", pass}});
  }
  Json spreading = Json::array();
  double last = INFINITY;
  for (double radius : kSpreadingRadii) {
    const auto u = TrialFunction::spreading(radius);
    last = hyperbolic_dirichlet(u) / hyperbolic_moment(u);
    o.passed = o.passed && last >= 2.25;
    spreading.push_back({{"radius", radius}, {"rayleigh_quotient", last}});
  }
  const bool close = last <= 2.25 * (1.0 + kSpreadingTolerance);
  o.passed = o.passed && close;
  o.json = {{"target", "1.4"}, {"trials", std::move(rows)}, {"spreading", std::move(spreading)},
            {"gap_within_tolerance", close}, {"passed", o.passed}};
  return o;
}

Outcome adams_target(const VerifyOptions& opts) {
  Outcome o;
  o.passed = true;
  const auto phi1 = potential_rearranged(opts.alpha);
  Json profiles = Json::array();
  for (const auto& v : admissible_profiles()) {
    const auto r = adams_machinery(v, phi1);
    o.passed = o.passed && r.passed();
    profiles.push_back(report::to_json(r));
  }
  const auto rep = potential_representation_check(TrialFunction::smooth_bump(1.5, 0.5, 1.0, Chart::hyperbolic), opts.alpha);
  const bool rep_pass = rep.relative_error() <= 1e-3 && rep.transform_error <= 1e-3;
  o.passed = o.passed && rep_pass;
  Json pr = report::to_json(rep);
  pr["passed"] = rep_pass;
  o.json = {{"target", "5.1"}, {"alpha", opts.alpha}, {"profiles", std::move(profiles)},
            {"potential_representation", std::move(pr)}, {"passed", o.passed}};
  return o;
}

Outcome conformal_target(const VerifyOptions& opts) {
  Outcome o;
  o.passed = true;
  Json rows = Json::array();
  for (const auto& b : random_bumps(opts.seed + 2, opts.trials, 0.3, 0.95)) {
    const auto c = conformal_identity_check(TrialFunction::smooth_bump(b.radius, b.modulation));
    o.passed = o.passed && c.passed();
    Json j = report::to_json(c);
    j["radius"] = b.radius;
    j["modulation"] = b.modulation;
    rows.push_back(std::move(j));
  }
  o.json = {{"target", "5.2"}, {"trials", std::move(rows)}, {"passed", o.passed}};
  return o;
}

Outcome plancherel_target(const VerifyOptions& opts) {
  const auto c = plancherel_check(opts.t);
  const double err = std::max(c.constant_error, c.transform_error);
  Outcome o;
  o.passed = err < 1e-4;
  Json j = report::to_json(c);
  o.json = {{"target", "plancherel"}, {"check", std::move(j)}, {"relative_error", err}, {"passed", o.passed}};
  return o;
}

TheoremKind kind_of(const std::string& id) {
  if (id == "1.6") return TheoremKind::shifted;
  if (id == "1.7") return TheoremKind::hardy;
  if (id == "1.8") return TheoremKind::hardy_weighted;
  if (id == "1.9") return TheoremKind::euclidean;
  throw DomainError("unknown theorem id " + id);
}

Family family_of(const std::string& name) {
  if (name == "adams") return Family::adams;
  if (name == "plateau_log") return Family::plateau_log;
  if (name == "smooth_bump") return Family::smooth_bump;
  throw DomainError("unknown family " + name);
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path + " for writing");
  f << text;
}

} // namespace

std::vector<double> Range::values() const {
  if (count == 0) throw DomainError("range needs at least one point");
  if (count == 1) return {lo};
  if (log) {
    if (!(lo > 0.0 && hi > 0.0)) throw DomainError("logarithmic range needs positive ends");
    return logspace(lo, hi, count);
  }
  return linspace(lo, hi, count);
}

Range parse_range(const std::string& text, std::size_t default_count, bool default_log) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) throw DomainError("range must be min:max or min:max:count[L]");
  Range r;
  r.lo = parse_double(parts[0]);
  r.hi = parse_double(parts[1]);
  r.count = default_count;
  r.log = default_log;
  if (parts.size() == 3) {
    std::string c = parts[2];
    r.log = !c.empty() && (c.back() == 'L' || c.back() == 'l');
    if (r.log) c.pop_back();
    if (c.empty() || !std::all_of(c.begin(), c.end(), [](unsigned char ch) { return std::isdigit(ch); }))
      throw DomainError("range count must be a positive integer");
    r.count = std::stoul(c);
  }
  if (r.count == 0) throw DomainError("range count must be positive");
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) throw DomainError("range ends must be finite");
  return r;
}

const std::vector<std::string>& verify_targets() {
  static const std::vector<std::string> targets{"3.1", "3.2", "3.3", "3.4", "4.1", "4.2",
                                                "4.3", "1.3", "1.4", "5.1", "5.2", "plancherel"};
  return targets;
}

Outcome verify_target(const std::string& target, const VerifyOptions& opts) {
  if (target == "3.1") return bound_target(target, kernel_reports(opts.alpha), {"green_two_term"});
  if (target == "3.2") return bound_target(target, kernel_reports(opts.alpha), {"half_power_split", "half_power_product"});
  if (target == "3.3")
    return bound_target(target, kernel_reports(opts.alpha), {"half_power_three_term", "half_power_exponential"});
  if (target == "3.4")
    return bound_target(target, kernel_reports(opts.alpha), {"half_power_domination", "half_power_decay"});
  if (target == "4.1") return bound_target(target, rearrangement_reports(opts.alpha), {"green_rearranged"});
  if (target == "4.2")
    return bound_target(target, rearrangement_reports(opts.alpha),
                        {"critical_rearranged", "shifted_rearranged", "rearranged_domination"});
  if (target == "4.3")
    return bound_target(target, rearrangement_reports(opts.alpha), {"potential_rearranged", "oneil_continuous"});
  if (target == "1.3") return paneitz_target(opts);
  if (target == "1.4") return gap_target(opts);
  if (target == "5.1") return adams_target(opts);
  if (target == "5.2") return conformal_target(opts);
  if (target == "plancherel") return plancherel_target(opts);
  throw DomainError("unknown target " + target);
}

std::string full_suite_report() {
  Json suite;
  Json targets = Json::object();
  for (const auto& t : verify_targets()) targets[t] = verify_target(t).json;
  suite["verify"] = std::move(targets);
  Json theorems = Json::array();
  for (const auto& id : {"1.6", "1.7", "1.8", "1.9"})
    for (double beta : {kAdamsExponent, 1.2 * kAdamsExponent}) {
      TheoremOptions o;
      o.kind = kind_of(id);
      o.beta = beta;
      theorems.push_back(report::to_json(verify_theorem(o)));
    }
  suite["theorems"] = std::move(theorems);
  return report::dump(suite);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for Adams inequalities on hyperbolic 4-space", "hypadams"};
  app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the effective configuration as TOML and exit")
      ->configurable(false);
  app.require_subcommand(0, 1);
  app.fallthrough();

  // kernel
  auto* kernel = app.add_subcommand("kernel", "Tabulate a kernel as CSV");
  std::string kind = "green", rho_spec = "0.1:10:100", kernel_out;
  double heat_t = 1.0, kernel_alpha = 1.0, rel_tol = KernelSpec::default_config().rel_tol;
  kernel->add_option("--kind", kind, "heat, green or half_power")
      ->check(CLI::IsMember({"heat", "green", "half_power"}))
      ->capture_default_str();
  kernel->add_option("--t", heat_t, "Heat time")->capture_default_str();
  kernel->add_option("--alpha", kernel_alpha, "Half-power shift, at least -9/4")->capture_default_str();
  kernel->add_option("--rho", rho_spec, "Radii as min:max:count or min:max:countL")->capture_default_str();
  kernel->add_option("--rel-tol", rel_tol, "Relative quadrature tolerance")->capture_default_str();
  kernel->add_option("--out", kernel_out, "CSV path (stdout when empty)");
  kernel->configurable();

  // verify
  auto* verify = app.add_subcommand("verify", "Check one group of inequalities or identities");
  std::string target, verify_out;
  VerifyOptions vopts;
  verify->add_option("--target", target, "Target to verify")->required()->check(CLI::IsMember(verify_targets()));
  verify->add_option("--t", vopts.t, "Heat time for the plancherel target")->capture_default_str();
  verify->add_option("--alpha", vopts.alpha, "Positive shift")->capture_default_str();
  verify->add_option("--trials", vopts.trials, "Random trials")->capture_default_str();
  verify->add_option("--seed", vopts.seed, "Seed for random trials")->capture_default_str();
  verify->add_option("--out", verify_out, "JSON path (stdout when empty)");
  verify->configurable();

  // theorem
  auto* theorem = app.add_subcommand("theorem", "Probe a critical exponential inequality on a trial family");
  std::string id = "1.6", family = "adams", eps_spec = "1e-1:1e-4", expect = "any", theorem_out;
  TheoremOptions topts;
  theorem->add_option("--id", id, "Theorem id")->check(CLI::IsMember({"1.6", "1.7", "1.8", "1.9"}))->capture_default_str();
  theorem->add_option("--alpha", topts.alpha, "Shift of the constraint (id 1.6)")->capture_default_str();
  theorem->add_option("--beta", topts.beta, "Exponent")->capture_default_str();
  theorem->add_option("--hardy-weight", topts.hardy_weight, "Hardy weight below 9 (id 1.8)")->capture_default_str();
  theorem->add_option("--family", family, "Trial family")
      ->check(CLI::IsMember({"adams", "plateau_log", "smooth_bump"}))
      ->capture_default_str();
  theorem->add_option("--eps", eps_spec, "Concentration parameters, max:min[:count[L]], log-spaced by default")
      ->capture_default_str();
  theorem->add_option("--plateau-tol", topts.plateau_tol, "Largest relative variation over the last decade")
      ->capture_default_str();
  theorem->add_option("--growth-factor", topts.growth_factor, "Growth that counts as unbounded")->capture_default_str();
  theorem->add_option("--expect", expect, "Verdict required for exit 0")
      ->check(CLI::IsMember({"any", "bounded", "growing"}))
      ->capture_default_str();
  theorem->add_option("--out", theorem_out, "JSON path (stdout when empty)");
  theorem->configurable();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return bad_args;
  }
  if (print_config) {
    out << app.config_to_str(true, true);
    return ok;
  }
  if (app.get_subcommands().empty()) {
    err << "error: a subcommand is required\n\n" << app.help();
    return bad_args;
  }

  try {
    if (kernel->parsed()) {
      KernelSpec spec = kind == "heat" ? KernelSpec::heat(heat_t)
                        : kind == "green" ? KernelSpec::green()
                                          : KernelSpec::half_power(kernel_alpha);
      spec.quad.rel_tol = rel_tol;
      spec.validate();
      const auto grid = parse_range(rho_spec, 100, false).values();
      const auto values = tabulate(spec, grid);
      std::vector<std::string> header{"rho", "value", "err_estimate"};
      double mass = 0.0;
      if (spec.kind == KernelSpec::Kind::heat) {
        header.push_back("mass");
        mass = heat_mass(heat_t).value;
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back({grid[i], values[i].value, values[i].error});
        if (spec.kind == KernelSpec::Kind::heat) rows.back().push_back(mass);
      }
      std::ostringstream csv;
      report::write_csv(csv, header, rows);
      emit(kernel_out, csv.str(), out);
      return ok;
    }
    if (verify->parsed()) {
      const auto o = verify_target(target, vopts);
      emit(verify_out, report::dump(o.json), out);
      return o.passed ? ok : margin_failure;
    }
    if (theorem->parsed()) {
      topts.kind = kind_of(id);
      topts.family = family_of(family);
      topts.params = parse_range(eps_spec, 13, true).values();
      const auto rep = verify_theorem(topts);
      emit(theorem_out, report::dump(report::to_json(rep)), out);
      const bool matches = expect == "any" || (expect == "bounded" && rep.verdict == Verdict::bounded) ||
                           (expect == "growing" && rep.verdict == Verdict::growing);
      return matches && rep.chain_passed() ? ok : margin_failure;
    }
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
  return bad_args;
}

int exit_code_for(std::exception_ptr failure, std::ostream& err) {
  try {
    std::rethrow_exception(failure);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return bad_args;
  } catch (const DivergentMode& e) {
    err << "error: " << e.what() << "\n";
    return bad_args;
  } catch (const ConstraintViolated& e) {
    err << "margin failure: " << e.what() << "\n";
    return margin_failure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
}

} // namespace hypadams::cli
