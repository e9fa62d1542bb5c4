#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace hypadams::quad {

using Integrand = std::function<double(double)>;

struct DecayHint {
  enum class Kind { none, exponential, polynomial };
  Kind kind = Kind::none;
  double rate = 0.0; // e^{-rate x} or x^{-rate}

  static DecayHint none() { return {}; }
  static DecayHint exponential(double rate) { return {Kind::exponential, rate}; }
  static DecayHint polynomial(double power) { return {Kind::polynomial, power}; }
};

struct Config {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_depth = 40;          // bisection levels below an initial panel
  int max_intervals = 20000;   // global subdivision budget
  double truncation_radius = std::numeric_limits<double>::infinity();
  DecayHint decay;

  void validate() const;
  Config tightened(double factor) const;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

// Globally adaptive Gauss-Kronrod (10/21) integration on [a, b]; b may be +inf.
// Interior breakpoints (where the integrand has kinks or peaks) may be supplied.
Result integrate(const Integrand& f, double a, double b, const Config& cfg = {});
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 const Config& cfg = {});

// int_rho^inf h(r) / sqrt(cosh r - cosh rho) dr, computed as 2 int_0^inf h(r(u)) / sinh r(u) du
// with cosh r = u^2 + cosh rho for small rho and with r = rho + w^2 otherwise.
// rho = 0 is accepted when h(r)/sinh(r) stays bounded at 0.
Result integrate_cosh_substituted(const Integrand& h, double rho, const Config& cfg = {});

// r(u) for the substitution above, evaluated without cancellation.
struct CoshSubstitution {
  double r;
  double sinh_r;
};
CoshSubstitution cosh_substitution(double u, double rho);

// n-point Gauss-Legendre rule on [-1, 1]; cached and safe to share between threads.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

} // namespace hypadams::quad
