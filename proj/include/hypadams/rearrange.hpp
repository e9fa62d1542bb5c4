#pragma once

#include "hypadams/geometry.hpp"
#include "hypadams/kernels.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hypadams {

// Radial function that is nonincreasing on [0, support) and zero beyond. Evaluations are memoized
// unless the source is already cheap (tables), where the memo would only grow.
class DecreasingRadial {
public:
  DecreasingRadial(RadialFunction f, std::string id,
                   double support = std::numeric_limits<double>::infinity(),
                   Monotone flag = Monotone::nonincreasing, bool memoize = true);
  // Unknown-flag profiles are checked node by node and rejected with NotMonotone.
  static DecreasingRadial from_profile(const RadialProfile& p, std::string id);
  static DecreasingRadial of(const KernelSpec& spec);

  double operator()(double rho) const;
  const std::string& id() const { return id_; }
  double support() const { return support_; }
  Monotone flag() const { return flag_; }
  std::size_t memo_size() const;

private:
  struct Memo;
  RadialFunction f_;
  std::string id_;
  double support_;
  Monotone flag_;
  std::shared_ptr<Memo> memo_;
};

// lambda_f(s) = |{f > s}| = V(rho_s) with f(rho_s) = s, found by bisection to 1e-12 in rho.
double distribution_function(const DecreasingRadial& f, double s);
double level_radius(const DecreasingRadial& f, double s);

// Nonincreasing function of the measure variable t, either the composition f(V^{-1}(t)) of a
// decreasing radial source or a step function (value[i] on [break[i-1], break[i]), zero beyond).
class RearrangedProfile {
public:
  static RearrangedProfile steps(std::vector<double> breaks, std::vector<double> values, std::string source);
  // Nonincreasing function of t given directly, vanishing for t >= support; carried as the radial
  // function f(rho) = fstar(V(rho)).
  static RearrangedProfile of_measure(std::function<double(double)> fstar, std::string source,
                                      double support = std::numeric_limits<double>::infinity());

  // Measure of the support (infinite for unbounded sources).
  double support() const;

  double operator()(double t) const;
  // |{t : f*(t) > s}| in Lebesgue measure on (0, inf)
  double distribution(double s) const;
  // int_a^b f*(s) ds
  double integral(double a, double b) const;

  bool is_step() const { return !radial_; }
  const std::string& source() const { return source_; }
  const std::vector<double>& t_grid() const { return t_grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& breaks() const { return breaks_; }

  // Fills t_grid/values; NotMonotone if the sampled values increase or go negative.
  void tabulate(std::span<const double> t_grid);

private:
  friend RearrangedProfile rearrangement(const DecreasingRadial& f, std::span<const double> t_grid);
  friend double product_integral(const RearrangedProfile& f, const RearrangedProfile& g, double t);
  double at_rho(double rho) const;

  std::shared_ptr<const DecreasingRadial> radial_;
  std::vector<double> breaks_, step_values_;
  std::string source_;
  std::vector<double> t_grid_, values_;
};

RearrangedProfile rearrangement(const DecreasingRadial& f, std::span<const double> t_grid = {});

// int_t^inf f* g*
double product_integral(const RearrangedProfile& f, const RearrangedProfile& g, double t);

// (1/t) int_0^t f* int_0^t g* + int_t^inf f* g*
double oneil_rhs(const RearrangedProfile& f, const RearrangedProfile& g, double t);

struct RearrangeOptions {
  std::vector<double> small_grid = logspace(1e-3, 1e3, 100); // explicit and t > 0 bounds
  std::vector<double> large_grid = logspace(2.0, 1e4, 60);   // asymptotic bounds, t > 2
  double alpha = 1.0;
  double green_constant = std::pow(2.0, 0.25) / std::sqrt(kPi);
  double abs_tol = 0.0;
};

// Rearranged-kernel bounds: the green bound with its explicit constant, the three critical and
// shifted half-power bounds (fitted constants, stable under grid doubling), rearranged
// domination, both bounds on the potential kernel and the continuous O'Neil inequality.
std::vector<BoundReport> verify_rearrangement_bounds(const RearrangeOptions& opts = {});

double green_rearranged_bound(double t, double constant);
double critical_rearranged_leading(double t); // 2^{1/4} / (8 sqrt(pi) t^{3/4})

// int_2^t ds / (sqrt(s) ln s) divided by sqrt(t) / ln t, and its asymptotic series
// 2 sum_k k! (2 / ln t)^k truncated after `terms` terms.
double log_integral_ratio(double t);
double log_integral_series(double t, int terms);

} // namespace hypadams
