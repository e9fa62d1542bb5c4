#pragma once

#include "hypadams/rearrange.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hypadams {

// One-dimensional reduction of the exponential functional. With tau = omega0 e^{-s}:
//   psi(s) = sqrt(tau) v*(tau),  phi(s) = sqrt(32 pi^2 tau) phi1*(tau),
//   a(s, t) = phi(s) for s < t and e^t (int_t^inf e^{-r/2} phi) e^{-s/2} for s > t,
//   F(t) = t - (int a(s, t) psi(s) ds)^2.
class AdamsState {
public:
  AdamsState(std::function<double(double)> psi, RearrangedProfile phi1_star, double omega0,
             std::vector<double> psi_breakpoints = {});
  static AdamsState from_rearrangement(const RearrangedProfile& v_star, RearrangedProfile phi1_star,
                                       double omega0);

  double psi(double s) const;
  double phi(double s) const;
  double kernel(double s, double t) const;
  double pairing(double t) const;      // int a(s, t) psi(s) ds
  double kernel_norm2(double t) const; // int a(s, t)^2 ds
  double functional(double t) const { const double p = pairing(t); return t - p * p; }
  double psi_norm2() const;
  double omega0() const { return omega0_; }
  // Jumps of psi; F has kinks there.
  const std::vector<double>& psi_breakpoints() const { return psi_breakpoints_; }

  // Values on an increasing grid, accumulating the integrals up to each node.
  struct Sweep {
    std::vector<double> t, pairing, kernel_norm2, functional;
  };
  Sweep sweep(std::span<const double> t_grid) const;

  // Both sides of the change of variables to the measure variable at s = t (needs v*).
  struct Identity {
    double t;
    double tail_product, tail_product_measure; // int_t^inf e^{-s/2} psi * int_t^inf e^{-s/2} phi
    double head, head_measure;                 // int_{-inf}^t psi phi
    double error() const;
  };
  Identity identity(double t) const;

private:
  double lower_tail_phi2(double s) const;
  double scaled_tail(const std::function<double(double)>& f, double t) const; // int_t^inf e^{-(r-t)/2} f
  double head_integral(const std::function<double(double)>& f, double t) const;

  std::function<double(double)> psi_;
  RearrangedProfile phi1_star_;
  double omega0_;
  std::vector<double> psi_breakpoints_;
  std::shared_ptr<const RearrangedProfile> v_star_;
};

struct AdamsOptions {
  double omega0 = 4.0;
  double t_max = 40.0;
  std::size_t t_points = 401; // odd; the refinement uses 2n - 1
  std::size_t lambda_points = 41;
  double lambda_min = 1.0, lambda_max = 30.0;
  double identity_tol = 1e-6;
  double simpson_tol = 1e-3; // kinks limit Simpson to second order
  double stability_tol = 0.10;
  double min_r2 = 0.95;
  std::vector<double> identity_t = {0.0, 0.5, 2.0, 5.0, 10.0, 20.0};
  double phi_bound_constant = std::pow(2.0, 0.25) / std::sqrt(kPi);
};

struct AdamsReport {
  std::string label;
  double psi_norm2 = 0.0;
  std::vector<double> t_grid, functional, kernel_excess; // kernel_excess = int a^2 - t
  double c_fitted = 0.0, c_refined = 0.0;
  double inf_functional = 0.0;
  // Adaptive value with kinks as breakpoints, and composite Simpson on the coarse sweep grid.
  double exp_integral = 0.0, exp_integral_simpson = 0.0, exp_tail = 0.0;
  std::vector<double> lambdas, level_measure; // |{t >= 0 : F(t) <= lambda}|
  double slope = 0.0, intercept = 0.0, r2 = 0.0, b1 = 0.0, b2 = 0.0;
  double identity_error = 0.0; // largest relative error, 0 when psi is given directly
  double phi_upper_margin = 0.0;  // min of 1 + A omega0^{1/4} e^{-t/4} - phi(t)
  double phi_log_constant = 0.0, phi_log_constant_refined = 0.0; // max phi(t)(1 - t), t <= ln(omega0/2)
  std::vector<std::string> failed_conditions;
  bool passed() const { return failed_conditions.empty(); }
};

// ConstraintViolated if int psi^2 > 1 + 1e-9.
AdamsReport adams_machinery(const RearrangedProfile& v_star, const RearrangedProfile& phi1_star,
                            const AdamsOptions& opts = {});
AdamsReport adams_machinery(const AdamsState& state, std::string label, const AdamsOptions& opts = {},
                            bool check_identities = false);

// phi1* for the kernel of (-Delta - 9/4)^{-1/2}(-Delta + alpha)^{-1/2}, tabulated.
RearrangedProfile potential_rearranged(double alpha = 1.0);

// Five nonincreasing v* with int v*^2 = 1: exponential, algebraic, step, integrable power
// singularity and a logarithmically spread profile.
std::vector<RearrangedProfile> admissible_profiles();

} // namespace hypadams
