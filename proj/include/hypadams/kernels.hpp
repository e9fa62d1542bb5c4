#pragma once

#include "hypadams/geometry.hpp"
#include "hypadams/quadrature.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hypadams {

inline constexpr double kCriticalShift = -2.25; // alpha = -9/4, bottom of the spectrum

struct KernelSpec {
  enum class Kind { heat, green, half_power };
  Kind kind = Kind::green;
  double t = 1.0;     // heat time
  double alpha = 0.0; // half-power shift
  quad::Config quad = default_config();

  static quad::Config default_config();
  static KernelSpec heat(double t);
  static KernelSpec green();
  static KernelSpec half_power(double alpha);

  bool critical() const { return kind == Kind::half_power && alpha == kCriticalShift; }
  void validate() const;
  std::string name() const;
};

struct KernelValue {
  double value = 0.0;
  double error = 0.0;
};

// Inner time integrals int_0^inf s^{-k} e^{-a s - b/s} ds, k = 2, 3.
enum class InnerMethod { bessel, quadrature, both };
double inner_time_integral(int k, double a, double b, InnerMethod method = InnerMethod::bessel);

KernelValue heat_kernel_value(double t, double rho, const quad::Config& cfg = KernelSpec::default_config());
KernelValue green_kernel_value(double rho, const quad::Config& cfg = KernelSpec::default_config());
KernelValue half_power_kernel_value(double alpha, double rho,
                                    const quad::Config& cfg = KernelSpec::default_config(),
                                    InnerMethod method = InnerMethod::bessel);

double heat_kernel(double t, double rho);
double green_kernel(double rho);
double half_power_kernel(double alpha, double rho);

KernelValue evaluate(const KernelSpec& spec, double rho);
std::vector<KernelValue> tabulate(const KernelSpec& spec, std::span<const double> rho_grid);

// Euclidean small-distance asymptotes: heat (4 pi t)^{-2}, green 1/(4 pi^2 rho^2),
// half-power 1/(4 pi^2 rho^3).
double euclidean_asymptote(const KernelSpec& spec, double rho);

// int p_t dV.
quad::Result heat_mass(double t);

// Kernel of (-Delta - 9/4)^{-1/2} (-Delta + alpha)^{-1/2} written as one radial integral over
// tabulated time integrals; alpha = -9/4 reproduces the Green kernel.
class PotentialKernel {
public:
  explicit PotentialKernel(double alpha, const quad::Config& cfg = KernelSpec::default_config());
  double alpha() const { return alpha_; }
  double operator()(double rho) const;
  KernelValue value(double rho) const;

  // J_k(r) = int tau^{-k} e^{-r^2/(4 tau)} e^{-c tau/2} I_0(c tau/2) dtau, k = 3/2 or 5/2.
  static double time_integral(double k, double c, double r);

private:
  double table(int which, double r) const;

  double alpha_;
  double c_;
  quad::Config cfg_;
  double log_r0_ = 0.0, step_ = 0.0;
  std::vector<double> log_j32_, log_j52_;
};

// Log-log interpolated table of a positive radial kernel on a log-uniform rho grid, with
// power-law extrapolation below and exponential extrapolation above the grid.
class KernelTable {
public:
  KernelTable() = default;
  KernelTable(const RadialFunction& f, double rho_min, double rho_max, std::size_t points);
  static KernelTable of(const KernelSpec& spec, double rho_min = 1e-4, double rho_max = 60.0,
                        std::size_t points = 1200);

  double operator()(double rho) const;
  RadialFunction function() const;
  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }
  const std::vector<double>& log_values() const { return *log_f_; }

private:
  double rho_min_ = 0.0, rho_max_ = 0.0;
  double log_lo_ = 0.0, step_ = 0.0;
  std::shared_ptr<const std::vector<double>> log_f_;
};

struct BoundReport {
  std::string name;
  std::string variable = "rho";
  std::vector<double> grid, lhs, rhs, margin;
  std::vector<char> pass;
  double abs_tol = 0.0;
  std::optional<double> fitted_constant;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> failed_conditions; // non-pointwise requirements that did not hold

  void push(double x, double left, double right);
  bool passed() const;
  double min_margin() const;
  std::optional<double> extra(const std::string& key) const;
};

// C = max lhs/shape over the grid (>= 0), so that lhs <= C * shape holds by construction.
BoundReport fitted_bound(std::string name, std::string variable, std::span<const double> grid,
                         std::span<const double> lhs, std::span<const double> shape);

// Least-squares slope of log|values| against x.
double fitted_log_slope(std::span<const double> x, std::span<const double> values);

struct KernelBoundOptions {
  std::vector<double> rho_grid = logspace(0.01, 12.0, 200);
  std::vector<double> dominated_alphas{0.25, 1.0, 4.0};
  double decay_alpha = 1.0;
  double decay_lo = 3.0, decay_hi = 10.0;
  std::size_t decay_points = 57;
  double abs_tol = 0.0;
};

// Decay exponents of the half-power kernel: eps0 is chosen so alpha0 is half its supremum.
struct DecayExponents {
  double alpha0;
  double eps0;
};
DecayExponents decay_exponents(double alpha);

std::vector<BoundReport> verify_kernel_bounds(const KernelBoundOptions& opts = {});

// Individual bounds, exposed for the CLI and the tests.
double green_bound(double rho);             // sum of the two closed-form pieces
double half_power_bound_split(double rho);  // sinh^3(rho/2) / sinh(rho) split
double half_power_bound_product(double rho);
double half_power_bound_corollary(double rho);

struct PlancherelCheck {
  double t;
  double direct_norm2;        // int p_t^2 dV
  double spectral_integral;   // int e^{-t(9+lambda^2)/2} |c|^{-2} dlambda
  double fitted_constant;     // direct / spectral
  double constant_error;      // |fitted / K - 1|
  double literature_ratio;    // literature constant / fitted
  double transform_error;     // max relative error of the transform against e^{-t(9+lambda^2)/4}
  double round_trip_error;    // max relative error of the inversion on a rho grid
};
PlancherelCheck plancherel_check(double t);

} // namespace hypadams
