#pragma once

#include "hypadams/geometry.hpp"

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace hypadams {

// Radial Plancherel/inversion constant K:
//   int |f|^2 dV = K int_R |f^(lambda)|^2 |c(lambda)|^{-2} dlambda,
//   f(rho)       = K int_R f^(lambda) phi_lambda(rho) |c(lambda)|^{-2} dlambda.
inline constexpr double kPlancherelConstant = 1.0 / (2.0 * kPi * kPi * kPi);

// The literature normalization D_4 |S^3| = 2 / pi for the same pair of formulas.
inline constexpr double kLiteraturePlancherelConstant = 2.0 / kPi;

std::complex<double> complex_log_gamma(std::complex<double> z);
std::complex<double> complex_gamma(std::complex<double> z);

std::complex<double> c_function(double lambda);
double c_density(double lambda);             // |c|^{-2} from the gamma ratio
double c_density_closed_form(double lambda); // pi lambda (1 + lambda^2) tanh(pi lambda / 2) / 128

// Spherical function phi_lambda(rho), the radial eigenfunction with phi(0) = 1.
double spherical_function(double lambda, double rho);
double spherical_function_derivative(double lambda, double rho);
// The sphere average evaluated directly by Gauss-Legendre in the polar angle.
// Accurate for moderate rho only; the peak of the integrand narrows like e^{-rho}.
double spherical_function_angular(double lambda, double rho, int order = 96);

// phi_lambda(rho) for a batch of lambdas sharing one rho.
void spherical_function_batch(double rho, std::span<const double> lambdas, std::span<double> out);

std::vector<double> default_lambda_grid(double lambda_max = 24.0, std::size_t points = 2048);

class SpectralProfile {
public:
  SpectralProfile() = default;
  SpectralProfile(std::vector<double> lambda_grid, std::vector<double> values);

  const std::vector<double>& lambda_grid() const { return lambda_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& density() const { return density_; }
  std::size_t size() const { return lambda_.size(); }
  bool is_symmetric(double tol = 1e-12) const;

  // Trapezoid weights for int_R g(lambda) dlambda on the grid.
  std::vector<double> trapezoid_weights() const;

private:
  std::vector<double> lambda_;
  std::vector<double> values_;
  std::vector<double> density_;
};

// Product of factors (base + shift)^exponent, base = (9 + lambda^2)/4 or lambda^2/4.
class Multiplier {
public:
  struct Factor {
    bool gap = false;
    double shift = 0.0;
    double exponent = 1.0;
  };

  static Multiplier identity() { return Multiplier{}; }
  static Multiplier laplacian_power(double gamma);
  static Multiplier shifted(double alpha, double gamma);
  static Multiplier gap_power(double gamma);
  static Multiplier paneitz();               // mu (mu - 2), mu = (9 + lambda^2)/4
  static Multiplier constraint(double alpha); // (lambda^2/4)(mu + alpha)

  Multiplier operator*(const Multiplier& other) const;
  double operator()(double lambda) const;
  const std::vector<Factor>& factors() const { return factors_; }

private:
  std::vector<Factor> factors_;
};

struct TransformOptions {
  enum class Tail { automatic, truncate, cesaro };
  Tail tail = Tail::automatic;
  double rho_max = 40.0;        // truncation radius, and start of the summation window
  double panel_width = 0.25;
  int panel_order = 16;
  enum class Taper { linear, raised_cosine };
  Taper taper = Taper::linear;
  int window_periods = 1;       // window length in periods 4 pi / lambda
  bool richardson = true;       // combine windows starting at R and 2R
  double max_window = 400.0;    // limit on the summed range beyond rho_max
  double negligible = 1e-18;    // relative envelope below which the integrand is dropped
  std::vector<double> breakpoints;
};

// f^(lambda) = 2 pi^2 int_0^inf f(rho) phi_lambda(rho) sinh^3 rho drho.
// Integrands that keep oscillating without decay (Green-type kernels) are summed with a
// tapered window spanning whole periods, which reproduces the Abel-regularized value.
SpectralProfile spherical_transform(const RadialFunction& f, std::span<const double> lambda_grid,
                                    const TransformOptions& opts = {});
SpectralProfile spherical_transform(const RadialProfile& f, std::span<const double> lambda_grid,
                                    const TransformOptions& opts = {});

RadialProfile inverse_spherical_transform(const SpectralProfile& transform, std::vector<double> rho_grid);

// K int m(lambda) |u^(lambda)|^2 |c(lambda)|^{-2} dlambda.
double quadratic_form(const SpectralProfile& transform, const Multiplier& m);
double quadratic_form(const RadialFunction& u, const Multiplier& m, std::span<const double> lambda_grid,
                      const TransformOptions& opts = {});

} // namespace hypadams
