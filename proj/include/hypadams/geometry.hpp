#pragma once

#include "hypadams/quadrature.hpp"

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace hypadams {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSphereArea = 2.0 * kPi * kPi; // |S^3|

// Point of the open unit ball B^4 (Poincare model).
class Point4 {
public:
  static constexpr double kMaxNorm = 1.0 - 1e-12;

  Point4() = default;
  explicit Point4(const std::array<double, 4>& coords);

  static Point4 on_axis(double r) { return Point4({r, 0.0, 0.0, 0.0}); }

  const std::array<double, 4>& coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  double norm() const;
  double norm2() const;

private:
  std::array<double, 4> coords_{};
};

double rho_of_point(const Point4& x);
double radius_of_rho(double rho); // |x| = tanh(rho/2)
Point4 mobius(const Point4& a, const Point4& x);
double geodesic_distance(const Point4& x, const Point4& y);

// Distance between points at geodesic radii rho and a whose directions form angle theta.
double distance_from_polar(double rho, double a, double theta);

double ball_volume(double rho);
double ball_volume_derivative(double rho); // 2 pi^2 sinh^3 rho
double inverse_ball_volume(double volume);

using RadialFunction = std::function<double(double)>;

enum class Interpolation { linear, cubic };
enum class Monotone { unknown, nonincreasing };

// Function of geodesic radius sampled on a grid; it is taken to vanish beyond the last node.
class RadialProfile {
public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> rho_grid, std::vector<double> values,
                Interpolation order = Interpolation::cubic, Monotone flag = Monotone::unknown);

  static RadialProfile sample(const RadialFunction& f, std::vector<double> rho_grid,
                              Interpolation order = Interpolation::cubic,
                              Monotone flag = Monotone::unknown);

  double operator()(double rho) const;
  RadialFunction function() const;

  const std::vector<double>& rho_grid() const { return rho_; }
  const std::vector<double>& values() const { return values_; }
  Interpolation interpolation() const { return order_; }
  Monotone monotone_flag() const { return flag_; }
  double support_end() const { return rho_.empty() ? 0.0 : rho_.back(); }
  bool empty() const { return rho_.empty(); }
  std::size_t size() const { return rho_.size(); }

private:
  std::vector<double> rho_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  Interpolation order_ = Interpolation::cubic;
  Monotone flag_ = Monotone::unknown;
};

struct RadialIntegralOptions {
  quad::Config quad{};
  double panel_width = 1.0;
  double max_radius = 400.0;
  std::vector<double> breakpoints;
};

// 2 pi^2 int_0^inf f(rho) sinh^3 rho drho with panel marching and a geometric tail bound.
quad::Result radial_integral(const RadialFunction& f, const RadialIntegralOptions& opts = {});
quad::Result radial_integral(const RadialProfile& f, const RadialIntegralOptions& opts = {});

struct ConvolutionOptions {
  enum class Angular { gauss_legendre, distance_adaptive };
  Angular angular = Angular::gauss_legendre;
  int angular_order = 64;
  quad::Config quad{};
  double f_support = std::numeric_limits<double>::infinity();
  std::vector<double> f_breakpoints;
  std::vector<double> g_breakpoints; // kinks of g, used by the adaptive angular rule
  // When finite, the outer integral stops here and the remainder is extrapolated from a
  // least-squares fit of the outer integrand to a^{-2}, ..., a^{-6} on [tail_radius, 2 tail_radius].
  // Needed when f * g sinh^3 decays only algebraically (critical half-power kernels).
  double tail_radius = std::numeric_limits<double>::infinity();
};

// (f * g)(rho) = int f(y) g(T_x(y)) dV_y for radial f, g, evaluated at each rho of out_grid.
std::vector<double> convolve_radial(const RadialFunction& f, const RadialFunction& g,
                                    std::span<const double> out_grid,
                                    const ConvolutionOptions& opts = {});
RadialProfile convolve_radial(const RadialProfile& f, const RadialProfile& g,
                              std::vector<double> out_grid, const ConvolutionOptions& opts = {});

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

} // namespace hypadams
