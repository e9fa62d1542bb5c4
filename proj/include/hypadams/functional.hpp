#pragma once

#include "hypadams/geometry.hpp"
#include "hypadams/kernels.hpp"
#include "hypadams/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hypadams {

inline constexpr double kAdamsExponent = 32.0 * kPi * kPi; // 32 pi^2
inline constexpr double kUnitBallVolume = 0.5 * kPi * kPi; // Euclidean volume of B^4

// Value, radial derivative and Laplacian in one chart.
struct Jet {
  double value = 0.0;
  double slope = 0.0;
  double laplacian = 0.0;
};

// Chart a trial profile is written in: Euclidean radius r = |x| or geodesic radius rho.
enum class Chart { euclidean, hyperbolic };

// Radial test function on B^4 with compact support, twice differentiable.
class TrialFunction {
public:
  using JetFunction = std::function<Jet(double)>;

  TrialFunction(Chart chart, JetFunction jet, double support, std::string family, double parameter,
                std::vector<double> breakpoints = {});

  static TrialFunction zero();
  // A (1 + m s^2) exp(1 - 1/(1 - s^2)), s = r/radius, in the given chart.
  static TrialFunction smooth_bump(double radius, double modulation = 0.0, double amplitude = 1.0,
                                   Chart chart = Chart::euclidean);
  // Adams-type profile: ln(outer/r) on [eps, outer/2] with a C^2 quadratic cap on [0, eps] and a
  // quintic blend to zero on [outer/2, outer].
  static TrialFunction adams_concentrating(double eps, double outer = 0.5);
  // Same construction in the geodesic radius.
  static TrialFunction plateau_log(double eps, double outer = 1.0);
  // sqrt(1 + rho^2) cosh(rho)^{-3/2}, close to the bottom of the spectrum, cut off smoothly on
  // [radius/2, radius].
  static TrialFunction spreading(double radius);

  TrialFunction scaled(double factor) const;
  // (1 - |x|^2) f, in the Euclidean chart.
  TrialFunction conformal_product() const;

  Chart chart() const { return chart_; }
  Jet euclidean(double r) const;   // u, du/dr, Euclidean Laplacian
  Jet hyperbolic(double rho) const; // u, du/drho, Laplace-Beltrami
  // Euclidean jet at the point of geodesic radius rho, without forming 1 - r^2 from r.
  Jet euclidean_at_rho(double rho) const;
  double value_at_rho(double rho) const { return hyperbolic(rho).value; }
  RadialFunction radial() const;
  double support_r() const;
  double support_rho() const;
  bool is_zero() const { return support_ <= 0.0; }
  const std::vector<double>& breakpoints() const { return breakpoints_; } // native chart
  std::vector<double> breakpoints_r() const;
  std::vector<double> breakpoints_rho() const;
  const std::string& family() const { return family_; }
  double parameter() const { return parameter_; }
  double amplitude() const { return scale_; }

private:
  Chart chart_;
  JetFunction jet_;
  double support_;
  std::string family_;
  double parameter_;
  std::vector<double> breakpoints_;
  double scale_ = 1.0;
};

// Integration variable for the radial integrals.
enum class Route { automatic, euclidean, hyperbolic };

quad::Config functional_config();

double euclid_bilap_energy(const TrialFunction& u, Route route = Route::automatic);
// int u^2 / (1 - |x|^2)^power dx
double hardy_term(const TrialFunction& u, int power = 4, Route route = Route::automatic);
// int |grad u|^2 / (1 - |x|^2)^power dx
double euclid_dirichlet(const TrialFunction& u, int power = 0, Route route = Route::automatic);
double hyperbolic_dirichlet(const TrialFunction& u, Route route = Route::automatic); // int |grad_H u|^2 dV
double hyperbolic_moment(const TrialFunction& u, int power = 2, Route route = Route::automatic); // int |u|^p dV

// Spectral quadratic forms (transform of the radial profile on a lambda grid sized to the support).
std::vector<double> spectral_lambda_grid(const TrialFunction& u);
double spectral_form(const TrialFunction& u, const Multiplier& m);
double paneitz_form(const TrialFunction& u); // mu (mu - 2), equal to the Euclidean bilaplacian energy

// int (-Delta_H - 9/4)(-Delta_H + alpha) u u dV.
enum class FormMethod { direct, spectral };
double constraint_form(const TrialFunction& u, double alpha, FormMethod method = FormMethod::direct);
// int |Delta u|^2 dx - weight int u^2 / (1 - |x|^2)^4 dx
double hardy_constraint(const TrialFunction& u, double weight = 9.0);

enum class ExpMode { subtract2, subtract1, none };
enum class Measure { hyperbolic, conformal, euclidean };
// int Phi(beta u^2) dmu with Phi = e^x - 1 - x, e^x - 1 or e^x; conformal means
// 16 int Phi / (1 - |x|^2)^4 dx, equal to the hyperbolic value.
double exp_functional(const TrialFunction& u, double beta, ExpMode mode, Measure measure);

// Substitution identities for u = (1 - |x|^2) f.
struct ConformalIdentityCheck {
  double weighted_gradient;   // int |grad u|^2 / (1 - |x|^2)^2 dx
  double gradient;            // int |grad f|^2 dx
  double weighted_mass;       // int f^2 / (1 - |x|^2)^2 dx
  double substitution_error;  // |weighted_gradient - gradient - 8 weighted_mass| / scale
  double hyperbolic_gap;      // int |grad_H u|^2 dV - 9/4 int u^2 dV
  double chain_error;         // |hyperbolic_gap - 4 (gradient - weighted_mass)| / scale
  double improved_hardy;      // gradient - weighted_mass
  double bilaplacian_gap;     // int |Delta u|^2 dx - 9 int u^2/(1-|x|^2)^4 dx
  double euclidean_mass;      // int u^2 dx
  double spectral_lower;      // (9/4 + 1/4) hyperbolic_gap, bound for bilaplacian_gap
  bool passed(double tol = 1e-6) const;
};
ConformalIdentityCheck conformal_identity_check(const TrialFunction& f);

// u = v * phi1 with phi1 the kernel of (-Delta - 9/4)^{-1/2}(-Delta + alpha)^{-1/2}, built by
// convolution. Its constraint form should equal int v^2 dV. The transform of u is computed
// numerically above lambda_cut; below it the multiplier cancels exactly and |v^|^2 is used.
struct PotentialRepresentationCheck {
  double constraint;      // constraint form of u
  double mass;            // int v^2 dV
  double transform_error; // max relative error of u^ against v^ phi1^ on [0.5, 8]
  double lambda_cut;
  double relative_error() const { return std::abs(constraint - mass) / mass; }
};
PotentialRepresentationCheck potential_representation_check(const TrialFunction& v, double alpha,
                                                            double lambda_cut = 0.25);

// Theorem probes over trial families.
enum class TheoremKind {
  shifted,       // constraint (-Delta_H - 9/4)(-Delta_H + alpha), e^x - 1 - x over dV
  hardy,         // constraint |Delta u|^2 - 9 Hardy, e^x - 1 - x over dV
  hardy_weighted, // constraint |Delta u|^2 - lambda Hardy, e^x - 1 over dV
  euclidean      // constraint |Delta u|^2 - 9 Hardy, e^x over dx
};
enum class Family { adams, plateau_log, smooth_bump };
enum class Verdict { bounded, growing, inconclusive };

std::string to_string(Verdict v);
std::string to_string(Family f);
TrialFunction make_trial(Family family, double param);

struct TheoremOptions {
  TheoremKind kind = TheoremKind::shifted;
  Family family = Family::adams;
  double alpha = 1.0;        // shift for the shifted constraint
  double hardy_weight = 5.0; // lambda < 9 for the weighted constraint
  double beta = kAdamsExponent;
  std::vector<double> params = logspace(1e-1, 1e-4, 13); // concentration parameter, decreasing
  double plateau_tol = 0.1;
  double growth_factor = 10.0;
};

struct TheoremRow {
  double param;
  double constraint; // constraint of the normalized trial (1 up to quadrature error)
  double value;
};

struct TheoremReport {
  std::string theorem;
  std::string family;
  double beta = 0.0;
  std::vector<TheoremRow> rows;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::pair<std::string, double>> fitted_constants;
  std::vector<std::string> failed_conditions; // chain inequalities that did not hold
  bool chain_passed() const { return failed_conditions.empty(); }
  std::optional<double> constant(const std::string& key) const;
};

// |{|u| >= 1}| in dV, on a midpoint grid of 8000 shells.
double large_set_measure(const TrialFunction& u);

// Normalizes each trial to constraint 1, evaluates the functional and classifies the sweep:
// bounded if the values over the last decade of params vary by at most plateau_tol,
// growing if the last value is at least growth_factor times the first. For the Euclidean kind the
// classification uses the excess over the volume of the ball.
TheoremReport verify_theorem(const TheoremOptions& opts);
Verdict classify(std::span<const double> params, std::span<const double> values, double plateau_tol,
                 double growth_factor);
std::string theorem_label(TheoremKind kind);

} // namespace hypadams
