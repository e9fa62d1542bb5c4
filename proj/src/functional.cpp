#include "hypadams/functional.hpp"

#include "hypadams/errors.hpp"
#include "hypadams/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hypadams {

namespace {

// Profile value with first and second derivative in its own radial variable.
struct Taylor {
  double value = 0.0, d1 = 0.0, d2 = 0.0;
};

Jet euclidean_jet(double r, const Taylor& t) {
  const double lap = t.d2 + (r > 0.0 ? 3.0 * t.d1 / r : 3.0 * t.d2);
  return {t.value, t.d1, lap};
}

Jet hyperbolic_jet(double rho, const Taylor& t) {
  const double lap = t.d2 + (rho > 0.0 ? 3.0 * t.d1 / std::tanh(rho) : 3.0 * t.d2);
  return {t.value, t.d1, lap};
}

// 10x^3 - 15x^4 + 6x^5 and its derivatives: C^2 step from 0 to 1 on [0, 1].
Taylor smoothstep(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const double x2 = x * x;
  return {x2 * x * (10.0 - 15.0 * x + 6.0 * x2), 30.0 * x2 * (1.0 - x) * (1.0 - x), 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)};
}

// Quintic on [a, b] matching (value, d1, d2) at a and vanishing to second order at b.
Taylor hermite_to_zero(double x, double a, double b, const Taylor& start) {
  const double h = b - a, s = (x - a) / h, s2 = s * s, s3 = s2 * s;
  const double h0 = 1.0 - 10.0 * s3 + 15.0 * s3 * s - 6.0 * s3 * s2;
  const double h0p = -30.0 * s2 + 60.0 * s3 - 30.0 * s3 * s;
  const double h0pp = -60.0 * s + 180.0 * s2 - 120.0 * s3;
  const double h1 = s - 6.0 * s3 + 8.0 * s3 * s - 3.0 * s3 * s2;
  const double h1p = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s3 * s;
  const double h1pp = -36.0 * s + 96.0 * s2 - 60.0 * s3;
  const double h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s3 * s - s3 * s2);
  const double h2p = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s3 * s);
  const double h2pp = 0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3);
  const double c0 = start.value, c1 = start.d1 * h, c2 = start.d2 * h * h;
  return {c0 * h0 + c1 * h1 + c2 * h2, (c0 * h0p + c1 * h1p + c2 * h2p) / h,
          (c0 * h0pp + c1 * h1pp + c2 * h2pp) / (h * h)};
}

// A (1 + m y) exp(1 - 1/(1 - y)) with y = (x/radius)^2.
Taylor bump_profile(double x, double radius, double modulation, double amplitude) {
  const double y = (x / radius) * (x / radius);
  const double gap = 1.0 - y;
  if (gap <= 2e-3) return {};
  const double e = std::exp(1.0 - 1.0 / gap);
  const double e1 = -e / (gap * gap);
  const double e2 = e * (1.0 / std::pow(gap, 4) - 2.0 / std::pow(gap, 3));
  const double p = 1.0 + modulation * y;
  const double g = amplitude * p * e;
  const double g1 = amplitude * (modulation * e + p * e1);
  const double g2 = amplitude * (2.0 * modulation * e1 + p * e2);
  const double r2 = radius * radius;
  return {g, 2.0 * x / r2 * g1, 2.0 / r2 * g1 + 4.0 * x * x / (r2 * r2) * g2};
}

// Concentrating profile: ln(outer / (2x)) on [eps, outer/4]; below eps a C^2 cap
// V - (s-1)/2 + (s-1)^2/4 + cap3 (s-1)^3 with s = (x/eps)^2; above outer/4 a quintic in ln x
// down to zero at outer. The blend and cap3 are chosen so that the energy in excess of
// 8 pi^2 ln(outer/eps) matches the height of the cap, which removes the 1/ln(1/eps) drift of the
// normalized peak.
Taylor log_profile(double x, double eps, double outer, double cap3) {
  if (x >= outer) return {};
  const double a = 0.25 * outer;
  if (x >= a) {
    const Taylor h = hermite_to_zero(std::log(x), std::log(a), std::log(outer), {std::log(2.0), -1.0, 0.0});
    return {h.value, h.d1 / x, (h.d2 - h.d1) / (x * x)};
  }
  if (x >= eps) return {std::log(0.5 * outer / x), -1.0 / x, 1.0 / (x * x)};
  const double s = (x / eps) * (x / eps), e2 = eps * eps, m = s - 1.0;
  const double q = std::log(0.5 * outer / eps) - 0.5 * m + 0.25 * m * m + cap3 * m * m * m;
  const double qs = -0.5 + 0.5 * m + 3.0 * cap3 * m * m;
  const double qss = 0.5 + 6.0 * cap3 * m;
  return {q, 2.0 * x / e2 * qs, 2.0 / e2 * qs + 4.0 * x * x / (e2 * e2) * qss};
}

double one_minus_r2_of_rho(double rho) {
  const double c = std::cosh(0.5 * rho);
  return 1.0 / (c * c);
}

double rho_of_radius(double r) { return 2.0 * std::atanh(r); }

constexpr double kCapCubic = -0.48;

void check_power(int power) {
  if (power < 0) throw DomainError("weight powers must be nonnegative");
}

// Pointwise data available to integrands: Euclidean radius, 1 - r^2, geodesic radius and jets in
// both charts.
struct Sample {
  double r, one_minus_r2, rho;
  Jet e, h;
};

enum class Density { per_dx, per_volume };

Route resolve(const TrialFunction& u, Route route) {
  if (route != Route::automatic) return route;
  return u.chart() == Chart::euclidean ? Route::euclidean : Route::hyperbolic;
}

// Splits [0, end] at the given breakpoints and, where consecutive points are far apart in ratio,
// at a geometric ladder with factor 4 so concentrated profiles are resolved.
std::vector<double> refined_breakpoints(std::vector<double> points, double end) {
  std::vector<double> out;
  std::sort(points.begin(), points.end());
  double prev = 0.0;
  for (double p : points) {
    if (!(p > 0.0) || p >= end) continue;
    if (prev > 0.0)
      for (double q = 4.0 * prev; q < p / 1.5; q *= 4.0) out.push_back(q);
    out.push_back(p);
    prev = p;
  }
  return out;
}

double integrate_sample(const TrialFunction& u, Route route, Density density,
                        const std::function<double(const Sample&)>& g) {
  if (u.is_zero()) return 0.0;
  const auto cfg = functional_config();
  quad::Result res;
  if (resolve(u, route) == Route::euclidean) {
    const double end = u.support_r();
    if (!(end < 1.0)) throw DomainError("Euclidean route needs support inside the ball");
    const auto bp = refined_breakpoints(u.breakpoints_r(), end);
    res = quad::integrate(
        [&](double r) {
          const double w = (1.0 - r) * (1.0 + r);
          const Sample s{r, w, rho_of_radius(r), u.euclidean(r), u.hyperbolic(rho_of_radius(r))};
          double weight = kSphereArea * r * r * r;
          if (density == Density::per_volume) weight *= 16.0 / std::pow(w, 4);
          return g(s) * weight;
        },
        0.0, end, bp, cfg);
  } else {
    const double end = u.support_rho();
    const auto bp = refined_breakpoints(u.breakpoints_rho(), end);
    res = quad::integrate(
        [&](double rho) {
          const double w = one_minus_r2_of_rho(rho);
          const Sample s{std::tanh(0.5 * rho), w, rho, u.euclidean_at_rho(rho), u.hyperbolic(rho)};
          const double sh = std::sinh(rho);
          double weight = kSphereArea * sh * sh * sh;
          if (density == Density::per_dx) weight *= std::pow(0.5 * w, 4);
          return g(s) * weight;
        },
        0.0, end, bp, cfg);
  }
  if (!std::isfinite(res.value)) throw NonFinite("radial integral of '" + u.family() + "' is not finite");
  return res.value;
}

} // namespace

TrialFunction::TrialFunction(Chart chart, JetFunction jet, double support, std::string family, double parameter,
                             std::vector<double> breakpoints)
    : chart_(chart), jet_(std::move(jet)), support_(support), family_(std::move(family)), parameter_(parameter),
      breakpoints_(std::move(breakpoints)) {
  if (support_ > 0.0 && !jet_) throw DomainError("trial function needs a jet");
  if (chart_ == Chart::euclidean && !(support_ < 1.0)) throw DomainError("Euclidean support must lie inside the ball");
  if (!(support_ >= 0.0) || !std::isfinite(support_)) throw DomainError("trial support must be finite");
}

TrialFunction TrialFunction::zero() { return TrialFunction(Chart::euclidean, {}, 0.0, "zero", 0.0); }

TrialFunction TrialFunction::smooth_bump(double radius, double modulation, double amplitude, Chart chart) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  if (modulation <= -1.0) throw DomainError("bump modulation must exceed -1");
  if (chart == Chart::euclidean)
    return TrialFunction(
        chart, [=](double r) { return euclidean_jet(r, bump_profile(r, radius, modulation, amplitude)); }, radius,
        "smooth_bump", radius);
  return TrialFunction(
      chart, [=](double rho) { return hyperbolic_jet(rho, bump_profile(rho, radius, modulation, amplitude)); },
      radius, "hyperbolic_bump", radius);
}

TrialFunction TrialFunction::adams_concentrating(double eps, double outer) {
  if (!(outer < 1.0) || !(eps > 0.0) || !(eps < 0.25 * outer)) throw DomainError("need 0 < eps < outer/4 < 1/4");
  return TrialFunction(
      Chart::euclidean, [=](double r) { return euclidean_jet(r, log_profile(r, eps, outer, kCapCubic)); }, outer, "adams",
      eps, {eps, 0.25 * outer});
}

TrialFunction TrialFunction::plateau_log(double eps, double outer) {
  if (!(eps > 0.0) || !(eps < 0.25 * outer)) throw DomainError("need 0 < eps < outer/4");
  return TrialFunction(
      Chart::hyperbolic, [=](double rho) { return hyperbolic_jet(rho, log_profile(rho, eps, outer, kCapCubic)); },
      outer, "plateau_log", eps, {eps, 0.25 * outer});
}

TrialFunction TrialFunction::spreading(double radius) {
  if (!(radius > 0.0) || radius > 300.0) throw DomainError("spreading radius must lie in (0, 300]");
  return TrialFunction(
      Chart::hyperbolic,
      [=](double rho) {
        if (rho >= radius) return Jet{};
        const double a = std::sqrt(1.0 + rho * rho), a1 = rho / a, a2 = 1.0 / (a * a * a);
        const double th = std::tanh(rho), c = std::cosh(rho);
        const double b = std::pow(c, -1.5), b1 = -1.5 * th * b, b2 = (2.25 * th * th - 1.5 / (c * c)) * b;
        const double f = a * b, f1 = a1 * b + a * b1, f2 = a2 * b + 2.0 * a1 * b1 + a * b2;
        const double half = 0.5 * radius;
        const Taylor step = smoothstep((rho - half) / half);
        const double cut = 1.0 - step.value, cut1 = -step.d1 / half, cut2 = -step.d2 / (half * half);
        return hyperbolic_jet(rho, {f * cut, f1 * cut + f * cut1, f2 * cut + 2.0 * f1 * cut1 + f * cut2});
      },
      radius, "spreading", radius, {0.5 * radius});
}

TrialFunction TrialFunction::scaled(double factor) const {
  if (!std::isfinite(factor)) throw DomainError("scale factor must be finite");
  TrialFunction out = *this;
  out.scale_ *= factor;
  return out;
}

TrialFunction TrialFunction::conformal_product() const {
  if (is_zero()) return *this;
  const TrialFunction f = *this;
  return TrialFunction(
      Chart::euclidean,
      [f](double r) {
        const Jet j = f.euclidean(r);
        const double w = (1.0 - r) * (1.0 + r);
        return Jet{w * j.value, -2.0 * r * j.value + w * j.slope,
                   w * j.laplacian - 4.0 * r * j.slope - 8.0 * j.value};
      },
      f.support_r(), f.family() + "_conformal", f.parameter(), f.breakpoints_r());
}

Jet TrialFunction::euclidean(double r) const {
  if (is_zero() || r >= support_r()) return {};
  Jet j;
  if (chart_ == Chart::euclidean) {
    j = jet_(r);
  } else {
    const double rho = rho_of_radius(r);
    const Jet h = jet_(rho);
    const double q = 2.0 / ((1.0 - r) * (1.0 + r));
    j = {h.value, h.slope * q, q * q * (h.laplacian - 2.0 * r * h.slope)};
  }
  return {scale_ * j.value, scale_ * j.slope, scale_ * j.laplacian};
}

Jet TrialFunction::euclidean_at_rho(double rho) const {
  if (chart_ == Chart::euclidean) return euclidean(std::tanh(0.5 * rho));
  if (is_zero() || rho >= support_) return {};
  const Jet h = jet_(rho);
  const double q = 1.0 + std::cosh(rho), r = std::tanh(0.5 * rho);
  return {scale_ * h.value, scale_ * h.slope * q, scale_ * q * q * (h.laplacian - 2.0 * r * h.slope)};
}

Jet TrialFunction::hyperbolic(double rho) const {
  if (is_zero() || rho >= support_rho()) return {};
  Jet j;
  if (chart_ == Chart::hyperbolic) {
    j = jet_(rho);
  } else {
    const double r = std::tanh(0.5 * rho), w = one_minus_r2_of_rho(rho);
    const Jet e = jet_(r);
    j = {e.value, 0.5 * w * e.slope, 0.25 * w * w * e.laplacian + r * w * e.slope};
  }
  return {scale_ * j.value, scale_ * j.slope, scale_ * j.laplacian};
}

RadialFunction TrialFunction::radial() const {
  return [self = *this](double rho) { return self.hyperbolic(rho).value; };
}

double TrialFunction::support_r() const {
  return chart_ == Chart::euclidean ? support_ : std::tanh(0.5 * support_);
}

double TrialFunction::support_rho() const {
  return chart_ == Chart::hyperbolic ? support_ : rho_of_radius(support_);
}

std::vector<double> TrialFunction::breakpoints_r() const {
  if (chart_ == Chart::euclidean) return breakpoints_;
  std::vector<double> out;
  for (double b : breakpoints_) out.push_back(std::tanh(0.5 * b));
  return out;
}

std::vector<double> TrialFunction::breakpoints_rho() const {
  if (chart_ == Chart::hyperbolic) return breakpoints_;
  std::vector<double> out;
  for (double b : breakpoints_) out.push_back(rho_of_radius(b));
  return out;
}

quad::Config functional_config() {
  quad::Config cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-300;
  cfg.max_depth = 50;
  cfg.max_intervals = 50000;
  return cfg;
}

double euclid_bilap_energy(const TrialFunction& u, Route route) {
  return integrate_sample(u, route, Density::per_dx, [](const Sample& s) { return s.e.laplacian * s.e.laplacian; });
}

double hardy_term(const TrialFunction& u, int power, Route route) {
  check_power(power);
  return integrate_sample(u, route, Density::per_dx,
                          [power](const Sample& s) { return s.e.value * s.e.value / std::pow(s.one_minus_r2, power); });
}

double euclid_dirichlet(const TrialFunction& u, int power, Route route) {
  check_power(power);
  return integrate_sample(u, route, Density::per_dx,
                          [power](const Sample& s) { return s.e.slope * s.e.slope / std::pow(s.one_minus_r2, power); });
}

double hyperbolic_dirichlet(const TrialFunction& u, Route route) {
  return integrate_sample(u, route, Density::per_volume, [](const Sample& s) { return s.h.slope * s.h.slope; });
}

double hyperbolic_moment(const TrialFunction& u, int power, Route route) {
  if (power <= 0) throw DomainError("moment power must be positive");
  return integrate_sample(u, route, Density::per_volume,
                          [power](const Sample& s) { return std::pow(std::abs(s.h.value), power); });
}

std::vector<double> spectral_lambda_grid(const TrialFunction& u) {
  const double lambda_max = std::clamp(440.0 / std::max(u.support_rho(), 1e-3), 24.0, 600.0);
  return default_lambda_grid(lambda_max, 4096);
}

double spectral_form(const TrialFunction& u, const Multiplier& m) {
  if (u.is_zero()) return 0.0;
  TransformOptions opts;
  opts.tail = TransformOptions::Tail::truncate;
  opts.rho_max = u.support_rho();
  const auto grid = spectral_lambda_grid(u);
  // Panels must resolve the oscillation of phi_lambda at the top of the grid.
  opts.panel_width = std::min({0.25, opts.rho_max / 8.0, 50.0 / grid.back()});
  opts.breakpoints = u.breakpoints_rho();
  return quadratic_form(u.radial(), m, grid, opts);
}

double paneitz_form(const TrialFunction& u) { return spectral_form(u, Multiplier::paneitz()); }

double constraint_form(const TrialFunction& u, double alpha, FormMethod method) {
  if (!(alpha >= -2.25)) throw DomainError("constraint shift must be >= -9/4");
  if (method == FormMethod::spectral) return spectral_form(u, Multiplier::constraint(alpha));
  // (mu - 9/4)(mu + alpha) = mu (mu - 2) + (alpha - 1/4) mu - 9 alpha / 4
  double value = euclid_bilap_energy(u);
  if (alpha != 0.25) value += (alpha - 0.25) * hyperbolic_dirichlet(u, Route::hyperbolic);
  if (alpha != 0.0) value -= 2.25 * alpha * hyperbolic_moment(u, 2, Route::hyperbolic);
  return value;
}

double hardy_constraint(const TrialFunction& u, double weight) {
  return euclid_bilap_energy(u) - weight * hardy_term(u, 4);
}

namespace {

double exp_integrand(double x, ExpMode mode) {
  switch (mode) {
  case ExpMode::none: return std::exp(x);
  case ExpMode::subtract1: return std::expm1(x);
  case ExpMode::subtract2:
    if (std::abs(x) < 1e-2) return x * x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
    return std::expm1(x) - x;
  }
  return 0.0;
}

} // namespace

double exp_functional(const TrialFunction& u, double beta, ExpMode mode, Measure measure) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and nonnegative");
  if (mode == ExpMode::none && measure != Measure::euclidean)
    throw DivergentMode("e^{beta u^2} is not integrable against the hyperbolic volume");
  const auto phi = [beta, mode](const Sample& s) { return exp_integrand(beta * s.e.value * s.e.value, mode); };
  double value = 0.0;
  switch (measure) {
  case Measure::hyperbolic:
    value = integrate_sample(u, Route::hyperbolic, Density::per_volume, phi);
    break;
  case Measure::conformal:
    value = integrate_sample(u, u.support_r() < 1.0 - 1e-6 ? Route::euclidean : Route::hyperbolic,
                             Density::per_volume, phi);
    break;
  case Measure::euclidean:
    value = integrate_sample(u, Route::automatic, Density::per_dx, phi);
    if (mode == ExpMode::none) {
      const double r = u.is_zero() ? 0.0 : u.support_r();
      value += kUnitBallVolume * (1.0 - r * r * r * r);
    }
    break;
  }
  if (!std::isfinite(value)) throw NonFinite("exponential functional overflowed");
  return value;
}

PotentialRepresentationCheck potential_representation_check(const TrialFunction& v, double alpha,
                                                            double lambda_cut) {
  if (v.is_zero()) throw DomainError("potential check needs a nonzero profile");
  if (!(alpha > -2.25)) throw DomainError("potential check needs alpha > -9/4");
  const double support = v.support_rho();
  const PotentialKernel kernel(alpha);
  const KernelTable table([&](double r) { return kernel(r); }, 1e-5, 60.0, 2400);

  // Beyond the tabulated range u is proportional to the kernel; the ratio settles to about 1e-4
  // by rho = 60.
  constexpr double kGridEnd = 60.0;
  std::vector<double> grid = linspace(0.0, support, static_cast<std::size_t>(std::ceil(support / 0.025)) + 1);
  for (const double r : linspace(support, kGridEnd, static_cast<std::size_t>(std::ceil((kGridEnd - support) / 0.05)) + 1))
    if (r > grid.back()) grid.push_back(r);
  ConvolutionOptions co;
  co.f_support = support;
  co.f_breakpoints = v.breakpoints_rho();
  co.quad.rel_tol = 1e-9;
  co.quad.abs_tol = 1e-300;
  co.angular = ConvolutionOptions::Angular::distance_adaptive;
  const auto values = convolve_radial(v.radial(), table.function(), grid, co);
  const RadialProfile body(grid, values, Interpolation::cubic, Monotone::unknown);
  const double ratio = values.back() / table(kGridEnd);
  const RadialFunction u = [&](double r) { return r < kGridEnd ? body(r) : ratio * table(r); };

  const auto multiplier = Multiplier::constraint(alpha);
  const auto kernel_hat = [&](double l) { return 2.0 / l / std::sqrt(0.25 * (9.0 + l * l) + alpha); };
  TransformOptions vo;
  vo.tail = TransformOptions::Tail::truncate;
  vo.rho_max = support;
  vo.panel_width = std::min(0.1, support / 8.0);
  vo.breakpoints = v.breakpoints_rho();
  TransformOptions uo;
  uo.rho_max = 40.0;

  PotentialRepresentationCheck c{};
  c.lambda_cut = lambda_cut;
  c.mass = hyperbolic_moment(v);

  const auto probe = linspace(0.5, 8.0, 16);
  const auto vp = spherical_transform(v.radial(), probe, vo);
  const auto up = spherical_transform(u, probe, uo);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double expected = vp.values()[i] * kernel_hat(probe[i]);
    c.transform_error = std::max(c.transform_error, std::abs(up.values()[i] - expected) /
                                                        std::max(std::abs(expected), 1e-3 * std::abs(up.values()[0])));
  }

  // K int_R m |u^|^2 |c|^{-2}, as twice the half line, on unit Gauss-Legendre panels. Outside
  // [lambda_cut, kNumericTop] the product m |v^ phi1^|^2 reduces to |v^|^2.
  constexpr double kNumericTop = 10.0;
  const auto& rule = quad::gauss_legendre(12);
  const auto panel_nodes = [&](double a, double b, std::size_t panels, std::vector<double>& x, std::vector<double>& w) {
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p)
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        x.push_back(a + h * (static_cast<double>(p) + 0.5 * (rule.nodes[k] + 1.0)));
        w.push_back(0.5 * h * rule.weights[k]);
      }
  };
  std::vector<double> xs, ws, xn, wn;
  const double lambda_max = std::clamp(60.0 / support, 24.0, 120.0);
  panel_nodes(0.0, lambda_cut, 1, xs, ws);
  panel_nodes(kNumericTop, lambda_max, static_cast<std::size_t>(std::ceil(lambda_max - kNumericTop)), xs, ws);
  panel_nodes(lambda_cut, kNumericTop, static_cast<std::size_t>(std::ceil(kNumericTop - lambda_cut)), xn, wn);
  double sum = 0.0;
  const auto vs = spherical_transform(v.radial(), xs, vo);
  for (std::size_t i = 0; i < xs.size(); ++i) sum += ws[i] * vs.values()[i] * vs.values()[i] * c_density(xs[i]);
  const auto un = spherical_transform(u, xn, uo);
  for (std::size_t i = 0; i < xn.size(); ++i)
    sum += wn[i] * multiplier(xn[i]) * un.values()[i] * un.values()[i] * c_density(xn[i]);
  c.constraint = 2.0 * kPlancherelConstant * sum;
  return c;
}

bool ConformalIdentityCheck::passed(double tol) const {
  return substitution_error <= tol && chain_error <= tol && improved_hardy > 0.0 &&
         bilaplacian_gap >= spectral_lower * (1.0 - tol) && euclidean_mass > 0.0;
}

ConformalIdentityCheck conformal_identity_check(const TrialFunction& f) {
  if (f.is_zero()) throw DomainError("identity check needs a nonzero profile");
  const TrialFunction u = f.conformal_product();
  ConformalIdentityCheck c{};
  c.weighted_gradient = euclid_dirichlet(u, 2, Route::euclidean);
  c.gradient = euclid_dirichlet(f, 0, Route::euclidean);
  c.weighted_mass = hardy_term(f, 2, Route::euclidean);
  c.substitution_error =
      std::abs(c.weighted_gradient - c.gradient - 8.0 * c.weighted_mass) / std::max(c.weighted_gradient, 1e-300);
  c.hyperbolic_gap = hyperbolic_dirichlet(u, Route::hyperbolic) - 2.25 * hyperbolic_moment(u, 2, Route::hyperbolic);
  c.improved_hardy = c.gradient - c.weighted_mass;
  const double scale = std::max(std::abs(c.hyperbolic_gap), 4.0 * c.gradient);
  c.chain_error = std::abs(c.hyperbolic_gap - 4.0 * c.improved_hardy) / std::max(scale, 1e-300);
  c.bilaplacian_gap = hardy_constraint(u, 9.0);
  c.euclidean_mass = hardy_term(u, 0);
  c.spectral_lower = 2.5 * c.hyperbolic_gap;
  return c;
}

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::bounded: return "BOUNDED";
  case Verdict::growing: return "GROWING";
  case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

std::string to_string(Family f) {
  switch (f) {
  case Family::adams: return "adams";
  case Family::plateau_log: return "plateau_log";
  case Family::smooth_bump: return "smooth_bump";
  }
  return "adams";
}

TrialFunction make_trial(Family family, double param) {
  switch (family) {
  case Family::adams: return TrialFunction::adams_concentrating(param);
  case Family::plateau_log: return TrialFunction::plateau_log(param);
  case Family::smooth_bump: return TrialFunction::smooth_bump(param);
  }
  throw DomainError("unknown family");
}

std::string theorem_label(TheoremKind kind) {
  switch (kind) {
  case TheoremKind::shifted: return "1.6";
  case TheoremKind::hardy: return "1.7";
  case TheoremKind::hardy_weighted: return "1.8";
  case TheoremKind::euclidean: return "1.9";
  }
  return "1.6";
}

std::optional<double> TheoremReport::constant(const std::string& key) const {
  for (const auto& [k, v] : fitted_constants)
    if (k == key) return v;
  return std::nullopt;
}

Verdict classify(std::span<const double> params, std::span<const double> values, double plateau_tol,
                 double growth_factor) {
  if (params.size() != values.size() || params.size() < 2) throw DomainError("classification needs matching sweeps");
  std::vector<std::size_t> order(params.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return params[a] > params[b]; });
  const double smallest = params[order.back()];
  double lo = INFINITY, hi = -INFINITY;
  int in_decade = 0;
  for (auto i : order)
    if (params[i] <= 10.0 * smallest * (1.0 + 1e-12)) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
      ++in_decade;
    }
  const bool plateau = in_decade >= 2 && lo > 0.0 && hi / lo - 1.0 <= plateau_tol;
  if (plateau) return Verdict::bounded;
  const double first = values[order.front()], last = values[order.back()];
  if (first > 0.0 && last >= growth_factor * first) return Verdict::growing;
  return Verdict::inconclusive;
}

double large_set_measure(const TrialFunction& u) {
  if (u.is_zero()) return 0.0;
  const auto grid = linspace(0.0, u.support_rho(), 8001);
  double measure = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (std::abs(u.value_at_rho(0.5 * (grid[i] + grid[i + 1]))) >= 1.0)
      measure += ball_volume(grid[i + 1]) - ball_volume(grid[i]);
  return measure;
}

TheoremReport verify_theorem(const TheoremOptions& opts) {
  if (opts.params.size() < 2) throw DomainError("a theorem sweep needs at least two parameters");
  if (opts.kind == TheoremKind::hardy_weighted && !(opts.hardy_weight < 9.0))
    throw DomainError("the Hardy weight must be below 9");
  if (opts.kind == TheoremKind::shifted && !(opts.alpha > 0.0)) throw DomainError("the shift must be positive");

  const auto constraint_of = [&](const TrialFunction& u) {
    switch (opts.kind) {
    case TheoremKind::shifted: return constraint_form(u, opts.alpha);
    case TheoremKind::hardy_weighted: return hardy_constraint(u, opts.hardy_weight);
    default: return hardy_constraint(u, 9.0);
    }
  };

  struct RowData {
    double constraint = 0, value = 0, subtract2 = 0, hardy = 0, mass_dx = 0, l4 = 0, large_set = 0;
  };
  const std::size_t n = opts.params.size();
  std::vector<RowData> data(n);
  parallel_for(n, [&](std::size_t i) {
    const TrialFunction raw = make_trial(opts.family, opts.params[i]);
    const double c = constraint_of(raw);
    if (!(c > 0.0)) throw ConstraintViolated("trial has nonpositive constraint form");
    const TrialFunction u = raw.scaled(1.0 / std::sqrt(c));
    RowData& d = data[i];
    d.constraint = constraint_of(u);
    d.l4 = std::sqrt(hyperbolic_moment(u, 4));
    d.large_set = large_set_measure(u);
    switch (opts.kind) {
    case TheoremKind::shifted:
    case TheoremKind::hardy:
      d.value = exp_functional(u, opts.beta, ExpMode::subtract2, Measure::hyperbolic);
      break;
    case TheoremKind::hardy_weighted:
      d.value = exp_functional(u, opts.beta, ExpMode::subtract1, Measure::hyperbolic);
      d.subtract2 = exp_functional(u, opts.beta, ExpMode::subtract2, Measure::hyperbolic);
      d.hardy = hardy_term(u, 4);
      break;
    case TheoremKind::euclidean:
      d.value = exp_functional(u, opts.beta, ExpMode::none, Measure::euclidean);
      d.subtract2 = exp_functional(u, opts.beta, ExpMode::subtract2, Measure::conformal) / 16.0;
      d.mass_dx = hardy_term(u, 0);
      break;
    }
  });

  TheoremReport rep;
  rep.theorem = theorem_label(opts.kind);
  rep.family = to_string(opts.family);
  rep.beta = opts.beta;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.rows.push_back({opts.params[i], data[i].constraint, data[i].value});
    values[i] = data[i].value;
  }
  // e^{beta u^2} dx carries the volume of the ball even for u = 0; only the excess concentrates.
  const double offset = opts.kind == TheoremKind::euclidean ? kUnitBallVolume : 0.0;
  std::vector<double> excess(n);
  for (std::size_t i = 0; i < n; ++i) excess[i] = values[i] - offset;
  rep.verdict = classify(opts.params, excess, opts.plateau_tol, opts.growth_factor);

  double sobolev = 0.0, large_set = 0.0;
  for (const auto& d : data) {
    sobolev = std::max(sobolev, d.l4);
    large_set = std::max(large_set, d.large_set);
  }
  rep.fitted_constants.emplace_back("max_value", *std::max_element(values.begin(), values.end()));
  rep.fitted_constants.emplace_back("sobolev_l4", sobolev);
  rep.fitted_constants.emplace_back("large_set_measure", large_set);

  const auto fail = [&](std::size_t i, const std::string& what) {
    std::ostringstream os;
    os.precision(6);
    os << what << " at param " << opts.params[i];
    rep.failed_conditions.push_back(os.str());
  };
  if (large_set > sobolev * sobolev) rep.failed_conditions.push_back("measure of {|u| >= 1} exceeds the Sobolev constant squared");
  if (opts.kind == TheoremKind::hardy_weighted) {
    double c1 = 0.0;
    for (const auto& d : data) c1 = std::max(c1, d.subtract2);
    const double bound = c1 + 16.0 * opts.beta / (9.0 - opts.hardy_weight);
    rep.fitted_constants.emplace_back("c1", c1);
    rep.fitted_constants.emplace_back("chain_bound", bound);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = data[i];
      if (std::abs(d.value - d.subtract2 - 16.0 * opts.beta * d.hardy) > 1e-8 * std::max(1.0, d.value))
        fail(i, "splitting of e^x - 1");
      if (d.hardy * (9.0 - opts.hardy_weight) > d.constraint * (1.0 + 1e-9)) fail(i, "Hardy bound");
      if (d.value > bound) fail(i, "chain bound");
    }
  } else if (opts.kind == TheoremKind::euclidean) {
    double c1 = 0.0, c7 = INFINITY;
    for (const auto& d : data) {
      c1 = std::max(c1, d.subtract2);
      c7 = std::min(c7, d.constraint / d.mass_dx);
    }
    const double bound = c1 + kUnitBallVolume + opts.beta / c7;
    rep.fitted_constants.emplace_back("c1", c1);
    rep.fitted_constants.emplace_back("c7", c7);
    rep.fitted_constants.emplace_back("unit_ball_volume", kUnitBallVolume);
    rep.fitted_constants.emplace_back("chain_bound", bound);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& d = data[i];
      if (d.value > d.subtract2 + kUnitBallVolume + opts.beta * d.mass_dx) fail(i, "pointwise chain");
      if (d.value > bound) fail(i, "chain bound");
    }
  }
  return rep;
}

} // namespace hypadams
