#include "hypadams/geometry.hpp"

#include "hypadams/detail/hyperbolic.hpp"
#include "hypadams/errors.hpp"
#include "hypadams/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace hypadams {

namespace {

using detail::log_sinh;
using detail::times_sinh_power;

std::array<double, 4> raw_mobius(const std::array<double, 4>& a, const std::array<double, 4>& x) {
  double a2 = 0.0, x2 = 0.0, xa = 0.0, d2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    a2 += a[i] * a[i];
    x2 += x[i] * x[i];
    xa += x[i] * a[i];
    d2 += (x[i] - a[i]) * (x[i] - a[i]);
  }
  const double den = 1.0 - 2.0 * xa + x2 * a2;
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = (d2 * a[i] - (1.0 - a2) * (x[i] - a[i])) / den;
  return out;
}

double norm_of(const std::array<double, 4>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

} // namespace

Point4::Point4(const std::array<double, 4>& coords) : coords_(coords) {
  for (double c : coords)
    if (!std::isfinite(c)) throw DomainError("Point4 coordinates must be finite");
  if (norm() > kMaxNorm) throw DomainError("Point4 must lie strictly inside the unit ball");
}

double Point4::norm2() const {
  return coords_[0] * coords_[0] + coords_[1] * coords_[1] + coords_[2] * coords_[2] +
         coords_[3] * coords_[3];
}

double Point4::norm() const { return std::sqrt(norm2()); }

double rho_of_point(const Point4& x) { return 2.0 * std::atanh(x.norm()); }

double radius_of_rho(double rho) { return std::tanh(0.5 * rho); }

Point4 mobius(const Point4& a, const Point4& x) { return Point4(raw_mobius(a.coords(), x.coords())); }

double geodesic_distance(const Point4& x, const Point4& y) {
  const double n = norm_of(raw_mobius(x.coords(), y.coords()));
  return 2.0 * std::atanh(std::min(n, Point4::kMaxNorm));
}

double distance_from_polar(double rho, double a, double theta) {
  // sinh^2(d/2) = sinh^2((rho - a)/2) + sinh(rho) sinh(a) sin^2(theta/2)
  const double s1 = std::sinh(0.5 * (rho - a));
  const double st = std::sin(0.5 * theta);
  return 2.0 * std::asinh(std::sqrt(s1 * s1 + std::sinh(rho) * std::sinh(a) * st * st));
}

double ball_volume(double rho) {
  if (rho < 0.0) throw DomainError("ball_volume needs rho >= 0");
  const double s = std::sinh(0.5 * rho);
  return (8.0 * kPi * kPi / 3.0) * s * s * s * s * (std::cosh(rho) + 2.0);
}

double ball_volume_derivative(double rho) {
  const double s = std::sinh(rho);
  return kSphereArea * s * s * s;
}

double inverse_ball_volume(double volume) {
  if (!(volume >= 0.0)) throw DomainError("inverse_ball_volume needs a nonnegative volume");
  if (volume == 0.0) return 0.0;
  if (std::isinf(volume)) return volume;
  // Below this the quartic leading term is exact in double precision.
  if (volume < 1e-40) return std::pow(2.0 * volume / (kPi * kPi), 0.25);
  // Initial guess from the small- and large-radius asymptotes.
  double rho = volume < 1.0 ? std::pow(2.0 * volume / (kPi * kPi), 0.25)
                            : std::log(6.0 * volume / (kPi * kPi) + 1.0) / 3.0 + 0.1;
  double lo = 0.0, hi = std::max(1.0, 2.0 * rho);
  while (ball_volume(hi) < volume) hi *= 2.0;
  const double target = std::log(volume);
  for (int iter = 0; iter < 200; ++iter) {
    if (!(rho > lo && rho < hi)) rho = 0.5 * (lo + hi);
    const double v = ball_volume(rho);
    if (v < volume) lo = rho;
    else hi = rho;
    // Newton on log V
    const double step = (std::log(v) - target) * v / ball_volume_derivative(rho);
    double next = rho - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - rho) <= 1e-15 * rho) return next;
    rho = next;
  }
  return rho;
}

RadialProfile::RadialProfile(std::vector<double> rho_grid, std::vector<double> values,
                             Interpolation order, Monotone flag)
    : rho_(std::move(rho_grid)), values_(std::move(values)), order_(order), flag_(flag) {
  if (rho_.size() != values_.size()) throw DomainError("RadialProfile grid and values differ in length");
  if (!rho_.empty() && !(rho_[0] >= 0.0)) throw DomainError("RadialProfile grid must start at rho >= 0");
  for (std::size_t i = 1; i < rho_.size(); ++i)
    if (!(rho_[i] > rho_[i - 1])) throw DomainError("RadialProfile grid must be strictly increasing");
  if (flag_ == Monotone::nonincreasing) {
    for (std::size_t i = 1; i < values_.size(); ++i)
      if (values_[i] > values_[i - 1]) throw NotMonotone("RadialProfile flagged nonincreasing is not");
    order_ = Interpolation::linear;
  }
  const std::size_t n = rho_.size();
  slopes_.assign(n, 0.0);
  if (order_ == Interpolation::cubic && n >= 3) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = rho_[i] - rho_[i - 1], h1 = rho_[i + 1] - rho_[i];
      const double d0 = (values_[i] - values_[i - 1]) / h0, d1 = (values_[i + 1] - values_[i]) / h1;
      slopes_[i] = (h1 * d0 + h0 * d1) / (h0 + h1);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
      return ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    };
    slopes_[0] = end_slope(rho_[1] - rho_[0], rho_[2] - rho_[1], (values_[1] - values_[0]) / (rho_[1] - rho_[0]),
                           (values_[2] - values_[1]) / (rho_[2] - rho_[1]));
    const std::size_t m = n - 1;
    slopes_[m] = end_slope(rho_[m] - rho_[m - 1], rho_[m - 1] - rho_[m - 2],
                           (values_[m] - values_[m - 1]) / (rho_[m] - rho_[m - 1]),
                           (values_[m - 1] - values_[m - 2]) / (rho_[m - 1] - rho_[m - 2]));
  } else if (order_ == Interpolation::cubic && n == 2) {
    slopes_[0] = slopes_[1] = (values_[1] - values_[0]) / (rho_[1] - rho_[0]);
  }
}

RadialProfile RadialProfile::sample(const RadialFunction& f, std::vector<double> rho_grid,
                                    Interpolation order, Monotone flag) {
  std::vector<double> v(rho_grid.size());
  parallel_for(v.size(), [&](std::size_t i) { v[i] = f(rho_grid[i]); });
  return RadialProfile(std::move(rho_grid), std::move(v), order, flag);
}

double RadialProfile::operator()(double rho) const {
  if (rho_.empty()) return 0.0;
  if (rho <= rho_.front()) return values_.front();
  if (rho > rho_.back()) return 0.0;
  const auto it = std::upper_bound(rho_.begin(), rho_.end(), rho);
  const std::size_t i = (it == rho_.end()) ? rho_.size() - 1 : static_cast<std::size_t>(it - rho_.begin());
  const std::size_t j = i - 1;
  const double h = rho_[i] - rho_[j];
  const double s = (rho - rho_[j]) / h;
  if (order_ == Interpolation::linear) return values_[j] + s * (values_[i] - values_[j]);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * values_[j] + (s3 - 2 * s2 + s) * h * slopes_[j] +
         (-2 * s3 + 3 * s2) * values_[i] + (s3 - s2) * h * slopes_[i];
}

RadialFunction RadialProfile::function() const {
  return [self = *this](double rho) { return self(rho); };
}

quad::Result radial_integral(const RadialFunction& f, const RadialIntegralOptions& opts) {
  const quad::Integrand weighted = [&f](double rho) { return kSphereArea * times_sinh_power(f(rho), rho, 3); };
  const quad::Config& cfg = opts.quad;
  double last_break = 0.0;
  for (double b : opts.breakpoints) last_break = std::max(last_break, b);

  quad::Result total;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int quiet_panels = 0;
  for (int k = 0;; ++k) {
    const double a = k * opts.panel_width;
    if (a >= opts.max_radius) break;
    const double b = std::min(opts.max_radius, a + opts.panel_width);
    const auto r = quad::integrate(weighted, a, b, opts.breakpoints, cfg);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;

    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total.value));
    const double mag = std::abs(r.value);
    if (b > last_break && mag <= tol) {
      double tail = 0.0;
      if (std::isfinite(prev) && prev > 0.0) {
        const double q = mag / prev;
        tail = q < 1.0 ? mag * q / (1.0 - q) : std::numeric_limits<double>::infinity();
      }
      if (tail <= tol && ++quiet_panels >= 2) {
        total.error += tail;
        return total;
      }
    } else {
      quiet_panels = 0;
    }
    prev = mag;
  }
  throw NonConvergent("radial_integral: tail not negligible at the truncation radius");
}

quad::Result radial_integral(const RadialProfile& f, const RadialIntegralOptions& opts) {
  if (f.empty()) return {};
  const quad::Integrand weighted = [&f](double rho) { return kSphereArea * times_sinh_power(f(rho), rho, 3); };
  std::vector<double> cuts(f.rho_grid().begin(), f.rho_grid().end());
  cuts.insert(cuts.end(), opts.breakpoints.begin(), opts.breakpoints.end());
  return quad::integrate(weighted, 0.0, f.support_end(), cuts, opts.quad);
}

namespace {

// Average of g(d) sin^2(theta) over theta in [0, pi], written in the distance variable b:
// (sinh rho sinh a)^{-2} int g(b) sinh b sqrt((cosh b - cosh b_lo)(cosh b_hi - cosh b)) db,
// with b = b_lo + D sin^2(phi/2) so both square-root endpoints become smooth.
double angular_distance_adaptive(const RadialFunction& g, double rho, double a, const ConvolutionOptions& opts) {
  const double b_lo = std::abs(rho - a);
  const double b_hi = rho + a;
  const double span = b_hi - b_lo;
  const double ln2 = std::log(2.0);
  const double scale = 2.0 * (log_sinh(rho) + log_sinh(a));
  const quad::Integrand integrand = [&](double phi) {
    const double sh = std::sin(0.5 * phi), ch = std::cos(0.5 * phi);
    const double below = span * sh * sh; // b - b_lo
    const double above = span * ch * ch; // b_hi - b
    const double b = b_lo + below;
    const double gv = g(b);
    if (gv == 0.0 || below <= 0.0 || above <= 0.0) return 0.0;
    const double log_p = 2.0 * ln2 + log_sinh(0.5 * (b + b_lo)) + log_sinh(0.5 * below) +
                         log_sinh(0.5 * (b_hi + b)) + log_sinh(0.5 * above);
    const double jac = 0.5 * span * std::sin(phi);
    return gv * jac * std::exp(log_sinh(b) + 0.5 * log_p - scale);
  };
  std::vector<double> cuts;
  for (double c : opts.g_breakpoints)
    if (c > b_lo && c < b_hi) cuts.push_back(2.0 * std::asin(std::sqrt((c - b_lo) / span)));
  // Peak of singular g near b = b_lo when a is close to rho.
  if (b_lo < 0.25 * span) {
    const double ratio = std::sqrt(std::max(b_lo, 1e-300) / span);
    for (double m : {1.0, 4.0, 16.0})
      if (m * ratio < 1.0) cuts.push_back(2.0 * std::asin(m * ratio));
  }
  return quad::integrate(integrand, 0.0, kPi, cuts, opts.quad.tightened(0.1)).value;
}

double angular_gauss_legendre(const RadialFunction& g, double rho, double a, int order) {
  const auto& rule = quad::gauss_legendre(order);
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double theta = 0.5 * kPi * (1.0 + rule.nodes[j]);
    const double s = std::sin(theta);
    sum += rule.weights[j] * g(distance_from_polar(rho, a, theta)) * s * s;
  }
  return 0.5 * kPi * sum;
}

// int_R^inf h(a) da for h ~ sum_{k=2}^{6} A_k (R/a)^k, fitted on [R, 2R].
double algebraic_tail(const quad::Integrand& h, double radius) {
  constexpr int kTerms = 5, kSamples = 16;
  std::array<std::array<double, kTerms + 1>, kTerms> normal{};
  for (int j = 0; j < kSamples; ++j) {
    const double a = radius * (1.0 + static_cast<double>(j) / (kSamples - 1));
    const double x = radius / a;
    const double y = h(a);
    std::array<double, kTerms> basis{};
    for (int k = 0; k < kTerms; ++k) basis[k] = std::pow(x, k + 2);
    for (int r = 0; r < kTerms; ++r) {
      for (int c = 0; c < kTerms; ++c) normal[r][c] += basis[r] * basis[c];
      normal[r][kTerms] += basis[r] * y;
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int c = 0; c < kTerms; ++c) {
    int piv = c;
    for (int r = c + 1; r < kTerms; ++r)
      if (std::abs(normal[r][c]) > std::abs(normal[piv][c])) piv = r;
    std::swap(normal[c], normal[piv]);
    for (int r = c + 1; r < kTerms; ++r) {
      const double m = normal[r][c] / normal[c][c];
      for (int k = c; k <= kTerms; ++k) normal[r][k] -= m * normal[c][k];
    }
  }
  std::array<double, kTerms> coef{};
  for (int r = kTerms - 1; r >= 0; --r) {
    double v = normal[r][kTerms];
    for (int k = r + 1; k < kTerms; ++k) v -= normal[r][k] * coef[k];
    coef[r] = v / normal[r][r];
  }
  double tail = 0.0;
  for (int k = 0; k < kTerms; ++k) tail += coef[k] * radius / (k + 1);
  return tail;
}

double integrate_outer(const quad::Integrand& outer, std::vector<double> cuts, const ConvolutionOptions& opts) {
  if (!(opts.tail_radius < opts.f_support)) return quad::integrate(outer, 0.0, opts.f_support, cuts, opts.quad).value;
  const double radius = opts.tail_radius;
  std::erase_if(cuts, [radius](double c) { return c >= radius; });
  const double body = quad::integrate(outer, 0.0, radius, cuts, opts.quad).value;
  return body + algebraic_tail(outer, radius);
}

double convolve_at(const RadialFunction& f, const RadialFunction& g, double rho, const ConvolutionOptions& opts) {
  std::vector<double> cuts = opts.f_breakpoints;
  if (rho == 0.0) {
    const quad::Integrand diag = [&](double a) {
      const double fv = f(a);
      if (fv == 0.0) return 0.0;
      return kSphereArea * times_sinh_power(fv * g(a), a, 3);
    };
    return integrate_outer(diag, cuts, opts);
  }
  cuts.push_back(rho);
  cuts.push_back(2.0 * rho + 1.0);
  const quad::Integrand outer = [&](double a) {
    if (a <= 0.0) return 0.0;
    const double fv = f(a);
    if (fv == 0.0) return 0.0;
    const double inner = opts.angular == ConvolutionOptions::Angular::gauss_legendre
                             ? angular_gauss_legendre(g, rho, a, opts.angular_order)
                             : angular_distance_adaptive(g, rho, a, opts);
    return 4.0 * kPi * times_sinh_power(fv * inner, a, 3);
  };
  return integrate_outer(outer, cuts, opts);
}

} // namespace

std::vector<double> convolve_radial(const RadialFunction& f, const RadialFunction& g,
                                    std::span<const double> out_grid, const ConvolutionOptions& opts) {
  std::vector<double> out(out_grid.size());
  parallel_for(out.size(), [&](std::size_t i) { out[i] = convolve_at(f, g, out_grid[i], opts); });
  return out;
}

RadialProfile convolve_radial(const RadialProfile& f, const RadialProfile& g, std::vector<double> out_grid,
                              const ConvolutionOptions& opts) {
  ConvolutionOptions o = opts;
  o.f_support = std::min(o.f_support, f.support_end());
  o.g_breakpoints.push_back(g.support_end());
  auto values = convolve_radial(f.function(), g.function(), out_grid, o);
  return RadialProfile(std::move(out_grid), std::move(values), Interpolation::cubic);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("logspace needs positive endpoints");
  auto v = linspace(std::log(lo), std::log(hi), n);
  for (double& x : v) x = std::exp(x);
  if (n >= 1) v.front() = lo;
  if (n >= 2) v.back() = hi;
  return v;
}

} // namespace hypadams
