#include "hypadams/spectral.hpp"

#include "hypadams/detail/hyperbolic.hpp"
#include "hypadams/errors.hpp"
#include "hypadams/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hypadams {

using detail::log_sinh;
using detail::times_sinh_power;
using cplx = std::complex<double>;

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

cplx log_sin_pi(cplx z) {
  const double y = kPi * z.imag();
  if (std::abs(y) < 300.0) return std::log(std::sin(kPi * z));
  // |Im| large: one exponential dominates sin(pi z).
  const cplx i(0.0, 1.0);
  if (y > 0.0) return -i * kPi * z - std::log(2.0) + i * (kPi / 2.0);
  return i * kPi * z - std::log(2.0) - i * (kPi / 2.0);
}

} // namespace

cplx complex_log_gamma(cplx z) {
  if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - complex_log_gamma(1.0 - z);
  z -= 1.0;
  cplx series = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) series += kLanczos[k] / (z + static_cast<double>(k));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

cplx complex_gamma(cplx z) { return std::exp(complex_log_gamma(z)); }

cplx c_function(double lambda) {
  if (lambda == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
  const cplx il(0.0, lambda);
  // c(lambda) = 2^{3 - i lambda} Gamma(2) Gamma(i lambda) / (Gamma((3 + i lambda)/2) Gamma((1 + i lambda)/2))
  const cplx log_c = (3.0 - il) * std::log(2.0) + complex_log_gamma(il) - complex_log_gamma(0.5 * (3.0 + il)) -
                     complex_log_gamma(0.5 * (1.0 + il));
  return std::exp(log_c);
}

double c_density(double lambda) {
  if (lambda == 0.0) return 0.0;
  const cplx il(0.0, lambda);
  const double log_abs_c = ((3.0 - il) * std::log(2.0) + complex_log_gamma(il) -
                            complex_log_gamma(0.5 * (3.0 + il)) - complex_log_gamma(0.5 * (1.0 + il)))
                               .real();
  return std::exp(-2.0 * log_abs_c);
}

double c_density_closed_form(double lambda) {
  return kPi * lambda * (1.0 + lambda * lambda) * std::tanh(0.5 * kPi * lambda) / 128.0;
}

namespace {

constexpr double kAbelConstant = 5.6568542494923802 / kPi; // 4 sqrt(2) / pi

struct SeriesCoefficients {
  double a, b, c;
};

// phi = 1 + a rho^2 + b rho^4 + c rho^6 from the radial eigenvalue equation.
SeriesCoefficients series_coefficients(double lambda) {
  const double mu = 0.25 * (9.0 + lambda * lambda);
  const double a = -mu / 8.0;
  const double b = -a * (mu + 2.0) / 24.0;
  const double c = (2.0 * a / 15.0 - (mu + 4.0) * b) / 48.0;
  return {a, b, c};
}

bool use_series(double lambda, double rho) {
  const double mu = 0.25 * (9.0 + lambda * lambda);
  return mu * rho * rho < 1e-2;
}

int abel_order(double lambda_max, double rho) {
  const double phase = 0.5 * std::abs(lambda_max) * rho;
  int n = 24 + static_cast<int>(std::ceil(1.2 * phase));
  n = 8 * ((n + 7) / 8);
  return std::min(n, 8192);
}

// Abel-form nodes: v_j and weights g_j with phi_lambda(rho) = sum_j g_j cos(lambda v_j / 2).
struct AbelNodes {
  std::vector<double> v;
  std::vector<double> g;
};

AbelNodes abel_nodes(double rho, int n, bool derivative) {
  const auto& rule = quad::gauss_legendre(n);
  AbelNodes out;
  out.v.resize(n);
  out.g.resize(n);
  const double lsh_rho = log_sinh(rho);
  for (int j = 0; j < n; ++j) {
    const double psi = 0.25 * kPi * (1.0 + rule.nodes[j]);
    const double w = 0.25 * kPi * rule.weights[j];
    const double v = rho * std::sin(psi);
    const double half_gap = std::sin(0.25 * kPi - 0.5 * psi);
    const double gap = 2.0 * rho * half_gap * half_gap; // rho - v
    const double cos_psi = std::cos(psi);
    // log of 2 sinh((rho+v)/2) sinh((rho-v)/2) = cosh rho - cosh v
    const double log_diff = std::log(2.0) + log_sinh(0.5 * (rho + v)) + log_sinh(0.5 * gap);
    double weight;
    if (!derivative) {
      weight = std::exp(0.5 * log_diff - 2.0 * lsh_rho);
    } else {
      // sinh(rho) / (2 sqrt(cosh rho - cosh v)) / sinh^2 rho
      weight = 0.5 * std::exp(-0.5 * log_diff - lsh_rho);
    }
    out.v[j] = v;
    out.g[j] = kAbelConstant * w * rho * cos_psi * weight;
  }
  return out;
}

double abel_sum(const AbelNodes& nodes, double lambda) {
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.v.size(); ++j) s += nodes.g[j] * std::cos(0.5 * lambda * nodes.v[j]);
  return s;
}

} // namespace

double spherical_function(double lambda, double rho) {
  if (!(rho >= 0.0)) throw DomainError("spherical_function needs rho >= 0");
  if (use_series(lambda, rho)) {
    const auto k = series_coefficients(lambda);
    const double r2 = rho * rho;
    return 1.0 + r2 * (k.a + r2 * (k.b + r2 * k.c));
  }
  return abel_sum(abel_nodes(rho, abel_order(lambda, rho), false), lambda);
}

double spherical_function_derivative(double lambda, double rho) {
  if (!(rho >= 0.0)) throw DomainError("spherical_function_derivative needs rho >= 0");
  if (use_series(lambda, rho)) {
    const auto k = series_coefficients(lambda);
    const double r2 = rho * rho;
    return rho * (2.0 * k.a + r2 * (4.0 * k.b + r2 * 6.0 * k.c));
  }
  const int n = abel_order(lambda, rho);
  const double value_part = abel_sum(abel_nodes(rho, n, false), lambda);
  const double deriv_part = abel_sum(abel_nodes(rho, n, true), lambda);
  // d/drho [C I / sinh^2] = C I' / sinh^2 - 2 coth(rho) * (C I / sinh^2)
  return deriv_part - 2.0 / std::tanh(rho) * value_part;
}

double spherical_function_angular(double lambda, double rho, int order) {
  const auto& rule = quad::gauss_legendre(order);
  const double ch = std::cosh(rho), sh = std::sinh(rho);
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double theta = 0.5 * kPi * (1.0 + rule.nodes[j]);
    const double base = ch - sh * std::cos(theta);
    const double s = std::sin(theta);
    // Re base^{-(3 + i lambda)/2}
    sum += rule.weights[j] * std::pow(base, -1.5) * std::cos(0.5 * lambda * std::log(base)) * s * s;
  }
  return (2.0 / kPi) * 0.5 * kPi * sum;
}

namespace {

bool is_uniform(std::span<const double> xs) {
  if (xs.size() < 3) return true;
  const double h = xs[1] - xs[0];
  for (std::size_t i = 2; i < xs.size(); ++i)
    if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-10 * std::max(1.0, std::abs(h))) return false;
  return true;
}

} // namespace

void spherical_function_batch(double rho, std::span<const double> lambdas, std::span<double> out) {
  if (lambdas.empty()) return;
  double lmax = 0.0;
  for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
  if (use_series(lmax, rho)) {
    for (std::size_t k = 0; k < lambdas.size(); ++k) out[k] = spherical_function(lambdas[k], rho);
    return;
  }
  const AbelNodes nodes = abel_nodes(rho, abel_order(lmax, rho), false);
  std::fill(out.begin(), out.end(), 0.0);
  if (is_uniform(lambdas) && lambdas.size() >= 3) {
    const double l0 = lambdas[0];
    const double dl = lambdas[1] - lambdas[0];
    for (std::size_t j = 0; j < nodes.v.size(); ++j) {
      const double half_v = 0.5 * nodes.v[j];
      cplx z = std::polar(1.0, l0 * half_v);
      const cplx step = std::polar(1.0, dl * half_v);
      const double g = nodes.g[j];
      for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (k % 64 == 0) z = std::polar(1.0, lambdas[k] * half_v); // bound recurrence drift
        out[k] += g * z.real();
        z *= step;
      }
    }
    return;
  }
  for (std::size_t k = 0; k < lambdas.size(); ++k) out[k] = abel_sum(nodes, lambdas[k]);
}

std::vector<double> default_lambda_grid(double lambda_max, std::size_t points) {
  return linspace(-lambda_max, lambda_max, points);
}

SpectralProfile::SpectralProfile(std::vector<double> lambda_grid, std::vector<double> values)
    : lambda_(std::move(lambda_grid)), values_(std::move(values)) {
  if (lambda_.size() != values_.size()) throw DomainError("SpectralProfile grid and values differ in length");
  for (std::size_t i = 1; i < lambda_.size(); ++i)
    if (!(lambda_[i] > lambda_[i - 1])) throw DomainError("SpectralProfile grid must be strictly increasing");
  density_.resize(lambda_.size());
  for (std::size_t i = 0; i < lambda_.size(); ++i) density_[i] = c_density(lambda_[i]);
}

bool SpectralProfile::is_symmetric(double tol) const {
  const std::size_t n = lambda_.size();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(lambda_[i] + lambda_[n - 1 - i]) > tol * std::max(1.0, std::abs(lambda_[i]))) return false;
  return true;
}

std::vector<double> SpectralProfile::trapezoid_weights() const {
  const std::size_t n = lambda_.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = lambda_[i + 1] - lambda_[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

Multiplier Multiplier::laplacian_power(double gamma) {
  Multiplier m;
  m.factors_.push_back({false, 0.0, gamma});
  return m;
}

Multiplier Multiplier::shifted(double alpha, double gamma) {
  if (alpha < -2.25) throw DomainError("multiplier shift must satisfy alpha >= -9/4");
  Multiplier m;
  m.factors_.push_back({false, alpha, gamma});
  return m;
}

Multiplier Multiplier::gap_power(double gamma) {
  Multiplier m;
  m.factors_.push_back({true, 0.0, gamma});
  return m;
}

Multiplier Multiplier::paneitz() { return laplacian_power(1.0) * shifted(-2.0, 1.0); }

Multiplier Multiplier::constraint(double alpha) { return gap_power(1.0) * shifted(alpha, 1.0); }

Multiplier Multiplier::operator*(const Multiplier& other) const {
  Multiplier m = *this;
  m.factors_.insert(m.factors_.end(), other.factors_.begin(), other.factors_.end());
  return m;
}

double Multiplier::operator()(double lambda) const {
  const double l2 = 0.25 * lambda * lambda;
  double v = 1.0;
  for (const auto& f : factors_) {
    const double base = (f.gap ? l2 : l2 + 2.25) + f.shift;
    v *= f.exponent == 1.0 ? base : std::pow(base, f.exponent);
  }
  return v;
}

namespace {

struct Node {
  double rho;
  double weight;
};

std::vector<Node> panel_nodes(const std::vector<double>& edges, int order) {
  const auto& rule = quad::gauss_legendre(order);
  std::vector<Node> nodes;
  nodes.reserve((edges.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j < order; ++j) nodes.push_back({c + h * rule.nodes[j], h * rule.weights[j]});
  }
  return nodes;
}

std::vector<double> base_edges(const TransformOptions& opts) {
  std::vector<double> edges{0.0, 1e-3, 1e-2, 0.05};
  for (double x = opts.panel_width; x < opts.rho_max - 1e-12; x += opts.panel_width) edges.push_back(x);
  edges.push_back(opts.rho_max);
  for (double b : opts.breakpoints)
    if (b > 0.0 && b < opts.rho_max) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              edges.end());
  return edges;
}

// log of the spherical-function envelope bound |phi_lambda| <= phi_0 <= (1 + rho) e^{-3 rho / 2}, times sinh^3.
double log_envelope(double fv, double rho) {
  if (fv == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(fv)) + 3.0 * log_sinh(std::max(rho, 1e-300)) + std::log1p(rho) - 1.5 * rho;
}

} // namespace

SpectralProfile spherical_transform(const RadialFunction& f, std::span<const double> lambda_grid,
                                    const TransformOptions& opts) {
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  const std::size_t n = grid.size();
  if (n == 0) return SpectralProfile({}, {});

  // Distinct |lambda| values to evaluate; a symmetric grid is mirrored.
  std::vector<double> targets;
  std::vector<std::size_t> source(n);
  bool symmetric = true;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(grid[i] + grid[n - 1 - i]) > 1e-12 * std::max(1.0, std::abs(grid[i]))) symmetric = false;
  if (symmetric) {
    const std::size_t half = n / 2;
    for (std::size_t i = half; i < n; ++i) targets.push_back(grid[i]);
    for (std::size_t i = 0; i < n; ++i) source[i] = i >= half ? i - half : (n - 1 - i) - half;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      targets.push_back(std::abs(grid[i]));
      source[i] = i;
    }
  }

  // Evaluate f panel block by panel block until the envelope is negligible.
  const std::vector<double> edges = base_edges(opts);
  const std::vector<Node> all_nodes = panel_nodes(edges, opts.panel_order);
  const std::size_t per_panel = static_cast<std::size_t>(opts.panel_order);
  const std::size_t panels = edges.size() - 1;
  std::vector<double> fvals(all_nodes.size(), 0.0);
  double max_env = -std::numeric_limits<double>::infinity();
  std::size_t used_panels = panels;
  bool decayed = false;
  const std::size_t block = 16;
  int quiet_blocks = 0;
  for (std::size_t p0 = 0; p0 < panels; p0 += block) {
    const std::size_t p1 = std::min(panels, p0 + block);
    parallel_for((p1 - p0) * per_panel, [&](std::size_t k) {
      const std::size_t idx = p0 * per_panel + k;
      fvals[idx] = f(all_nodes[idx].rho);
      if (!std::isfinite(fvals[idx])) throw NonFinite("spherical_transform: profile is not finite");
    });
    double block_env = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = p0 * per_panel; idx < p1 * per_panel; ++idx)
      block_env = std::max(block_env, log_envelope(fvals[idx], all_nodes[idx].rho));
    max_env = std::max(max_env, block_env);
    if (std::isfinite(max_env) && block_env < max_env + std::log(opts.negligible)) {
      if (++quiet_blocks >= 2) {
        used_panels = p1;
        decayed = true;
        break;
      }
    } else {
      quiet_blocks = 0;
    }
  }
  if (!std::isfinite(max_env)) decayed = true; // f vanishes on the nodes
  const bool window = opts.tail == TransformOptions::Tail::cesaro ||
                      (opts.tail == TransformOptions::Tail::automatic && !decayed);

  std::vector<double> weighted(used_panels * per_panel);
  for (std::size_t i = 0; i < weighted.size(); ++i)
    weighted[i] = kSphereArea * all_nodes[i].weight * times_sinh_power(fvals[i], all_nodes[i].rho, 3);

  std::vector<double> values(targets.size(), 0.0);
  const std::size_t lblock = 64;
  const std::size_t nblocks = (targets.size() + lblock - 1) / lblock;
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t k0 = b * lblock, k1 = std::min(targets.size(), k0 + lblock);
    std::span<const double> ls(targets.data() + k0, k1 - k0);
    std::vector<double> phi(ls.size());
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      if (weighted[i] == 0.0) continue;
      spherical_function_batch(all_nodes[i].rho, ls, phi);
      for (std::size_t k = 0; k < ls.size(); ++k) values[k0 + k] += weighted[i] * phi[k];
    }
  });

  if (window) {
    // Per lambda: the tapered window starts at a whole number of periods R1 and again at R2 = 2 R1.
    // A tail amplitude decaying like 1/rho leaves an error proportional to R^{-2}, removed by
    // Richardson extrapolation; for exponentially flat amplitudes both sums agree.
    parallel_for(targets.size(), [&](std::size_t k) {
      const double lambda = targets[k];
      if (lambda == 0.0)
        throw NonConvergent("spherical_transform: non-decaying integrand has no value at lambda = 0");
      const double period = 4.0 * kPi / lambda;
      const double length = opts.window_periods * period;
      const double r1 = std::ceil(opts.rho_max / period) * period;
      const double r2 = opts.richardson ? 2.0 * r1 : r1;
      if (r2 + length > opts.rho_max + opts.max_window)
        throw NonConvergent("spherical_transform: summation window too long at small lambda");
      auto piece = [&](double a, double b, bool tapered) {
        if (b <= a) return 0.0;
        const int npan = std::max(1, static_cast<int>(std::ceil((b - a) / opts.panel_width)));
        const std::vector<double> wedges = linspace(a, b, static_cast<std::size_t>(npan) + 1);
        double sum = 0.0;
        for (const Node& node : panel_nodes(wedges, opts.panel_order)) {
          double taper = 1.0;
          if (tapered) {
            const double x = (node.rho - a) / (b - a);
            taper = opts.taper == TransformOptions::Taper::linear ? 1.0 - x : 0.5 * (1.0 + std::cos(kPi * x));
          }
          const double fv = f(node.rho);
          sum += kSphereArea * node.weight * taper * times_sinh_power(fv, node.rho, 3) *
                 spherical_function(lambda, node.rho);
        }
        return sum;
      };
      const double lead = piece(opts.rho_max, r1, false);
      const double s1 = lead + piece(r1, r1 + length, true);
      if (!opts.richardson) {
        values[k] += s1;
        return;
      }
      const double s2 = lead + piece(r1, r2, false) + piece(r2, r2 + length, true);
      values[k] += (4.0 * s2 - s1) / 3.0;
    });
  }

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = values[source[i]];
  return SpectralProfile(std::move(grid), std::move(out));
}

SpectralProfile spherical_transform(const RadialProfile& f, std::span<const double> lambda_grid,
                                    const TransformOptions& opts) {
  TransformOptions o = opts;
  o.rho_max = std::min(o.rho_max, f.support_end());
  o.tail = TransformOptions::Tail::truncate;
  if (f.interpolation() == Interpolation::linear || f.size() <= 64)
    o.breakpoints.insert(o.breakpoints.end(), f.rho_grid().begin(), f.rho_grid().end());
  return spherical_transform(f.function(), lambda_grid, o);
}

RadialProfile inverse_spherical_transform(const SpectralProfile& transform, std::vector<double> rho_grid) {
  const auto w = transform.trapezoid_weights();
  const auto& lambdas = transform.lambda_grid();
  std::vector<double> coef(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    coef[i] = kPlancherelConstant * w[i] * transform.values()[i] * transform.density()[i];
  std::vector<double> values(rho_grid.size());
  parallel_for(rho_grid.size(), [&](std::size_t r) {
    std::vector<double> phi(lambdas.size());
    spherical_function_batch(rho_grid[r], lambdas, phi);
    double s = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) s += coef[i] * phi[i];
    values[r] = s;
  });
  return RadialProfile(std::move(rho_grid), std::move(values), Interpolation::cubic);
}

double quadratic_form(const SpectralProfile& transform, const Multiplier& m) {
  const auto w = transform.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < transform.size(); ++i) {
    const double v = transform.values()[i];
    s += w[i] * m(transform.lambda_grid()[i]) * v * v * transform.density()[i];
  }
  return kPlancherelConstant * s;
}

double quadratic_form(const RadialFunction& u, const Multiplier& m, std::span<const double> lambda_grid,
                      const TransformOptions& opts) {
  return quadratic_form(spherical_transform(u, lambda_grid, opts), m);
}

} // namespace hypadams
