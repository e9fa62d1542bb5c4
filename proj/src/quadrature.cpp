#include "hypadams/quadrature.hpp"

#include "hypadams/detail/hyperbolic.hpp"
#include "hypadams/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <sstream>

namespace hypadams::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Panel {
  double a, b;
  double value, error, resabs;
  int depth;
  bool roundoff_limited;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a; // deterministic tie-break
  }
};

std::string where(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double checked(const Integrand& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NonFinite("integrand is not finite at x = " + where(x));
  return v;
}

// One Gauss-Kronrod 10/21 panel with the QUADPACK error heuristic.
Panel evaluate_panel(const Integrand& f, double a, double b, int depth, long& evals) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fvals[21];
  fvals[0] = checked(f, center);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    fvals[2 * i - 1] = checked(f, center - half * xk[i]);
    fvals[2 * i] = checked(f, center + half * xk[i]);
  }
  evals += 21;

  double resk = fvals[0] * wk[0];
  double resg = 0.0;
  double resabs = std::abs(resk);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double pair = fvals[2 * i - 1] + fvals[2 * i];
    resk += wk[i] * pair;
    resabs += wk[i] * (std::abs(fvals[2 * i - 1]) + std::abs(fvals[2 * i]));
    if (i % 2 == 1) resg += wg[i / 2] * pair;
  }
  const double mean = 0.5 * resk;
  double resasc = wk[0] * std::abs(fvals[0] - mean);
  for (std::size_t i = 1; i < xk.size(); ++i)
    resasc += wk[i] * (std::abs(fvals[2 * i - 1] - mean) + std::abs(fvals[2 * i] - mean));

  const double habs = std::abs(half);
  resk *= half;
  resg *= half;
  resabs *= habs;
  resasc *= habs;

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double floor = 50.0 * kEps * resabs;
  bool roundoff = false;
  if (err <= floor) {
    err = floor;
    roundoff = true;
  }
  return Panel{a, b, resk, err, resabs, depth, roundoff};
}

Result adaptive(const Integrand& f, const std::vector<double>& cuts, const Config& cfg) {
  std::priority_queue<Panel, std::vector<Panel>, ByError> open;
  std::vector<Panel> frozen;
  long evals = 0;
  double total = 0.0, total_err = 0.0;
  bool depth_exhausted = false;

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    Panel p = evaluate_panel(f, cuts[i], cuts[i + 1], 0, evals);
    total += p.value;
    total_err += p.error;
    if (p.roundoff_limited) frozen.push_back(p);
    else open.push(p);
  }

  int panels = static_cast<int>(open.size() + frozen.size());
  int since_resum = 0;
  while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    if (open.empty()) break;
    Panel worst = open.top();
    open.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const bool too_narrow = !(mid > worst.a && mid < worst.b) ||
                            (worst.b - worst.a) < 64.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b));
    if (worst.depth >= cfg.max_depth || too_narrow || panels >= cfg.max_intervals) {
      depth_exhausted = true;
      frozen.push_back(worst);
      continue;
    }
    Panel left = evaluate_panel(f, worst.a, mid, worst.depth + 1, evals);
    Panel right = evaluate_panel(f, mid, worst.b, worst.depth + 1, evals);
    ++panels;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    for (Panel* p : {&left, &right}) {
      if (p->roundoff_limited) frozen.push_back(*p);
      else open.push(*p);
    }
    if (++since_resum == 64) {
      // Refresh running sums to stop drift from repeated add/subtract.
      since_resum = 0;
      total = 0.0;
      total_err = 0.0;
      auto copy = open;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
      for (const auto& p : frozen) {
        total += p.value;
        total_err += p.error;
      }
    }
  }

  // Exact final sums, accumulated in interval order for reproducibility.
  std::vector<Panel> all = frozen;
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  total = 0.0;
  total_err = 0.0;
  double roundoff_err = 0.0;
  for (const auto& p : all) {
    total += p.value;
    total_err += p.error;
    if (p.roundoff_limited) roundoff_err += p.error;
  }
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
  if (total_err > tol && depth_exhausted && total_err - roundoff_err > tol) {
    std::ostringstream os;
    os.precision(6);
    os << "adaptive quadrature did not converge on [" << cuts.front() << ", " << cuts.back()
       << "]: error estimate " << total_err << " > tolerance " << tol << " after " << panels << " panels";
    throw NonConvergent(os.str());
  }
  return Result{total, total_err, evals};
}

} // namespace

void Config::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (max_depth < 1) throw DomainError("quadrature max_depth must be at least 1");
  if (max_intervals < 1) throw DomainError("quadrature max_intervals must be at least 1");
  if (decay.kind != DecayHint::Kind::none && !(decay.rate > 0.0))
    throw DomainError("decay hint rate must be positive");
}

Config Config::tightened(double factor) const {
  Config c = *this;
  c.rel_tol *= factor;
  c.abs_tol *= factor;
  return c;
}

Result integrate(const Integrand& f, double a, double b, const Config& cfg) {
  return integrate(f, a, b, std::span<const double>{}, cfg);
}

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 const Config& cfg) {
  cfg.validate();
  if (std::isnan(a) || std::isnan(b) || std::isinf(a)) throw DomainError("invalid integration limits");
  if (a == b) return {};
  if (b < a) {
    Result r = integrate(f, b, a, breakpoints, cfg);
    r.value = -r.value;
    return r;
  }

  double upper = b;
  if (std::isinf(b)) {
    if (cfg.decay.kind == DecayHint::Kind::exponential)
      upper = a + std::log(1.0 / cfg.abs_tol) / cfg.decay.rate;
    upper = std::min(upper, cfg.truncation_radius);
  }

  if (std::isfinite(upper)) {
    std::vector<double> cuts{a};
    for (double x : breakpoints)
      if (x > a && x < upper) cuts.push_back(x);
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(upper);
    return adaptive(f, cuts, cfg);
  }

  // x = a + s / (1 - s) maps [0, 1) onto [a, inf).
  const Integrand mapped = [&f, a](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  std::vector<double> cuts{0.0};
  for (double x : breakpoints)
    if (x > a && std::isfinite(x)) cuts.push_back((x - a) / (1.0 + (x - a)));
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(1.0);
  return adaptive(mapped, cuts, cfg);
}

CoshSubstitution cosh_substitution(double u, double rho) {
  const double y = std::sinh(0.5 * rho);
  if (y == 0.0) {
    const double s = u / std::sqrt(2.0);
    return {2.0 * std::asinh(s), 2.0 * s * std::sqrt(1.0 + s * s)};
  }
  // sinh(r/2) = y sqrt(1 + q); r - rho is formed from differences so that it keeps
  // full relative precision when u^2 is tiny against sinh^2(rho/2).
  const double q = 0.5 * u * u / (y * y);
  if (!(q < 1e300)) return {INFINITY, INFINITY};
  const double root = std::sqrt(1.0 + q);
  const double x = y * root;
  const double cy = std::cosh(0.5 * rho), cx = std::sqrt(1.0 + x * x);
  const double dx = y * q / (root + 1.0);
  const double dc = y * y * q / (cx + cy);
  const double dr = 2.0 * std::log1p((dx + dc) / (y + cy));
  return {rho + dr, 2.0 * x * cx};
}

Result integrate_cosh_substituted(const Integrand& h, double rho, const Config& cfg) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("integrate_cosh_substituted needs rho >= 0");
  // Below rho = 1 the integration variable is u with cosh r = u^2 + cosh rho. Beyond it the u-range
  // stretches like e^{rho/2}, so r = rho + w^2 is used instead:
  //   dr / sqrt(cosh r - cosh rho) = 2 w dw / sqrt(2 sinh(rho + w^2/2) sinh(w^2/2)).
  const bool stretched = rho >= 1.0;
  const Integrand g = [&h, rho, stretched](double v) {
    if (stretched) {
      const double w2 = v * v;
      const double hv = h(rho + w2);
      if (hv == 0.0) return 0.0;
      if (v == 0.0) return 2.0 * hv * std::exp(-0.5 * detail::log_sinh(rho));
      const double log_den = 0.5 * (std::log(2.0) + detail::log_sinh(rho + 0.5 * w2) + detail::log_sinh(0.5 * w2));
      return 2.0 * v * hv * std::exp(-log_den);
    }
    const auto sub = cosh_substitution(v, rho);
    const double hv = h(sub.r);
    if (hv == 0.0) return 0.0;
    return 2.0 * hv / sub.sinh_r;
  };
  auto v_of = [rho, stretched](double dr) {
    if (stretched) return std::sqrt(dr);
    // cosh(rho + dr) - cosh(rho) = 2 sinh(rho + dr/2) sinh(dr/2)
    return std::sqrt(2.0 * std::sinh(rho + 0.5 * dr) * std::sinh(0.5 * dr));
  };
  // Breakpoints for r - rho on a geometric ladder keep every scale resolved.
  std::vector<double> bps;
  for (double dr : {0.03125, 0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) bps.push_back(v_of(dr));

  // The transformed integrand must decay: compare v g(v) at two far radii.
  auto far = [&](double dr) {
    const double v = v_of(dr);
    const double gv = g(v);
    if (!std::isfinite(gv)) throw NonConvergent("integrate_cosh_substituted: integrand does not decay");
    return std::abs(v * gv);
  };
  const double near_tail = far(40.0), far_tail = far(80.0);
  if (far_tail > 0.0 && far_tail >= near_tail)
    throw NonConvergent("integrate_cosh_substituted: integrand does not decay");

  Config c = cfg;
  // r - rho beyond 600 is negligible for anything that passed the decay test, and larger r
  // overflows typical integrands.
  double upper = stretched ? v_of(600.0) : std::numeric_limits<double>::infinity();
  if (cfg.decay.kind == DecayHint::Kind::exponential) {
    const double span = std::log(1.0 / cfg.abs_tol) / cfg.decay.rate;
    upper = std::min(upper, v_of(span));
  }
  if (std::isfinite(cfg.truncation_radius) && cfg.truncation_radius > rho)
    upper = std::min(upper, v_of(cfg.truncation_radius - rho));
  c.decay = DecayHint::none();
  c.truncation_radius = std::numeric_limits<double>::infinity();
  return integrate(g, 0.0, upper, bps, c);
}

namespace {

std::unique_ptr<GaussLegendre> build_gauss_legendre(int n) {
  auto rule = std::make_unique<GaussLegendre>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule->nodes[i] = -x;
    rule->nodes[n - 1 - i] = x;
    rule->weights[i] = w;
    rule->weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule->nodes[n / 2] = 0.0;
  return rule;
}

} // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = build_gauss_legendre(n);
  return *slot;
}

} // namespace hypadams::quad
