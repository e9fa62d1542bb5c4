#include "hypadams/adams.hpp"

#include "hypadams/errors.hpp"
#include "hypadams/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hypadams {

namespace {

constexpr double kLowerCut = -200.0; // below this the phi^2 tail is added in closed form
constexpr double kUpperCut = 700.0;  // tau underflows beyond this
const double kRootAdams = std::sqrt(32.0) * kPi;

quad::Config adams_config() {
  quad::Config cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-14;
  cfg.max_depth = 50;
  cfg.max_intervals = 50000;
  return cfg;
}

std::vector<double> inside(const std::vector<double>& points, double a, double b) {
  std::vector<double> out;
  for (double p : points)
    if (p > a && p < b) out.push_back(p);
  return out;
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace

AdamsState::AdamsState(std::function<double(double)> psi, RearrangedProfile phi1_star, double omega0,
                       std::vector<double> psi_breakpoints)
    : psi_(std::move(psi)), phi1_star_(std::move(phi1_star)), omega0_(omega0),
      psi_breakpoints_(std::move(psi_breakpoints)) {
  if (!psi_) throw DomainError("AdamsState needs psi");
  if (!(omega0_ > 0.0) || !std::isfinite(omega0_)) throw DomainError("omega0 must be positive");
  psi_breakpoints_.push_back(std::log(omega0_));
  std::sort(psi_breakpoints_.begin(), psi_breakpoints_.end());
}

AdamsState AdamsState::from_rearrangement(const RearrangedProfile& v_star, RearrangedProfile phi1_star,
                                          double omega0) {
  auto v = std::make_shared<const RearrangedProfile>(v_star);
  std::vector<double> bps;
  for (double b : v->breaks()) bps.push_back(std::log(omega0 / b));
  if (std::isfinite(v->support()) && v->support() > 0.0) bps.push_back(std::log(omega0 / v->support()));
  AdamsState st(
      [v, omega0](double s) {
        if (s < -kUpperCut || s > kUpperCut) return 0.0;
        const double tau = omega0 * std::exp(-s);
        const double value = (*v)(tau);
        return value == 0.0 ? 0.0 : std::sqrt(tau) * value;
      },
      std::move(phi1_star), omega0, std::move(bps));
  st.v_star_ = std::move(v);
  return st;
}

double AdamsState::psi(double s) const { return psi_(s); }

double AdamsState::phi(double s) const {
  if (s < -kUpperCut) throw DomainError("phi is evaluated above the closed-form tail cut");
  if (s > kUpperCut) return 1.0;
  const double tau = omega0_ * std::exp(-s);
  return kRootAdams * std::sqrt(tau) * phi1_star_(tau);
}

double AdamsState::lower_tail_phi2(double s) const {
  // phi(s) ~ K / ln(tau) for large tau, so int_{-inf}^s phi^2 ~ phi(s)^2 ln(tau(s))
  const double p = phi(s);
  return p * p * (std::log(omega0_) - s);
}

double AdamsState::head_integral(const std::function<double(double)>& f, double t) const {
  if (t <= kLowerCut) return 0.0;
  const auto res = quad::integrate(f, kLowerCut, t, inside(psi_breakpoints_, kLowerCut, t), adams_config());
  return res.value;
}

double AdamsState::scaled_tail(const std::function<double(double)>& f, double t) const {
  auto cfg = adams_config();
  cfg.decay = quad::DecayHint::exponential(0.5);
  std::vector<double> bps;
  for (double b : psi_breakpoints_)
    if (b > t) bps.push_back(b - t);
  const auto res = quad::integrate([&](double x) { return std::exp(-0.5 * x) * f(t + x); }, 0.0,
                                   std::numeric_limits<double>::infinity(), bps, cfg);
  return res.value;
}

double AdamsState::kernel(double s, double t) const {
  if (s < t) return phi(s);
  return std::exp(-0.5 * (s - t)) * scaled_tail([this](double r) { return phi(r); }, t);
}

double AdamsState::pairing(double t) const {
  const double head = head_integral([this](double s) { return psi(s) * phi(s); }, t);
  return head + scaled_tail([this](double r) { return phi(r); }, t) *
                    scaled_tail([this](double r) { return psi(r); }, t);
}

double AdamsState::kernel_norm2(double t) const {
  const double head = lower_tail_phi2(kLowerCut) + head_integral([this](double s) { return phi(s) * phi(s); }, t);
  const double tail = scaled_tail([this](double r) { return phi(r); }, t);
  return head + tail * tail;
}

double AdamsState::psi_norm2() const {
  const auto sq = [this](double s) { const double p = psi(s); return p * p; };
  auto cfg = adams_config();
  double value = head_integral(sq, 0.0);
  std::vector<double> bps;
  for (double b : psi_breakpoints_)
    if (b > 0.0) bps.push_back(b);
  cfg.decay = quad::DecayHint::polynomial(2.0);
  value += quad::integrate(sq, 0.0, std::numeric_limits<double>::infinity(), bps, cfg).value;
  return value;
}

AdamsState::Sweep AdamsState::sweep(std::span<const double> t_grid) const {
  const std::size_t n = t_grid.size();
  for (std::size_t i = 1; i < n; ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("sweep grid must increase");
  const auto cross = [this](double s) { return psi(s) * phi(s); };
  const auto square = [this](double s) { const double p = phi(s); return p * p; };
  const auto phi_f = [this](double s) { return phi(s); };
  const auto psi_f = [this](double s) { return psi(s); };
  std::vector<double> d_cross(n), d_square(n), tail_phi(n), tail_psi(n);
  parallel_for(n, [&](std::size_t i) {
    if (i == 0) {
      d_cross[0] = head_integral(cross, t_grid[0]);
      d_square[0] = lower_tail_phi2(kLowerCut) + head_integral(square, t_grid[0]);
    } else {
      const double a = t_grid[i - 1], b = t_grid[i];
      const auto bps = inside(psi_breakpoints_, a, b);
      d_cross[i] = quad::integrate(cross, a, b, bps, adams_config()).value;
      d_square[i] = quad::integrate(square, a, b, bps, adams_config()).value;
    }
    tail_phi[i] = scaled_tail(phi_f, t_grid[i]);
    tail_psi[i] = scaled_tail(psi_f, t_grid[i]);
  });
  Sweep out;
  out.t.assign(t_grid.begin(), t_grid.end());
  double cross_sum = 0.0, square_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cross_sum += d_cross[i];
    square_sum += d_square[i];
    const double p = cross_sum + tail_phi[i] * tail_psi[i];
    out.pairing.push_back(p);
    out.kernel_norm2.push_back(square_sum + tail_phi[i] * tail_phi[i]);
    out.functional.push_back(t_grid[i] - p * p);
  }
  for (double v : out.functional)
    if (!std::isfinite(v)) throw NonFinite("Adams functional is not finite on the grid");
  return out;
}

double AdamsState::Identity::error() const {
  return std::max(relative_error(tail_product, tail_product_measure), relative_error(head, head_measure));
}

AdamsState::Identity AdamsState::identity(double t) const {
  if (!v_star_) throw DomainError("the change of variables needs v*");
  Identity id{};
  id.t = t;
  const double tau = omega0_ * std::exp(-t);
  id.tail_product = std::exp(-t) * scaled_tail([this](double r) { return psi(r); }, t) *
                    scaled_tail([this](double r) { return phi(r); }, t);
  id.tail_product_measure = kRootAdams / omega0_ * v_star_->integral(0.0, tau) * phi1_star_.integral(0.0, tau);
  id.head = head_integral([this](double s) { return psi(s) * phi(s); }, t);
  id.head_measure = kRootAdams * product_integral(*v_star_, phi1_star_, tau);
  return id;
}

// ---------------------------------------------------------------------------------------------

namespace {

// int_0^T e^{-F} by Simpson on a uniform odd grid.
double simpson_exp(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  if (n < 3 || n % 2 == 0) throw DomainError("Simpson needs an odd number of nodes");
  const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
  double sum = std::exp(-f.front()) + std::exp(-f.back());
  for (std::size_t i = 1; i + 1 < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * std::exp(-f[i]);
  return sum * h / 3.0;
}

// |{t in grid range : F(t) <= lambda}| for the piecewise linear interpolant.
double level_measure(const std::vector<double>& t, const std::vector<double>& f, double lambda) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = f[i] - lambda, b = f[i + 1] - lambda, h = t[i + 1] - t[i];
    if (a <= 0.0 && b <= 0.0) m += h;
    else if (a <= 0.0 || b <= 0.0) m += h * (a <= 0.0 ? a : b) / (a - b) * (a <= 0.0 ? 1.0 : -1.0);
  }
  return m;
}

struct Affine {
  double slope, intercept, r2;
};

Affine affine_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0};
}

std::string fmt(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " (" << value << ")";
  return os.str();
}

std::vector<double> uniform(double a, double b, std::size_t n) { return linspace(a, b, n); }

} // namespace

AdamsReport adams_machinery(const AdamsState& state, std::string label, const AdamsOptions& opts,
                            bool check_identities) {
  if (opts.t_points < 3 || opts.t_points % 2 == 0) throw DomainError("t_points must be odd and at least 3");
  if (!(opts.t_max > 0.0)) throw DomainError("t_max must be positive");
  AdamsReport rep;
  rep.label = std::move(label);
  rep.psi_norm2 = state.psi_norm2();
  if (rep.psi_norm2 > 1.0 + 1e-9) throw ConstraintViolated(fmt("int psi^2 exceeds 1", rep.psi_norm2));
  const auto fail = [&](const std::string& what, double v) { rep.failed_conditions.push_back(fmt(what, v)); };

  const auto grid = uniform(0.0, opts.t_max, opts.t_points);
  const auto fine = uniform(0.0, opts.t_max, 2 * opts.t_points - 1);
  const auto coarse_sweep = state.sweep(grid);
  const auto fine_sweep = state.sweep(fine);

  rep.t_grid = grid;
  rep.functional = coarse_sweep.functional;
  rep.c_fitted = -INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.kernel_excess.push_back(coarse_sweep.kernel_norm2[i] - grid[i]);
    rep.c_fitted = std::max(rep.c_fitted, rep.kernel_excess.back());
  }
  rep.c_refined = -INFINITY;
  for (std::size_t i = 0; i < fine.size(); ++i)
    rep.c_refined = std::max(rep.c_refined, fine_sweep.kernel_norm2[i] - fine[i]);
  if (!std::isfinite(rep.c_fitted)) fail("kernel excess constant is not finite", rep.c_fitted);
  if (std::abs(rep.c_fitted - rep.c_refined) > opts.stability_tol * std::abs(rep.c_refined))
    fail("kernel excess constant moves under grid doubling", rep.c_refined);
  rep.inf_functional = *std::min_element(fine_sweep.functional.begin(), fine_sweep.functional.end());
  if (rep.inf_functional < -rep.c_fitted) fail("inf F below -c", rep.inf_functional);

  {
    std::vector<double> kinks;
    for (double b : state.psi_breakpoints())
      if (b > 0.0 && b < opts.t_max) kinks.push_back(b);
    auto cfg = adams_config();
    cfg.rel_tol = 1e-8;
    rep.exp_integral =
        quad::integrate([&](double t) { return std::exp(-state.functional(t)); }, 0.0, opts.t_max, kinks, cfg)
            .value;
  }
  rep.exp_integral_simpson = simpson_exp(fine, fine_sweep.functional);
  {
    const std::size_t m = fine.size() - 1;
    const double growth = (fine_sweep.functional[m] - fine_sweep.functional[m - 1]) / (fine[m] - fine[m - 1]);
    rep.exp_tail = growth > 0.0 ? std::exp(-fine_sweep.functional[m]) / growth : INFINITY;
  }
  if (!std::isfinite(rep.exp_integral) || !(rep.exp_tail <= 1e-6 * rep.exp_integral))
    fail("int e^{-F} does not settle by t_max", rep.exp_tail);
  if (relative_error(rep.exp_integral_simpson, rep.exp_integral) > opts.simpson_tol)
    fail("int e^{-F} disagrees between adaptive and Simpson rules", rep.exp_integral_simpson);

  const double f_end = fine_sweep.functional.back();
  const double lambda_hi = std::min(opts.lambda_max, f_end - 1.0);
  if (!(lambda_hi > opts.lambda_min)) {
    fail("F does not exceed the level range on [0, t_max]", f_end);
  } else {
    rep.lambdas = uniform(opts.lambda_min, lambda_hi, opts.lambda_points);
    for (double l : rep.lambdas) rep.level_measure.push_back(level_measure(fine, fine_sweep.functional, l));
    const auto fit = affine_fit(rep.lambdas, rep.level_measure);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.r2 = fit.r2;
    rep.b1 = fit.slope;
    rep.b2 = -INFINITY;
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
      rep.b2 = std::max(rep.b2, rep.level_measure[i] - rep.b1 * std::abs(rep.lambdas[i]));
    if (!(rep.slope > 0.0)) fail("level measure does not grow with lambda", rep.slope);
    if (rep.r2 < opts.min_r2) fail("level measure is not affine in lambda", rep.r2);
  }

  if (check_identities)
    for (double t : opts.identity_t) rep.identity_error = std::max(rep.identity_error, state.identity(t).error());
  if (rep.identity_error > opts.identity_tol) fail("change of variables", rep.identity_error);

  const double cap = std::log(state.omega0() / 2.0);
  const auto phi_bounds = [&](std::size_t n, double& margin, double& log_constant) {
    const auto s_grid = uniform(-40.0, 40.0, n);
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) { values[i] = state.phi(s_grid[i]); });
    margin = INFINITY;
    log_constant = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = s_grid[i];
      margin = std::min(margin, 1.0 + opts.phi_bound_constant * std::pow(state.omega0(), 0.25) * std::exp(-0.25 * s) -
                                    values[i]);
      if (s <= cap) log_constant = std::max(log_constant, values[i] * (1.0 - s));
    }
  };
  phi_bounds(801, rep.phi_upper_margin, rep.phi_log_constant);
  double refined_margin = 0.0;
  phi_bounds(1601, refined_margin, rep.phi_log_constant_refined);
  rep.phi_upper_margin = std::min(rep.phi_upper_margin, refined_margin);
  if (rep.phi_upper_margin < 0.0) fail("phi exceeds 1 + A omega0^{1/4} e^{-t/4}", rep.phi_upper_margin);
  if (relative_error(rep.phi_log_constant, rep.phi_log_constant_refined) > opts.stability_tol)
    fail("phi (1 - t) constant moves under grid doubling", rep.phi_log_constant_refined);
  return rep;
}

AdamsReport adams_machinery(const RearrangedProfile& v_star, const RearrangedProfile& phi1_star,
                            const AdamsOptions& opts) {
  const auto state = AdamsState::from_rearrangement(v_star, phi1_star, opts.omega0);
  return adams_machinery(state, v_star.source(), opts, true);
}

RearrangedProfile potential_rearranged(double alpha) {
  const PotentialKernel kernel(alpha);
  const KernelTable table([&kernel](double r) { return kernel(r); }, 1e-6, 80.0, 2400);
  std::ostringstream id;
  id << "potential(" << alpha << ")";
  return rearrangement(DecreasingRadial(
      [f = table.function()](double r) { return r <= 0.0 ? std::numeric_limits<double>::infinity() : f(r); },
      id.str(), std::numeric_limits<double>::infinity(), Monotone::nonincreasing, false));
}

std::vector<RearrangedProfile> admissible_profiles() {
  std::vector<RearrangedProfile> out;
  out.push_back(RearrangedProfile::of_measure([](double t) { return std::sqrt(2.0) * std::exp(-t); }, "exponential"));
  out.push_back(RearrangedProfile::of_measure([](double t) { return 1.0 / (1.0 + t); }, "algebraic"));
  out.push_back(RearrangedProfile::steps({3.0}, {1.0 / std::sqrt(3.0)}, "step"));
  out.push_back(RearrangedProfile::of_measure(
      [](double t) { return std::pow(2.0 / kPi, 0.25) * std::pow(t, -0.25) * std::exp(-t); }, "power_singular"));
  out.push_back(RearrangedProfile::of_measure(
      [](double t) { return std::sqrt(2.0 / t) * std::pow(1.0 + std::log(1.0 / t), -1.5); }, "log_spread", 1.0));
  return out;
}

} // namespace hypadams
