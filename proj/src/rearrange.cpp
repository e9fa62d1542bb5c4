#include "hypadams/rearrange.hpp"

#include "hypadams/errors.hpp"
#include "hypadams/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace hypadams {

struct DecreasingRadial::Memo {
  std::mutex mutex;
  std::map<double, double> values;
};

DecreasingRadial::DecreasingRadial(RadialFunction f, std::string id, double support, Monotone flag, bool memoize)
    : f_(std::move(f)), id_(std::move(id)), support_(support), flag_(flag),
      memo_(memoize ? std::make_shared<Memo>() : nullptr) {
  if (!f_) throw DomainError("DecreasingRadial needs a function");
  if (!(support_ > 0.0)) throw DomainError("DecreasingRadial needs a positive support");
}

DecreasingRadial DecreasingRadial::from_profile(const RadialProfile& p, std::string id) {
  if (p.empty()) throw DomainError("cannot rearrange an empty profile");
  const auto& v = p.values();
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) throw NotMonotone("profile '" + id + "' increases at rho = " + std::to_string(p.rho_grid()[i]));
  return DecreasingRadial(p.function(), std::move(id), p.support_end(), Monotone::nonincreasing);
}

DecreasingRadial DecreasingRadial::of(const KernelSpec& spec) {
  spec.validate();
  const bool singular = spec.kind != KernelSpec::Kind::heat;
  return DecreasingRadial(
      [spec, singular](double rho) {
        if (rho <= 0.0 && singular) return std::numeric_limits<double>::infinity();
        return evaluate(spec, rho).value;
      },
      spec.name());
}

double DecreasingRadial::operator()(double rho) const {
  if (rho >= support_) return 0.0;
  if (!memo_) {
    const double v = f_(rho);
    if (std::isnan(v)) throw NonFinite("'" + id_ + "' is NaN at rho = " + std::to_string(rho));
    return v;
  }
  {
    std::lock_guard lock(memo_->mutex);
    if (auto it = memo_->values.find(rho); it != memo_->values.end()) return it->second;
  }
  const double v = f_(rho);
  if (std::isnan(v)) throw NonFinite("'" + id_ + "' is NaN at rho = " + std::to_string(rho));
  std::lock_guard lock(memo_->mutex);
  memo_->values.emplace(rho, v);
  return v;
}

std::size_t DecreasingRadial::memo_size() const {
  if (!memo_) return 0;
  std::lock_guard lock(memo_->mutex);
  return memo_->values.size();
}

double level_radius(const DecreasingRadial& f, double s) {
  if (!(s > 0.0)) throw DomainError("level sets need s > 0");
  if (f(0.0) <= s) return 0.0;
  const bool check = f.flag() != Monotone::nonincreasing;
  double lo = 0.0, f_lo = f(0.0);
  double hi = std::min(1.0, f.support());
  while (f(hi) > s) {
    if (hi >= f.support()) return f.support();
    lo = hi;
    f_lo = f(hi);
    hi = std::min(2.0 * hi, f.support());
    if (hi > 1e4) throw NonConvergent("'" + f.id() + "' stays above " + std::to_string(s) + " out to rho = 1e4");
  }
  double f_hi = f(hi);
  for (int iter = 0; iter < 400 && hi - lo > 1e-12 * std::min(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    if (check && (v > f_lo || v < f_hi))
      throw NotMonotone("'" + f.id() + "' is not nonincreasing near rho = " + std::to_string(mid));
    if (v > s) {
      lo = mid;
      f_lo = v;
    } else {
      hi = mid;
      f_hi = v;
    }
  }
  return 0.5 * (lo + hi);
}

double distribution_function(const DecreasingRadial& f, double s) {
  return ball_volume(level_radius(f, s));
}

// ---------------------------------------------------------------------------------------------

namespace {

// Tabulated kernels are only C^0 across table nodes, so tighter tolerances stall the refinement.
quad::Config measure_config() {
  quad::Config cfg;
  cfg.rel_tol = 1e-9;
  cfg.abs_tol = 1e-300;
  cfg.max_depth = 50;
  return cfg;
}

} // namespace

RearrangedProfile rearrangement(const DecreasingRadial& f, std::span<const double> t_grid) {
  RearrangedProfile out;
  out.radial_ = std::make_shared<const DecreasingRadial>(f);
  out.source_ = f.id();
  out.tabulate(t_grid);
  return out;
}

RearrangedProfile RearrangedProfile::steps(std::vector<double> breaks, std::vector<double> values, std::string source) {
  if (breaks.size() != values.size()) throw DomainError("step profile: breaks and values differ in length");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] > (i == 0 ? 0.0 : breaks[i - 1]))) throw DomainError("step profile: breaks must increase from 0");
    if (!(values[i] >= 0.0) || (i > 0 && values[i] > values[i - 1]))
      throw NotMonotone("step profile values must be nonnegative and nonincreasing");
  }
  RearrangedProfile out;
  out.breaks_ = std::move(breaks);
  out.step_values_ = std::move(values);
  out.source_ = std::move(source);
  return out;
}

RearrangedProfile RearrangedProfile::of_measure(std::function<double(double)> fstar, std::string source,
                                                double support) {
  if (!fstar) throw DomainError("of_measure needs a function");
  if (!(support > 0.0)) throw DomainError("of_measure needs a positive support");
  const double rho_support = std::isfinite(support) ? inverse_ball_volume(support) : support;
  RearrangedProfile out;
  out.radial_ = std::make_shared<const DecreasingRadial>(
      [f = std::move(fstar)](double rho) { return f(ball_volume(rho)); }, source, rho_support,
      Monotone::nonincreasing, false);
  out.source_ = std::move(source);
  return out;
}

double RearrangedProfile::support() const {
  if (!radial_) return breaks_.empty() ? 0.0 : breaks_.back();
  return std::isfinite(radial_->support()) ? ball_volume(radial_->support()) : radial_->support();
}

double RearrangedProfile::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("rearrangements are defined for t >= 0");
  if (radial_) return (*radial_)(inverse_ball_volume(t));
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return it == breaks_.end() ? 0.0 : step_values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double RearrangedProfile::at_rho(double rho) const {
  return radial_ ? (*radial_)(rho) : (*this)(ball_volume(rho));
}

double RearrangedProfile::distribution(double s) const {
  if (!(s > 0.0)) throw DomainError("level sets need s > 0");
  if (!radial_) {
    double measure = 0.0;
    for (std::size_t i = 0; i < breaks_.size(); ++i)
      if (step_values_[i] > s) measure = breaks_[i];
    return measure;
  }
  // bisection in log t on f* itself
  double lo = 1.0, hi = 1.0;
  const auto& f = *this;
  if (f(1.0) > s) {
    while (f(hi) > s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw NonConvergent("rearrangement stays above the level");
    }
  } else {
    while (!(f(lo) > s)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  }
  while (hi / lo - 1.0 > 1e-14) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > s ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

double RearrangedProfile::integral(double a, double b) const {
  if (!(a >= 0.0) || !(b >= a)) throw DomainError("integral needs 0 <= a <= b");
  if (a == b) return 0.0;
  if (!radial_) {
    double sum = 0.0, left = 0.0;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      const double lo = std::max(left, a), hi = std::min(breaks_[i], b);
      if (hi > lo) sum += step_values_[i] * (hi - lo);
      left = breaks_[i];
    }
    return sum;
  }
  const double r0 = inverse_ball_volume(a), r1 = inverse_ball_volume(b);
  const double end = std::min(r1, radial_->support());
  if (end <= r0) return 0.0;
  const auto res = quad::integrate(
      [this](double r) {
        const double s = std::sinh(r);
        return (*radial_)(r) * s * s * s;
      },
      r0, end, measure_config());
  const double v = kSphereArea * res.value;
  if (!std::isfinite(v)) throw NonConvergent("integral of '" + source_ + "' does not converge");
  return v;
}

void RearrangedProfile::tabulate(std::span<const double> t_grid) {
  std::vector<double> values(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t i) { values[i] = (*this)(t_grid[i]); });
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("t grid must be strictly increasing");
    if (!(values[i] >= 0.0) || (i > 0 && values[i] > values[i - 1]))
      throw NotMonotone("rearrangement of '" + source_ + "' is not nonnegative and nonincreasing");
  }
  t_grid_.assign(t_grid.begin(), t_grid.end());
  values_ = std::move(values);
}

double product_integral(const RearrangedProfile& f, const RearrangedProfile& g, double t) {
  if (!(t >= 0.0)) throw DomainError("product integral needs t >= 0");
  double tail = 0.0;
  if (f.is_step() && g.is_step()) {
    std::vector<double> cuts{t};
    for (double b : f.breaks_) if (b > t) cuts.push_back(b);
    for (double b : g.breaks_) if (b > t) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      tail += f(mid) * g(mid) * (cuts[i + 1] - cuts[i]);
    }
  } else {
    const double r0 = inverse_ball_volume(t);
    std::vector<double> cuts;
    for (const auto* p : {&f, &g}) {
      for (double b : p->breaks_) if (b > t) cuts.push_back(inverse_ball_volume(b));
      if (p->radial_ && std::isfinite(p->radial_->support())) cuts.push_back(p->radial_->support());
    }
    for (double d = 1.0; d <= 32.0; d *= 2.0) cuts.push_back(r0 + d);
    std::sort(cuts.begin(), cuts.end());
    const auto res = quad::integrate(
        [&](double r) {
          const double s = std::sinh(r);
          const double fv = f.at_rho(r);
          return fv == 0.0 ? 0.0 : fv * g.at_rho(r) * s * s * s;
        },
        r0, std::numeric_limits<double>::infinity(), cuts, measure_config());
    tail = kSphereArea * res.value;
  }
  if (!std::isfinite(tail)) throw NonConvergent("product integral does not converge at t = " + std::to_string(t));
  return tail;
}

double oneil_rhs(const RearrangedProfile& f, const RearrangedProfile& g, double t) {
  if (!(t > 0.0)) throw DomainError("the O'Neil majorant needs t > 0");
  const double v = f.integral(0.0, t) * g.integral(0.0, t) / t + product_integral(f, g, t);
  if (!std::isfinite(v)) throw NonConvergent("O'Neil majorant does not converge at t = " + std::to_string(t));
  return v;
}

// ---------------------------------------------------------------------------------------------

double green_rearranged_bound(double t, double constant) {
  return (1.0 + constant * std::pow(t, 0.25)) / (4.0 * std::sqrt(2.0) * kPi * std::sqrt(t));
}

double critical_rearranged_leading(double t) {
  return std::pow(2.0, 0.25) / (8.0 * std::sqrt(kPi) * std::pow(t, 0.75));
}

double log_integral_ratio(double t) {
  if (!(t > 2.0)) throw DomainError("log_integral_ratio needs t > 2");
  const double big_l = std::log(t);
  quad::Config cfg;
  cfg.rel_tol = 1e-13;
  cfg.abs_tol = 1e-300;
  // s = e^u, scaled by e^{-L/2}
  const auto res = quad::integrate([big_l](double u) { return std::exp(0.5 * (u - big_l)) / u; },
                                   std::log(2.0), big_l, cfg);
  return big_l * res.value;
}

double log_integral_series(double t, int terms) {
  const double x = 2.0 / std::log(t);
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < terms; ++k) {
    sum += term;
    term *= static_cast<double>(k + 1) * x;
  }
  return 2.0 * sum;
}

namespace {

std::vector<double> sample(const RearrangedProfile& p, std::span<const double> grid) {
  std::vector<double> v(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { v[i] = p(grid[i]); });
  return v;
}

BoundReport compare(std::string name, std::span<const double> grid, std::span<const double> lhs,
                    std::span<const double> rhs, double abs_tol) {
  BoundReport rep;
  rep.name = std::move(name);
  rep.variable = "t";
  rep.abs_tol = abs_tol;
  for (std::size_t i = 0; i < grid.size(); ++i) rep.push(grid[i], lhs[i], rhs[i]);
  return rep;
}

// lhs <= C * shape with C = max lhs/shape, refitted on a doubled grid; the fit must move by <= 10%.
BoundReport stable_fit(std::string name, std::span<const double> grid, const RearrangedProfile& lhs,
                       const std::function<double(double)>& shape) {
  auto shapes = [&](std::span<const double> g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = shape(g[i]);
    return v;
  };
  const auto l = sample(lhs, grid);
  BoundReport rep = fitted_bound(std::move(name), "t", grid, l, shapes(grid));
  if (grid.size() >= 2) {
    const auto fine = logspace(grid.front(), grid.back(), 2 * grid.size() - 1);
    const auto fit = fitted_bound("refined", "t", fine, sample(lhs, fine), shapes(fine));
    rep.extras.emplace_back("refined_constant", *fit.fitted_constant);
    if (std::abs(*fit.fitted_constant / *rep.fitted_constant - 1.0) > 0.1)
      rep.failed_conditions.push_back("fitted constant moved more than 10% under grid doubling");
  }
  return rep;
}

// lhs <= lead (1 + A sqrt t), A >= 0 fitted.
BoundReport stable_affine_fit(std::string name, std::span<const double> grid, const RearrangedProfile& lhs) {
  auto constant = [&](std::span<const double> g, const std::vector<double>& l) {
    double a = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      a = std::max(a, (l[i] / critical_rearranged_leading(g[i]) - 1.0) / std::sqrt(g[i]));
    return a * (1.0 + 1e-12);
  };
  const auto l = sample(lhs, grid);
  const double a = constant(grid, l);
  BoundReport rep;
  rep.name = std::move(name);
  rep.variable = "t";
  for (std::size_t i = 0; i < grid.size(); ++i)
    rep.push(grid[i], l[i], critical_rearranged_leading(grid[i]) * (1.0 + a * std::sqrt(grid[i])));
  rep.fitted_constant = a;
  if (grid.size() >= 2) {
    const auto fine = logspace(grid.front(), grid.back(), 2 * grid.size() - 1);
    const double a2 = constant(fine, sample(lhs, fine));
    rep.extras.emplace_back("refined_constant", a2);
    if (a > 0.0 && std::abs(a2 / a - 1.0) > 0.1)
      rep.failed_conditions.push_back("fitted constant moved more than 10% under grid doubling");
  }
  return rep;
}

} // namespace

std::vector<BoundReport> verify_rearrangement_bounds(const RearrangeOptions& opts) {
  if (!(opts.alpha > 0.0)) throw DomainError("rearrangement bounds need alpha > 0");
  const auto& small = opts.small_grid;
  const auto& large = opts.large_grid;
  const auto ex = decay_exponents(opts.alpha);

  auto singular = [](RadialFunction f) {
    return [f = std::move(f)](double r) { return r <= 0.0 ? std::numeric_limits<double>::infinity() : f(r); };
  };
  std::ostringstream label;
  label << opts.alpha;
  const auto green = rearrangement(DecreasingRadial(singular(green_kernel), "green"));
  const auto critical = rearrangement(
      DecreasingRadial(singular(KernelTable::of(KernelSpec::half_power(kCriticalShift)).function()), "half_power(-2.25)"));
  const auto shifted = rearrangement(DecreasingRadial(
      singular(KernelTable::of(KernelSpec::half_power(opts.alpha)).function()), "half_power(" + label.str() + ")"));
  const PotentialKernel potential_kernel(opts.alpha);
  const auto potential = rearrangement(
      DecreasingRadial(singular([&](double r) { return potential_kernel(r); }), "potential(" + label.str() + ")"));

  std::vector<BoundReport> out;
  {
    std::vector<double> rhs(small.size());
    for (std::size_t i = 0; i < small.size(); ++i) rhs[i] = green_rearranged_bound(small[i], opts.green_constant);
    auto rep = compare("green_rearranged", small, sample(green, small), rhs, opts.abs_tol);
    rep.extras.emplace_back("constant", opts.green_constant);
    out.push_back(std::move(rep));
  }
  out.push_back(stable_affine_fit("critical_rearranged_power", small, critical));
  out.push_back(stable_fit("critical_rearranged_log", large, critical,
                           [](double t) { return 1.0 / (std::sqrt(t) * std::log(t)); }));
  {
    const double power = 1.0 + ex.eps0 / 3.0;
    auto rep = stable_fit("shifted_rearranged_power", large, shifted, [power](double t) { return std::pow(t, -power); });
    rep.extras.emplace_back("alpha", opts.alpha);
    rep.extras.emplace_back("eps0", ex.eps0);
    out.push_back(std::move(rep));
  }
  out.push_back(compare("rearranged_domination", small, sample(shifted, small), sample(critical, small), opts.abs_tol));
  {
    std::vector<double> rhs(small.size());
    for (std::size_t i = 0; i < small.size(); ++i) rhs[i] = green_rearranged_bound(small[i], opts.green_constant);
    out.push_back(compare("potential_rearranged_green", small, sample(potential, small), rhs, opts.abs_tol));
  }
  out.push_back(stable_fit("potential_rearranged_log", large, potential,
                           [](double t) { return 1.0 / (std::sqrt(t) * std::log(t)); }));
  {
    std::vector<double> rhs(large.size());
    parallel_for(large.size(), [&](std::size_t i) { rhs[i] = oneil_rhs(critical, shifted, large[i]); });
    out.push_back(compare("oneil_continuous", large, sample(potential, large), rhs, opts.abs_tol));
  }
  return out;
}

} // namespace hypadams
