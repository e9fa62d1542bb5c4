#include "doctest.h"

#include "hypadams/errors.hpp"
#include "hypadams/kernels.hpp"
#include "hypadams/spectral.hpp"

#include <cmath>
#include <random>

using namespace hypadams;

namespace {

// Green kernel through the substitution t^2 = cosh r - cosh rho, done with plain quadrature.
double green_by_t_substitution(double rho) {
  const double cm1 = 2.0 * std::pow(std::sinh(0.5 * rho), 2); // cosh rho - 1
  quad::Config cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-300;
  const auto r = quad::integrate(
      [cm1](double t) {
        const double a = t * t + cm1;
        return (a + 1.0) / std::pow(a * (a + 2.0), 1.5);
      },
      0.0, INFINITY, cfg);
  return r.value / (2.0 * std::sqrt(2.0) * kPi * kPi);
}

// Critical half-power kernel from the collapsed time integral,
// 2/(sqrt(pi)(2 pi)^{5/2}) int (1/(r^2 sinh r) + cosh r/(r sinh^2 r)) / sqrt(cosh r - cosh rho) dr,
// integrated in the offset variable r = rho + w^2.
double critical_by_offset(double rho) {
  quad::Config cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-300;
  const auto res = quad::integrate(
      [rho](double w) {
        const double s = w * w;
        if (s > 600.0) return 0.0;
        const double r = rho + s;
        const double sh = std::sinh(r);
        const double weight = s == 0.0 ? 2.0 / std::sqrt(std::sinh(rho))
                                       : 2.0 * w / std::sqrt(2.0 * std::sinh(rho + 0.5 * s) * std::sinh(0.5 * s));
        return (1.0 / (r * r * sh) + std::cosh(r) / (r * sh * sh)) * weight;
      },
      0.0, INFINITY, cfg);
  return 2.0 / (std::sqrt(kPi) * std::pow(2.0 * kPi, 2.5)) * res.value;
}

} // namespace

TEST_CASE("heat kernel: unit mass, positivity and small-time decay") {
  for (double t : {0.25, 1.0, 4.0}) CHECK(std::abs(heat_mass(t).value - 1.0) < 1e-5);
  for (double r : {0.0, 0.5, 3.0, 12.0}) CHECK(heat_kernel(1.0, r) > 0.0);
  // away from the origin p_t(rho) vanishes as t -> 0, monotonically once t < rho^2 / 16
  double prev = INFINITY;
  for (double t = 0.25; t > 0.02; t *= 0.8) {
    const double v = heat_kernel(t, 2.0);
    CHECK(v < prev);
    prev = v;
  }
  // (4 pi t)^2 p_t(0) -> 1 as t -> 0
  CHECK(heat_kernel(1e-3, 0.0) * std::pow(4.0 * kPi * 1e-3, 2) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(heat_kernel(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(KernelSpec::heat(-1.0), DomainError);
}

TEST_CASE("heat kernel transform is the exponential multiplier") {
  const auto lambdas = linspace(0.0, 8.0, 33);
  for (double t : {0.25, 1.0}) {
    const auto tr = spherical_transform([t](double r) { return heat_kernel(t, r); }, lambdas);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      CHECK(tr.values()[i] == doctest::Approx(std::exp(-0.25 * t * (9.0 + lambdas[i] * lambdas[i]))).epsilon(1e-5));
  }
}

TEST_CASE("heat semigroup under convolution") {
  const auto p1 = KernelTable::of(KernelSpec::heat(0.3), 1e-4, 15.0, 600);
  const auto p2 = KernelTable::of(KernelSpec::heat(0.5), 1e-4, 15.0, 600);
  const std::vector<double> rho{0.0, 0.4, 1.0, 2.5, 4.0};
  ConvolutionOptions o;
  o.quad.rel_tol = 1e-9;
  o.quad.abs_tol = 1e-300;
  o.f_support = 14.0;
  const auto conv = convolve_radial(p1.function(), p2.function(), rho, o);
  for (std::size_t i = 0; i < rho.size(); ++i)
    CHECK(conv[i] == doctest::Approx(heat_kernel(0.8, rho[i])).epsilon(1e-4));
}

TEST_CASE("green kernel: two integral representations, Euclidean limit, monotonicity") {
  for (double r : {0.01, 0.3, 1.0, 4.0, 11.0})
    CHECK(green_kernel(r) == doctest::Approx(green_by_t_substitution(r)).epsilon(1e-9));
  CHECK(green_kernel(0.01) * 0.01 * 0.01 * 4.0 * kPi * kPi == doctest::Approx(1.0).epsilon(0.02));
  const auto grid = logspace(0.01, 12.0, 60);
  double prev = INFINITY;
  for (double r : grid) {
    const double v = green_kernel(r);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(green_kernel(0.0), DomainError);
  CHECK_THROWS_AS(green_kernel(-1.0), DomainError);
}

TEST_CASE("green kernel transform is 4 / lambda^2") {
  const auto lambdas = linspace(0.5, 8.0, 16);
  const auto tr = spherical_transform(green_kernel, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    CHECK(tr.values()[i] == doctest::Approx(4.0 / (lambdas[i] * lambdas[i])).epsilon(1e-3));
}

TEST_CASE("inner time integrals: Bessel and quadrature routes agree") {
  for (double a : {1e-6, 0.1, 3.25, 6.25})
    for (double b : {1e-4, 0.25, 4.0, 100.0})
      for (int k : {2, 3}) {
        const double bes = inner_time_integral(k, a, b, InnerMethod::bessel);
        const double q = inner_time_integral(k, a, b, InnerMethod::quadrature);
        CHECK(std::abs(bes - q) <= 1e-9 * std::abs(bes) + 1e-300);
      }
  CHECK(inner_time_integral(2, 0.0, 2.0) == doctest::Approx(0.5));
  CHECK(inner_time_integral(3, 0.0, 2.0) == doctest::Approx(0.25));
  const auto cfg = KernelSpec::default_config();
  for (double r : {0.05, 1.0, 6.0})
    CHECK(half_power_kernel_value(1.0, r, cfg, InnerMethod::both).value ==
          doctest::Approx(half_power_kernel(1.0, r)).epsilon(1e-10));
}

TEST_CASE("critical half-power kernel: collapsed formula and Euclidean limit") {
  for (double r : {0.05, 0.7, 3.0, 9.0})
    CHECK(half_power_kernel(kCriticalShift, r) == doctest::Approx(critical_by_offset(r)).epsilon(1e-7));
  const KernelSpec crit = KernelSpec::half_power(kCriticalShift);
  CHECK(crit.critical());
  CHECK(half_power_kernel(kCriticalShift, 0.01) / euclidean_asymptote(crit, 0.01) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK_THROWS_AS(half_power_kernel(-2.3, 1.0), DomainError);
  CHECK_THROWS_AS(KernelSpec::half_power(-3.0), DomainError);
}

TEST_CASE("half-power transforms are the inverse square-root multipliers") {
  const auto lambdas = linspace(0.5, 8.0, 9);
  for (double alpha : {kCriticalShift, 1.0}) {
    const auto table = KernelTable::of(KernelSpec::half_power(alpha), 1e-4, 80.0, 1600);
    const auto tr = spherical_transform(table.function(), lambdas);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const double mu = 0.25 * (9.0 + lambdas[i] * lambdas[i]) + alpha;
      CHECK(tr.values()[i] == doctest::Approx(1.0 / std::sqrt(mu)).epsilon(1e-3));
    }
  }
}

TEST_CASE("property: half-power kernels decrease in alpha") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha(-2.25, 6.0), rho(-4.0, 2.5);
  for (int trial = 0; trial < 40; ++trial) {
    const double a1 = alpha(rng), a2 = alpha(rng), r = std::exp(rho(rng));
    const double lo = std::min(a1, a2), hi = std::max(a1, a2);
    CHECK(half_power_kernel(hi, r) <= half_power_kernel(lo, r));
  }
}

TEST_CASE("critical half-power kernels convolve to the green kernel") {
  const auto table = KernelTable::of(KernelSpec::half_power(kCriticalShift));
  const std::vector<double> rho{0.2, 1.0, 2.5, 6.0};
  ConvolutionOptions o;
  o.angular = ConvolutionOptions::Angular::distance_adaptive;
  o.quad.rel_tol = 1e-9;
  o.quad.abs_tol = 1e-300;
  o.tail_radius = 30.0;
  const auto conv = convolve_radial(table.function(), table.function(), rho, o);
  for (std::size_t i = 0; i < rho.size(); ++i) CHECK(conv[i] == doctest::Approx(green_kernel(rho[i])).epsilon(1e-5));
}

TEST_CASE("potential kernel: green at the critical shift, convolution and transform otherwise") {
  const PotentialKernel critical(kCriticalShift);
  for (double r : {0.05, 1.0, 5.0}) CHECK(critical(r) == doctest::Approx(green_kernel(r)).epsilon(1e-10));

  CHECK(PotentialKernel::time_integral(1.5, 0.0, 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  // c -> 0 continuity; the approach is only like sqrt(c)
  CHECK(PotentialKernel::time_integral(1.5, 1e-14, 2.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-6));
  CHECK(std::abs(PotentialKernel::time_integral(1.5, 1e-10, 2.0) / std::sqrt(kPi) - 1.0) < 1e-4);

  const double alpha = 1.0;
  const PotentialKernel pot(alpha);
  const auto crit = KernelTable::of(KernelSpec::half_power(kCriticalShift));
  const auto shifted = KernelTable::of(KernelSpec::half_power(alpha));
  const std::vector<double> rho{0.3, 1.5, 4.0};
  ConvolutionOptions o;
  o.angular = ConvolutionOptions::Angular::distance_adaptive;
  o.quad.rel_tol = 1e-9;
  o.quad.abs_tol = 1e-300;
  o.tail_radius = 30.0;
  const auto conv = convolve_radial(crit.function(), shifted.function(), rho, o);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    CHECK(pot(rho[i]) == doctest::Approx(conv[i]).epsilon(1e-5));
    CHECK(pot(rho[i]) <= green_kernel(rho[i]));
  }

  const auto lambdas = linspace(0.5, 6.0, 6);
  const auto tr = spherical_transform([&](double r) { return pot(r); }, lambdas);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    const double expected = 2.0 / l / std::sqrt(0.25 * (9.0 + l * l) + alpha);
    CHECK(tr.values()[i] == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("kernel tables interpolate and extrapolate") {
  const auto table = KernelTable::of(KernelSpec::green(), 1e-3, 30.0, 900);
  for (double r = 1.3e-3; r < 29.0; r *= 1.29) CHECK(table(r) == doctest::Approx(green_kernel(r)).epsilon(1e-7));
  CHECK(table(5e-4) == doctest::Approx(green_kernel(5e-4)).epsilon(1e-3));
  CHECK(table(34.0) == doctest::Approx(green_kernel(34.0)).epsilon(1e-4));
  CHECK_THROWS_AS(KernelTable(green_kernel, 0.0, 1.0, 10), DomainError);
}

TEST_CASE("decay exponents and fitted helpers") {
  const auto ex = decay_exponents(1.0);
  CHECK(ex.alpha0 == doctest::Approx(0.151388).epsilon(1e-5));
  CHECK(ex.eps0 == doctest::Approx(0.160898).epsilon(1e-5));
  CHECK(std::sqrt((1.0 + 2.25) * (1.0 - ex.eps0)) - 1.5 == doctest::Approx(ex.alpha0).epsilon(1e-12));
  CHECK_THROWS_AS(decay_exponents(0.0), DomainError);

  const auto x = linspace(1.0, 5.0, 9);
  std::vector<double> y(x.size()), shape(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 3.0 * std::exp(-2.5 * x[i]);
    shape[i] = std::exp(-2.0 * x[i]);
  }
  CHECK(fitted_log_slope(x, y) == doctest::Approx(-2.5).epsilon(1e-12));
  const auto rep = fitted_bound("probe", "x", x, y, shape);
  CHECK(rep.passed());
  CHECK(*rep.fitted_constant == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(rep.min_margin() >= 0.0);
}

TEST_CASE("kernel bound reports") {
  const auto reports = verify_kernel_bounds();
  REQUIRE(reports.size() == 9);
  for (const auto& r : reports) {
    CAPTURE(r.name);
    CHECK(r.passed());
    CHECK(r.grid.size() == r.margin.size());
  }
  CHECK(*reports.back().extra("log_slope") <= -3.0 - *reports.back().extra("alpha0"));

  KernelBoundOptions single;
  single.rho_grid = {2.0};
  single.decay_points = 2;
  const auto small = verify_kernel_bounds(single);
  CHECK(small.front().grid.size() == 1);
  CHECK(small.front().passed());
}

TEST_CASE("Plancherel normalization from the heat kernel") {
  const auto pc = plancherel_check(0.5);
  CHECK(pc.constant_error < 1e-6);
  CHECK(pc.literature_ratio == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-6));
  CHECK(pc.transform_error < 1e-5);
  CHECK(pc.round_trip_error < 1e-4);
}
