#include "doctest.h"

#include "hypadams/errors.hpp"
#include "hypadams/rearrange.hpp"
#include "oneil_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

using namespace hypadams;

TEST_CASE("distribution function: trivial levels, plateaus and the green kernel") {
  const auto heat = DecreasingRadial::of(KernelSpec::heat(1.0));
  CHECK(distribution_function(heat, 1.01 * heat_kernel(1.0, 0.0)) == 0.0);
  CHECK_THROWS_AS(distribution_function(heat, 0.0), DomainError);

  const RadialProfile plateau({0.0, 0.999, 1.0}, {1.0, 1.0, 0.0}, Interpolation::linear, Monotone::nonincreasing);
  const auto p = DecreasingRadial::from_profile(plateau, "plateau");
  CHECK(distribution_function(p, 0.5) == doctest::Approx(ball_volume(0.9995)).epsilon(1e-10));
  CHECK(distribution_function(p, 0.999) == doctest::Approx(ball_volume(0.999001)).epsilon(1e-9));

  const auto green = DecreasingRadial::of(KernelSpec::green());
  CHECK(distribution_function(green, green_kernel(1.0)) == doctest::Approx(6.8758).epsilon(1e-4));
  CHECK(distribution_function(green, green_kernel(1.0)) == doctest::Approx(ball_volume(1.0)).epsilon(1e-10));
  CHECK(level_radius(green, green_kernel(7.5)) == doctest::Approx(7.5).epsilon(1e-11));
}

TEST_CASE("distribution function memoizes along the bisection path") {
  const auto green = DecreasingRadial::of(KernelSpec::green());
  const double s = green_kernel(2.0);
  const double first = distribution_function(green, s);
  const std::size_t evaluations = green.memo_size();
  CHECK(evaluations > 10);
  CHECK(distribution_function(green, s) == first);
  CHECK(green.memo_size() == evaluations);
}

TEST_CASE("monotonicity violations are rejected") {
  const RadialProfile bumpy({0.0, 0.5, 1.0}, {1.0, 0.2, 0.6});
  CHECK_THROWS_AS(DecreasingRadial::from_profile(bumpy, "bumpy"), NotMonotone);
  const DecreasingRadial unflagged(
      [](double r) { return r < 0.4 ? 2.0 : (r < 0.6 ? 3.0 : 0.1); }, "unflagged", 10.0, Monotone::unknown);
  CHECK_THROWS_AS(distribution_function(unflagged, 1.0), NotMonotone);
  CHECK_THROWS_AS(RearrangedProfile::steps({1.0, 2.0}, {1.0, 2.0}, "up"), NotMonotone);
}

TEST_CASE("rearrangement of a radial decreasing kernel is its composition with the inverse volume") {
  const auto heat = DecreasingRadial::of(KernelSpec::heat(0.5));
  const auto grid = logspace(1e-3, 1e4, 40);
  const auto star = rearrangement(heat, grid);
  REQUIRE(star.values().size() == grid.size());
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(star.values()[i] <= star.values()[i - 1]);
  for (double r : {0.0, 0.1, 1.0, 3.0}) CHECK(star(ball_volume(r)) == doctest::Approx(heat_kernel(0.5, r)).epsilon(1e-12));
}

TEST_CASE("equimeasurability on sampled levels") {
  const auto green = DecreasingRadial::of(KernelSpec::green());
  const auto star = rearrangement(green);
  for (double r : {0.05, 0.4, 1.3, 4.0, 9.0}) {
    const double s = green_kernel(r);
    CHECK(star.distribution(s) == doctest::Approx(distribution_function(green, s)).epsilon(1e-6));
  }
  const auto steps = RearrangedProfile::steps({1.0, 2.5, 4.0}, {3.0, 2.0, 0.5}, "steps");
  CHECK(steps.distribution(2.5) == 1.0);
  CHECK(steps.distribution(1.0) == 2.5);
  CHECK(steps.distribution(0.1) == 4.0);
  CHECK(steps.distribution(3.0) == 0.0);
}

TEST_CASE("property: rearrangement preserves pointwise order") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> amp(0.1, 3.0), rate(0.2, 2.0);
  const auto grid = logspace(1e-2, 1e3, 30);
  for (int trial = 0; trial < 12; ++trial) {
    const double c1 = amp(rng), a = rate(rng), c2 = amp(rng), b = rate(rng);
    const DecreasingRadial f([=](double r) { return c1 * std::exp(-a * r * r); }, "f");
    const DecreasingRadial g([=](double r) { return c1 * std::exp(-a * r * r) + c2 * std::exp(-b * r); }, "g");
    const auto fs = rearrangement(f, grid), gs = rearrangement(g, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(fs.values()[i] <= gs.values()[i]);
  }
}

TEST_CASE("step profiles integrate exactly") {
  const auto s = RearrangedProfile::steps({1.0, 2.5, 4.0}, {3.0, 2.0, 0.5}, "steps");
  CHECK(s.integral(0.0, 10.0) == doctest::Approx(3.0 + 3.0 + 0.75));
  CHECK(s.integral(0.5, 3.0) == doctest::Approx(1.5 + 3.0 + 0.25));
  CHECK(s(0.0) == 3.0);
  CHECK(s(1.0) == 2.0);
  CHECK(s(4.0) == 0.0);
}

TEST_CASE("O'Neil majorant: indicator pair") {
  const auto ind = RearrangedProfile::steps({1.0}, {1.0}, "indicator");
  CHECK(oneil_rhs(ind, ind, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oneil_rhs(ind, ind, 0.5) == doctest::Approx(0.5 + 0.5).epsilon(1e-15));
  CHECK(oneil_rhs(ind, ind, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(oneil_rhs(ind, ind, 0.0), DomainError);
}

TEST_CASE("O'Neil inequality: exhaustive oracle on the cyclic group of order six") {
  const auto r = oneil_discrete_oracle();
  REQUIRE(r.classes == 84);
  CHECK(r.comparisons == 4096L * 4096L * 24L);
  CHECK(r.violations == 0);
}

TEST_CASE("O'Neil majorant for the critical half-power kernel dominates the rearranged green kernel") {
  const auto table = KernelTable::of(KernelSpec::half_power(kCriticalShift));
  const DecreasingRadial critical([f = table.function()](double r) { return r <= 0.0 ? INFINITY : f(r); }, "critical");
  const auto star = rearrangement(critical);
  const double rhs = oneil_rhs(star, star, 10.0);
  CHECK(std::isfinite(rhs));
  CHECK(rhs >= rearrangement(DecreasingRadial::of(KernelSpec::green()))(10.0));
}

TEST_CASE("O'Neil majorant reports divergent tails") {
  const DecreasingRadial slow([](double r) { return 1.0 / (1.0 + r); }, "slow");
  const auto star = rearrangement(slow);
  CHECK_THROWS_AS(oneil_rhs(star, star, 5.0), NumericalError);
}

TEST_CASE("rearranged kernel bounds") {
  const auto reports = verify_rearrangement_bounds();
  REQUIRE(reports.size() == 8);
  for (const auto& r : reports) {
    CAPTURE(r.name);
    CHECK(r.passed());
    if (r.fitted_constant) CHECK(std::isfinite(*r.fitted_constant));
  }
  CHECK(*reports[0].extra("constant") == doctest::Approx(std::pow(2.0, 0.25) / std::sqrt(kPi)).epsilon(1e-15));
  CHECK(reports[0].grid.size() == 100);

  RearrangeOptions empty;
  empty.small_grid.clear();
  empty.large_grid.clear();
  for (const auto& r : verify_rearrangement_bounds(empty)) CHECK(r.grid.empty());
  RearrangeOptions bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(verify_rearrangement_bounds(bad), DomainError);
}

TEST_CASE("logarithmic integral ratio tends to 2 only logarithmically") {
  double prev = INFINITY;
  for (double t : {1e4, 1e6, 1e8, 1e12, 1e24}) {
    const double ratio = log_integral_ratio(t);
    CHECK(ratio > 2.0);
    CHECK(ratio < prev);
    prev = ratio;
  }
  for (double t : {1e8, 1e12, 1e24}) {
    const double big_l = std::log(t), x = 2.0 / big_l;
    const int k = static_cast<int>(big_l / 2.0);
    const double smallest = 2.0 * std::tgamma(k + 1.0) * std::pow(x, k);
    CHECK(std::abs(log_integral_ratio(t) - log_integral_series(t, k)) <= smallest);
  }
  CHECK(log_integral_ratio(1e6) == doctest::Approx(2.4552).epsilon(1e-4));
  CHECK(std::abs(log_integral_ratio(1e24) / 2.0 - 1.0) < 0.05);
  CHECK_THROWS_AS(log_integral_ratio(2.0), DomainError);
}
