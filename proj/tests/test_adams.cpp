#include "doctest.h"

#include "hypadams/adams.hpp"
#include "hypadams/errors.hpp"

#include <cmath>

using namespace hypadams;

namespace {

const RearrangedProfile& potential() {
  static const RearrangedProfile p = potential_rearranged(1.0);
  return p;
}

double exponential_psi(double s) {
  const double tau = 4.0 * std::exp(-s);
  return std::sqrt(tau) * std::sqrt(2.0) * std::exp(-tau);
}

template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

} // namespace

TEST_CASE("admissible profiles have unit L2 norm in the measure variable") {
  const auto profiles = admissible_profiles();
  REQUIRE(profiles.size() == 5);
  for (const auto& v : profiles) {
    CAPTURE(v.source());
    const auto state = AdamsState::from_rearrangement(v, potential(), 4.0);
    const double n2 = state.psi_norm2();
    CHECK(n2 <= 1.0 + 1e-9);
    // The logarithmic profile loses its tail beyond the upper cut, about 1 / 700^2.
    CHECK(n2 == doctest::Approx(1.0).epsilon(v.source() == "log_spread" ? 3e-6 : 1e-9));
  }
}

TEST_CASE("psi from the rearrangement matches its closed form") {
  const auto state = AdamsState::from_rearrangement(admissible_profiles()[0], potential(), 4.0);
  for (double s : {-3.0, 0.0, 1.0, 5.0, 20.0})
    CHECK(state.psi(s) == doctest::Approx(exponential_psi(s)).epsilon(1e-10));
}

TEST_CASE("pairing agrees with direct Simpson integration of the kernel") {
  const auto state = AdamsState::from_rearrangement(admissible_profiles()[0], potential(), 4.0);
  for (double t : {0.0, 1.5, 6.0}) {
    // The kernel jumps at s = t: below it is phi, above it factors into two damped tails.
    const double head = simpson([&](double s) { return state.phi(s) * exponential_psi(s); }, -8.0, t, 4000);
    const double phi_tail = simpson([&](double s) { return std::exp(-(s - t) / 2) * state.phi(s); }, t, 200.0, 16000);
    const double psi_tail = simpson([&](double s) { return std::exp(-(s - t) / 2) * exponential_psi(s); }, t, 200.0, 16000);
    const double oracle = head + phi_tail * psi_tail;
    CHECK(state.kernel(t + 1.0, t) == doctest::Approx(phi_tail * std::exp(-0.5)).epsilon(1e-8));
    CHECK(state.pairing(t) == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("change of variables identities") {
  const auto state = AdamsState::from_rearrangement(admissible_profiles()[1], potential(), 4.0);
  for (double t : {0.0, 2.0, 10.0}) CHECK(state.identity(t).error() <= 1e-6);
}

TEST_CASE("adams machinery on the five admissible profiles") {
  for (const auto& v : admissible_profiles()) {
    const auto r = adams_machinery(v, potential());
    CAPTURE(r.label);
    for (const auto& f : r.failed_conditions) CAPTURE(f);
    CHECK(r.passed());
    CHECK(r.inf_functional >= -r.c_fitted);
    CHECK(std::abs(r.c_fitted - r.c_refined) <= 0.1 * std::abs(r.c_refined));
    CHECK(std::isfinite(r.exp_integral));
    CHECK(r.exp_tail <= 1e-6 * r.exp_integral);
    CHECK(r.slope > 0.0);
    CHECK(r.r2 >= 0.95);
    CHECK(r.identity_error <= 1e-6);
    CHECK(r.phi_upper_margin >= 0.0);
  }
}

TEST_CASE("level sets grow affinely with the level") {
  const auto r = adams_machinery(admissible_profiles()[0], potential());
  REQUIRE(r.lambdas.size() >= 10);
  for (std::size_t i = 1; i < r.level_measure.size(); ++i) CHECK(r.level_measure[i] >= r.level_measure[i - 1]);
}

TEST_CASE("psi above the unit constraint is rejected") {
  const AdamsState state([](double s) { return 1.1 * exponential_psi(s); }, potential(), 4.0);
  CHECK_THROWS_AS(adams_machinery(state, "scaled"), ConstraintViolated);
}
