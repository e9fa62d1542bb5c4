#include "doctest.h"

#include "hypadams/errors.hpp"
#include "hypadams/geometry.hpp"

#include <cmath>
#include <random>

using namespace hypadams;

namespace {

Point4 random_point(std::mt19937_64& rng, double max_norm = 0.95) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<double, 4> c{};
  double s = 0.0;
  for (auto& x : c) {
    x = n(rng);
    s += x * x;
  }
  const double r = max_norm * std::pow(u(rng), 0.25);
  for (auto& x : c) x *= r / std::sqrt(s);
  return Point4(c);
}

double closed_form_distance(const Point4& x, const Point4& y) {
  double d2 = 0.0;
  for (int i = 0; i < 4; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  return std::acosh(1.0 + 2.0 * d2 / ((1.0 - x.norm2()) * (1.0 - y.norm2())));
}

} // namespace

TEST_CASE("geodesic radius of a point") {
  CHECK(rho_of_point(Point4{}) == 0.0);
  CHECK(rho_of_point(Point4::on_axis(std::tanh(0.5))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho_of_point(Point4::on_axis(0.9)) == doctest::Approx(std::log(19.0)).epsilon(1e-12));
  for (double rho : {1e-6, 0.1, 1.0, 5.0, 10.0})
    CHECK(rho_of_point(Point4::on_axis(radius_of_rho(rho))) == doctest::Approx(rho).epsilon(1e-12));
}

TEST_CASE("points on or outside the boundary are rejected") {
  CHECK_THROWS_AS(Point4::on_axis(1.0), DomainError);
  CHECK_THROWS_AS(Point4({0.8, 0.8, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(Point4({NAN, 0.0, 0.0, 0.0}), DomainError);
  CHECK_NOTHROW(Point4::on_axis(0.999999));
}

TEST_CASE("Mobius map basics") {
  std::mt19937_64 rng(11);
  const Point4 x = random_point(rng);
  const Point4 t0 = mobius(Point4{}, x);
  for (int i = 0; i < 4; ++i) CHECK(t0[i] == doctest::Approx(-x[i]).epsilon(1e-15));
  const Point4 ta = mobius(x, x);
  CHECK(ta.norm() < 1e-15);
}

TEST_CASE("Mobius map on a diameter matches the 1D hyperbolic translation") {
  // Along an axis the map is x -> tanh(atanh(a) - atanh(x)).
  const double a = 0.3, x = 0.5;
  const Point4 t = mobius(Point4::on_axis(a), Point4::on_axis(x));
  CHECK(t[0] == doctest::Approx(std::tanh(std::atanh(a) - std::atanh(x))).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(t[i]) < 1e-15);
}

TEST_CASE("geodesic distance: symmetry, zero, origin, closed form") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Point4 x = random_point(rng), y = random_point(rng);
    CHECK(geodesic_distance(x, y) == doctest::Approx(geodesic_distance(y, x)).epsilon(1e-10));
    CHECK(geodesic_distance(x, x) < 1e-12);
    CHECK(geodesic_distance(Point4{}, y) == doctest::Approx(rho_of_point(y)).epsilon(1e-12));
    CHECK(geodesic_distance(x, y) == doctest::Approx(closed_form_distance(x, y)).epsilon(1e-9));
  }
}

TEST_CASE("property: triangle inequality and Mobius invariance") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Point4 a = random_point(rng), x = random_point(rng, 0.9), y = random_point(rng, 0.9);
    const double dxy = geodesic_distance(x, y);
    CHECK(dxy <= geodesic_distance(x, a) + geodesic_distance(a, y) + 1e-12);
    const double moved = geodesic_distance(mobius(a, x), mobius(a, y));
    CHECK(std::abs(moved - dxy) <= 1e-9 * std::max(1.0, dxy));
  }
}

TEST_CASE("distance from polar data agrees with points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.0, 4.0), th(0.0, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double rho = r(rng), a = r(rng), theta = th(rng);
    const Point4 x = Point4::on_axis(radius_of_rho(rho));
    const Point4 y({radius_of_rho(a) * std::cos(theta), radius_of_rho(a) * std::sin(theta), 0.0, 0.0});
    CHECK(distance_from_polar(rho, a, theta) == doctest::Approx(geodesic_distance(x, y)).epsilon(1e-9));
  }
}

TEST_CASE("ball volume values and bounds") {
  CHECK(ball_volume(0.0) == 0.0);
  const auto q = quad::integrate([](double r) { return 2.0 * kPi * kPi * std::pow(std::sinh(r), 3); }, 0.0, 1.0);
  CHECK(ball_volume(1.0) == doctest::Approx(q.value).epsilon(1e-10));
  const double c = std::cosh(1.0);
  CHECK(ball_volume(1.0) == doctest::Approx(2.0 * kPi * kPi * (c * c * c / 3.0 - c + 2.0 / 3.0)).epsilon(1e-12));
  CHECK(ball_volume(1.0) == doctest::Approx(6.8758).epsilon(1e-4));
  CHECK(ball_volume(3.0) < kPi * kPi / 2.0 * std::pow(std::sinh(3.0), 4));
  for (double rho = 0.05; rho <= 10.0 + 1e-12; rho += 0.05) {
    CHECK(ball_volume(rho) <= kPi * kPi / 2.0 * std::pow(std::sinh(rho), 4));
    CHECK(ball_volume(rho) <= 2.0 * kPi * kPi / 3.0 * std::exp(3.0 * rho));
  }
}

TEST_CASE("ball volume derivative and inverse") {
  double prev = 0.0;
  for (double rho = 0.1; rho <= 12.0; rho += 0.1) {
    const double h = 1e-5 * std::max(1.0, rho);
    const double fd = (ball_volume(rho + h) - ball_volume(rho - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(ball_volume_derivative(rho)).epsilon(1e-6));
    CHECK(ball_volume(rho) > prev);
    prev = ball_volume(rho);
    CHECK(inverse_ball_volume(ball_volume(rho)) == doctest::Approx(rho).epsilon(1e-12));
  }
  CHECK(inverse_ball_volume(1e-20) == doctest::Approx(std::pow(2e-20 / (kPi * kPi), 0.25)).epsilon(1e-6));
}

TEST_CASE("radial profile construction rules") {
  CHECK_THROWS_AS(RadialProfile({0.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DomainError);
  CHECK_THROWS_AS(RadialProfile({-1.0, 1.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(RadialProfile({0.0, 1.0}, {1.0, 2.0}, Interpolation::cubic, Monotone::nonincreasing),
                  NotMonotone);
  const RadialProfile mono({0.0, 1.0, 2.0}, {3.0, 2.0, 0.0}, Interpolation::cubic, Monotone::nonincreasing);
  CHECK(mono.interpolation() == Interpolation::linear);
  CHECK(mono(0.5) == doctest::Approx(2.5));
  CHECK(mono(3.0) == 0.0);
  const auto cubic = RadialProfile::sample([](double r) { return r * r * r; }, linspace(0.0, 2.0, 41));
  CHECK(cubic(1.234) == doctest::Approx(std::pow(1.234, 3)).epsilon(1e-4));
}

TEST_CASE("radial integral oracles") {
  const RadialProfile indicator({0.0, 1.5}, {1.0, 1.0});
  CHECK(radial_integral(indicator).value == doctest::Approx(ball_volume(1.5)).epsilon(1e-12));

  // 2 pi^2 int e^{-4 rho} sinh^3 rho = (pi^2 / 4)(1 - 1 + 3/5 - 1/7)
  const double exact = kPi * kPi / 4.0 * (3.0 / 5.0 - 1.0 / 7.0);
  RadialIntegralOptions loose, tight;
  loose.quad.rel_tol = 1e-8;
  tight.quad.rel_tol = 1e-12;
  tight.quad.abs_tol = 1e-15;
  const auto f = [](double r) { return std::exp(-4.0 * r); };
  const auto a = radial_integral(f, loose);
  const auto b = radial_integral(f, tight);
  CHECK(a.value == doctest::Approx(exact).epsilon(1e-8));
  CHECK(b.value == doctest::Approx(exact).epsilon(1e-11));
  CHECK(std::abs(a.value - b.value) <= a.error + 1e-15);
}

TEST_CASE("radial integral flags a non-decaying tail") {
  RadialIntegralOptions opts;
  opts.max_radius = 30.0;
  CHECK_THROWS_AS(radial_integral([](double r) { return std::exp(-2.0 * r); }, opts), NonConvergent);
}

TEST_CASE("convolution: approximate identity") {
  const double width = 0.05;
  auto bump = [width](double r) { return std::exp(-(r * r) / (width * width)); };
  const double mass = radial_integral(bump).value;
  auto delta = [&](double r) { return bump(r) / mass; };
  auto f = [](double r) { return std::exp(-r * r / 2.0); };
  const std::vector<double> grid{0.0, 0.3, 1.0, 2.0};
  ConvolutionOptions opts;
  opts.f_support = 1.0; // delta is negligible beyond this radius
  const auto out = convolve_radial(delta, f, grid, opts);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(out[i] == doctest::Approx(f(grid[i])).epsilon(5e-3));
}

TEST_CASE("property: convolution is commutative and bilinear") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> width(0.6, 1.5), amp(0.5, 2.0), shift(0.0, 1.0);
  const std::vector<double> grid{0.0, 0.4, 1.1, 2.5};
  for (int trial = 0; trial < 4; ++trial) {
    const double w1 = width(rng), w2 = width(rng), s1 = shift(rng), a2 = amp(rng);
    auto f = [=](double r) { return std::exp(-(r - s1) * (r - s1) / (w1 * w1)); };
    auto g = [=](double r) { return a2 * std::exp(-r * r / (w2 * w2)) * (1.0 + 0.3 * r); };
    const auto fg = convolve_radial(f, g, grid);
    const auto gf = convolve_radial(g, f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(fg[i] == doctest::Approx(gf[i]).epsilon(1e-6));

    const double c1 = amp(rng), c2 = -amp(rng);
    auto h = [](double r) { return std::exp(-r * r); };
    auto comb = [&](double r) { return c1 * f(r) + c2 * h(r); };
    const auto lhs = convolve_radial(comb, g, grid);
    const auto hg = convolve_radial(h, g, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(lhs[i] == doctest::Approx(c1 * fg[i] + c2 * hg[i]).epsilon(1e-7));
  }
}

TEST_CASE("convolution: distance-variable angular rule agrees with Gauss-Legendre on smooth data") {
  auto f = [](double r) { return std::exp(-r * r); };
  auto g = [](double r) { return std::exp(-0.5 * r * r) * (1.0 + r); };
  const std::vector<double> grid{0.2, 1.0, 3.0};
  ConvolutionOptions adaptive;
  adaptive.angular = ConvolutionOptions::Angular::distance_adaptive;
  const auto a = convolve_radial(f, g, grid);
  const auto b = convolve_radial(f, g, grid, adaptive);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8));
}
