#include <cmath>
#include <random>

#include "doctest.h"
#include "jsg/errors.hpp"
#include "jsg/hyperbolic.hpp"

using namespace jsg;

namespace {

// Length of the diameter segment [0, x] by composite Simpson on 2R/(1-r^2).
double diameter_length(double x, double R, int n = 2000) {
  auto f = [&](double r) { return 2.0 * R / (1.0 - r * r); };
  const double h = x / n;
  double s = f(0.0) + f(x);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

// Radial geodesic r(s) from dr/ds = (1 - r^2) / 2 (kappa = -1), classical RK4.
double radial_geodesic(double s, int steps = 4000) {
  auto f = [](double r) { return 0.5 * (1.0 - r * r); };
  double r = 0.0;
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(r), k2 = f(r + 0.5 * h * k1), k3 = f(r + 0.5 * h * k2), k4 = f(r + h * k3);
    r += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return r;
}

// Jacobi field J'' = -K J, J(0) = 1, J'(0) = 0 along a geodesic of the K = -1 plane.
double jacobi(double s, int steps = 4000) {
  double j = 1.0, dj = 0.0;
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    auto acc = [](double y) { return y; };
    const double k1y = dj, k1v = acc(j);
    const double k2y = dj + 0.5 * h * k1v, k2v = acc(j + 0.5 * h * k1y);
    const double k3y = dj + 0.5 * h * k2v, k3v = acc(j + 0.5 * h * k2y);
    const double k4y = dj + h * k3v, k4v = acc(j + h * k3y);
    j += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    dj += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return j;
}

SurfacePoint random_point(std::mt19937& rng, double rmax = 0.95) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rmax * std::sqrt(u(rng));
  const double a = kTwoPi * u(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace

TEST_CASE("metric curvature from the conformal factor") {
  for (double kappa : {-0.5, -1.0, -2.0}) {
    const Metric m = Metric::hyperbolic(kappa);
    for (Complex z : {Complex(0.0, 0.0), Complex(0.3, -0.2), Complex(-0.6, 0.5)})
      CHECK(m.chart_curvature(z) == doctest::Approx(kappa).epsilon(1e-5));
  }
  CHECK_THROWS_AS(Metric::hyperbolic(0.0), DomainError);
  CHECK_THROWS_AS(Metric::hyperbolic(1.0), DomainError);
  CHECK(Metric::flat().chart_curvature({0.2, 0.1}) == doctest::Approx(0.0));
}

TEST_CASE("distance") {
  const Metric m = Metric::hyperbolic(-1.0);
  CHECK(distance({0, 0}, {0, 0}, m) == 0.0);
  CHECK(distance({0, 0}, {0.5, 0}, m) == doctest::Approx(diameter_length(0.5, 1.0)).epsilon(1e-12));
  CHECK(distance({0, 0}, {0.5, 0}, m) == doctest::Approx(1.0986122886681098));

  const Metric m2 = Metric::hyperbolic(-4.0);
  CHECK(distance({0, 0}, {0.7, 0}, m2) == doctest::Approx(diameter_length(0.7, 0.5)).epsilon(1e-11));

  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_point(rng), q = random_point(rng), r = random_point(rng);
    CHECK(distance(p, q, m) == doctest::Approx(distance(q, p, m)).epsilon(1e-12));
    CHECK(distance(p, q, m) >= 0.0);
    CHECK(distance(p, r, m) <= distance(p, q, m) + distance(q, r, m) + 1e-9);
  }
  CHECK_THROWS_AS(distance({1.0, 0.0}, {0, 0}, m), DomainError);
  CHECK_THROWS_AS(distance({0, 0}, {0.8, 0.8}, m), DomainError);
}

TEST_CASE("geodesics") {
  const Metric m = Metric::hyperbolic(-1.0);
  SUBCASE("ideal endpoints on a diameter") {
    const Geodesic g = geodesic_between(IdealPoint(0.0), IdealPoint(kPi), m);
    CHECK(g.is_complete());
    for (double s : {-3.0, -0.5, 0.0, 1.0, 4.0}) CHECK(std::abs(g.chart_point(s).imag()) < 1e-14);
    CHECK(g.ideal_begin().theta() == doctest::Approx(0.0));
    CHECK(g.ideal_end().theta() == doctest::Approx(kPi));
  }
  SUBCASE("radial ray matches the geodesic equation") {
    const Geodesic g = geodesic_between(SurfacePoint{0, 0}, IdealPoint(0.0), m);
    for (double s : {0.5, 1.0, 3.0}) {
      CHECK(std::abs(g.chart_point(s)) == doctest::Approx(radial_geodesic(s)).epsilon(1e-10));
      CHECK(std::abs(g.chart_point(s)) == doctest::Approx(std::tanh(s / 2)).epsilon(1e-13));
    }
  }
  SUBCASE("interior points on a common diameter") {
    const SurfacePoint a{-0.3 * std::cos(1.0), -0.3 * std::sin(1.0)}, b{0.6 * std::cos(1.0), 0.6 * std::sin(1.0)};
    const Geodesic g = geodesic_between(a, b, m);
    CHECK(g.length() == doctest::Approx(distance(a, b, m)));
    for (double f : {0.0, 0.3, 0.7, 1.0}) {
      const Complex z = g.chart_point(g.begin() + f * g.length());
      CHECK(std::abs(z.imag() * std::cos(1.0) - z.real() * std::sin(1.0)) < 1e-13);
    }
    CHECK(std::abs(g.chart_point(g.end()) - b.z()) < 1e-12);
  }
  SUBCASE("unit speed") {
    const Geodesic g = geodesic_between(IdealPoint(0.4), IdealPoint(2.9), m);
    for (double s : {-2.0, 0.0, 1.5}) {
      const double d = distance(g.point(s), g.point(s + 0.25), m);
      CHECK(d == doctest::Approx(0.25).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(geodesic_between(IdealPoint(1.0), IdealPoint(1.0), m), DegenerateInput);
  CHECK_THROWS_AS(geodesic_between(SurfacePoint{0.1, 0.2}, SurfacePoint{0.1, 0.2}, m), DegenerateInput);
}

TEST_CASE("busemann functions") {
  const Metric m = Metric::hyperbolic(-1.0);
  std::mt19937 rng(11);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(busemann(IdealPoint(0.8 * i), {0, 0}, m)) < 1e-14);

  // d(p, gamma(t)) - t with 1 - |gamma(t)|^2 = sech^2(t/2) kept exact.
  auto ray_excess = [](Complex p, double t) {
    const double q = std::tanh(t / 2);
    const double sech2 = 1.0 / (std::cosh(t / 2) * std::cosh(t / 2));
    const double arg = 1.0 + 2.0 * std::norm(p - q) / ((1.0 - std::norm(p)) * sech2);
    return std::acosh(arg) - t;
  };
  const double b = busemann(IdealPoint(0.0), {0.5, 0}, m);
  CHECK(std::abs(ray_excess({0.5, 0}, 30.0) - b) < 1e-9);
  CHECK(std::abs(ray_excess({0.5, 0}, 40.0) - b) < 1e-9);
  CHECK(b == doctest::Approx(-1.0986122886681098));
  const Complex p(0.3, -0.45);
  CHECK(std::abs(ray_excess(p * std::polar(1.0, 0.0), 40.0) - busemann(IdealPoint(0.0), SurfacePoint::from(p), m)) <
        1e-9);

  SUBCASE("linear along the ray toward the ideal point") {
    const Geodesic g = geodesic_between(SurfacePoint{0, 0}, IdealPoint(2.0), m);
    for (double s : {0.5, 2.0, 7.0}) CHECK(busemann(IdealPoint(2.0), g.point(s), m) == doctest::Approx(-s));
  }
  SUBCASE("convex along geodesics") {
    for (int k = 0; k < 20; ++k) {
      const Geodesic g = geodesic_between(random_point(rng, 0.6), random_point(rng, 0.6), m);
      const IdealPoint xi(kTwoPi * k / 20.0);
      const double h = 0.05;
      for (double s = g.begin() + h; s < g.end() - h; s += 0.1) {
        const double d2 = busemann(xi, g.point(s + h), m) - 2 * busemann(xi, g.point(s), m) + busemann(xi, g.point(s - h), m);
        CHECK(d2 >= -1e-12);
      }
    }
  }
  SUBCASE("1-Lipschitz") {
    for (int i = 0; i < 200; ++i) {
      const auto p = random_point(rng), q = random_point(rng);
      const IdealPoint xi(kTwoPi * std::uniform_real_distribution<double>(0, 1)(rng));
      CHECK(std::abs(busemann(xi, p, m) - busemann(xi, q, m)) <= distance(p, q, m) + 1e-9);
    }
  }
}

TEST_CASE("oriented distance difference") {
  const Metric m = Metric::hyperbolic(-1.0);
  const SurfacePoint a{0.1, 0.2};
  CHECK(oriented_D(a, SurfacePoint{0.5, -0.3}, a, m) == 0.0);
  CHECK(oriented_D(a, IdealPoint(1.0), a, m) == 0.0);

  SUBCASE("sign marks the horoball through a") {
    const IdealPoint xi(0.7);
    const Horocycle through_a{xi, -busemann(xi, a, m)};
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
      const auto c = random_point(rng);
      const double d = oriented_D(a, xi, c, m);
      if (std::abs(d) < 1e-9) continue;
      CHECK((d < 0) == (distance_to_horocycle(c, through_a, m) < 0));
    }
  }
  SUBCASE("interior b marching to the ideal point") {
    const IdealPoint xi(2.5);
    const Geodesic ray = geodesic_between(a, xi, m);
    const SurfacePoint c{-0.4, 0.1};
    const double ideal = oriented_D(a, xi, c, m);
    double prev = 1e300;
    for (double s : {2.0, 4.0, 6.0, 8.0}) {
      const double gap = std::abs(oriented_D(a, ray.point(s), c, m) - ideal);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev <= 1e-6);
  }
}

TEST_CASE("horocycles") {
  const Metric m = Metric::hyperbolic(-1.0);
  SUBCASE("chart circles tangent at the ideal point, level sets of busemann") {
    for (double level : {-1.0, 0.0, 0.5, 2.0}) {
      const Horocycle h{IdealPoint(1.3), level};
      const ChartCircle c = horocycle_circle(h, m);
      CHECK(std::abs(c.center) + c.radius == doctest::Approx(1.0));
      CHECK(std::abs(std::arg(c.center) - 1.3) < 1e-12);
      for (double param : {0.3, 1.5, 3.1, 5.0}) {
        const SurfacePoint p = horocycle_point(h, param, m);
        CHECK(std::abs(std::abs(p.z() - c.center) - c.radius) < 1e-12);
        CHECK(busemann(h.xi, p, m) == doctest::Approx(-level).epsilon(1e-9));
      }
    }
    // deeper level, smaller horodisk
    CHECK(horocycle_circle({IdealPoint(0), 2.0}, m).radius < horocycle_circle({IdealPoint(0), 1.0}, m).radius);
  }
  SUBCASE("distance between horocycles") {
    CHECK(dist_horocycles({IdealPoint(0), 1.0}, {IdealPoint(kPi), 1.0}, m) == doctest::Approx(2.0));
    CHECK(std::abs(dist_horocycles({IdealPoint(0), 0.0}, {IdealPoint(kPi), 0.0}, m)) < 1e-12);
    const Horocycle h1{IdealPoint(0.3), 0.4}, h2{IdealPoint(2.0), 0.9};
    const double d = dist_horocycles(h1, h2, m);
    CHECK(dist_horocycles({h1.xi, h1.level + 0.25}, h2, m) == doctest::Approx(d + 0.25));
    CHECK(dist_horocycles({h1.xi, h1.level + 0.5}, {h2.xi, h2.level + 0.5}, m) == doctest::Approx(d + 1.0));
    CHECK(d == doctest::Approx(horocycle_gap(0.4, 0.9, 1.7, m)));
    // overlapping horodisks give a negative gap
    CHECK(dist_horocycles({IdealPoint(0), -1.0}, {IdealPoint(kPi), -1.0}, m) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(dist_horocycles(h1, {h1.xi, 2.0}, m), DegenerateInput);
    CHECK(concentric_gap(h1, {h1.xi, 2.0}) == doctest::Approx(1.6));
  }
  SUBCASE("gap agrees with a sampled distance along the connecting geodesic") {
    const Horocycle h1{IdealPoint(4.0), 0.7}, h2{IdealPoint(5.5), 1.1};
    const Geodesic g = geodesic_between(h1.xi, h2.xi, m);
    // first crossing: busemann(h1) = -t1 <=> distance_to_horocycle = 0
    double s1 = 0, s2 = 0;
    {
      double lo = -50, hi = 50;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (distance_to_horocycle(g.point(mid), h1, m) < 0 ? lo : hi) = mid;
      }
      s1 = lo;
      lo = -50, hi = 50;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (distance_to_horocycle(g.point(mid), h2, m) > 0 ? lo : hi) = mid;
      }
      s2 = lo;
    }
    CHECK(s2 - s1 == doctest::Approx(dist_horocycles(h1, h2, m)).epsilon(1e-9));
  }
  SUBCASE("arclength along a horocycle") {
    // level 0 horocycle at xi = 0: in the upper half-plane picture it is a
    // horizontal line at height 1, where arclength equals the Euclidean shift.
    const Horocycle h{IdealPoint(0.0), 0.0};
    const SurfacePoint p = horocycle_point(h, kPi, m);  // the origin
    CHECK(std::abs(p.z()) < 1e-12);
    const SurfacePoint q = horocycle_point(h, kPi + 0.8, m);
    // Cayley transform to the half-plane with xi at infinity
    auto to_hp = [](Complex z) { return Complex(0, 1) * (1.0 + z) / (1.0 - z); };
    const double expected = std::abs(to_hp(q.z()) - to_hp(p.z())) / to_hp(p.z()).imag();
    CHECK(horocycle_arclength(p, q, m) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("Fermi charts") {
  const Metric m = Metric::hyperbolic(-1.0);
  const FermiChart chart(geodesic_between(IdealPoint(0.5), IdealPoint(3.0), m), m);
  for (double t : {-3.0, 0.0, 1.0, 4.0}) {
    CHECK(fermi_G(chart, 0.0, t) == doctest::Approx(1.0));
    CHECK(std::abs(chart.coefficient(0.0, t).G_s) < 1e-12);
  }
  CHECK(fermi_G(chart, 1.0, 0.0) == doctest::Approx(jacobi(1.0) * jacobi(1.0)).epsilon(1e-10));
  CHECK(fermi_G(chart, 1.0, 0.0) == doctest::Approx(2.3810978455418157));
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) CHECK(std::abs(chart.curvature(-2.0 + 0.4 * i, -2.0 + 0.4 * j) + 1.0) <= 1e-6);

  SUBCASE("coordinates are consistent with distances") {
    const Geodesic& g = chart.geodesic();
    for (double s : {-1.5, -0.2, 0.7, 2.0})
      for (double t : {-1.0, 0.5, 2.0}) {
        const SurfacePoint p = chart.point(s, t);
        CHECK(distance(p, g.point(t), m) == doctest::Approx(std::abs(s)).epsilon(1e-9));
        CHECK(g.signed_distance(p) == doctest::Approx(s).epsilon(1e-9));
        const auto st = chart.coordinates(p);
        CHECK(st[0] == doctest::Approx(s).epsilon(1e-9));
        CHECK(st[1] == doctest::Approx(t).epsilon(1e-9));
      }
    // the equidistant s = 1 has length cosh(1) per unit t
    double len = 0;
    for (int k = 0; k < 2000; ++k) len += distance(chart.point(1.0, k / 2000.0), chart.point(1.0, (k + 1) / 2000.0), m);
    CHECK(len == doctest::Approx(std::cosh(1.0)).epsilon(1e-6));
  }
  SUBCASE("user warped-product profile") {
    const FermiChart warped(geodesic_between(IdealPoint(0.0), IdealPoint(kPi), m), m,
                            [](double s, double) { return std::exp(2.0 * s); });
    CHECK(warped.has_user_profile());
    CHECK(warped.curvature(0.3, 0.0) == doctest::Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("angles seen from a base point") {
  const Metric m = Metric::hyperbolic(-1.0);
  for (double th : {0.0, 1.0, 3.0, 5.5}) CHECK(angle_of({0, 0}, IdealPoint(th)) == doctest::Approx(th));
  const SurfacePoint p0{0.4, -0.3};
  double prev = -1;
  const double start = angle_of(p0, IdealPoint(0.0));
  for (int k = 0; k < 64; ++k) {
    const IdealPoint xi(kTwoPi * k / 64);
    const double a = wrap_angle(angle_of(p0, xi) - start);
    CHECK(a > prev);
    prev = a;
    // shooting oracle: tangent of the geodesic from p0 to xi
    const Complex tangent = geodesic_between(p0, xi, m).chart_tangent(0.0);
    CHECK(std::abs(wrap_angle(std::arg(tangent)) - angle_of(p0, xi)) < 1e-9);
    const double back = ideal_point_at_angle(p0, angle_of(p0, xi)).theta();
    CHECK(std::abs(std::remainder(back - xi.theta(), kTwoPi)) < 1e-9);
  }
}
