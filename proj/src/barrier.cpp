#include "jsg/barrier.hpp"

#include <cmath>
#include <limits>

#include "jsg/errors.hpp"
#include "jsg/numeric.hpp"

namespace jsg {

namespace {

double root_of(double d) {
  if (!(d < 0.0)) throw DomainError("barrier needs d < 0");
  return std::sqrt(-d);
}

void require_positive(double s) {
  if (!(s > 0.0)) throw DomainError("barrier is defined for s > 0");
}

}  // namespace

void BarrierParams::validate() const {
  if (!(d < 0.0)) throw DomainError("barrier parameter d must be negative");
  if (c && !(*c < d)) throw DomainError("curvature bound c must satisfy c < d");
}

double ProfileFunction::first(double s) const {
  if (d1) return d1(s);
  return richardson_d1(value, s);
}

double ProfileFunction::second(double s) const {
  if (d2) return d2(s);
  return richardson_d2(value, s);
}

double barrier_height(double s, double d) {
  const double a = root_of(d);
  require_positive(s);
  if (s < 1e-8) return std::numeric_limits<double>::infinity();
  return -std::log(std::tanh(0.5 * a * s)) / a;
}

double barrier_slope(double s, double d) {
  const double a = root_of(d);
  require_positive(s);
  return -1.0 / std::sinh(a * s);
}

double barrier_second(double s, double d) {
  const double a = root_of(d);
  require_positive(s);
  const double sh = std::sinh(a * s);
  return a * std::cosh(a * s) / (sh * sh);
}

ProfileFunction scherk_profile(double d) {
  root_of(d);
  return {[d](double s) { return barrier_height(s, d); }, [d](double s) { return barrier_slope(s, d); },
          [d](double s) { return barrier_second(s, d); }};
}

ProfileFunction comparison_G(double d) {
  const double a = root_of(d);
  return {[a](double s) {
            const double c = std::cosh(a * s);
            return c * c;
          },
          [a](double s) { return a * std::sinh(2.0 * a * s); },
          [a](double s) { return 2.0 * a * a * std::cosh(2.0 * a * s); }};
}

ProfileFunction fermi_profile(double kappa) { return comparison_G(kappa); }

double scherk_ode_residual(const ProfileFunction& h, const ProfileFunction& G, double s) {
  const double hs = h.first(s);
  return G.first(s) * hs * (1.0 + hs * hs) + 2.0 * G(s) * h.second(s);
}

double profile_curvature(const ProfileFunction& G, double s) {
  const double g = G(s);
  if (!(g > 0.0)) throw DomainError("profile curvature needs G > 0");
  const double r = G.first(s) / g;
  // (G_s/G)_s = G_ss/G - (G_s/G)^2
  return -0.25 * r * r - 0.5 * (G.second(s) / g - r * r);
}

const char* to_string(ComparisonVerdict v) {
  switch (v) {
    case ComparisonVerdict::Holds: return "true";
    case ComparisonVerdict::Fails: return "false";
    default: return "inapplicable";
  }
}

ComparisonVerdict comparison_ode_check(const ProfileFunction& f, const ProfileFunction& g, double x0,
                                       const std::vector<double>& xs) {
  const double f0 = f(x0);
  const double g0 = g(x0);
  if (std::abs(f0 - g0) > 1e-12 * (1.0 + std::abs(f0))) return ComparisonVerdict::Inapplicable;
  auto riccati = [](const ProfileFunction& p, double x) {
    const double v = p(x);
    return 2.0 * p.first(x) + v * v;
  };
  if (!(riccati(f, x0) > riccati(g, x0))) return ComparisonVerdict::Inapplicable;
  bool holds = true;
  for (double x : xs) {
    if (!(riccati(f, x) > riccati(g, x))) return ComparisonVerdict::Inapplicable;
    if (x > x0 && !(f(x) > g(x))) holds = false;
  }
  return holds ? ComparisonVerdict::Holds : ComparisonVerdict::Fails;
}

}  // namespace jsg
