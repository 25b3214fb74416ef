#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace jsg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Canonical representative of an angle in [0, 2*pi).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Counter-clockwise angular span from `from` to `to`, in [0, 2*pi).
inline double ccw_span(double from, double to) { return wrap_angle(to - from); }

/// Centered first derivative with one Richardson extrapolation step.
inline double richardson_d1(const std::function<double(double)>& f, double x, double h = 1e-5) {
  auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// Centered second derivative with one Richardson extrapolation step.
///
/// The base step is larger than the first-derivative one: the roundoff of a
/// second difference grows like eps / h^2.
inline double richardson_d2(const std::function<double(double)>& f, double x, double h = 1e-4) {
  const double f0 = f(x);
  auto central = [&](double step) { return (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace jsg
