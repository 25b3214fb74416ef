#pragma once

// The half-plane Scherk barrier and its ODE checks.
//
// With the warped metric ds^2 + G(s) dt^2 the graph of h(s) has mean curvature
// proportional to G_s h_s (1 + h_s^2) + 2 G h_ss.

#include <functional>
#include <optional>
#include <vector>

namespace jsg {

struct BarrierParams {
  double d = -1.0;  // comparison curvature
  std::optional<double> c;  // curvature bound of the surface, c < d

  /// Throws DomainError unless d < 0 and (if set) c < d.
  void validate() const;
};

/// A real function of one variable with optional analytic derivatives.
/// Missing derivatives fall back to Richardson-extrapolated central differences.
struct ProfileFunction {
  using Fn = std::function<double(double)>;
  Fn value;
  Fn d1;
  Fn d2;

  double operator()(double s) const { return value(s); }
  double first(double s) const;
  double second(double s) const;
};

/// h(s) = -(1/a) log tanh(a s / 2), a = sqrt(-d). +inf for s < 1e-8.
double barrier_height(double s, double d);
double barrier_slope(double s, double d);
double barrier_second(double s, double d);

/// h and G~(s) = cosh^2(sqrt(-d) s) as profiles (analytic derivatives).
ProfileFunction scherk_profile(double d);
ProfileFunction comparison_G(double d);
/// Fermi coefficient of the constant-curvature kappa surface (same form as comparison_G).
ProfileFunction fermi_profile(double kappa);

double scherk_ode_residual(const ProfileFunction& h, const ProfileFunction& G, double s);

/// -1/4 (G_s/G)^2 - 1/2 (G_s/G)_s. Throws DomainError when G(s) <= 0.
double profile_curvature(const ProfileFunction& G, double s);

enum class ComparisonVerdict { Holds, Fails, Inapplicable };
const char* to_string(ComparisonVerdict v);

/// f(x0) = g(x0) and 2f' + f^2 > 2g' + g^2 on the samples imply f > g after x0.
/// Returns Inapplicable when the hypothesis fails at x0 or at any sample.
ComparisonVerdict comparison_ode_check(const ProfileFunction& f, const ProfileFunction& g, double x0,
                                       const std::vector<double>& xs);

}  // namespace jsg
