#pragma once

// Exact-formula geometry of the Poincare disk of constant curvature kappa < 0.
//
// The chart is the open unit disk with length element (2R)|dz|/(1-|z|^2),
// R = 1/sqrt(-kappa). Geodesics are stored as the image of the real diameter
// under a disk automorphism, so ideal endpoints never appear as chart points
// of modulus one.

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "jsg/numeric.hpp"

namespace jsg {

using Complex = std::complex<double>;

class Metric {
 public:
  /// Constant curvature kappa < 0; throws DomainError otherwise.
  static Metric hyperbolic(double kappa);
  /// Euclidean chart metric (conformal factor 1). Test hook for the flat limit.
  static Metric flat();

  double kappa() const noexcept { return kappa_; }
  bool is_flat() const noexcept { return flat_; }
  /// Curvature radius R = 1/sqrt(-kappa) (1 for the flat hook).
  double scale() const noexcept { return scale_; }

  /// Conformal factor lambda(z): the metric is lambda^2 |dz|^2.
  double conformal_factor(Complex z) const;
  /// Gauss curvature of the chart metric from finite differences of log(lambda).
  double chart_curvature(Complex z, double h = 1e-4) const;

 private:
  Metric(double kappa, bool flat);
  double kappa_;
  bool flat_;
  double scale_;
};

struct SurfacePoint {
  double x = 0.0;
  double y = 0.0;

  Complex z() const { return {x, y}; }
  static SurfacePoint from(Complex w) { return {w.real(), w.imag()}; }
  static SurfacePoint origin() { return {0.0, 0.0}; }
};

/// Throws DomainError unless the point lies in the open unit disk.
void require_in_disk(SurfacePoint p);

/// A point of the ideal boundary, stored by its chart angle in [0, 2*pi).
class IdealPoint {
 public:
  IdealPoint() = default;
  explicit IdealPoint(double theta) : theta_(wrap_angle(theta)) {}
  double theta() const noexcept { return theta_; }
  Complex z() const { return std::polar(1.0, theta_); }

 private:
  double theta_ = 0.0;
};

using Endpoint = std::variant<SurfacePoint, IdealPoint>;

/// Disk automorphism z -> (alpha z + beta) / (conj(beta) z + conj(alpha)).
class Mobius {
 public:
  Mobius() = default;
  static Mobius identity() { return {}; }
  static Mobius rotation(double theta);
  /// Hyperbolic translation sending 0 to a.
  static Mobius translation(Complex a);

  Complex operator()(Complex z) const;
  Mobius inverse() const;
  Mobius then(const Mobius& outer) const;  // outer o this

 private:
  Mobius(Complex alpha, Complex beta) : alpha_(alpha), beta_(beta) {}
  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
};

struct ChartCircle {
  bool is_line = false;
  Complex center;     // circle center, or a point on the line
  double radius = 0;  // unused for lines
  Complex direction;  // unit direction for lines
};

/// Unit-speed geodesic: gamma(s) = frame(tanh(s / 2R)).
class Geodesic {
 public:
  Geodesic(Mobius frame, double scale, double s_begin, double s_end);

  double begin() const noexcept { return s_begin_; }
  double end() const noexcept { return s_end_; }
  bool begins_at_infinity() const noexcept;
  bool ends_at_infinity() const noexcept;
  bool is_complete() const noexcept { return begins_at_infinity() && ends_at_infinity(); }
  double length() const noexcept { return s_end_ - s_begin_; }
  double scale() const noexcept { return scale_; }

  Complex chart_point(double s) const;
  SurfacePoint point(double s) const { return SurfacePoint::from(chart_point(s)); }
  /// Unit chart tangent in the direction of increasing s.
  Complex chart_tangent(double s) const;
  /// Arclength parameter of a chart point assumed to lie on the geodesic.
  double parameter_of(SurfacePoint p) const;
  /// Signed distance from p to the (complete extension of the) geodesic; positive to the left.
  double signed_distance(SurfacePoint p) const;

  IdealPoint ideal_begin() const;
  IdealPoint ideal_end() const;
  ChartCircle chart_circle() const;
  const Mobius& frame() const noexcept { return frame_; }

 private:
  Mobius frame_;
  double scale_;
  double s_begin_;
  double s_end_;
};

/// Unique geodesic from a to b; throws DegenerateInput when a == b.
Geodesic geodesic_between(const Endpoint& a, const Endpoint& b, const Metric& metric);

double distance(SurfacePoint p, SurfacePoint q, const Metric& metric);

/// Busemann function of xi normalized to vanish at the chart origin.
double busemann(IdealPoint xi, SurfacePoint p, const Metric& metric);

/// Oriented difference D(a, b, c): d(c,b) - d(a,b) for interior b, and the
/// Busemann function at b renormalized to vanish at a for ideal b.
double oriented_D(SurfacePoint a, const Endpoint& b, SurfacePoint c, const Metric& metric);

/// Horocycle at xi. `level` is the depth: the signed distance from the chart
/// origin to the horocycle along the ray toward xi, so the horocycle is the
/// level set {busemann(xi, .) = -level} and larger levels give smaller horodisks.
struct Horocycle {
  IdealPoint xi;
  double level = 0.0;
};

/// Euclidean circle of the horocycle in the chart (internally tangent at xi).
ChartCircle horocycle_circle(const Horocycle& h, const Metric& metric);

/// Points of the horocycle; `param` is the chart angle around the circle center
/// measured from the tangency direction (0 and 2*pi both map to xi).
SurfacePoint horocycle_point(const Horocycle& h, double param, const Metric& metric);

/// Signed distance from p to the horocycle, positive outside the horodisk.
double distance_to_horocycle(SurfacePoint p, const Horocycle& h, const Metric& metric);

/// Signed distance between horocycles at distinct ideal points, measured along
/// the connecting geodesic; negative when the horodisks overlap.
double dist_horocycles(const Horocycle& h1, const Horocycle& h2, const Metric& metric);

/// Distance between concentric horocycles (same ideal point).
double concentric_gap(const Horocycle& h1, const Horocycle& h2);

/// Truncation gap between horocycles of levels (t1, t2) at ideal points with
/// angular separation delta: t1 + t2 + 2R log sin(delta/2).
double horocycle_gap(double t1, double t2, double delta, const Metric& metric);

/// Arclength along a horocycle between two of its points.
double horocycle_arclength(SurfacePoint p, SurfacePoint q, const Metric& metric);

/// Fermi coordinates phi(s,t) = exp_{gamma(t)}(s J gamma'(t)) along a complete geodesic.
class FermiChart {
 public:
  struct Coefficient {
    double G;
    double G_s;
    double G_ss;
  };
  using Profile = std::function<double(double s, double t)>;

  FermiChart(Geodesic gamma, Metric metric);
  /// Warped-product test metric ds^2 + G(s,t) dt^2 supplied by the caller.
  FermiChart(Geodesic gamma, Metric metric, Profile user_G);

  const Geodesic& geodesic() const noexcept { return gamma_; }
  const Metric& metric() const noexcept { return metric_; }
  bool has_user_profile() const noexcept { return static_cast<bool>(user_G_); }

  SurfacePoint point(double s, double t) const;
  /// Inverse of point(): Fermi coordinates (s, t) of a chart point.
  std::array<double, 2> coordinates(SurfacePoint p) const;

  double G(double s, double t) const;
  Coefficient coefficient(double s, double t) const;
  /// Gauss curvature from -1/4 (G_s/G)^2 - 1/2 (G_s/G)_s.
  double curvature(double s, double t) const;

 private:
  Geodesic gamma_;
  Metric metric_;
  Profile user_G_;
};

double fermi_G(const FermiChart& chart, double s, double t);

/// Angle at p0 of the unit tangent whose geodesic ray ends at xi, in [0, 2*pi).
double angle_of(SurfacePoint p0, IdealPoint xi);

/// Endpoint at infinity of the ray leaving p0 at chart angle `angle`.
IdealPoint ideal_point_at_angle(SurfacePoint p0, double angle);

}  // namespace jsg
