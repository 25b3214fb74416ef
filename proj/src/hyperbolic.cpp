#include "jsg/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "jsg/errors.hpp"

namespace jsg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double chart_radius_to_distance(double r, double R) { return 2.0 * R * std::atanh(r); }

}  // namespace

// ---------------------------------------------------------------- Metric

Metric::Metric(double kappa, bool flat)
    : kappa_(kappa), flat_(flat), scale_(flat ? 1.0 : 1.0 / std::sqrt(-kappa)) {}

Metric Metric::hyperbolic(double kappa) {
  if (!(kappa < 0.0) || !std::isfinite(kappa)) {
    throw DomainError("curvature must be a finite negative number");
  }
  return Metric(kappa, false);
}

Metric Metric::flat() { return Metric(0.0, true); }

double Metric::conformal_factor(Complex z) const {
  if (flat_) return 1.0;
  const double r2 = std::norm(z);
  if (!(r2 < 1.0)) throw DomainError("chart point outside the open unit disk");
  return 2.0 * scale_ / (1.0 - r2);
}

double Metric::chart_curvature(Complex z, double h) const {
  auto log_lambda = [&](Complex w) { return std::log(conformal_factor(w)); };
  const double l0 = log_lambda(z);
  const double lap = (log_lambda(z + Complex(h, 0)) + log_lambda(z - Complex(h, 0)) +
                      log_lambda(z + Complex(0, h)) + log_lambda(z - Complex(0, h)) - 4.0 * l0) /
                     (h * h);
  const double lambda = conformal_factor(z);
  return -lap / (lambda * lambda);
}

void require_in_disk(SurfacePoint p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.x * p.x + p.y * p.y < 1.0)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") is not in the open unit disk";
    throw DomainError(msg.str());
  }
}

// ---------------------------------------------------------------- Mobius

Mobius Mobius::rotation(double theta) { return Mobius(std::polar(1.0, 0.5 * theta), Complex(0.0, 0.0)); }

Mobius Mobius::translation(Complex a) { return Mobius(Complex(1.0, 0.0), a); }

Complex Mobius::operator()(Complex z) const {
  return (alpha_ * z + beta_) / (std::conj(beta_) * z + std::conj(alpha_));
}

Mobius Mobius::inverse() const { return Mobius(std::conj(alpha_), -beta_); }

Mobius Mobius::then(const Mobius& outer) const {
  return Mobius(outer.alpha_ * alpha_ + outer.beta_ * std::conj(beta_),
                outer.alpha_ * beta_ + outer.beta_ * std::conj(alpha_));
}

// ---------------------------------------------------------------- Geodesic

Geodesic::Geodesic(Mobius frame, double scale, double s_begin, double s_end)
    : frame_(frame), scale_(scale), s_begin_(s_begin), s_end_(s_end) {}

bool Geodesic::begins_at_infinity() const noexcept { return std::isinf(s_begin_); }
bool Geodesic::ends_at_infinity() const noexcept { return std::isinf(s_end_); }

Complex Geodesic::chart_point(double s) const {
  return frame_(Complex(std::tanh(s / (2.0 * scale_)), 0.0));
}

Complex Geodesic::chart_tangent(double s) const {
  // Derivative of the Mobius map at the real point x, times dx/ds > 0.
  const double x = std::tanh(s / (2.0 * scale_));
  const double h = 1e-7 * (1.0 - x * x) + 1e-300;
  const Complex d = frame_(Complex(x + h, 0.0)) - frame_(Complex(x - h, 0.0));
  return d / std::abs(d);
}

double Geodesic::parameter_of(SurfacePoint p) const {
  const Complex w = frame_.inverse()(p.z());
  return 2.0 * scale_ * std::atanh(w.real());
}

double Geodesic::signed_distance(SurfacePoint p) const {
  const Complex w = frame_.inverse()(p.z());
  return scale_ * std::asinh(2.0 * w.imag() / (1.0 - std::norm(w)));
}

IdealPoint Geodesic::ideal_begin() const { return IdealPoint(std::arg(frame_(Complex(-1.0, 0.0)))); }
IdealPoint Geodesic::ideal_end() const { return IdealPoint(std::arg(frame_(Complex(1.0, 0.0)))); }

ChartCircle Geodesic::chart_circle() const {
  const Complex a = frame_(Complex(-1.0, 0.0));
  const Complex b = frame_(Complex(0.0, 0.0));
  const Complex c = frame_(Complex(1.0, 0.0));
  ChartCircle out;
  const double cross = (b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real();
  if (std::abs(cross) < 1e-14) {
    out.is_line = true;
    out.center = b;
    out.direction = (c - a) / std::abs(c - a);
    return out;
  }
  // Circumcenter of a, b, c.
  const double d = 2.0 * cross;
  const double a2 = std::norm(a), b2 = std::norm(b), c2 = std::norm(c);
  const double ux = (a2 * (b.imag() - c.imag()) + b2 * (c.imag() - a.imag()) + c2 * (a.imag() - b.imag())) / d;
  const double uy = (a2 * (c.real() - b.real()) + b2 * (a.real() - c.real()) + c2 * (b.real() - a.real())) / d;
  out.center = Complex(ux, uy);
  out.radius = std::abs(a - out.center);
  return out;
}

Geodesic geodesic_between(const Endpoint& a, const Endpoint& b, const Metric& metric) {
  const double R = metric.scale();
  const auto* pa = std::get_if<SurfacePoint>(&a);
  const auto* pb = std::get_if<SurfacePoint>(&b);
  const auto* ia = std::get_if<IdealPoint>(&a);
  const auto* ib = std::get_if<IdealPoint>(&b);

  if (ia && ib) {
    const double span = ccw_span(ia->theta(), ib->theta());
    if (span == 0.0) throw DegenerateInput("geodesic endpoints coincide");
    const double mid = ia->theta() + 0.5 * span;
    const double shift = std::tan(0.25 * kPi - 0.25 * span);
    const Mobius frame = Mobius::rotation(0.5 * kPi).then(Mobius::translation(Complex(shift, 0.0))).then(
        Mobius::rotation(mid));
    return Geodesic(frame, R, -kInf, kInf);
  }

  // At least one interior point: base the frame at it.
  const bool reversed = (pa == nullptr);
  const SurfacePoint base = reversed ? *pb : *pa;
  require_in_disk(base);
  const Mobius to_base = Mobius::translation(base.z());
  Complex other;
  bool other_ideal = false;
  const Endpoint& far = reversed ? a : b;
  if (const auto* ip = std::get_if<IdealPoint>(&far)) {
    other = to_base.inverse()(ip->z());
    other_ideal = true;
  } else {
    const SurfacePoint q = std::get<SurfacePoint>(far);
    require_in_disk(q);
    other = to_base.inverse()(q.z());
    if (std::abs(other) < 1e-15) throw DegenerateInput("geodesic endpoints coincide");
  }
  const double dir = std::arg(other);
  const double len = other_ideal ? kInf : chart_radius_to_distance(std::abs(other), R);
  if (!reversed) {
    return Geodesic(Mobius::rotation(dir).then(to_base), R, 0.0, len);
  }
  return Geodesic(Mobius::rotation(dir + kPi).then(to_base), R, -len, 0.0);
}

double distance(SurfacePoint p, SurfacePoint q, const Metric& metric) {
  require_in_disk(p);
  require_in_disk(q);
  const Complex zp = p.z(), zq = q.z();
  const double ratio = std::abs(zp - zq) / std::abs(1.0 - std::conj(zq) * zp);
  return chart_radius_to_distance(std::min(ratio, 1.0), metric.scale());
}

double busemann(IdealPoint xi, SurfacePoint p, const Metric& metric) {
  require_in_disk(p);
  const Complex z = p.z();
  return metric.scale() * std::log(std::norm(xi.z() - z) / (1.0 - std::norm(z)));
}

double oriented_D(SurfacePoint a, const Endpoint& b, SurfacePoint c, const Metric& metric) {
  if (const auto* ib = std::get_if<IdealPoint>(&b)) {
    return busemann(*ib, c, metric) - busemann(*ib, a, metric);
  }
  const SurfacePoint pb = std::get<SurfacePoint>(b);
  return distance(c, pb, metric) - distance(a, pb, metric);
}

// ---------------------------------------------------------------- Horocycles

ChartCircle horocycle_circle(const Horocycle& h, const Metric& metric) {
  // Chart radius 1/(exp(level/R) + 1): the circle meets the diameter toward xi at tanh(level/2R).
  const double r = 1.0 / (std::exp(h.level / metric.scale()) + 1.0);
  ChartCircle c;
  c.center = (1.0 - r) * h.xi.z();
  c.radius = r;
  return c;
}

SurfacePoint horocycle_point(const Horocycle& h, double param, const Metric& metric) {
  const ChartCircle c = horocycle_circle(h, metric);
  return SurfacePoint::from(c.center + c.radius * h.xi.z() * std::polar(1.0, param));
}

double distance_to_horocycle(SurfacePoint p, const Horocycle& h, const Metric& metric) {
  return busemann(h.xi, p, metric) + h.level;
}

double horocycle_gap(double t1, double t2, double delta, const Metric& metric) {
  return t1 + t2 + 2.0 * metric.scale() * std::log(std::abs(std::sin(0.5 * delta)));
}

double dist_horocycles(const Horocycle& h1, const Horocycle& h2, const Metric& metric) {
  const double delta = ccw_span(h1.xi.theta(), h2.xi.theta());
  if (delta == 0.0) {
    throw DegenerateInput("horocycles share their ideal point; use concentric_gap");
  }
  return horocycle_gap(h1.level, h2.level, delta, metric);
}

double concentric_gap(const Horocycle& h1, const Horocycle& h2) { return std::abs(h1.level - h2.level); }

double horocycle_arclength(SurfacePoint p, SurfacePoint q, const Metric& metric) {
  const double R = metric.scale();
  return 2.0 * R * std::sinh(distance(p, q, metric) / (2.0 * R));
}

// ---------------------------------------------------------------- Fermi chart

FermiChart::FermiChart(Geodesic gamma, Metric metric) : gamma_(gamma), metric_(metric) {
  if (!gamma_.is_complete()) throw DegenerateInput("Fermi chart needs a complete geodesic");
}

FermiChart::FermiChart(Geodesic gamma, Metric metric, Profile user_G)
    : gamma_(gamma), metric_(metric), user_G_(std::move(user_G)) {
  if (!gamma_.is_complete()) throw DegenerateInput("Fermi chart needs a complete geodesic");
}

SurfacePoint FermiChart::point(double s, double t) const {
  const double R = metric_.scale();
  const Complex normal_point(0.0, std::tanh(s / (2.0 * R)));
  const Mobius along = Mobius::translation(Complex(std::tanh(t / (2.0 * R)), 0.0));
  return SurfacePoint::from(gamma_.frame()(along(normal_point)));
}

std::array<double, 2> FermiChart::coordinates(SurfacePoint p) const {
  const double R = metric_.scale();
  const Complex w = gamma_.frame().inverse()(p.z());
  const double w2 = std::norm(w);
  const double s = R * std::asinh(2.0 * w.imag() / (1.0 - w2));
  // Foot of the perpendicular dropped to the real diameter.
  const double c = 1.0 + w2;
  const double foot = 2.0 * w.real() / (c + std::sqrt(std::max(0.0, c * c - 4.0 * w.real() * w.real())));
  return {s, 2.0 * R * std::atanh(foot)};
}

FermiChart::Coefficient FermiChart::coefficient(double s, double t) const {
  if (user_G_) {
    auto g = [&](double x) { return user_G_(x, t); };
    return {g(s), richardson_d1(g, s), richardson_d2(g, s)};
  }
  const double R = metric_.scale();
  const double c = std::cosh(s / R);
  return {c * c, std::sinh(2.0 * s / R) / R, 2.0 * std::cosh(2.0 * s / R) / (R * R)};
}

double FermiChart::G(double s, double t) const {
  if (user_G_) return user_G_(s, t);
  const double c = std::cosh(s / metric_.scale());
  return c * c;
}

double FermiChart::curvature(double s, double t) const {
  const Coefficient k = coefficient(s, t);
  const double r = k.G_s / k.G;
  return 0.25 * r * r - 0.5 * k.G_ss / k.G;
}

double fermi_G(const FermiChart& chart, double s, double t) { return chart.G(s, t); }

// ---------------------------------------------------------------- Angles from a basepoint

double angle_of(SurfacePoint p0, IdealPoint xi) {
  require_in_disk(p0);
  const Complex w = Mobius::translation(p0.z()).inverse()(xi.z());
  return wrap_angle(std::arg(w));
}

IdealPoint ideal_point_at_angle(SurfacePoint p0, double angle) {
  require_in_disk(p0);
  return IdealPoint(std::arg(Mobius::translation(p0.z())(std::polar(1.0, angle))));
}

}  // namespace jsg
