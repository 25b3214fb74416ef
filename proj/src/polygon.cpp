#include "jsg/polygon.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "jsg/errors.hpp"

namespace jsg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Level-0 truncated length between ideal points at angles a, b.
double gap0(double a, double b, const Metric& metric) {
  return horocycle_gap(0.0, 0.0, ccw_span(a, b), metric);
}

double gap(double a, double ta, double b, double tb, const Metric& metric) {
  return horocycle_gap(ta, tb, ccw_span(a, b), metric);
}

SideKind kind_of(SideData d) {
  switch (d) {
    case SideData::PlusInfinity: return SideKind::BoundaryA;
    case SideData::MinusInfinity: return SideKind::BoundaryB;
    default: return SideKind::BoundaryFinite;
  }
}

SideKind kind_of(SideLabel l) { return l == SideLabel::A ? SideKind::BoundaryA : SideKind::BoundaryB; }

// Common representation of the parent polygon for the inscribed machinery.
struct Parent {
  std::vector<double> angles;
  std::vector<SideKind> kinds;  // kind of side [v_i, v_{i+1}]
};

Parent parent_of(const IdealPolygon& g) {
  Parent p{g.angles(), {}};
  for (int i = 0; i < g.size(); ++i) p.kinds.push_back(kind_of(g.label(i)));
  return p;
}

Parent parent_of(const BoundaryPolygon& g) {
  Parent p;
  for (const auto& v : g.vertices()) p.angles.push_back(v.theta());
  for (auto d : g.side_data()) p.kinds.push_back(kind_of(d));
  return p;
}

InscribedPolygon inscribed_on(const Parent& g, std::vector<int> vertices) {
  const int n = static_cast<int>(g.angles.size());
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  if (vertices.size() < 3) throw DegenerateInput("inscribed polygon needs at least 3 vertices");
  if (vertices.front() < 0 || vertices.back() >= n) throw DomainError("inscribed vertex index out of range");
  InscribedPolygon p;
  p.vertices = vertices;
  for (int v : vertices) p.mask |= (1u << v);
  const size_t m = vertices.size();
  for (size_t k = 0; k < m; ++k) {
    const int a = vertices[k];
    const int b = vertices[(k + 1) % m];
    p.sides.push_back(((a + 1) % n == b) ? g.kinds[static_cast<size_t>(a)] : SideKind::Interior);
  }
  return p;
}

std::vector<InscribedPolygon> enumerate_on(const Parent& g, bool include_full) {
  const int n = static_cast<int>(g.angles.size());
  if (n > 24) throw DomainError("inscribed enumeration refuses more than 24 vertices");
  std::vector<InscribedPolygon> out;
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) < 3) continue;
    if (mask == full && !include_full) continue;
    std::vector<int> vs;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) vs.push_back(i);
    out.push_back(inscribed_on(g, std::move(vs)));
  }
  return out;
}

// Perimeter and boundary sums with explicit per-vertex levels.
struct Sums {
  double perimeter = 0.0;
  double a = 0.0;
  double b = 0.0;
};

Sums sums_of(const InscribedPolygon& p, const Parent& g, const std::vector<double>& levels, const Metric& metric) {
  Sums s;
  const size_t m = p.vertices.size();
  for (size_t k = 0; k < m; ++k) {
    const auto i = static_cast<size_t>(p.vertices[k]);
    const auto j = static_cast<size_t>(p.vertices[(k + 1) % m]);
    const double len = gap(g.angles[i], levels[i], g.angles[j], levels[j], metric);
    s.perimeter += len;
    if (p.sides[k] == SideKind::BoundaryA) s.a += len;
    if (p.sides[k] == SideKind::BoundaryB) s.b += len;
  }
  return s;
}

// Shrinking every horocycle of P by delta at vertex v changes |P| - 2x(P) by
// 2 delta (1 - c_v) where c_v counts the incident boundary sides of kind x.
InequalityResult classify(const InscribedPolygon& p, const Parent& g, SideKind which, const Metric& metric) {
  const size_t m = p.vertices.size();
  bool divergent = false;
  for (size_t k = 0; k < m; ++k) {
    const int incident = (p.sides[k] == which) + (p.sides[(k + m - 1) % m] == which);
    if (incident == 0) divergent = true;
  }
  if (divergent) return {Verdict::DivergentSatisfied, kNaN};
  const std::vector<double> zero(g.angles.size(), 0.0);
  const Sums s = sums_of(p, g, zero, metric);
  const double x = (which == SideKind::BoundaryA) ? s.a : s.b;
  const double value = s.perimeter - 2.0 * x;
  return {value > kCondition2Margin ? Verdict::InvariantSatisfied : Verdict::Violated, value};
}

Condition2Result classify_both(const InscribedPolygon& p, const Parent& g, const Metric& metric) {
  return {classify(p, g, SideKind::BoundaryA, metric), classify(p, g, SideKind::BoundaryB, metric)};
}

void check_increasing(const std::vector<IdealPoint>& v) {
  // Counter-clockwise strictly increasing cyclically: the spans add up to one turn.
  double total = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const double span = ccw_span(v[i].theta(), v[(i + 1) % v.size()].theta());
    if (span <= 0.0) throw DomainError("polygon vertices must be distinct");
    total += span;
  }
  if (std::abs(total - kTwoPi) > 1e-9) throw DomainError("polygon vertex angles must increase counter-clockwise");
}

// Bisection on an arc parameter for an increasing function crossing zero.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double width_tol,
                         double value_tol, const char* what) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo < 0.0) || !(fhi > 0.0)) {
    std::ostringstream os;
    os << what << ": root not bracketed (f(lo)=" << flo << ", f(hi)=" << fhi << ")";
    throw BracketError(os.str());
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= width_tol && std::abs(fm) <= value_tol) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SideLabel opposite(SideLabel l) { return l == SideLabel::A ? SideLabel::B : SideLabel::A; }

const char* to_string(SideLabel l) { return l == SideLabel::A ? "A" : "B"; }

const char* to_string(SideKind k) {
  switch (k) {
    case SideKind::BoundaryA: return "boundary-A";
    case SideKind::BoundaryB: return "boundary-B";
    case SideKind::BoundaryFinite: return "boundary-finite";
    default: return "interior";
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::DivergentSatisfied: return "divergent-satisfied";
    case Verdict::InvariantSatisfied: return "invariant-satisfied";
    default: return "violated";
  }
}

IdealPolygon::IdealPolygon(std::vector<IdealPoint> vertices, SideLabel first)
    : vertices_(std::move(vertices)), first_(first) {
  if (vertices_.size() < 4 || vertices_.size() % 2 != 0)
    throw DomainError("ideal polygon needs an even number (>= 4) of vertices");
  check_increasing(vertices_);
}

IdealPolygon IdealPolygon::from_angles(const std::vector<double>& angles, SideLabel first) {
  std::vector<IdealPoint> v;
  v.reserve(angles.size());
  for (double a : angles) v.emplace_back(a);
  return IdealPolygon(std::move(v), first);
}

const IdealPoint& IdealPolygon::vertex(int i) const {
  const int n = size();
  return vertices_[static_cast<size_t>(((i % n) + n) % n)];
}

SideLabel IdealPolygon::label(int i) const {
  const int n = size();
  const int k = ((i % n) + n) % n;
  return (k % 2 == 0) ? first_ : opposite(first_);
}

Geodesic IdealPolygon::side(int i, const Metric& metric) const {
  return geodesic_between(vertex(i), vertex(i + 1), metric);
}

std::vector<double> IdealPolygon::angles() const {
  std::vector<double> a;
  a.reserve(vertices_.size());
  for (const auto& v : vertices_) a.push_back(v.theta());
  return a;
}

double min_pairwise_gap(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric) {
  if (static_cast<int>(f.levels.size()) != g.size()) throw DomainError("horocycle family size mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j)
      best = std::min(best, dist_horocycles(f.at(g, i), f.at(g, j), metric));
  return best;
}

void require_admissible(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric) {
  if (!(min_pairwise_gap(g, f, metric) > 0.0)) throw DomainError("horocycle family is not pairwise disjoint");
}

HorocycleFamily disjoint_family(const IdealPolygon& g, const Metric& metric, double min_gap) {
  // Uniform level t: the smallest pairwise gap is 2t + 2R log sin(delta_min / 2).
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i)
    for (int j = i + 1; j < g.size(); ++j)
      worst = std::min(worst, gap0(g.vertex(i).theta(), g.vertex(j).theta(), metric));
  return HorocycleFamily::uniform(g.size(), 0.5 * (min_gap - worst));
}

HorocycleFamily adaptive_family(const std::vector<IdealPoint>& vertices, const Metric& metric, double min_gap) {
  const size_t n = vertices.size();
  if (n < 2) throw DomainError("a family needs at least two vertices");
  HorocycleFamily f;
  for (size_t i = 0; i < n; ++i) {
    double nearest = kPi;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double span = ccw_span(vertices[i].theta(), vertices[j].theta());
      nearest = std::min({nearest, span, kTwoPi - span});
    }
    if (!(nearest > 0.0)) throw DegenerateInput("coincident vertices");
    f.levels.push_back(0.5 * min_gap - metric.scale() * std::log(std::sin(0.5 * nearest)));
  }
  return f;
}

HorocycleFamily adaptive_family(const IdealPolygon& g, const Metric& metric, double min_gap) {
  return adaptive_family(g.vertices(), metric, min_gap);
}

double truncated_side_length(const Geodesic& side, const Horocycle& h1, const Horocycle& h2, const Metric& metric) {
  if (!side.is_complete()) throw DomainError("truncated length needs a side with two ideal endpoints");
  const double e1 = side.ideal_begin().theta();
  const double e2 = side.ideal_end().theta();
  auto same = [](double a, double b) { return std::min(ccw_span(a, b), ccw_span(b, a)) <= 1e-9; };
  if (!same(e1, h1.xi.theta()) || !same(e2, h2.xi.theta()))
    throw DomainError("horocycles do not sit at the side's ideal endpoints");
  return dist_horocycles(h1, h2, metric);
}

double a_minus_b(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric) {
  require_admissible(g, f, metric);
  double a = 0.0;
  double b = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double len = dist_horocycles(f.at(g, i), f.at(g, (i + 1) % g.size()), metric);
    (g.label(i) == SideLabel::A ? a : b) += len;
  }
  return a - b;
}

std::vector<InscribedPolygon> enumerate_inscribed(const IdealPolygon& g) { return enumerate_on(parent_of(g), false); }

InscribedPolygon make_inscribed(const IdealPolygon& g, std::vector<int> vertices) {
  return inscribed_on(parent_of(g), std::move(vertices));
}

Condition2Result condition2_check(const InscribedPolygon& p, const IdealPolygon& g, const Metric& metric) {
  if (static_cast<int>(p.vertices.size()) == g.size())
    throw DegenerateInput("condition 2 applies to inscribed polygons other than the polygon itself");
  return classify_both(p, parent_of(g), metric);
}

std::pair<double, double> condition2_margins(const InscribedPolygon& p, const IdealPolygon& g,
                                             const HorocycleFamily& f, const Metric& metric) {
  if (static_cast<int>(f.levels.size()) != g.size()) throw DomainError("horocycle family size mismatch");
  const Sums s = sums_of(p, parent_of(g), f.levels, metric);
  return {s.perimeter - 2.0 * s.a, s.perimeter - 2.0 * s.b};
}

const InscribedResult* FeasibilityReport::first_violation() const {
  for (const auto& r : condition2_results)
    if (!r.result.satisfied()) return &r;
  return nullptr;
}

FeasibilityReport js_feasible(const IdealPolygon& g, const Metric& metric) {
  FeasibilityReport rep;
  const Parent parent = parent_of(g);
  double a = 0.0;
  double b = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double len = gap0(parent.angles[static_cast<size_t>(i)],
                            parent.angles[static_cast<size_t>((i + 1) % g.size())], metric);
    (g.label(i) == SideLabel::A ? a : b) += len;
  }
  rep.condition1_value = a - b;
  rep.condition1_ok = std::abs(rep.condition1_value) <= kCondition1Tolerance;
  rep.condition2_ok = true;
  for (auto& p : enumerate_on(parent, false)) {
    Condition2Result r = classify_both(p, parent, metric);
    rep.condition2_ok = rep.condition2_ok && r.satisfied();
    rep.condition2_results.push_back({std::move(p), r});
  }
  rep.feasible = rep.condition1_ok && rep.condition2_ok;
  return rep;
}

BoundaryPolygon::BoundaryPolygon(std::vector<IdealPoint> vertices, std::vector<SideData> data)
    : vertices_(std::move(vertices)), data_(std::move(data)) {
  if (vertices_.size() < 3) throw DomainError("boundary polygon needs at least 3 vertices");
  if (data_.size() != vertices_.size()) throw DomainError("one data kind per side required");
  check_increasing(vertices_);
  if (std::none_of(data_.begin(), data_.end(), [](SideData d) { return d == SideData::Finite; }))
    throw DomainError("mixed boundary problem needs at least one finite side");
  for (size_t i = 0; i < data_.size(); ++i) {
    const SideData a = data_[i];
    const SideData b = data_[(i + 1) % data_.size()];
    if (a != SideData::Finite && a == b) throw DomainError("adjacent sides carry the same infinite data");
  }
}

BoundaryPolygon BoundaryPolygon::from_ideal(const IdealPolygon& g) {
  std::vector<SideData> d;
  for (int i = 0; i < g.size(); ++i)
    d.push_back(g.label(i) == SideLabel::A ? SideData::PlusInfinity : SideData::MinusInfinity);
  // Bypass the finite-side requirement: this form is only used for bookkeeping.
  BoundaryPolygon out({IdealPoint(0.0), IdealPoint(2.0), IdealPoint(4.0)},
                      {SideData::Finite, SideData::Finite, SideData::Finite});
  out.vertices_ = g.vertices();
  out.data_ = std::move(d);
  return out;
}

const IdealPoint& BoundaryPolygon::vertex(int i) const {
  const int n = size();
  return vertices_[static_cast<size_t>(((i % n) + n) % n)];
}

SideData BoundaryPolygon::data(int i) const {
  const int n = size();
  return data_[static_cast<size_t>(((i % n) + n) % n)];
}

Geodesic BoundaryPolygon::side(int i, const Metric& metric) const {
  return geodesic_between(vertex(i), vertex(i + 1), metric);
}

std::vector<InscribedPolygon> enumerate_inscribed(const BoundaryPolygon& g) { return enumerate_on(parent_of(g), true); }

Condition2Result condition2_check(const InscribedPolygon& p, const BoundaryPolygon& g, const Metric& metric) {
  return classify_both(p, parent_of(g), metric);
}

FeasibilityReport mixed_feasible(const BoundaryPolygon& g, const Metric& metric) {
  FeasibilityReport rep;
  const Parent parent = parent_of(g);
  rep.condition1_value = 0.0;
  rep.condition1_ok = true;
  rep.condition2_ok = true;
  for (auto& p : enumerate_on(parent, true)) {
    Condition2Result r = classify_both(p, parent, metric);
    rep.condition2_ok = rep.condition2_ok && r.satisfied();
    rep.condition2_results.push_back({std::move(p), r});
  }
  rep.feasible = rep.condition2_ok;
  return rep;
}

bool in_open_arc(IdealPoint x, IdealPoint y, IdealPoint z) {
  const double span = ccw_span(x.theta(), y.theta());
  const double pos = ccw_span(x.theta(), z.theta());
  return pos > 0.0 && pos < span;
}

double L_function(IdealPoint x, IdealPoint y, IdealPoint z, const Horocycle& hx, const Horocycle& hy,
                  const Metric& metric, std::optional<double> z_level) {
  if (!in_open_arc(x, y, z)) throw DomainError("L: z must lie strictly inside the arc (x, y)");
  double tz = 0.0;
  if (z_level) {
    tz = *z_level;
  } else {
    // Any horocycle at z disjoint from H_x and H_y; the value does not depend on it.
    tz = 1.0 + std::max({0.0, -dist_horocycles(hx, {z, 0.0}, metric), -dist_horocycles(hy, {z, 0.0}, metric)});
  }
  const Horocycle hz{z, tz};
  return dist_horocycles(hy, hz, metric) - dist_horocycles(hz, hx, metric);
}

std::pair<Horocycle, Horocycle> equidistant_horocycles(IdealPoint x, IdealPoint y, IdealPoint z,
                                                       const Metric& metric) {
  const double R = metric.scale();
  auto lsin = [&](IdealPoint a, IdealPoint b) {
    return 2.0 * R * std::log(std::sin(0.5 * ccw_span(a.theta(), b.theta())));
  };
  if (x.theta() == y.theta() || x.theta() == z.theta() || y.theta() == z.theta())
    throw DegenerateInput("equidistant horocycles need three distinct ideal points");
  // d(H_x, H_z) = d(H_y, H_z) = c with H_z at level 0; c large enough for a unit gap H_x to H_y.
  const double c = std::max(1.0, 0.5 * (1.0 - lsin(x, y) + lsin(x, z) + lsin(y, z)));
  return {Horocycle{x, c - lsin(x, z)}, Horocycle{y, c - lsin(y, z)}};
}

IdealPoint fourth_vertex(IdealPoint x, IdealPoint y, IdealPoint z, const Metric& metric, double tolerance) {
  const auto [hx, hy] = equidistant_horocycles(x, y, z, metric);
  // Search the arc from p to q (counter-clockwise) that avoids z.
  const bool z_between = in_open_arc(x, y, z);
  const Horocycle hp = z_between ? hy : hx;
  const Horocycle hq = z_between ? hx : hy;
  const double start = hp.xi.theta();
  const double span = ccw_span(start, hq.xi.theta());
  const double R = metric.scale();
  // d(H_w, H_p) - d(H_w, H_q) at level 0 for H_w; increasing in phi.
  auto g = [&](double phi) {
    return hp.level + 2.0 * R * std::log(std::sin(0.5 * phi)) - hq.level -
           2.0 * R * std::log(std::sin(0.5 * (span - phi)));
  };
  const double edge = span * 1e-14;
  const double phi = bisect_increasing(g, edge, span - edge, tolerance, std::numeric_limits<double>::infinity(),
                                       "fourth_vertex");
  return IdealPoint(start + phi);
}

double generalized_length(const TriangleVertex& a, const TriangleVertex& b, const Metric& metric) {
  const auto* pa = std::get_if<SurfacePoint>(&a.point);
  const auto* pb = std::get_if<SurfacePoint>(&b.point);
  if (pa && pb) return distance(*pa, *pb, metric);
  if (pa) return busemann(std::get<IdealPoint>(b.point), *pa, metric) + b.level;
  if (pb) return busemann(std::get<IdealPoint>(a.point), *pb, metric) + a.level;
  const IdealPoint xa = std::get<IdealPoint>(a.point);
  const IdealPoint xb = std::get<IdealPoint>(b.point);
  if (xa.theta() == xb.theta()) throw DegenerateInput("triangle vertices coincide");
  return horocycle_gap(a.level, b.level, ccw_span(xa.theta(), xb.theta()), metric);
}

TriangleMarginResult triangle_margin(const TriangleVertex& x1, const TriangleVertex& x2, const TriangleVertex& x3,
                                     const Metric& metric) {
  TriangleMarginResult r;
  r.margin = generalized_length(x1, x3, metric) + generalized_length(x3, x2, metric) -
             generalized_length(x1, x2, metric);
  const bool all_ideal = std::holds_alternative<IdealPoint>(x1.point) &&
                         std::holds_alternative<IdealPoint>(x2.point) &&
                         std::holds_alternative<IdealPoint>(x3.point);
  if (!all_ideal) return r;

  std::array<TriangleVertex, 3> v{x1, x2, x3};
  // Margin with v[k] as the middle vertex.
  auto margin_at = [&](int k) {
    const auto& m = v[static_cast<size_t>(k)];
    const auto& p = v[static_cast<size_t>((k + 1) % 3)];
    const auto& q = v[static_cast<size_t>((k + 2) % 3)];
    return generalized_length(p, m, metric) + generalized_length(m, q, metric) - generalized_length(p, q, metric);
  };
  // Shrinking the middle horocycle by delta raises its margin by 2 delta and
  // leaves the other two unchanged, so the sequence x3, x2, x1 terminates.
  for (int k : {2, 1, 0}) {
    const double m = margin_at(k);
    if (m <= kCondition2Margin) v[static_cast<size_t>(k)].level += 0.5 * (1.0 - m);
  }
  r.strict_levels = std::array<double, 3>{v[0].level, v[1].level, v[2].level};
  for (int k = 0; k < 3; ++k) r.strict_margins[static_cast<size_t>(k)] = margin_at(k);
  return r;
}

double quadrilateral_balance(IdealPoint a0, IdealPoint b1, IdealPoint b2, IdealPoint a1, const Metric& metric) {
  auto len = [&](IdealPoint p, IdealPoint q) {
    const double d = std::min(ccw_span(p.theta(), q.theta()), ccw_span(q.theta(), p.theta()));
    return horocycle_gap(0.0, 0.0, d, metric);
  };
  return len(a0, a1) - len(a1, b2) + len(b2, b1) - len(b1, a0);
}

ExtendResult extend_and_perturb(const IdealPolygon& d, int side_index, double t, const Metric& metric,
                                SurfacePoint p0, double tolerance) {
  if (t < 0.0 || !std::isfinite(t)) throw DomainError("extend_and_perturb needs t >= 0");
  require_in_disk(p0);
  const int n = d.size();
  const int i = ((side_index % n) + n) % n;
  const IdealPoint a0 = d.vertex(i);
  const IdealPoint a1 = d.vertex(i + 1);
  const IdealPoint a2 = d.vertex(i + 2);

  auto middle = [&](IdealPoint p, IdealPoint q) {
    const double ap = angle_of(p0, p);
    return ideal_point_at_angle(p0, ap + 0.5 * ccw_span(ap, angle_of(p0, q)));
  };
  const IdealPoint z1 = middle(a0, a1);
  const IdealPoint z2 = middle(a1, a2);
  const IdealPoint b1 = fourth_vertex(a0, z1, a1, metric);
  const IdealPoint b4 = fourth_vertex(z2, a2, a1, metric);

  const double value_tol = 1e-2 * tolerance;
  // b2 in (b1, a1): the first balance increases from -inf to +inf.
  const double s1 = ccw_span(b1.theta(), a1.theta());
  auto f1 = [&](double phi) { return quadrilateral_balance(a0, b1, IdealPoint(b1.theta() + phi), a1, metric) - t; };
  const double e1 = s1 * 1e-14;
  const IdealPoint b2(b1.theta() + bisect_increasing(f1, e1, s1 - e1, 0.0, value_tol, "extend_and_perturb"));
  // b3 in (a1, b4): the second balance decreases, so bisect its negative.
  const double s2 = ccw_span(a1.theta(), b4.theta());
  auto f2 = [&](double phi) { return t - quadrilateral_balance(a2, b4, IdealPoint(a1.theta() + phi), a1, metric); };
  const double e2 = s2 * 1e-14;
  const IdealPoint b3(a1.theta() + bisect_increasing(f2, e2, s2 - e2, 0.0, value_tol, "extend_and_perturb"));

  ExtendResult out{d, b1, b2, b3, b4, z1, z2, 0.0, 0.0};
  out.residual_first = std::abs(quadrilateral_balance(a0, b1, b2, a1, metric) - t);
  out.residual_second = std::abs(quadrilateral_balance(a2, b4, b3, a1, metric) - t);
  if (out.residual_first > tolerance || out.residual_second > tolerance)
    throw BracketError("extend_and_perturb: balance residual above tolerance");

  std::vector<IdealPoint> verts;
  for (int k = 0; k < n; ++k) {
    verts.push_back(d.vertex(k));
    if (k == i) {
      verts.push_back(b1);
      verts.push_back(b2);
    }
    if (k == (i + 1) % n) {
      verts.push_back(b3);
      verts.push_back(b4);
    }
  }
  out.polygon = IdealPolygon(std::move(verts), d.first_label());
  return out;
}

int horocycle_intersection_count(const Horocycle& h1, const Horocycle& h2, const Metric& metric) {
  if (h1.xi.theta() == h2.xi.theta()) {
    if (h1.level == h2.level) throw DegenerateInput("identical horocycles");
    return 0;
  }
  const ChartCircle c1 = horocycle_circle(h1, metric);
  const ChartCircle c2 = horocycle_circle(h2, metric);
  const double dist = std::abs(c1.center - c2.center);
  const double eps = 1e-12;
  const double outer = c1.radius + c2.radius;
  const double inner = std::abs(c1.radius - c2.radius);
  if (dist > outer + eps || dist < inner - eps) return 0;
  if (std::abs(dist - outer) <= eps || std::abs(dist - inner) <= eps) return 1;
  return 2;
}

}  // namespace jsg
