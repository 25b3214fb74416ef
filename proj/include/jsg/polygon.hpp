#pragma once

// Ideal polygons, horocycle bookkeeping and the Jenkins-Serrin conditions.
//
// All truncated lengths reduce to the closed form
//   |xy| = t_x + t_y + 2R log sin(angle(x, y) / 2)
// for horocycles of depth t_x, t_y, which is what makes condition 2 a finite
// decision procedure.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jsg/hyperbolic.hpp"

namespace jsg {

/// A: +infinity data, B: -infinity data.
enum class SideLabel { A, B };

SideLabel opposite(SideLabel l);
const char* to_string(SideLabel l);

class IdealPolygon {
 public:
  /// Counter-clockwise vertices; labels alternate starting with `first` on side 0 = [v0, v1].
  /// Throws DomainError for odd or < 4 vertex counts and non-increasing angles.
  explicit IdealPolygon(std::vector<IdealPoint> vertices, SideLabel first = SideLabel::A);
  static IdealPolygon from_angles(const std::vector<double>& angles, SideLabel first = SideLabel::A);

  int size() const noexcept { return static_cast<int>(vertices_.size()); }
  const IdealPoint& vertex(int i) const;
  const std::vector<IdealPoint>& vertices() const noexcept { return vertices_; }
  SideLabel first_label() const noexcept { return first_; }
  /// Label of side i = [v_i, v_{i+1}].
  SideLabel label(int i) const;
  /// Complete geodesic of side i, oriented from v_i to v_{i+1}.
  Geodesic side(int i, const Metric& metric) const;
  std::vector<double> angles() const;

 private:
  std::vector<IdealPoint> vertices_;
  SideLabel first_;
};

/// One Busemann depth per polygon vertex.
struct HorocycleFamily {
  std::vector<double> levels;

  Horocycle at(const IdealPolygon& g, int i) const { return {g.vertex(i), levels.at(static_cast<size_t>(i))}; }
  static HorocycleFamily uniform(int n, double level) { return {std::vector<double>(static_cast<size_t>(n), level)}; }
};

/// Smallest pairwise horocycle gap of the family (positive iff pairwise disjoint).
double min_pairwise_gap(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric);
/// Throws DomainError unless the family fits the polygon and is pairwise disjoint.
void require_admissible(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric);
/// A uniform pairwise-disjoint family with the given minimal gap.
HorocycleFamily disjoint_family(const IdealPolygon& g, const Metric& metric, double min_gap = 1.0);

/// Per-vertex family t_i = min_gap/2 - R log sin(delta_i/2), delta_i the angular
/// distance to the nearest other vertex; every pairwise gap is at least min_gap.
HorocycleFamily adaptive_family(const IdealPolygon& g, const Metric& metric, double min_gap = 1.0);
HorocycleFamily adaptive_family(const std::vector<IdealPoint>& vertices, const Metric& metric, double min_gap = 1.0);

/// Truncated length of a side between horocycles sitting at its ideal endpoints.
double truncated_side_length(const Geodesic& side, const Horocycle& h1, const Horocycle& h2, const Metric& metric);

/// a(G) - b(G); independent of the (admissible) family.
double a_minus_b(const IdealPolygon& g, const HorocycleFamily& f, const Metric& metric);

enum class SideKind { BoundaryA, BoundaryB, BoundaryFinite, Interior };
const char* to_string(SideKind k);

struct InscribedPolygon {
  std::uint32_t mask = 0;
  std::vector<int> vertices;   // indices into the parent polygon, increasing
  std::vector<SideKind> sides; // side k joins vertices[k] and vertices[k+1]
};

/// All cyclic vertex subsets of size >= 3 except the polygon itself, sorted by mask.
/// Exponential in the vertex count; refuses polygons with more than 24 vertices.
std::vector<InscribedPolygon> enumerate_inscribed(const IdealPolygon& g);

/// Builds the inscribed polygon on an explicit vertex subset.
InscribedPolygon make_inscribed(const IdealPolygon& g, std::vector<int> vertices);

enum class Verdict { DivergentSatisfied, InvariantSatisfied, Violated };
const char* to_string(Verdict v);

struct InequalityResult {
  Verdict verdict = Verdict::Violated;
  /// |P| - 2a(P) (resp. 2b) when horocycle-invariant; NaN in the divergent case.
  double value = 0.0;
};

struct Condition2Result {
  InequalityResult a;
  InequalityResult b;
  bool satisfied() const { return a.verdict != Verdict::Violated && b.verdict != Verdict::Violated; }
};

/// Strict-inequality margin: invariant values must exceed this to count as satisfied.
inline constexpr double kCondition2Margin = 1e-8;
/// Tolerance on |a(G) - b(G)|.
inline constexpr double kCondition1Tolerance = 1e-8;

/// Shrinking-horocycle limit classification of 2a(P) < |P| and 2b(P) < |P|.
/// Throws DegenerateInput when P is the polygon itself.
Condition2Result condition2_check(const InscribedPolygon& p, const IdealPolygon& g, const Metric& metric);

/// |P| - 2a(P) and |P| - 2b(P) for an explicit family (no limit taken).
std::pair<double, double> condition2_margins(const InscribedPolygon& p, const IdealPolygon& g,
                                             const HorocycleFamily& f, const Metric& metric);

struct InscribedResult {
  InscribedPolygon polygon;
  Condition2Result result;
};

struct FeasibilityReport {
  double condition1_value = 0.0;
  bool condition1_ok = false;
  std::vector<InscribedResult> condition2_results;
  bool condition2_ok = false;
  bool feasible = false;

  /// First inscribed polygon violating condition 2, if any.
  const InscribedResult* first_violation() const;
};

FeasibilityReport js_feasible(const IdealPolygon& g, const Metric& metric);

/// True when z lies strictly inside the counter-clockwise arc from x to y.
bool in_open_arc(IdealPoint x, IdealPoint y, IdealPoint z);

/// L(z) = d(H_y, H_z) - d(H_z, H_x) for z in the ccw arc (x, y). The auxiliary
/// horocycle at z cancels; `z_level` lets callers pick it explicitly.
double L_function(IdealPoint x, IdealPoint y, IdealPoint z, const Horocycle& hx, const Horocycle& hy,
                  const Metric& metric, std::optional<double> z_level = std::nullopt);

/// Fourth vertex w of an ideal Scherk quadrilateral on x, y, z: w lies in the
/// arc between x and y not containing z, with d(H_w,H_x) = d(H_w,H_y) for H_x,
/// H_y equidistant from a horocycle at z. Found by bisection on the arc angle.
IdealPoint fourth_vertex(IdealPoint x, IdealPoint y, IdealPoint z, const Metric& metric, double tolerance = 1e-13);

/// Horocycles at x, y equidistant from the level-0 horocycle at z, pairwise disjoint.
std::pair<Horocycle, Horocycle> equidistant_horocycles(IdealPoint x, IdealPoint y, IdealPoint z, const Metric& metric);

/// Vertex of a triangle: interior point, or ideal point with a horocycle depth.
struct TriangleVertex {
  Endpoint point;
  double level = 0.0;  // used when `point` is ideal
};

struct TriangleMarginResult {
  double margin = 0.0;  // |x1x3| + |x3x2| - |x1x2| for the input levels
  /// All-ideal input: depths (t1, t2, t3) reached by the shrink-in-sequence procedure,
  /// for which all three strict inequalities hold.
  std::optional<std::array<double, 3>> strict_levels;
  std::array<double, 3> strict_margins{};  // margins at strict_levels, opposite x1, x2, x3
};

/// Generalized length |xy| between triangle vertices (points or horocycles).
double generalized_length(const TriangleVertex& a, const TriangleVertex& b, const Metric& metric);

TriangleMarginResult triangle_margin(const TriangleVertex& x1, const TriangleVertex& x2, const TriangleVertex& x3,
                                     const Metric& metric);

/// Result of attaching two Scherk quadrilaterals to consecutive sides and
/// perturbing them so both quadrilateral balances equal t.
struct ExtendResult {
  IdealPolygon polygon;
  // Angles of the new vertices: quadrilateral (a0, b1, b2, a1) on the first
  // side and (a1, b3, b4, a2) on the second.
  IdealPoint b1, b2, b3, b4;
  IdealPoint b2_unperturbed, b3_unperturbed;
  double residual_first = 0.0;
  double residual_second = 0.0;
};

/// Quadrilateral balance |a0a1| - |a1b2| + |b2b1| - |b1a0| (horocycle-invariant).
double quadrilateral_balance(IdealPoint a0, IdealPoint b1, IdealPoint b2, IdealPoint a1, const Metric& metric);

/// Attaches Scherk quadrilaterals to sides `side_index` and `side_index + 1`
/// and perturbs the two vertices adjacent to their common vertex so that both
/// balances equal t. The middle vertex of each attached side is chosen so its
/// angles from p0 to both side endpoints agree. Throws DomainError for t < 0.
ExtendResult extend_and_perturb(const IdealPolygon& d, int side_index, double t, const Metric& metric,
                                SurfacePoint p0 = SurfacePoint::origin(), double tolerance = 1e-10);

/// Boundary data kind of a side for the mixed problem with continuous data.
enum class SideData { PlusInfinity, MinusInfinity, Finite };

/// Ideal polygon whose sides carry +inf, -inf or finite data. Any vertex count
/// >= 3; at least one finite side; no two adjacent sides with the same infinite data.
class BoundaryPolygon {
 public:
  BoundaryPolygon(std::vector<IdealPoint> vertices, std::vector<SideData> data);
  static BoundaryPolygon from_ideal(const IdealPolygon& g);

  int size() const noexcept { return static_cast<int>(vertices_.size()); }
  const IdealPoint& vertex(int i) const;
  const std::vector<IdealPoint>& vertices() const noexcept { return vertices_; }
  SideData data(int i) const;
  const std::vector<SideData>& side_data() const noexcept { return data_; }
  Geodesic side(int i, const Metric& metric) const;

 private:
  std::vector<IdealPoint> vertices_;
  std::vector<SideData> data_;
};

/// Inscribed polygons of a boundary polygon; the polygon itself is included.
std::vector<InscribedPolygon> enumerate_inscribed(const BoundaryPolygon& g);
Condition2Result condition2_check(const InscribedPolygon& p, const BoundaryPolygon& g, const Metric& metric);

/// The inequalities 2a(P) < |P|, 2b(P) < |P| over every inscribed polygon,
/// including the boundary polygon itself (condition 1 does not apply).
FeasibilityReport mixed_feasible(const BoundaryPolygon& g, const Metric& metric);

/// Number of chart intersection points of two horocycles (0, 1 or 2).
/// Throws DegenerateInput for identical horocycles.
int horocycle_intersection_count(const Horocycle& h1, const Horocycle& h2, const Metric& metric);

}  // namespace jsg
