#pragma once

// Triangle meshes of truncated domains in the disk chart.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "jsg/hyperbolic.hpp"

namespace jsg {

struct BoundarySegment {
  int a = 0;
  int b = 0;
  int tag = 0;
};

struct TriMesh {
  std::vector<Complex> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<int> node_tag;                  // -1 for interior nodes
  std::vector<BoundarySegment> segments;      // oriented with the domain on the left
  std::vector<std::string> tag_names;
  std::vector<int> ring;          // ring index per node, -1 when not a ring mesh
  std::vector<double> node_param;  // builder-specific (angle along the ring, ...)
  int center = -1;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  bool is_boundary(int i) const { return node_tag[static_cast<size_t>(i)] >= 0; }
  int tag_id(const std::string& name) const;  // -1 when absent

  double signed_area(int t) const;
  double chart_area() const;
  double min_angle_deg() const;
  /// Gradient of the P1 interpolant of `values` on triangle t.
  Complex gradient(int t, const std::vector<double>& values) const;

  /// Throws DomainError on nodes off the open disk, inverted triangles or
  /// boundary nodes missing a tag.
  void validate() const;
};

/// Recomputes boundary segments from the triangle list. `tag_of_segment`
/// receives the two end nodes; each boundary node takes the tag of the segment
/// leaving it.
void tag_boundary(TriMesh& mesh, const std::function<int(int, int)>& tag_of_segment);

/// Concentric ring layout. Ring k has counts[k] intervals per sector; ring 0 is
/// a single center node when `has_center`. `place` maps (position along the
/// ring in [0, sectors], ring radius parameter) to a chart point.
struct RingLayout {
  int sectors = 8;
  bool closed = true;
  bool has_center = true;
  std::vector<double> radii;
  std::vector<int> counts;
};

TriMesh ring_mesh(const RingLayout& layout, const std::function<Complex(double, double)>& place);

/// Ring radii uniformly spaced in hyperbolic distance with interval counts
/// keeping elements close to isotropic. Nested: the layout for a larger radius
/// extends the one for a smaller radius.
RingLayout hyperbolic_rings(double radius, double spacing, int sectors, double angular_span, const Metric& metric);

/// Half of the geodesic disk of radius n about gamma(0), on the left of gamma.
/// Tags: "B" (the geodesic segment, corners included) and "A" (the circle arc).
TriMesh halfplane_mesh(const Geodesic& gamma, double n, const Metric& metric, int resolution = 4, int sectors = 6);

/// Geodesic disk B(p0, n); node_param holds the angle at p0 of the ray through the node.
TriMesh geodesic_disk_mesh(SurfacePoint p0, double n, const Metric& metric, int resolution = 4, int sectors = 8);

/// Horocycle-truncated ideal polygon. Tags "side<i>" for side [v_i, v_{i+1}] and
/// "horo<i>" for the horocycle arc at v_i. The chart origin must be interior.
struct PolygonMeshOptions {
  int rings = 24;
  int sectors = 24;  // approximate total; every boundary piece gets at least one
  double core_blend = 2.0;  // exponent of the blend from uniform to boundary-fitted angles
};

struct PolygonCorners {
  std::vector<SurfacePoint> side_start;  // side i meets the horocycle at v_i
  std::vector<SurfacePoint> side_end;    // side i meets the horocycle at v_{i+1}
};

TriMesh polygon_mesh(const std::vector<IdealPoint>& vertices, const std::vector<double>& levels,
                     const Metric& metric, const PolygonMeshOptions& options, PolygonCorners* corners = nullptr);

/// Fermi rectangle s in [s0, s1], t in [t0, t1] along a complete geodesic,
/// gridded uniformly in the conformal coordinates (R gd(s/R), t).
/// node_param holds s. Single tag "D".
TriMesh fermi_rectangle_mesh(const FermiChart& chart, double s0, double s1, double t0, double t1, int cells_s,
                             int cells_t);

/// Log-polar annulus between chart circles of radii r_in < r_out about `center`,
/// `per_ring` nodes per ring. Tags "inner" and "outer".
TriMesh annulus_mesh(Complex center, double r_in, double r_out, int per_ring);

/// Bucketed point location over the triangles of a mesh.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh, int buckets_per_side = 0);

  /// Triangle containing z and its barycentric coordinates; -1 when outside.
  int locate(Complex z, std::array<double, 3>* bary = nullptr, double slack = 1e-10) const;
  /// P1 interpolation; throws DomainError outside the mesh.
  double interpolate(const std::vector<double>& values, Complex z) const;
  const TriMesh& mesh() const { return *mesh_; }

 private:
  const TriMesh* mesh_;
  double x0_ = 0, y0_ = 0, cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Area-weighted nodal average of the elementwise gradients.
std::vector<Complex> recovered_gradient(const TriMesh& mesh, const std::vector<double>& values);

}  // namespace jsg
