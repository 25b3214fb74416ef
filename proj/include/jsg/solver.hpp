#pragma once

// P1 finite elements for the minimal surface equation in the disk chart.
//
// In the conformal chart the equation div_g(grad_g u / W) = 0 becomes
// div(grad u / W) = 0 with W = sqrt(1 + |grad u|^2 / lambda^2), so the metric
// only enters through W. Newton on the weak residual with a lagged-W Picard
// fallback.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jsg/barrier.hpp"
#include "jsg/mesh.hpp"
#include "jsg/polygon.hpp"

namespace jsg {

struct SolverConfig {
  double tolerance = 1e-10;  // max-norm of the weak residual on free nodes
  int max_iterations = 200;
  int max_halvings = 12;     // Newton damping 1, 1/2, ..., 2^-max_halvings, then Picard
  int resolution = 4;        // mesh density knob, meaning depends on the builder
  double truncation = 6.0;   // T (or n for the Plateau sequence)

  /// Throws DomainError for non-positive tolerance, T or resolution.
  void validate() const;
};

struct ScalarField {
  std::vector<double> values;

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct SolveReport {
  int iterations = 0;
  int newton_steps = 0;
  int picard_steps = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Per-triangle chart geometry: area, basis gradients, 1/lambda^2 at the edge midpoints.
struct ElementGeometry {
  std::vector<double> area;
  std::vector<std::array<Complex, 3>> grad;
  std::vector<double> il0, il1, il2;
};

ElementGeometry element_geometry(const TriMesh& mesh, const Metric& metric);

/// Weak residual r_i = int grad u . grad phi_i / W at every node.
std::vector<double> weak_residual(const TriMesh& mesh, const ElementGeometry& geo, const std::vector<double>& u);

/// Dirichlet problem: boundary nodes take `boundary_values[i]`. `initial` (all
/// nodes) seeds the iteration; the default is the harmonic extension.
/// Throws SolverError with the residual history on non-convergence.
ScalarField solve_dirichlet(const TriMesh& mesh, const std::vector<double>& boundary_values, const Metric& metric,
                            const SolverConfig& cfg, SolveReport* report = nullptr,
                            const std::vector<double>* initial = nullptr);

/// Mesh plus field, for the drivers that build their own meshes.
struct Solution {
  TriMesh mesh;
  ScalarField u;
  SolveReport report;
};

/// Refusal to solve on a polygon that fails the existence conditions.
class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, FeasibilityReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const FeasibilityReport& report() const noexcept { return report_; }

 private:
  FeasibilityReport report_;
};

struct ScherkSequence {
  std::vector<double> n_list;
  std::vector<Solution> solutions;
  double min_value = 0.0;           // over all nodes and all n
  double max_barrier_excess = 0.0;  // max of u_n - h(s) over interior nodes
  double min_monotone_slack = 0.0;  // min of u_{n+1} - u_n over nodes of the smaller mesh
  std::vector<double> cauchy;       // sup over K of |u_{k+1} - u_k|
  bool nonnegative = false;
  bool below_barrier = false;
  bool monotone = false;
  bool cauchy_decreasing = false;
};

/// Plateau truncations: data 0 on the arc A(n) of the geodesic circle about
/// gamma(0), n on B(n) = gamma([-n, n]). Meshes are nested across n, so common
/// compacts are compared node by node. K = {0.5 <= s <= 1.5, |t| <= 1} in Fermi
/// coordinates; the barrier uses d = kappa.
ScherkSequence solve_scherk_sequence(const Geodesic& gamma, const std::vector<double>& n_list, const Metric& metric,
                                     const SolverConfig& cfg);

struct PolygonSolution {
  TriMesh mesh;
  ScalarField u;
  SolveReport report;
  PolygonCorners corners;
  FeasibilityReport feasibility;
};

/// +T on A sides, -T on B sides, arclength interpolation along the horocycle
/// arcs, normalized to u(center) = 0. Throws Infeasible when the polygon fails
/// the existence conditions, unless `force` is set (the report is still filled).
PolygonSolution solve_ideal_scherk(const IdealPolygon& g, const HorocycleFamily& f, double T, const Metric& metric,
                                   const SolverConfig& cfg, const PolygonMeshOptions& mesh_options = {},
                                   bool force = false);

/// +T / -T / finite data per side (finite data evaluated at the chart point).
/// Not normalized. Throws Infeasible when an inscribed-polygon inequality fails.
using SideFunction = std::function<double(SurfacePoint)>;
PolygonSolution solve_mixed_boundary(const BoundaryPolygon& g, const std::vector<SideFunction>& finite_data,
                                     const std::vector<double>& levels, double T, const Metric& metric,
                                     const SolverConfig& cfg, const PolygonMeshOptions& mesh_options = {},
                                     bool force = false);

/// Boundary values on a horocycle-truncated polygon mesh: `side_value(i, p)`
/// on side i, arclength interpolation along the horocycle arcs.
std::vector<double> polygon_boundary_values(const TriMesh& mesh, const PolygonCorners& corners, const Metric& metric,
                                            const std::function<double(int, SurfacePoint)>& side_value);

/// Geodesic disks B(p0, n) with boundary values phi(angle of the ideal endpoint of
/// the ray from p0 through each boundary node). Meshes nested across n.
std::vector<Solution> solve_dirichlet_at_infinity(const std::function<double(double)>& phi, SurfacePoint p0,
                                                  const std::vector<double>& n_list, const Metric& metric,
                                                  const SolverConfig& cfg);

enum class OrderVerdict { Holds, Fails, Inapplicable };
const char* to_string(OrderVerdict v);

struct OrderCheck {
  OrderVerdict verdict = OrderVerdict::Inapplicable;
  double min_slack = 0.0;  // min of v - u over interior nodes
};

/// u <= v + 1e-8 at every interior node, given u <= v on the boundary.
OrderCheck max_principle_check(const ScalarField& u, const ScalarField& v, const TriMesh& mesh);

}  // namespace jsg
