#pragma once

// Post-processing of computed graphs: flux of grad u / W across curves, the
// stability-gap inequality on level sets of u - v, conformal modulus of an
// annulus in the graph metric, and the ideal-polygon exhaustion driver.

#include <optional>
#include <string>
#include <vector>

#include "jsg/solver.hpp"

namespace jsg {

enum class GradientMode { Element, Recovered };

struct FluxResult {
  double value = 0.0;   // integral of <grad_g u / W, nu> ds
  double length = 0.0;  // hyperbolic length of the curve
  int pieces = 0;       // quadrature pieces (one per crossed triangle)
};

/// Open polyline in the chart; nu is the unit normal to the right of the
/// direction of travel (outward for a counter-clockwise loop). Every point
/// must lie in the mesh.
FluxResult flux(const TriMesh& mesh, const ScalarField& u, const std::vector<Complex>& curve, const Metric& metric,
                GradientMode mode = GradientMode::Element);

/// Outward flux through a closed counter-clockwise loop, taken from the weak
/// residuals of the nodes it encloses. Zero to rounding for a discrete
/// solution; throws DomainError when the loop encloses boundary nodes.
FluxResult closed_flux(const TriMesh& mesh, const ScalarField& u, const std::vector<Complex>& loop,
                       const Metric& metric);

enum class GapVerdict { Holds, Fails, Inapplicable };
const char* to_string(GapVerdict v);

struct GapResult {
  GapVerdict verdict = GapVerdict::Inapplicable;
  int samples = 0;
  double min_slack = 0.0;  // min of <X - Y, eta> - |N - N'|^2 / 4
};

/// Samples the level curve {u - v = level} at up to `max_samples` crossed
/// triangles; points with |grad(u - v)| < 1e-10 are skipped. Inapplicable when
/// no sample survives.
GapResult stability_gap(const TriMesh& mesh, const ScalarField& u, const ScalarField& v, double level,
                        const Metric& metric, int max_samples = 200);

/// Chart disk; regions of the annulus are concentric disks.
struct ChartDisk {
  Complex center;
  double radius = 0.0;
};

struct ModulusResult {
  double modulus = 0.0;  // 1 / E
  double energy = 0.0;   // Dirichlet energy of the capacity potential
  int nodes = 0;
};

/// Modulus of inner.radius < |z - c| < outer.radius in the metric
/// lambda^2 |dz|^2 + du^2 (plain conformal metric when `u` is absent).
/// `swap` puts the potential 1 on the inner circle instead of 0.
ModulusResult conformal_modulus(const TriMesh* mesh, const ScalarField* u, ChartDisk inner, ChartDisk outer,
                                const Metric& metric, int per_ring = 192, bool swap = false);

/// Discrete C^2 distance between two interpolated fields over a chart disk:
/// max of |f|, first and second central differences of step h, f = u_b - u_a,
/// on a polar grid of `grid` radii.
double c2_difference(const TriMesh& mesh_a, const ScalarField& u_a, const TriMesh& mesh_b, const ScalarField& u_b,
                     ChartDisk k, double h = 0.1, int grid = 4);

struct ExhaustionOptions {
  double truncation = 16.0;
  double min_gap = 3.0;  // adaptive horocycle family
  double t_initial = 0.1;
  int max_halvings = 4;
  // The chart modulus of a round annulus is log(r1/r0)/2pi, so reaching 1 in a
  // single step needs r0 about e^{-2pi} times the largest admissible r1.
  double k0_radius = 5e-4;
  double k_step = 0.05;    // growth of K_n per trial
  double k_margin = 0.05;  // K_n stays this far inside the truncated domain
  int modulus_per_ring = 160;
  double c2_step = 0.1;
  int c2_grid = 4;
  PolygonMeshOptions mesh{24, 48, 2.0};
};

struct ExhaustionStep {
  int index = 0;  // n of D_n
  int vertex_count = 0;
  bool feasible = false;
  double t = 0.0;
  std::vector<double> t_tried;
  std::vector<double> c2_history;  // one per t tried
  double c2 = 0.0;
  double epsilon = 0.0;
  bool c2_ok = false;
  double max_angle_gap = 0.0;
  double angle_bound = 0.0;
  bool angle_ok = false;
  double k_radius = 0.0;
  double modulus = 0.0;
  bool modulus_ok = false;
  bool modulus_capped = false;  // K could not grow far enough; best effort recorded
  std::string note;             // why the step stopped early, if it did
};

struct ExhaustionState {
  std::vector<IdealPoint> vertices;  // current D_n
  double k_radius = 0.0;
  std::vector<ExhaustionStep> steps;
};

/// D_{n+1} replaces every side pair (v_{2p}, v_{2p+1}, v_{2p+2}) of D_n by
/// extend_and_perturb with a common t, halved until the C^2 difference on K_n
/// drops below epsilons[n]. K_{n+1} grows from K_n until its modulus over K_n
/// in the graph metric of u_{n+1} reaches 1.
ExhaustionState run_exhaustion(const IdealPolygon& initial, const std::vector<double>& epsilons, const Metric& metric,
                               const SolverConfig& cfg, const ExhaustionOptions& options = {});

/// The polygon of one exhaustion step with a fixed t.
IdealPolygon exhaustion_extend(const IdealPolygon& d, double t, const Metric& metric);

}  // namespace jsg
