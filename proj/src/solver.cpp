#include "jsg/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "jsg/errors.hpp"
#include "jsg/kernels.hpp"
#include "jsg/parallel.hpp"

namespace jsg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Coefficients {
  std::vector<double> qx, qy, a, b;
};

Coefficients coefficients(const TriMesh& mesh, const ElementGeometry& geo, const std::vector<double>& u) {
  const size_t nt = mesh.triangles.size();
  Coefficients c;
  c.qx.resize(nt);
  c.qy.resize(nt);
  c.a.resize(nt);
  c.b.resize(nt);
  parallel_for(nt, [&](size_t lo, size_t hi) {
    for (size_t t = lo; t < hi; ++t) {
      const auto& tri = mesh.triangles[t];
      const auto& g = geo.grad[t];
      const Complex q = u[static_cast<size_t>(tri[0])] * g[0] + u[static_cast<size_t>(tri[1])] * g[1] +
                        u[static_cast<size_t>(tri[2])] * g[2];
      c.qx[t] = q.real();
      c.qy[t] = q.imag();
    }
    kernels::TriangleBatch batch{hi - lo,          c.qx.data() + lo,  c.qy.data() + lo, geo.area.data() + lo,
                                 geo.il0.data() + lo, geo.il1.data() + lo, geo.il2.data() + lo};
    kernels::minimal_coefficients(batch, c.a.data() + lo, c.b.data() + lo);
  });
  return c;
}

std::vector<double> residual_from(const TriMesh& mesh, const ElementGeometry& geo, const Coefficients& c) {
  std::vector<double> r(mesh.nodes.size(), 0.0);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Complex q(c.qx[t], c.qy[t]);
    for (int k = 0; k < 3; ++k) {
      const Complex g = geo.grad[t][static_cast<size_t>(k)];
      r[static_cast<size_t>(mesh.triangles[t][static_cast<size_t>(k)])] +=
          c.a[t] * (q.real() * g.real() + q.imag() * g.imag());
    }
  }
  return r;
}

double dot(Complex x, Complex y) { return x.real() * y.real() + x.imag() * y.imag(); }

struct Dofs {
  std::vector<int> index;  // node -> dof, -1 on the boundary
  std::vector<int> node;   // dof -> node
};

Dofs make_dofs(const TriMesh& mesh) {
  Dofs d;
  d.index.assign(mesh.nodes.size(), -1);
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (mesh.is_boundary(i)) continue;
    d.index[static_cast<size_t>(i)] = static_cast<int>(d.node.size());
    d.node.push_back(i);
  }
  return d;
}

double free_max(const std::vector<double>& r, const Dofs& d) {
  double m = 0.0;
  for (int i : d.node) m = std::max(m, std::abs(r[static_cast<size_t>(i)]));
  return m;
}

// Matrix on free dofs of sum_T a_T g_i.g_j - b_T (q.g_i)(q.g_j); with `rhs`
// also accumulates -sum over boundary columns times u (for the linear solves).
SpMat assemble(const TriMesh& mesh, const ElementGeometry& geo, const Dofs& d, const std::vector<double>& a,
               const std::vector<double>* b, const Coefficients* c, const std::vector<double>* u, Vec* rhs) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  if (rhs) rhs->setZero(static_cast<Eigen::Index>(d.node.size()));
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& g = geo.grad[t];
    Complex q(0.0, 0.0);
    if (b) q = Complex(c->qx[t], c->qy[t]);
    for (int i = 0; i < 3; ++i) {
      const int di = d.index[static_cast<size_t>(tri[static_cast<size_t>(i)])];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        double v = a[t] * dot(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)]);
        if (b) v -= (*b)[t] * dot(q, g[static_cast<size_t>(i)]) * dot(q, g[static_cast<size_t>(j)]);
        const int node_j = tri[static_cast<size_t>(j)];
        const int dj = d.index[static_cast<size_t>(node_j)];
        if (dj >= 0)
          trip.emplace_back(di, dj, v);
        else if (rhs)
          (*rhs)[di] -= v * (*u)[static_cast<size_t>(node_j)];
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(d.node.size());
  SpMat m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// Linear solve with fixed boundary values and per-triangle weights a.
bool linear_solve(const TriMesh& mesh, const ElementGeometry& geo, const Dofs& d, const std::vector<double>& a,
                  std::vector<double>& u) {
  Vec rhs;
  const SpMat m = assemble(mesh, geo, d, a, nullptr, nullptr, &u, &rhs);
  Eigen::SimplicialLDLT<SpMat> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const Vec x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) return false;
  for (size_t k = 0; k < d.node.size(); ++k) u[static_cast<size_t>(d.node[k])] = x[static_cast<Eigen::Index>(k)];
  return true;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iterations < 1 || max_halvings < 0) throw DomainError("solver iteration limits must be positive");
  if (resolution < 1) throw DomainError("resolution must be positive");
  if (!(truncation > 0.0)) throw DomainError("truncation height must be positive");
}

ElementGeometry element_geometry(const TriMesh& mesh, const Metric& metric) {
  ElementGeometry geo;
  const size_t nt = mesh.triangles.size();
  geo.area.resize(nt);
  geo.grad.resize(nt);
  geo.il0.resize(nt);
  geo.il1.resize(nt);
  geo.il2.resize(nt);
  const Complex i(0.0, 1.0);
  for (size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const Complex p[3] = {mesh.nodes[static_cast<size_t>(tri[0])], mesh.nodes[static_cast<size_t>(tri[1])],
                          mesh.nodes[static_cast<size_t>(tri[2])]};
    const double area = mesh.signed_area(static_cast<int>(t));
    geo.area[t] = area;
    for (int k = 0; k < 3; ++k) geo.grad[t][static_cast<size_t>(k)] = i * (p[(k + 2) % 3] - p[(k + 1) % 3]) / (2.0 * area);
    auto il = [&](Complex z) {
      const double lam = metric.conformal_factor(z);
      return 1.0 / (lam * lam);
    };
    geo.il0[t] = il(0.5 * (p[0] + p[1]));
    geo.il1[t] = il(0.5 * (p[1] + p[2]));
    geo.il2[t] = il(0.5 * (p[2] + p[0]));
  }
  return geo;
}

std::vector<double> weak_residual(const TriMesh& mesh, const ElementGeometry& geo, const std::vector<double>& u) {
  return residual_from(mesh, geo, coefficients(mesh, geo, u));
}

ScalarField solve_dirichlet(const TriMesh& mesh, const std::vector<double>& boundary_values, const Metric& metric,
                            const SolverConfig& cfg, SolveReport* report, const std::vector<double>* initial) {
  cfg.validate();
  if (boundary_values.size() != mesh.nodes.size()) throw DomainError("one boundary value slot per node required");
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary(i) && !std::isfinite(boundary_values[static_cast<size_t>(i)]))
      throw DomainError("boundary data must be finite");
  const ElementGeometry geo = element_geometry(mesh, metric);
  const Dofs d = make_dofs(mesh);
  SolveReport rep;

  std::vector<double> u(mesh.nodes.size(), 0.0);
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary(i)) u[static_cast<size_t>(i)] = boundary_values[static_cast<size_t>(i)];
  if (d.node.empty()) {
    if (report) *report = rep;
    return {u};
  }
  if (initial) {
    if (initial->size() != u.size()) throw DomainError("initial guess size mismatch");
    for (int i : d.node) u[static_cast<size_t>(i)] = (*initial)[static_cast<size_t>(i)];
  } else if (!linear_solve(mesh, geo, d, geo.area, u)) {
    throw SolverError("harmonic initial guess failed", {});
  }

  Coefficients c = coefficients(mesh, geo, u);
  double res = free_max(residual_from(mesh, geo, c), d);
  rep.history.push_back(res);
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  while (res > cfg.tolerance) {
    if (rep.iterations >= cfg.max_iterations) {
      std::ostringstream os;
      os << "minimal surface solve did not converge: residual " << res << " after " << rep.iterations
         << " iterations";
      throw SolverError(os.str(), rep.history);
    }
    ++rep.iterations;
    bool accepted = false;
    const std::vector<double> r = residual_from(mesh, geo, c);
    const SpMat jac = assemble(mesh, geo, d, c.a, &c.b, &c, nullptr, nullptr);
    if (!analyzed) {
      ldlt.analyzePattern(jac);
      analyzed = true;
    }
    ldlt.factorize(jac);
    if (ldlt.info() == Eigen::Success) {
      Vec rhs(static_cast<Eigen::Index>(d.node.size()));
      for (size_t k = 0; k < d.node.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = -r[static_cast<size_t>(d.node[k])];
      const Vec step = ldlt.solve(rhs);
      if (ldlt.info() == Eigen::Success && step.allFinite()) {
        double alpha = 1.0;
        for (int h = 0; h <= cfg.max_halvings; ++h, alpha *= 0.5) {
          std::vector<double> trial = u;
          for (size_t k = 0; k < d.node.size(); ++k)
            trial[static_cast<size_t>(d.node[k])] += alpha * step[static_cast<Eigen::Index>(k)];
          Coefficients ct = coefficients(mesh, geo, trial);
          const double rt = free_max(residual_from(mesh, geo, ct), d);
          if (rt < (1.0 - 1e-4 * alpha) * res) {
            u = std::move(trial);
            c = std::move(ct);
            res = rt;
            accepted = true;
            ++rep.newton_steps;
            break;
          }
        }
      }
    }
    if (!accepted) {
      // Lagged-W fixed point step.
      if (!linear_solve(mesh, geo, d, c.a, u)) throw SolverError("Picard step failed", rep.history);
      c = coefficients(mesh, geo, u);
      res = free_max(residual_from(mesh, geo, c), d);
      ++rep.picard_steps;
    }
    rep.history.push_back(res);
  }
  rep.residual = res;
  if (report) *report = rep;
  return {u};
}

ScherkSequence solve_scherk_sequence(const Geodesic& gamma, const std::vector<double>& n_list, const Metric& metric,
                                     const SolverConfig& cfg) {
  cfg.validate();
  if (n_list.empty()) throw DomainError("empty n list");
  for (size_t k = 0; k < n_list.size(); ++k) {
    if (!(n_list[k] > 0.0)) throw DomainError("Plateau heights must be positive");
    if (k > 0 && !(n_list[k] > n_list[k - 1])) throw DomainError("Plateau heights must increase");
  }
  if (metric.is_flat()) throw DomainError("the Plateau sequence needs a hyperbolic metric");
  ScherkSequence out;
  out.n_list = n_list;
  const FermiChart chart(gamma, metric);
  const double d = metric.kappa();

  out.min_value = std::numeric_limits<double>::infinity();
  out.max_barrier_excess = -std::numeric_limits<double>::infinity();
  for (double n : n_list) {
    Solution sol;
    sol.mesh = halfplane_mesh(gamma, n, metric, cfg.resolution);
    const int tag_b = sol.mesh.tag_id("B");
    std::vector<double> bc(sol.mesh.nodes.size(), 0.0);
    for (int i = 0; i < sol.mesh.node_count(); ++i)
      if (sol.mesh.node_tag[static_cast<size_t>(i)] == tag_b) bc[static_cast<size_t>(i)] = n;
    sol.u = solve_dirichlet(sol.mesh, bc, metric, cfg, &sol.report);
    for (int i = 0; i < sol.mesh.node_count(); ++i) {
      out.min_value = std::min(out.min_value, sol.u[static_cast<size_t>(i)]);
      if (sol.mesh.is_boundary(i)) continue;
      const double s = std::abs(chart.coordinates(SurfacePoint::from(sol.mesh.nodes[static_cast<size_t>(i)]))[0]);
      out.max_barrier_excess = std::max(out.max_barrier_excess, sol.u[static_cast<size_t>(i)] - barrier_height(s, d));
    }
    out.solutions.push_back(std::move(sol));
  }

  out.min_monotone_slack = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < out.solutions.size(); ++k) {
    const Solution& lo = out.solutions[k];
    const Solution& hi = out.solutions[k + 1];
    const PointLocator locator(hi.mesh);
    double sup = 0.0;
    for (int i = 0; i < lo.mesh.node_count(); ++i) {
      const Complex z = lo.mesh.nodes[static_cast<size_t>(i)];
      // Nested meshes share their leading nodes; fall back to interpolation otherwise.
      const bool shared = i < hi.mesh.node_count() && hi.mesh.nodes[static_cast<size_t>(i)] == z;
      const double uh = shared ? hi.u[static_cast<size_t>(i)] : locator.interpolate(hi.u.values, z);
      const double diff = uh - lo.u[static_cast<size_t>(i)];
      out.min_monotone_slack = std::min(out.min_monotone_slack, diff);
      const auto st = chart.coordinates(SurfacePoint::from(z));
      if (std::abs(st[0]) >= 0.5 && std::abs(st[0]) <= 1.5 && std::abs(st[1]) <= 1.0) sup = std::max(sup, std::abs(diff));
    }
    out.cauchy.push_back(sup);
  }
  if (out.solutions.size() < 2) out.min_monotone_slack = 0.0;
  out.nonnegative = out.min_value >= -1e-12;
  out.below_barrier = out.max_barrier_excess <= 1e-6;
  out.monotone = out.min_monotone_slack >= -1e-8;
  out.cauchy_decreasing = true;
  for (size_t k = 1; k < out.cauchy.size(); ++k)
    if (!(out.cauchy[k] < out.cauchy[k - 1])) out.cauchy_decreasing = false;
  return out;
}

std::vector<double> polygon_boundary_values(const TriMesh& mesh, const PolygonCorners& corners, const Metric& metric,
                                            const std::function<double(int, SurfacePoint)>& side_value) {
  const int n = static_cast<int>(corners.side_start.size());
  std::vector<double> bc(mesh.nodes.size(), 0.0);
  for (int i = 0; i < mesh.node_count(); ++i) {
    const int tag = mesh.node_tag[static_cast<size_t>(i)];
    if (tag < 0) continue;
    const SurfacePoint x = SurfacePoint::from(mesh.nodes[static_cast<size_t>(i)]);
    if (tag < n) {
      bc[static_cast<size_t>(i)] = side_value(tag, x);
      continue;
    }
    const int j = tag - n;
    const int prev = (j + n - 1) % n;
    const SurfacePoint p = corners.side_end[static_cast<size_t>(prev)];
    const SurfacePoint q = corners.side_start[static_cast<size_t>(j)];
    const double vp = side_value(prev, p);
    const double vq = side_value(j, q);
    const double total = horocycle_arclength(p, q, metric);
    const double part = horocycle_arclength(p, x, metric);
    bc[static_cast<size_t>(i)] = vp + (vq - vp) * std::clamp(part / total, 0.0, 1.0);
  }
  return bc;
}

PolygonSolution solve_ideal_scherk(const IdealPolygon& g, const HorocycleFamily& f, double T, const Metric& metric,
                                   const SolverConfig& cfg, const PolygonMeshOptions& mesh_options, bool force) {
  if (!(T > 0.0)) throw DomainError("truncation height must be positive");
  PolygonSolution out;
  out.feasibility = js_feasible(g, metric);
  if (!out.feasibility.feasible && !force) throw Infeasible("polygon fails the existence conditions", out.feasibility);
  require_admissible(g, f, metric);
  out.mesh = polygon_mesh(g.vertices(), f.levels, metric, mesh_options, &out.corners);
  const auto bc = polygon_boundary_values(out.mesh, out.corners, metric, [&](int side, SurfacePoint) {
    return g.label(side) == SideLabel::A ? T : -T;
  });
  out.u = solve_dirichlet(out.mesh, bc, metric, cfg, &out.report);
  const double shift = out.u[static_cast<size_t>(out.mesh.center)];
  for (auto& v : out.u.values) v -= shift;
  return out;
}

PolygonSolution solve_mixed_boundary(const BoundaryPolygon& g, const std::vector<SideFunction>& finite_data,
                                     const std::vector<double>& levels, double T, const Metric& metric,
                                     const SolverConfig& cfg, const PolygonMeshOptions& mesh_options, bool force) {
  if (!(T > 0.0)) throw DomainError("truncation height must be positive");
  if (static_cast<int>(finite_data.size()) != g.size()) throw DomainError("one data slot per side required");
  for (int i = 0; i < g.size(); ++i)
    if (g.data(i) == SideData::Finite && !finite_data[static_cast<size_t>(i)])
      throw DomainError("finite side without data");
  PolygonSolution out;
  out.feasibility = mixed_feasible(g, metric);
  if (!out.feasibility.feasible && !force) throw Infeasible("an inscribed-polygon inequality fails", out.feasibility);
  out.mesh = polygon_mesh(g.vertices(), levels, metric, mesh_options, &out.corners);
  const auto bc = polygon_boundary_values(out.mesh, out.corners, metric, [&](int side, SurfacePoint p) {
    switch (g.data(side)) {
      case SideData::PlusInfinity: return T;
      case SideData::MinusInfinity: return -T;
      default: return finite_data[static_cast<size_t>(side)](p);
    }
  });
  out.u = solve_dirichlet(out.mesh, bc, metric, cfg, &out.report);
  return out;
}

std::vector<Solution> solve_dirichlet_at_infinity(const std::function<double(double)>& phi, SurfacePoint p0,
                                                  const std::vector<double>& n_list, const Metric& metric,
                                                  const SolverConfig& cfg) {
  cfg.validate();
  std::vector<Solution> out;
  for (size_t k = 0; k < n_list.size(); ++k)
    if (k > 0 && !(n_list[k] > n_list[k - 1])) throw DomainError("radii must increase");
  for (double n : n_list) {
    Solution sol;
    sol.mesh = geodesic_disk_mesh(p0, n, metric, cfg.resolution);
    std::vector<double> bc(sol.mesh.nodes.size(), 0.0);
    for (int i = 0; i < sol.mesh.node_count(); ++i)
      if (sol.mesh.is_boundary(i))
        bc[static_cast<size_t>(i)] = phi(ideal_point_at_angle(p0, sol.mesh.node_param[static_cast<size_t>(i)]).theta());
    sol.u = solve_dirichlet(sol.mesh, bc, metric, cfg, &sol.report);
    out.push_back(std::move(sol));
  }
  return out;
}

const char* to_string(OrderVerdict v) {
  switch (v) {
    case OrderVerdict::Holds: return "true";
    case OrderVerdict::Fails: return "false";
    default: return "inapplicable";
  }
}

OrderCheck max_principle_check(const ScalarField& u, const ScalarField& v, const TriMesh& mesh) {
  if (u.size() != mesh.nodes.size() || v.size() != mesh.nodes.size()) throw DomainError("field size mismatch");
  OrderCheck out;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary(i) && u[static_cast<size_t>(i)] > v[static_cast<size_t>(i)]) return out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.node_count(); ++i)
    if (!mesh.is_boundary(i)) out.min_slack = std::min(out.min_slack, v[static_cast<size_t>(i)] - u[static_cast<size_t>(i)]);
  if (!std::isfinite(out.min_slack)) out.min_slack = 0.0;
  out.verdict = out.min_slack >= -1e-8 ? OrderVerdict::Holds : OrderVerdict::Fails;
  return out;
}

}  // namespace jsg
