#include "jsg/diagnostics.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jsg/errors.hpp"
#include "jsg/kernels.hpp"

namespace jsg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kGauss[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Parameter interval of z0 + s (z1 - z0), s in [0, 1], inside triangle t.
bool clip(const TriMesh& mesh, int t, Complex z0, Complex z1, double& lo, double& hi) {
  lo = 0.0;
  hi = 1.0;
  const auto& tri = mesh.triangles[static_cast<size_t>(t)];
  const Complex d = z1 - z0;
  for (int k = 0; k < 3; ++k) {
    const Complex a = mesh.nodes[static_cast<size_t>(tri[static_cast<size_t>(k)])];
    const Complex b = mesh.nodes[static_cast<size_t>(tri[static_cast<size_t>((k + 1) % 3)])];
    const Complex e = b - a;
    const double slack = 1e-12 * std::abs(e) * std::abs(e);
    const double f0 = cross(e, z0 - a) + slack;
    const double df = cross(e, d);
    if (std::abs(df) < 1e-300) {
      if (f0 < 0.0) return false;
      continue;
    }
    const double s = -f0 / df;
    if (df > 0.0)
      lo = std::max(lo, s);
    else
      hi = std::min(hi, s);
    if (lo > hi) return false;
  }
  return hi - lo > 1e-14;
}

std::array<double, 3> barycentric(const TriMesh& mesh, int t, Complex z) {
  const auto& tri = mesh.triangles[static_cast<size_t>(t)];
  const Complex p0 = mesh.nodes[static_cast<size_t>(tri[0])];
  const Complex p1 = mesh.nodes[static_cast<size_t>(tri[1])];
  const Complex p2 = mesh.nodes[static_cast<size_t>(tri[2])];
  const double a = cross(p1 - p0, p2 - p0);
  const double b1 = cross(p2 - p1, z - p1) / a;
  const double b2 = cross(p0 - p2, z - p2) / a;
  return {b1, b2, 1.0 - b1 - b2};
}

bool inside_loop(const std::vector<Complex>& loop, Complex z) {
  bool in = false;
  const size_t n = loop.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Complex a = loop[i];
    const Complex b = loop[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      const double x = a.real() + (z.imag() - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

double metric_length(const std::vector<Complex>& curve, const Metric& metric, bool closed) {
  double len = 0.0;
  const size_t n = curve.size();
  const size_t segs = closed ? n : n - 1;
  for (size_t i = 0; i < segs; ++i) {
    const Complex a = curve[i];
    const Complex b = curve[(i + 1) % n];
    const double chord = std::abs(b - a);
    // Subdivide so lambda varies little over each piece.
    const int sub = std::max(1, static_cast<int>(std::ceil(chord / 1e-3)));
    for (int k = 0; k < sub; ++k)
      for (int g = 0; g < 3; ++g) {
        const double s = (k + kGauss[g]) / sub;
        len += kGaussW[g] * metric.conformal_factor(a + s * (b - a)) * chord / sub;
      }
  }
  return len;
}

}  // namespace

FluxResult flux(const TriMesh& mesh, const ScalarField& u, const std::vector<Complex>& curve, const Metric& metric,
                GradientMode mode) {
  if (curve.size() < 2) throw DomainError("a curve needs at least two points");
  if (u.size() != mesh.nodes.size()) throw DomainError("field does not match the mesh");
  const PointLocator locator(mesh);
  for (Complex z : curve)
    if (locator.locate(z) < 0) throw DomainError("curve leaves the mesh");
  std::vector<Complex> recovered;
  if (mode == GradientMode::Recovered) recovered = recovered_gradient(mesh, u.values);

  FluxResult out;
  for (size_t i = 0; i + 1 < curve.size(); ++i) {
    const Complex z0 = curve[i];
    const Complex z1 = curve[i + 1];
    const Complex d = z1 - z0;
    const double chord = std::abs(d);
    if (chord == 0.0) continue;
    const Complex normal = Complex(0.0, -1.0) * d / chord;
    const double xmin = std::min(z0.real(), z1.real()), xmax = std::max(z0.real(), z1.real());
    const double ymin = std::min(z0.imag(), z1.imag()), ymax = std::max(z0.imag(), z1.imag());

    std::vector<double> breaks{0.0, 1.0};
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const auto& tri = mesh.triangles[static_cast<size_t>(t)];
      double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
      for (int k : tri) {
        const Complex p = mesh.nodes[static_cast<size_t>(k)];
        bx0 = std::min(bx0, p.real());
        bx1 = std::max(bx1, p.real());
        by0 = std::min(by0, p.imag());
        by1 = std::max(by1, p.imag());
      }
      if (bx1 < xmin - 1e-12 || bx0 > xmax + 1e-12 || by1 < ymin - 1e-12 || by0 > ymax + 1e-12) continue;
      double lo = 0.0, hi = 0.0;
      if (clip(mesh, t, z0, z1, lo, hi)) {
        breaks.push_back(lo);
        breaks.push_back(hi);
      }
    }
    std::sort(breaks.begin(), breaks.end());

    for (size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double sa = breaks[k];
      const double sb = breaks[k + 1];
      if (sb - sa < 1e-13) continue;
      const Complex mid = z0 + 0.5 * (sa + sb) * d;
      const int t = locator.locate(mid, nullptr, 1e-9);
      if (t < 0) throw DomainError("curve leaves the mesh");
      ++out.pieces;
      const Complex qe = mesh.gradient(t, u.values);
      for (int g = 0; g < 3; ++g) {
        const double s = sa + kGauss[g] * (sb - sa);
        const Complex z = z0 + s * d;
        Complex q = qe;
        if (mode == GradientMode::Recovered) {
          const auto bc = barycentric(mesh, t, z);
          const auto& tri = mesh.triangles[static_cast<size_t>(t)];
          q = bc[0] * recovered[static_cast<size_t>(tri[0])] + bc[1] * recovered[static_cast<size_t>(tri[1])] +
              bc[2] * recovered[static_cast<size_t>(tri[2])];
        }
        const double lam = metric.conformal_factor(z);
        const double w = std::sqrt(1.0 + std::norm(q) / (lam * lam));
        const double qn = q.real() * normal.real() + q.imag() * normal.imag();
        out.value += kGaussW[g] * (sb - sa) * chord * qn / w;
      }
    }
  }
  out.length = metric_length(curve, metric, false);
  return out;
}

FluxResult closed_flux(const TriMesh& mesh, const ScalarField& u, const std::vector<Complex>& loop,
                       const Metric& metric) {
  if (loop.size() < 3) throw DomainError("a loop needs at least three points");
  if (u.size() != mesh.nodes.size()) throw DomainError("field does not match the mesh");
  const ElementGeometry geo = element_geometry(mesh, metric);
  const std::vector<double> r = weak_residual(mesh, geo, u.values);
  FluxResult out;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!inside_loop(loop, mesh.nodes[static_cast<size_t>(i)])) continue;
    if (mesh.is_boundary(i)) throw DomainError("loop encloses boundary nodes");
    out.value -= r[static_cast<size_t>(i)];
    ++out.pieces;
  }
  out.length = metric_length(loop, metric, true);
  return out;
}

const char* to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::Holds: return "holds";
    case GapVerdict::Fails: return "fails";
    default: return "inapplicable";
  }
}

GapResult stability_gap(const TriMesh& mesh, const ScalarField& u, const ScalarField& v, double level,
                        const Metric& metric, int max_samples) {
  if (u.size() != mesh.nodes.size() || v.size() != mesh.nodes.size())
    throw DomainError("fields do not match the mesh");
  if (max_samples < 1) throw DomainError("max_samples must be positive");
  std::vector<double> w(u.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = u[i] - v[i] - level;

  std::vector<std::pair<int, Complex>> crossings;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    Complex pts[2];
    int found = 0;
    for (int k = 0; k < 3 && found < 2; ++k) {
      const int a = tri[static_cast<size_t>(k)];
      const int b = tri[static_cast<size_t>((k + 1) % 3)];
      const double wa = w[static_cast<size_t>(a)];
      const double wb = w[static_cast<size_t>(b)];
      if ((wa < 0.0) == (wb < 0.0)) continue;
      const double s = wa / (wa - wb);
      pts[found++] = mesh.nodes[static_cast<size_t>(a)] +
                     s * (mesh.nodes[static_cast<size_t>(b)] - mesh.nodes[static_cast<size_t>(a)]);
    }
    if (found == 2) crossings.emplace_back(t, 0.5 * (pts[0] + pts[1]));
  }

  GapResult out;
  out.min_slack = std::numeric_limits<double>::infinity();
  const size_t m = crossings.size();
  const size_t take = std::min(m, static_cast<size_t>(max_samples));
  for (size_t k = 0; k < take; ++k) {
    const auto& [t, z] = crossings[k * m / take];
    const double lam = metric.conformal_factor(z);
    const Complex pu = mesh.gradient(t, u.values) / lam;
    const Complex pv = mesh.gradient(t, v.values) / lam;
    const Complex diff = pu - pv;
    if (std::abs(diff) < 1e-10) continue;
    const Complex eta = diff / std::abs(diff);
    const double wu = std::sqrt(1.0 + std::norm(pu));
    const double wv = std::sqrt(1.0 + std::norm(pv));
    const Complex x = pu / wu - pv / wv;
    const double lhs = x.real() * eta.real() + x.imag() * eta.imag();
    // N = (-p, 1) / W
    const Complex dn = -pu / wu + pv / wv;
    const double dz = 1.0 / wu - 1.0 / wv;
    const double rhs = 0.25 * (std::norm(dn) + dz * dz);
    out.min_slack = std::min(out.min_slack, lhs - rhs);
    ++out.samples;
  }
  if (out.samples == 0) {
    out.min_slack = 0.0;
    return out;
  }
  out.verdict = out.min_slack >= -1e-12 ? GapVerdict::Holds : GapVerdict::Fails;
  return out;
}

ModulusResult conformal_modulus(const TriMesh* mesh, const ScalarField* u, ChartDisk inner, ChartDisk outer,
                                const Metric& metric, int per_ring, bool swap) {
  if (std::abs(inner.center - outer.center) > 1e-12) throw DomainError("annulus regions must be concentric disks");
  if (!(inner.radius > 0.0) || !(outer.radius > inner.radius))
    throw DomainError("inner region must lie strictly inside the outer one");
  if (std::abs(outer.center) + outer.radius >= 1.0) throw DomainError("annulus leaves the disk");
  if ((mesh == nullptr) != (u == nullptr)) throw DomainError("mesh and field go together");

  const TriMesh ann = annulus_mesh(inner.center, inner.radius, outer.radius, per_ring);
  const size_t nn = ann.nodes.size();
  std::vector<double> h(nn, 0.0);
  if (u) {
    if (u->size() != mesh->nodes.size()) throw DomainError("field does not match the mesh");
    const PointLocator locator(*mesh);
    for (size_t i = 0; i < nn; ++i) {
      if (locator.locate(ann.nodes[i], nullptr, 1e-9) < 0) throw DomainError("annulus leaves the solution domain");
      h[i] = locator.interpolate(u->values, ann.nodes[i]);
    }
  }

  const ElementGeometry geo = element_geometry(ann, metric);
  const size_t nt = ann.triangles.size();
  std::vector<double> qx(nt), qy(nt), kxx(nt), kxy(nt), kyy(nt);
  for (size_t t = 0; t < nt; ++t) {
    const Complex q = ann.gradient(static_cast<int>(t), h);
    qx[t] = q.real();
    qy[t] = q.imag();
  }
  kernels::TriangleBatch batch{nt, qx.data(), qy.data(), geo.area.data(), geo.il0.data(), geo.il1.data(),
                               geo.il2.data()};
  kernels::graph_tensor(batch, kxx.data(), kxy.data(), kyy.data());

  const int inner_tag = ann.tag_id("inner");
  std::vector<double> f(nn, 0.0);
  std::vector<int> dof(nn, -1);
  int nfree = 0;
  for (size_t i = 0; i < nn; ++i) {
    if (ann.node_tag[i] < 0)
      dof[i] = nfree++;
    else
      f[i] = (ann.node_tag[i] == inner_tag) == swap ? 1.0 : 0.0;
  }

  auto local = [&](size_t t, int a, int b) {
    const Complex ga = geo.grad[t][static_cast<size_t>(a)];
    const Complex gb = geo.grad[t][static_cast<size_t>(b)];
    return kxx[t] * ga.real() * gb.real() + kxy[t] * (ga.real() * gb.imag() + ga.imag() * gb.real()) +
           kyy[t] * ga.imag() * gb.imag();
  };

  std::vector<Eigen::Triplet<double>> trip;
  Vec rhs = Vec::Zero(nfree);
  for (size_t t = 0; t < nt; ++t) {
    const auto& tri = ann.triangles[t];
    for (int a = 0; a < 3; ++a) {
      const int ia = dof[static_cast<size_t>(tri[static_cast<size_t>(a)])];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int nb = tri[static_cast<size_t>(b)];
        const double k = local(t, a, b);
        if (dof[static_cast<size_t>(nb)] >= 0)
          trip.emplace_back(ia, dof[static_cast<size_t>(nb)], k);
        else
          rhs[ia] -= k * f[static_cast<size_t>(nb)];
      }
    }
  }
  SpMat s(nfree, nfree);
  s.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(s);
  if (ldlt.info() != Eigen::Success) throw SolverError("capacity system is singular", {});
  const Vec x = ldlt.solve(rhs);
  for (size_t i = 0; i < nn; ++i)
    if (dof[i] >= 0) f[i] = x[dof[i]];

  double energy = 0.0;
  for (size_t t = 0; t < nt; ++t) {
    const auto& tri = ann.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        energy += f[static_cast<size_t>(tri[static_cast<size_t>(a)])] * local(t, a, b) *
                  f[static_cast<size_t>(tri[static_cast<size_t>(b)])];
  }
  if (!(energy > 0.0)) throw SolverError("capacity energy is not positive", {});
  return {1.0 / energy, energy, static_cast<int>(nn)};
}

double c2_difference(const TriMesh& mesh_a, const ScalarField& u_a, const TriMesh& mesh_b, const ScalarField& u_b,
                     ChartDisk k, double h, int grid) {
  if (!(h > 0.0) || grid < 1 || !(k.radius >= 0.0)) throw DomainError("bad C2 sampling parameters");
  const PointLocator la(mesh_a);
  const PointLocator lb(mesh_b);
  auto f = [&](Complex z) { return lb.interpolate(u_b.values, z) - la.interpolate(u_a.values, z); };
  double worst = 0.0;
  for (int j = 0; j <= grid; ++j) {
    const double r = k.radius * j / grid;
    const int count = j == 0 ? 1 : 6 * j;
    for (int m = 0; m < count; ++m) {
      const Complex z = k.center + std::polar(r, kTwoPi * m / count);
      const double f0 = f(z);
      const double fxp = f(z + h), fxm = f(z - h);
      const double fyp = f(z + Complex(0, h)), fym = f(z - Complex(0, h));
      const double fpp = f(z + Complex(h, h)), fmm = f(z - Complex(h, h));
      const double fpm = f(z + Complex(h, -h)), fmp = f(z + Complex(-h, h));
      const double vals[6] = {
          f0,
          (fxp - fxm) / (2 * h),
          (fyp - fym) / (2 * h),
          (fxp - 2 * f0 + fxm) / (h * h),
          (fyp - 2 * f0 + fym) / (h * h),
          (fpp - fpm - fmp + fmm) / (4 * h * h),
      };
      for (double v : vals) worst = std::max(worst, std::abs(v));
    }
  }
  return worst;
}

IdealPolygon exhaustion_extend(const IdealPolygon& d, double t, const Metric& metric) {
  if (d.size() % 2 != 0) throw DomainError("exhaustion needs an even vertex count");
  IdealPolygon cur = d;
  const int pairs = d.size() / 2;
  // Each application inserts four vertices ahead of the next pair.
  for (int p = 0; p < pairs; ++p) cur = extend_and_perturb(cur, 6 * p, t, metric).polygon;
  return cur;
}

namespace {

double max_angle_gap(const std::vector<IdealPoint>& v) {
  double gap = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    gap = std::max(gap, ccw_span(v[i].theta(), v[(i + 1) % v.size()].theta()));
  return gap;
}

double inner_radius_of(const TriMesh& mesh) {
  double r = 1.0;
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary(i)) r = std::min(r, std::abs(mesh.nodes[static_cast<size_t>(i)]));
  return r;
}

}  // namespace

ExhaustionState run_exhaustion(const IdealPolygon& initial, const std::vector<double>& epsilons, const Metric& metric,
                               const SolverConfig& cfg, const ExhaustionOptions& options) {
  for (double e : epsilons)
    if (!(e > 0.0)) throw DomainError("epsilons must be positive");
  if (!(options.t_initial > 0.0) || !(options.k0_radius > 0.0) || !(options.k_step > 0.0))
    throw DomainError("bad exhaustion options");

  ExhaustionState state;
  state.vertices = initial.vertices();
  state.k_radius = options.k0_radius;
  IdealPolygon current = initial;
  PolygonSolution sol = solve_ideal_scherk(current, adaptive_family(current, metric, options.min_gap),
                                           options.truncation, metric, cfg, options.mesh);

  for (size_t n = 0; n < epsilons.size(); ++n) {
    ExhaustionStep step;
    step.index = static_cast<int>(n) + 1;
    step.epsilon = epsilons[n];
    const ChartDisk kn{Complex(0.0, 0.0), state.k_radius};

    std::optional<IdealPolygon> next;
    std::optional<PolygonSolution> next_sol;
    double t = options.t_initial;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      step.t_tried.push_back(t);
      std::optional<IdealPolygon> cand;
      std::optional<PolygonSolution> s;
      try {
        cand = exhaustion_extend(current, t, metric);
        if (!js_feasible(*cand, metric).feasible) {
          step.c2_history.push_back(std::numeric_limits<double>::quiet_NaN());
          continue;
        }
        s = solve_ideal_scherk(*cand, adaptive_family(*cand, metric, options.min_gap), options.truncation, metric,
                               cfg, options.mesh);
      } catch (const std::exception& e) {
        step.note = e.what();
        step.c2_history.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const double c2 = c2_difference(sol.mesh, sol.u, s->mesh, s->u, kn, options.c2_step, options.c2_grid);
      step.c2_history.push_back(c2);
      step.feasible = true;
      step.note.clear();
      step.t = t;
      step.c2 = c2;
      next = std::move(cand);
      next_sol = std::move(s);
      if (c2 < step.epsilon) {
        step.c2_ok = true;
        break;
      }
    }
    if (!next) {
      state.steps.push_back(step);
      break;
    }
    step.vertex_count = next->size();
    step.max_angle_gap = max_angle_gap(next->vertices());
    step.angle_bound = kPi / std::pow(2.0, step.index);
    step.angle_ok = step.max_angle_gap <= step.angle_bound + 1e-12;

    const double cap = inner_radius_of(next_sol->mesh) - options.k_margin;
    double r = state.k_radius;
    double best = 0.0;
    double best_r = r;
    while (r + options.k_step <= cap + 1e-12) {
      r += options.k_step;
      const ModulusResult m = conformal_modulus(&next_sol->mesh, &next_sol->u, kn, {Complex(0.0, 0.0), r}, metric,
                                                options.modulus_per_ring);
      best = m.modulus;
      best_r = r;
      if (m.modulus >= 1.0) break;
    }
    step.k_radius = best_r;
    step.modulus = best;
    step.modulus_ok = best >= 1.0;
    step.modulus_capped = !step.modulus_ok;
    state.steps.push_back(step);

    if (!step.c2_ok) break;
    current = std::move(*next);
    sol = std::move(*next_sol);
    state.vertices = current.vertices();
    state.k_radius = best_r;
  }
  return state;
}

}  // namespace jsg
