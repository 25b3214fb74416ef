#include <cmath>
#include <cstring>

#include "doctest.h"
#include "jsg/errors.hpp"
#include "jsg/solver.hpp"

using namespace jsg;

namespace {

const Metric kH = Metric::hyperbolic(-1.0);

IdealPolygon square() { return IdealPolygon::from_angles({0.0, kPi / 2, kPi, 3 * kPi / 2}); }

// Node whose chart position is `z` up to rounding, or -1.
int node_at(const TriMesh& m, Complex z, double tol = 1e-9) {
  for (int i = 0; i < m.node_count(); ++i)
    if (std::abs(m.nodes[static_cast<size_t>(i)] - z) < tol) return i;
  return -1;
}

// sup over nodes of m with |z - c| <= r of |u - v| (same mesh).
double sup_diff(const TriMesh& m, const ScalarField& u, const ScalarField& v, double r, Complex c = {}) {
  double worst = 0;
  for (int i = 0; i < m.node_count(); ++i)
    if (std::abs(m.nodes[static_cast<size_t>(i)] - c) <= r)
      worst = std::max(worst, std::abs(u[static_cast<size_t>(i)] - v[static_cast<size_t>(i)]));
  return worst;
}

std::vector<double> boundary_data(const TriMesh& m, const std::function<double(Complex)>& f) {
  std::vector<double> bc(m.nodes.size(), 0.0);
  for (int i = 0; i < m.node_count(); ++i)
    if (m.is_boundary(i)) bc[static_cast<size_t>(i)] = f(m.nodes[static_cast<size_t>(i)]);
  return bc;
}

}  // namespace

TEST_CASE("configuration") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.tolerance = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.truncation = -1;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.resolution = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("Dirichlet problem") {
  const TriMesh m = geodesic_disk_mesh({0.1, 0.05}, 2.0, kH);
  const SolverConfig cfg;
  SUBCASE("constant data") {
    const ScalarField u = solve_dirichlet(m, std::vector<double>(m.nodes.size(), 2.5), kH, cfg);
    for (double v : u.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }
  SUBCASE("bounded by the data, small residual") {
    const auto bc = boundary_data(m, [](Complex z) { return 3.0 * std::sin(3.0 * std::arg(z)) + z.real(); });
    SolveReport rep;
    const ScalarField u = solve_dirichlet(m, bc, kH, cfg, &rep);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < m.node_count(); ++i)
      if (m.is_boundary(i)) {
        lo = std::min(lo, bc[static_cast<size_t>(i)]);
        hi = std::max(hi, bc[static_cast<size_t>(i)]);
        CHECK(u[static_cast<size_t>(i)] == bc[static_cast<size_t>(i)]);
      }
    for (double v : u.values) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
    CHECK(rep.residual <= cfg.tolerance);
    const auto r = weak_residual(m, element_geometry(m, kH), u.values);
    for (int i = 0; i < m.node_count(); ++i)
      if (!m.is_boundary(i)) CHECK(std::abs(r[static_cast<size_t>(i)]) <= cfg.tolerance);
    CHECK(rep.history.size() == static_cast<size_t>(rep.iterations) + 1);
  }
  SUBCASE("non-convergence reports its history") {
    SolverConfig tight;
    tight.max_iterations = 1;
    tight.tolerance = 1e-14;
    const auto bc = boundary_data(m, [](Complex z) { return 5.0 * std::sin(std::arg(z)); });
    try {
      solve_dirichlet(m, bc, kH, tight);
      FAIL("expected SolverError");
    } catch (const SolverError& e) {
      CHECK(!e.history().empty());
    }
  }
  SUBCASE("deterministic") {
    const auto bc = boundary_data(m, [](Complex z) { return std::cos(2.0 * std::arg(z)); });
    const ScalarField a = solve_dirichlet(m, bc, kH, cfg), b = solve_dirichlet(m, bc, kH, cfg);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("calibration against the exact barrier") {
  // With d = kappa the barrier is itself minimal, so imposing it on the
  // boundary of a Fermi rectangle must reproduce it inside.
  const FermiChart chart(geodesic_between(IdealPoint(-kPi / 2), IdealPoint(kPi / 2), kH), kH);
  std::vector<double> errors;
  for (int level = 0; level < 4; ++level) {
    const int cells = 8 << level;
    const TriMesh m = fermi_rectangle_mesh(chart, 0.5, 2.5, -1.0, 1.0, cells, cells);
    std::vector<double> bc(m.nodes.size());
    for (size_t i = 0; i < bc.size(); ++i) bc[i] = barrier_height(m.node_param[i], -1.0);
    const ScalarField u = solve_dirichlet(m, bc, kH, SolverConfig{});
    double err = 0;
    for (size_t i = 0; i < bc.size(); ++i) err = std::max(err, std::abs(u[i] - bc[i]));
    errors.push_back(err);
  }
  CHECK(errors[2] <= 1e-3);
  for (size_t k = 1; k < errors.size(); ++k) CHECK(errors[k - 1] / errors[k] >= 3.0);
}

TEST_CASE("flat limit reproduces the catenoid") {
  const Metric flat = Metric::flat();
  const double a = 0.2;
  auto catenoid = [a](Complex z) { return a * std::acosh(std::abs(z) / a); };
  std::vector<double> errors;
  for (int per_ring : {48, 96}) {
    const TriMesh m = annulus_mesh({0, 0}, 0.25, 0.9, per_ring);
    const ScalarField u = solve_dirichlet(m, boundary_data(m, catenoid), flat, SolverConfig{});
    double err = 0;
    for (int i = 0; i < m.node_count(); ++i)
      err = std::max(err, std::abs(u[static_cast<size_t>(i)] - catenoid(m.nodes[static_cast<size_t>(i)])));
    errors.push_back(err);
  }
  CHECK(errors[1] <= 5e-3);
  CHECK(errors[1] < errors[0]);
}

TEST_CASE("Plateau truncations of the half-plane Scherk graph") {
  SolverConfig cfg;
  cfg.resolution = 8;
  const ScherkSequence seq =
      solve_scherk_sequence(geodesic_between(IdealPoint(-kPi / 2), IdealPoint(kPi / 2), kH), {2, 3, 4}, kH, cfg);
  CHECK(seq.nonnegative);
  CHECK(seq.min_value >= 0.0);
  CHECK(seq.monotone);
  CHECK(seq.min_monotone_slack >= -1e-8);
  CHECK(seq.below_barrier);
  CHECK(seq.max_barrier_excess <= 1e-6);
  REQUIRE(seq.cauchy.size() == 2);
  CHECK(seq.cauchy[1] < seq.cauchy[0]);
  CHECK(seq.cauchy_decreasing);
  CHECK_THROWS_AS(solve_scherk_sequence(geodesic_between(IdealPoint(0), IdealPoint(1), kH), {3, 2}, kH, cfg),
                  DomainError);
}

TEST_CASE("ideal Scherk graphs") {
  const IdealPolygon sq = square();
  const HorocycleFamily fam = adaptive_family(sq, kH, 3.0);
  const SolverConfig cfg;
  const PolygonSolution s6 = solve_ideal_scherk(sq, fam, 6.0, kH, cfg);
  REQUIRE(s6.mesh.center >= 0);
  CHECK(s6.u[static_cast<size_t>(s6.mesh.center)] == 0.0);
  CHECK(s6.feasibility.feasible);

  SUBCASE("quarter-turn antisymmetry") {
    int matched = 0;
    double worst = 0;
    for (int i = 0; i < s6.mesh.node_count(); ++i) {
      const int j = node_at(s6.mesh, Complex(0, 1) * s6.mesh.nodes[static_cast<size_t>(i)]);
      if (j < 0) continue;
      ++matched;
      worst = std::max(worst, std::abs(s6.u[static_cast<size_t>(j)] + s6.u[static_cast<size_t>(i)]));
    }
    CHECK(matched == s6.mesh.node_count());
    CHECK(worst <= 1e-6);
  }
  SUBCASE("truncation convergence") {
    const PolygonSolution s4 = solve_ideal_scherk(sq, fam, 4.0, kH, cfg);
    const PolygonSolution s8 = solve_ideal_scherk(sq, fam, 8.0, kH, cfg);
    REQUIRE(s4.mesh.node_count() == s8.mesh.node_count());
    const double d64 = sup_diff(s6.mesh, s6.u, s4.u, 0.2);
    const double d86 = sup_diff(s6.mesh, s8.u, s6.u, 0.2);
    CHECK(d86 < d64);
  }
  SUBCASE("reflection u -> -u with labels swapped") {
    const IdealPolygon swapped = IdealPolygon::from_angles(sq.angles(), SideLabel::B);
    const PolygonSolution r = solve_ideal_scherk(swapped, fam, 6.0, kH, cfg);
    REQUIRE(r.mesh.node_count() == s6.mesh.node_count());
    for (size_t i = 0; i < r.u.size(); ++i) CHECK(std::abs(r.u[i] + s6.u[i]) <= 1e-9);
  }
  SUBCASE("infeasible polygons are refused") {
    const IdealPolygon skew = IdealPolygon::from_angles({0.0, kPi / 2, kPi, 3 * kPi / 2 + 0.3});
    try {
      solve_ideal_scherk(skew, adaptive_family(skew, kH, 3.0), 6.0, kH, cfg);
      FAIL("expected Infeasible");
    } catch (const Infeasible& e) {
      CHECK_FALSE(e.report().condition1_ok);
    }
  }
}

TEST_CASE("mixed boundary data") {
  const auto verts = square().vertices();
  const auto levels = adaptive_family(verts, kH, 3.0).levels;
  const SolverConfig cfg;
  auto zero = [](SurfacePoint) { return 0.0; };

  SUBCASE("opposite infinite sides") {
    const BoundaryPolygon g(verts, {SideData::PlusInfinity, SideData::Finite, SideData::MinusInfinity, SideData::Finite});
    const PolygonSolution s = solve_mixed_boundary(g, {zero, zero, zero, zero}, levels, 5.0, kH, cfg);
    // the half turn swaps the +T and -T sides and preserves the zero sides
    double worst = 0;
    int matched = 0;
    for (int i = 0; i < s.mesh.node_count(); ++i) {
      const Complex z = s.mesh.nodes[static_cast<size_t>(i)];
      const int j = node_at(s.mesh, -z);
      if (j < 0) continue;
      ++matched;
      worst = std::max(worst, std::abs(s.u[static_cast<size_t>(i)] + s.u[static_cast<size_t>(j)]));
    }
    CHECK(matched == s.mesh.node_count());
    CHECK(worst <= 1e-6);
  }
  SUBCASE("all finite zero data") {
    const BoundaryPolygon g(verts, std::vector<SideData>(4, SideData::Finite));
    const PolygonSolution s = solve_mixed_boundary(g, {zero, zero, zero, zero}, levels, 5.0, kH, cfg);
    for (double v : s.u.values) CHECK(std::abs(v) <= 1e-12);
  }
  SUBCASE("raising the data on one side raises u") {
    const BoundaryPolygon g(verts, {SideData::PlusInfinity, SideData::Finite, SideData::MinusInfinity, SideData::Finite});
    auto bump = [](SurfacePoint p) { return 1.0 + p.x * p.x; };
    const PolygonSolution lo = solve_mixed_boundary(g, {zero, zero, zero, zero}, levels, 5.0, kH, cfg);
    const PolygonSolution hi = solve_mixed_boundary(g, {zero, bump, zero, zero}, levels, 5.0, kH, cfg);
    REQUIRE(lo.mesh.node_count() == hi.mesh.node_count());
    for (size_t i = 0; i < lo.u.size(); ++i) CHECK(hi.u[i] - lo.u[i] >= -1e-8);
    CHECK(max_principle_check(lo.u, hi.u, lo.mesh).verdict == OrderVerdict::Holds);
  }
  SUBCASE("failed inequalities are refused") {
    // adjacent +inf and -inf sides with a short finite side between long ones
    const BoundaryPolygon g({IdealPoint(0.0), IdealPoint(3.0), IdealPoint(3.1), IdealPoint(6.0)},
                            {SideData::PlusInfinity, SideData::Finite, SideData::PlusInfinity, SideData::MinusInfinity});
    CHECK_FALSE(mixed_feasible(g, kH).feasible);
    CHECK_THROWS_AS(solve_mixed_boundary(g, {zero, zero, zero, zero},
                                         adaptive_family(g.vertices(), kH, 3.0).levels, 5.0, kH, cfg),
                    Infeasible);
  }
}

TEST_CASE("Dirichlet problem at infinity") {
  const SolverConfig cfg;
  SUBCASE("constant data") {
    for (const Solution& s : solve_dirichlet_at_infinity([](double) { return 3.0; }, {0, 0}, {2, 3}, kH, cfg))
      for (double v : s.u.values) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("odd data gives an odd solution") {
    const auto sols = solve_dirichlet_at_infinity([](double t) { return std::sin(t); }, {0, 0}, {2, 3}, kH, cfg);
    for (const Solution& s : sols) {
      double worst = 0;
      int matched = 0;
      for (int i = 0; i < s.mesh.node_count(); ++i) {
        const int j = node_at(s.mesh, std::conj(s.mesh.nodes[static_cast<size_t>(i)]));
        if (j < 0) continue;
        ++matched;
        worst = std::max(worst, std::abs(s.u[static_cast<size_t>(i)] + s.u[static_cast<size_t>(j)]));
      }
      CHECK(matched == s.mesh.node_count());
      CHECK(worst <= 1e-6);
    }
  }
  SUBCASE("bounded, convergent, boundary values attained") {
    const auto sols = solve_dirichlet_at_infinity([](double t) { return std::cos(t); }, {0, 0}, {2, 4, 6}, kH, cfg);
    for (const Solution& s : sols)
      for (double v : s.u.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
    // nested meshes: compare on the nodes of the smallest disk within chart radius 0.5
    std::vector<double> diffs;
    for (size_t k = 1; k < sols.size(); ++k) {
      const PointLocator loc(sols[k].mesh);
      const PointLocator prev(sols[k - 1].mesh);
      double worst = 0;
      for (const Complex& z : sols[0].mesh.nodes)
        if (std::abs(z) <= 0.5)
          worst = std::max(worst, std::abs(loc.interpolate(sols[k].u.values, z) - prev.interpolate(sols[k - 1].u.values, z)));
      diffs.push_back(worst);
    }
    CHECK(diffs[1] < diffs[0]);
    const PointLocator loc(sols.back().mesh);
    CHECK(std::abs(loc.interpolate(sols.back().u.values, {0.99, 0.0}) - 1.0) <= 0.1);
  }
}

TEST_CASE("maximum principle check") {
  const TriMesh m = geodesic_disk_mesh({0, 0}, 2.0, kH);
  const auto bc = boundary_data(m, [](Complex z) { return std::sin(std::arg(z)); });
  const ScalarField u = solve_dirichlet(m, bc, kH, SolverConfig{});
  ScalarField up = u;
  for (double& v : up.values) v += 1.0;
  CHECK(max_principle_check(u, up, m).verdict == OrderVerdict::Holds);
  CHECK(max_principle_check(u, u, m).verdict == OrderVerdict::Holds);
  CHECK(max_principle_check(up, u, m).verdict == OrderVerdict::Inapplicable);

  // raised data on the upper half of the boundary
  const auto bc2 = boundary_data(m, [](Complex z) { return std::sin(std::arg(z)) + (z.imag() > 0 ? 0.5 : 0.0); });
  const ScalarField v = solve_dirichlet(m, bc2, kH, SolverConfig{});
  const OrderCheck c = max_principle_check(u, v, m);
  CHECK(c.verdict == OrderVerdict::Holds);
  CHECK(c.min_slack >= 0.0);
  // translation invariance: the shifted data gives the shifted solution
  const ScalarField w = solve_dirichlet(m, up.values, kH, SolverConfig{});
  for (size_t i = 0; i < w.size(); ++i) CHECK(w[i] == doctest::Approx(up[i]).epsilon(1e-9));
}
