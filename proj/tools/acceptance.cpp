// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "jsg/diagnostics.hpp"

using namespace jsg;

namespace {

const Metric kH = Metric::hyperbolic(-1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

IdealPolygon square() { return IdealPolygon::from_angles({0.0, kPi / 2, kPi, 3 * kPi / 2}); }

Outcome barrier_exactness() {
  double worst = 0;
  for (double d : {-0.5, -1.0, -2.0}) {
    const ProfileFunction h = scherk_profile(d), G = comparison_G(d);
    for (int k = 0; k <= 40; ++k) {
      const double s = 0.1 + (8.0 - 0.1) * k / 40.0;
      worst = std::max(worst, std::abs(scherk_ode_residual(h, G, s)));
    }
  }
  return {worst <= 1e-8, fmt("max |residual| %.3g over 3 x 41 samples", worst)};
}

Outcome calibration() {
  const FermiChart chart(geodesic_between(IdealPoint(-kPi / 2), IdealPoint(kPi / 2), kH), kH);
  std::vector<double> err;
  for (int level = 0; level < 4; ++level) {
    const int cells = 8 << level;
    const TriMesh m = fermi_rectangle_mesh(chart, 0.5, 2.5, -1.0, 1.0, cells, cells);
    std::vector<double> bc(m.nodes.size());
    for (size_t i = 0; i < bc.size(); ++i) bc[i] = barrier_height(m.node_param[i], -1.0);
    const ScalarField u = solve_dirichlet(m, bc, kH, SolverConfig{});
    double e = 0;
    for (size_t i = 0; i < bc.size(); ++i) e = std::max(e, std::abs(u[i] - bc[i]));
    err.push_back(e);
  }
  double min_ratio = 1e300;
  for (size_t k = 1; k < err.size(); ++k) min_ratio = std::min(min_ratio, err[k - 1] / err[k]);
  return {err[2] <= 1e-3 && min_ratio >= 3.0,
          fmt("errors %.2e %.2e %.2e %.2e, min ratio %.2f", err[0], err[1], err[2], err[3], min_ratio)};
}

Outcome plateau_sequence() {
  SolverConfig cfg;
  cfg.resolution = 8;
  const ScherkSequence seq =
      solve_scherk_sequence(geodesic_between(IdealPoint(-kPi / 2), IdealPoint(kPi / 2), kH), {2, 3, 4}, kH, cfg);
  const bool ok = seq.min_value >= 0.0 && seq.max_barrier_excess <= 1e-6 && seq.min_monotone_slack >= -1e-8;
  return {ok, fmt("min u %.3g, max excess over barrier %.3g, min monotone slack %.3g", seq.min_value,
                  seq.max_barrier_excess, seq.min_monotone_slack)};
}

// Verdict read off five uniform families: growth of at least one per level
// means divergence, a constant margin is the invariant value.
bool scan_verdict(double prev, double next, Verdict* out) {
  if (next - prev >= 1.0) {
    *out = Verdict::DivergentSatisfied;
    return true;
  }
  if (std::abs(next - prev) <= 1e-9) {
    *out = next > kCondition2Margin ? Verdict::InvariantSatisfied : Verdict::Violated;
    return true;
  }
  return false;
}

Outcome checker() {
  const IdealPolygon skewed = IdealPolygon::from_angles({0.0, 0.5, kPi, 3 * kPi / 2});
  const FeasibilityReport sq = js_feasible(square(), kH);
  const FeasibilityReport sk = js_feasible(skewed, kH);
  bool ok = sq.feasible && !sk.feasible && !sk.condition1_ok;

  const std::vector<IdealPolygon> polys{
      square(), skewed, IdealPolygon::from_angles({0.0, 1.2, 1.9, 4.0}),
      IdealPolygon::from_angles({0.0, kPi / 3, 2 * kPi / 3, kPi, 4 * kPi / 3, 5 * kPi / 3}),
      IdealPolygon::from_angles({0.0, 1.0, 2.1, 3.2, 4.2, 5.3}),
      IdealPolygon::from_angles({0.0, 0.3, 2.0, 2.2, 4.0, 4.4}, SideLabel::B)};
  int compared = 0, disagree = 0;
  for (const IdealPolygon& g : polys) {
    for (const auto& p : enumerate_inscribed(g)) {
      const Condition2Result r = condition2_check(p, g, kH);
      std::vector<std::pair<double, double>> scan;
      for (int k = 1; k <= 5; ++k)
        scan.push_back(condition2_margins(p, g, HorocycleFamily::uniform(g.size(), k), kH));
      for (size_t k = 1; k < scan.size(); ++k) {
        Verdict va = Verdict::Violated, vb = Verdict::Violated;
        const bool fa = scan_verdict(scan[k - 1].first, scan[k].first, &va);
        const bool fb = scan_verdict(scan[k - 1].second, scan[k].second, &vb);
        ++compared;
        if (!fa || !fb || va != r.a.verdict || vb != r.b.verdict) ++disagree;
      }
    }
  }
  ok = ok && disagree == 0;
  return {ok, fmt("square %s, skewed %s (a-b = %.4f), %d/%d scan comparisons agree", sq.feasible ? "feasible" : "infeasible",
                  sk.feasible ? "feasible" : "infeasible", sk.condition1_value, compared - disagree, compared)};
}

Outcome constructions() {
  const IdealPoint x(kPi / 2), y(3 * kPi / 2);
  const double w = fourth_vertex(x, y, IdealPoint(0.0), kH).theta();
  const Horocycle hx{x, 1.0}, hy{y, 1.0};
  bool monotone = true;
  double prev = 1e300;
  for (int k = 1; k <= 20; ++k) {
    const double v = L_function(x, y, IdealPoint(kPi / 2 + kPi * k / 21.0), hx, hy, kH);
    monotone = monotone && v < prev;
    prev = v;
  }
  const ExtendResult e1 = extend_and_perturb(square(), 0, 0.05, kH);
  const ExtendResult e2 = extend_and_perturb(e1.polygon, 6, 0.05, kH);
  const double res = std::max({e1.residual_first, e1.residual_second, e2.residual_first, e2.residual_second});
  const bool feasible = e2.polygon.size() == 12 && js_feasible(e2.polygon, kH).feasible;
  const bool ok = std::abs(w - kPi) <= 1e-9 && monotone && res <= 1e-10 && feasible;
  return {ok, fmt("fourth vertex - pi = %.2e, L %s on 20 samples, %d-gon %s, max residual %.2e", w - kPi,
                  monotone ? "strictly monotone" : "not monotone", e2.polygon.size(),
                  feasible ? "feasible" : "infeasible", res)};
}

// Boundary segments of one tag chained into a polyline.
std::vector<Complex> tagged_polyline(const TriMesh& m, const std::string& tag) {
  const int id = m.tag_id(tag);
  std::map<int, int> next, indegree;
  for (const auto& s : m.segments)
    if (s.tag == id) {
      next[s.a] = s.b;
      ++indegree[s.b];
    }
  int start = -1;
  for (const auto& [a, b] : next)
    if (!indegree.count(a)) start = a;
  std::vector<Complex> out{m.nodes[static_cast<size_t>(start)]};
  for (auto it = next.find(start); it != next.end(); it = next.find(it->second))
    out.push_back(m.nodes[static_cast<size_t>(it->second)]);
  return out;
}

Outcome flux_identities() {
  const IdealPolygon sq = square();
  const HorocycleFamily fam = adaptive_family(sq, kH, 3.0);
  const PolygonSolution s6 = solve_ideal_scherk(sq, fam, 6.0, kH, SolverConfig{});
  double loop_ratio = 0;
  for (double r : {0.1, 0.3}) {
    std::vector<Complex> loop;
    for (int k = 0; k < 64; ++k) loop.push_back(std::polar(r, kTwoPi * k / 64));
    const FluxResult f = closed_flux(s6.mesh, s6.u, loop, kH);
    loop_ratio = std::max(loop_ratio, std::abs(f.value) / f.length);
  }

  const FermiChart chart(geodesic_between(IdealPoint(-kPi / 2), IdealPoint(kPi / 2), kH), kH);
  const TriMesh m = fermi_rectangle_mesh(chart, 0.5, 2.5, -1.0, 1.0, 64, 64);
  std::vector<double> bc(m.nodes.size());
  for (size_t i = 0; i < bc.size(); ++i) bc[i] = barrier_height(m.node_param[i], -1.0);
  const ScalarField h = solve_dirichlet(m, bc, kH, SolverConfig{});
  double barrier_err = 0;
  for (double s0 : {1.0, 1.5}) {
    std::vector<Complex> curve;
    for (int k = 0; k <= 40; ++k) curve.push_back(chart.point(s0, -0.5 + k / 40.0).z());
    barrier_err = std::max(barrier_err, std::abs(flux(m, h, curve, kH, GradientMode::Recovered).value - 1.0));
  }

  const PolygonSolution s8 = solve_ideal_scherk(sq, fam, 8.0, kH, SolverConfig{});
  double side_ratio = 1e300;
  for (int i = 0; i < sq.size(); ++i) {
    if (sq.label(i) != SideLabel::A) continue;
    const FluxResult f = flux(s8.mesh, s8.u, tagged_polyline(s8.mesh, "side" + std::to_string(i)), kH);
    side_ratio = std::min(side_ratio, f.value / f.length);
  }
  const bool ok = loop_ratio <= 1e-6 && barrier_err <= 1e-3 && side_ratio >= 0.95;
  return {ok, fmt("closed loop |F|/length %.2e, barrier |F - 1| %.2e, +T side F/length %.4f", loop_ratio, barrier_err,
                  side_ratio)};
}

Outcome max_principle() {
  // Data pairs f <= f + g with g >= 0 on geodesic disks of two radii.
  const std::vector<std::function<double(double)>> base{
      [](double t) { return std::sin(t); }, [](double t) { return 2.0 * std::cos(2 * t); },
      [](double t) { return t * (kTwoPi - t) / 10.0; }, [](double) { return -1.0; },
      [](double t) { return std::tanh(3 * std::sin(3 * t)); }};
  const std::vector<std::function<double(double)>> bump{
      [](double) { return 0.25; }, [](double t) { return std::max(0.0, std::sin(t)); },
      [](double t) { return 0.5 * (1 + std::cos(t)); }, [](double t) { return t < kPi ? 1.0 : 0.0; },
      [](double t) { return 1e-3 * t; }};
  int pairs = 0, held = 0;
  double min_slack = 1e300;
  for (double radius : {2.0, 3.0}) {
    const TriMesh m = geodesic_disk_mesh({0, 0}, radius, kH);
    for (size_t k = 0; k < base.size(); ++k) {
      std::vector<double> lo(m.nodes.size(), 0.0), hi(m.nodes.size(), 0.0);
      for (int i = 0; i < m.node_count(); ++i) {
        if (!m.is_boundary(i)) continue;
        double t = std::arg(m.nodes[static_cast<size_t>(i)]);
        if (t < 0) t += kTwoPi;
        lo[static_cast<size_t>(i)] = base[k](t);
        hi[static_cast<size_t>(i)] = base[k](t) + bump[k](t);
      }
      const ScalarField u = solve_dirichlet(m, lo, kH, SolverConfig{});
      const ScalarField v = solve_dirichlet(m, hi, kH, SolverConfig{});
      const OrderCheck c = max_principle_check(u, v, m);
      ++pairs;
      if (c.verdict == OrderVerdict::Holds && c.min_slack >= -1e-8) ++held;
      min_slack = std::min(min_slack, c.min_slack);
    }
  }
  return {held == pairs && pairs == 10, fmt("%d/%d pairs ordered, min slack %.3g", held, pairs, min_slack)};
}

Outcome dirichlet_at_infinity() {
  const SolverConfig cfg;
  double const_err = 0;
  for (double c : {3.0, -1.5})
    for (const Solution& s : solve_dirichlet_at_infinity([c](double) { return c; }, {0, 0}, {2, 3}, kH, cfg))
      for (double v : s.u.values) const_err = std::max(const_err, std::abs(v - c));

  auto phi = [](double t) { return std::sin(t); };
  const auto sols = solve_dirichlet_at_infinity(phi, {0, 0}, {2, 4, 6}, kH, cfg);
  double odd = 0;
  for (const Solution& s : sols) {
    const PointLocator loc(s.mesh);
    for (const Complex& z : s.mesh.nodes)
      odd = std::max(odd, std::abs(loc.interpolate(s.u.values, z) + loc.interpolate(s.u.values, std::conj(z))));
  }
  const Solution& fine = sols.back();
  const PointLocator loc(fine.mesh);
  double ray = 0;
  for (int k = 0; k < 8; ++k) {
    const double t = kTwoPi * (k + 0.5) / 8;
    ray = std::max(ray, std::abs(loc.interpolate(fine.u.values, std::polar(0.99, t)) - phi(t)));
  }
  const bool ok = const_err <= 1e-8 && odd <= 1e-6 && ray <= 0.1;
  return {ok, fmt("constant data error %.2e, reflection defect %.2e, max ray deviation at |z| = 0.99 %.4f", const_err,
                  odd, ray)};
}

Outcome exhaustion() {
  const ExhaustionState st = run_exhaustion(square(), {1.0}, kH, SolverConfig{});
  if (st.steps.size() != 1) return {false, "no step recorded"};
  const ExhaustionStep& s = st.steps[0];
  const bool ok = s.feasible && s.vertex_count == 12 && s.max_angle_gap <= kPi / 2 + 1e-12 && s.c2_ok &&
                  (s.modulus_ok || s.modulus_capped);
  return {ok, fmt("%d-gon %s, max angle gap %.4f, C2 difference %.3g < %.3g at t = %.4g, modulus %.3f%s", s.vertex_count,
                  s.feasible ? "feasible" : "infeasible", s.max_angle_gap, s.c2, s.epsilon, s.t, s.modulus,
                  s.modulus_capped ? " (capped)" : "")};
}

Outcome modulus_self_test() {
  const Metric flat = Metric::flat();
  double worst = 0;
  for (auto [r0, r1] : {std::pair{0.3, 0.3 * std::exp(1.0)}, std::pair{0.0015, 0.0015 * std::exp(kTwoPi)}}) {
    const double m = conformal_modulus(nullptr, nullptr, {{}, r0}, {{}, r1}, flat).modulus;
    worst = std::max(worst, std::abs(m - std::log(r1 / r0) / kTwoPi));
  }
  return {worst <= 1e-3, fmt("max |modulus - log(R/r)/2pi| %.2e over two ratios", worst)};
}

struct Criterion {
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"barrier ODE exactness", 1, barrier_exactness},
      {"solver calibration", 120, calibration},
      {"Plateau truncations", 180, plateau_sequence},
      {"existence checker", 10, checker},
      {"vertex constructions", 30, constructions},
      {"flux identities", 60, flux_identities},
      {"maximum principle", 120, max_principle},
      {"Dirichlet problem at infinity", 180, dirichlet_at_infinity},
      {"exhaustion step", 600, exhaustion},
      {"modulus self-test", 30, modulus_self_test},
  };
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_s;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s (%.2f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
