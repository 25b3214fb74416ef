// Command-line front end: feasibility, solve and diagnose from a JSON config.
//
// Exit codes: 0 success, 1 error, 2 valid run with a negative verdict.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "jsg/diagnostics.hpp"
#include "jsg/errors.hpp"
#include "jsg/io.hpp"

using namespace jsg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNegative = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Run {
  json cfg;
  fs::path out;
  bool force = false;
  OutputHeader header;
  Metric metric = Metric::hyperbolic(-1.0);
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for \"") + key + "\"");
  }
}

SolverConfig solver_config(const json& c) {
  SolverConfig s;
  s.tolerance = get(c, "tolerance", s.tolerance);
  s.max_iterations = get(c, "max_iterations", s.max_iterations);
  s.max_halvings = get(c, "max_halvings", s.max_halvings);
  s.resolution = get(c, "resolution", s.resolution);
  s.truncation = get(c, "truncation", s.truncation);
  s.validate();
  return s;
}

PolygonMeshOptions mesh_options(const json& c) {
  PolygonMeshOptions m;
  if (!c.contains("mesh")) return m;
  const json& j = c.at("mesh");
  m.rings = get(j, "rings", m.rings);
  m.sectors = get(j, "sectors", m.sectors);
  m.core_blend = get(j, "core_blend", m.core_blend);
  return m;
}

IdealPolygon polygon(const json& c) {
  if (!c.contains("polygon")) throw ConfigError("config needs a \"polygon\"");
  const json& p = c.at("polygon");
  const auto angles = get<std::vector<double>>(p, "angles", {});
  const std::string first = get<std::string>(p, "first", "A");
  if (first != "A" && first != "B") throw ConfigError("polygon.first must be A or B");
  return IdealPolygon::from_angles(angles, first == "A" ? SideLabel::A : SideLabel::B);
}

HorocycleFamily family(const json& c, const std::vector<IdealPoint>& vertices, const Metric& metric) {
  if (c.contains("levels")) {
    HorocycleFamily f{get<std::vector<double>>(c, "levels", {})};
    if (f.levels.size() != vertices.size()) throw ConfigError("one level per vertex required");
    return f;
  }
  return adaptive_family(vertices, metric, get(c, "min_gap", 3.0));
}

std::vector<Complex> points(const json& j) {
  std::vector<Complex> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("points are [x, y] pairs");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

Complex point(const json& j, const char* key, Complex fallback) {
  if (!j.contains(key)) return fallback;
  return points(json::array({j.at(key)})).front();
}

json report_json(const FeasibilityReport& r) {
  json inscribed = json::array();
  for (const auto& res : r.condition2_results) {
    auto ineq = [](const InequalityResult& x) {
      return json{{"verdict", to_string(x.verdict)}, {"value", std::isnan(x.value) ? json(nullptr) : json(x.value)}};
    };
    inscribed.push_back({{"vertices", res.polygon.vertices}, {"a", ineq(res.result.a)}, {"b", ineq(res.result.b)}});
  }
  json out{{"condition1_value", r.condition1_value},
           {"condition1_ok", r.condition1_ok},
           {"condition2_ok", r.condition2_ok},
           {"feasible", r.feasible},
           {"inscribed", inscribed}};
  if (!r.condition1_ok)
    out["violation"] = "condition 1: a(G) - b(G) does not vanish";
  else if (const auto* v = r.first_violation())
    out["violation"] = "condition 2 fails on inscribed polygon " + json(v->polygon.vertices).dump();
  return out;
}

json solve_report(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"newton_steps", r.newton_steps},
          {"picard_steps", r.picard_steps},
          {"residual", r.residual},
          {"history", r.history}};
}

void write_solution(const Run& run, const std::string& stem, const TriMesh& mesh, const ScalarField& u) {
  write_field_csv(run.out / (stem + ".csv"), run.header, mesh, u);
  write_json(run.out / (stem + "_mesh.json"), run.header, mesh_json(mesh));
}

int cmd_feasibility(Run& run) {
  const FeasibilityReport r = js_feasible(polygon(run.cfg), run.metric);
  write_json(run.out / "feasibility.json", run.header, report_json(r));
  std::cout << (r.feasible ? "feasible" : "infeasible");
  if (!r.condition1_ok)
    std::cout << " (condition 1: a - b = " << r.condition1_value << ")";
  else if (!r.condition2_ok)
    std::cout << " (condition 2)";
  std::cout << "\n";
  return r.feasible ? kOk : kNegative;
}

std::function<double(double)> boundary_function(const json& c) {
  const json phi = c.value("phi", json{{"type", "constant"}, {"value", 0.0}});
  const std::string type = get<std::string>(phi, "type", "constant");
  const double a = get(phi, "amplitude", 1.0), k = get(phi, "frequency", 1.0), v = get(phi, "value", 0.0);
  if (type == "constant") return [v](double) { return v; };
  if (type == "sin") return [a, k](double t) { return a * std::sin(k * t); };
  if (type == "cos") return [a, k](double t) { return a * std::cos(k * t); };
  throw ConfigError("phi.type must be constant, sin or cos");
}

SideData side_data(const std::string& s) {
  if (s == "+inf") return SideData::PlusInfinity;
  if (s == "-inf") return SideData::MinusInfinity;
  if (s == "finite") return SideData::Finite;
  throw ConfigError("side data must be +inf, -inf or finite");
}

int cmd_solve(Run& run) {
  const json& c = run.cfg;
  const SolverConfig cfg = solver_config(c);
  const std::string mode = get<std::string>(c, "mode", "ideal");
  json summary{{"mode", mode}};
  int code = kOk;
  if (mode == "ideal") {
    const IdealPolygon g = polygon(c);
    const PolygonSolution s =
        solve_ideal_scherk(g, family(c, g.vertices(), run.metric), cfg.truncation, run.metric, cfg, mesh_options(c),
                           run.force);
    write_solution(run, "field", s.mesh, s.u);
    summary["feasible"] = s.feasibility.feasible;
    summary["solver"] = solve_report(s.report);
    summary["nodes"] = s.mesh.node_count();
  } else if (mode == "mixed") {
    if (!c.contains("polygon")) throw ConfigError("config needs a \"polygon\"");
    const auto angles = get<std::vector<double>>(c.at("polygon"), "angles", {});
    const auto sides = get<std::vector<std::string>>(c, "sides", {});
    if (sides.size() != angles.size()) throw ConfigError("one side entry per vertex required");
    const auto values = get<std::vector<double>>(c, "finite_values", std::vector<double>(sides.size(), 0.0));
    if (values.size() != sides.size()) throw ConfigError("one finite value per side required");
    std::vector<IdealPoint> verts;
    std::vector<SideData> data;
    std::vector<SideFunction> fns;
    for (size_t i = 0; i < sides.size(); ++i) {
      verts.emplace_back(angles[i]);
      data.push_back(side_data(sides[i]));
      const double v = values[i];
      fns.push_back([v](SurfacePoint) { return v; });
    }
    const BoundaryPolygon g(verts, data);
    const PolygonSolution s = solve_mixed_boundary(g, fns, family(c, verts, run.metric).levels, cfg.truncation,
                                                   run.metric, cfg, mesh_options(c), run.force);
    write_solution(run, "field", s.mesh, s.u);
    summary["feasible"] = s.feasibility.feasible;
    summary["solver"] = solve_report(s.report);
    summary["nodes"] = s.mesh.node_count();
  } else if (mode == "halfplane") {
    const auto ends = get<std::vector<double>>(c, "geodesic", {-kPi / 2, kPi / 2});
    if (ends.size() != 2) throw ConfigError("geodesic takes two ideal angles");
    const auto radii = get<std::vector<double>>(c, "radii", {2, 3, 4});
    const ScherkSequence seq =
        solve_scherk_sequence(geodesic_between(IdealPoint(ends[0]), IdealPoint(ends[1]), run.metric), radii,
                              run.metric, cfg);
    json runs = json::array();
    for (size_t k = 0; k < radii.size(); ++k) {
      std::ostringstream stem;
      stem << "field_n" << k;
      write_solution(run, stem.str(), seq.solutions[k].mesh, seq.solutions[k].u);
      runs.push_back({{"n", radii[k]}, {"file", stem.str() + ".csv"}, {"solver", solve_report(seq.solutions[k].report)}});
    }
    auto flag = [](bool b) { return b ? "pass" : "fail"; };
    summary["runs"] = runs;
    summary["min_value"] = seq.min_value;
    summary["max_barrier_excess"] = seq.max_barrier_excess;
    summary["min_monotone_slack"] = seq.min_monotone_slack;
    summary["cauchy"] = seq.cauchy;
    summary["nonnegative"] = flag(seq.nonnegative);
    summary["below_barrier"] = flag(seq.below_barrier);
    summary["monotone"] = flag(seq.monotone);
    summary["cauchy_decreasing"] = flag(seq.cauchy_decreasing);
    if (!(seq.nonnegative && seq.below_barrier && seq.monotone)) code = kNegative;
  } else if (mode == "infinity") {
    const auto radii = get<std::vector<double>>(c, "radii", {2, 3, 4});
    const Complex p0 = point(c, "center", {0, 0});
    const auto sols = solve_dirichlet_at_infinity(boundary_function(c), SurfacePoint::from(p0), radii, run.metric, cfg);
    json runs = json::array();
    for (size_t k = 0; k < sols.size(); ++k) {
      std::ostringstream stem;
      stem << "field_n" << k;
      write_solution(run, stem.str(), sols[k].mesh, sols[k].u);
      runs.push_back({{"n", radii[k]}, {"file", stem.str() + ".csv"}, {"solver", solve_report(sols[k].report)}});
    }
    summary["runs"] = runs;
  } else {
    throw ConfigError("mode must be ideal, mixed, halfplane or infinity");
  }
  write_json(run.out / "summary.json", run.header, summary);
  std::cout << "solve " << mode << ": wrote " << run.out.string() << "\n";
  return code;
}

GradientMode gradient_mode(const json& j) {
  const std::string g = get<std::string>(j, "gradient", "element");
  if (g == "element") return GradientMode::Element;
  if (g == "recovered") return GradientMode::Recovered;
  throw ConfigError("gradient must be element or recovered");
}

int diagnose_flux(Run& run) {
  const json& c = run.cfg;
  const json f = c.value("flux", json::object());
  const IdealPolygon g = polygon(c);
  const SolverConfig cfg = solver_config(c);
  const PolygonSolution s = solve_ideal_scherk(g, family(c, g.vertices(), run.metric), cfg.truncation, run.metric, cfg,
                                               mesh_options(c), run.force);
  json body;
  int code = kOk;
  std::vector<std::vector<double>> rows;
  if (f.contains("curve")) {
    const FluxResult r = flux(s.mesh, s.u, points(f.at("curve")), run.metric, gradient_mode(f));
    body = {{"kind", "curve"}, {"value", r.value}, {"length", r.length}, {"pieces", r.pieces}};
    rows.push_back({r.value, r.length});
  } else {
    const Complex center = point(f, "center", {0, 0});
    const double radius = get(f, "radius", 0.2);
    const int n = get(f, "points", 64);
    std::vector<Complex> loop;
    for (int k = 0; k < n; ++k) loop.push_back(center + std::polar(radius, kTwoPi * k / n));
    const FluxResult r = closed_flux(s.mesh, s.u, loop, run.metric);
    const double ratio = std::abs(r.value) / r.length;
    body = {{"kind", "loop"}, {"value", r.value}, {"length", r.length}, {"ratio", ratio},
            {"divergence_free", ratio <= 1e-6}};
    rows.push_back({r.value, r.length});
    if (ratio > 1e-6) code = kNegative;
  }
  write_json(run.out / "flux.json", run.header, body);
  write_table_csv(run.out / "flux.csv", run.header, {"value", "length"}, rows);
  std::cout << "flux " << body["value"].get<double>() << " over length " << body["length"].get<double>() << "\n";
  return code;
}

int diagnose_modulus(Run& run) {
  const json& c = run.cfg;
  const json m = c.value("modulus", json::object());
  const Complex center = point(m, "center", {0, 0});
  const ChartDisk inner{center, get(m, "inner", 0.3)};
  const ChartDisk outer{center, get(m, "outer", 0.3 * std::exp(1.0))};
  const int per_ring = get(m, "per_ring", 192);
  const bool flat = get(m, "flat", true);
  json body{{"inner", inner.radius}, {"outer", outer.radius}, {"flat", flat}};
  ModulusResult r;
  if (flat) {
    r = conformal_modulus(nullptr, nullptr, inner, outer, Metric::flat(), per_ring);
    const double exact = std::log(outer.radius / inner.radius) / kTwoPi;
    body["exact"] = exact;
    body["error"] = std::abs(r.modulus - exact);
  } else {
    const IdealPolygon g = polygon(c);
    const SolverConfig cfg = solver_config(c);
    const PolygonSolution s = solve_ideal_scherk(g, family(c, g.vertices(), run.metric), cfg.truncation, run.metric,
                                                 cfg, mesh_options(c), run.force);
    r = conformal_modulus(&s.mesh, &s.u, inner, outer, run.metric, per_ring);
  }
  body["modulus"] = r.modulus;
  body["energy"] = r.energy;
  body["nodes"] = r.nodes;
  write_json(run.out / "modulus.json", run.header, body);
  write_table_csv(run.out / "modulus.csv", run.header, {"inner", "outer", "modulus"},
                  {{inner.radius, outer.radius, r.modulus}});
  std::cout << "modulus " << r.modulus << "\n";
  return kOk;
}

int diagnose_exhaustion(Run& run) {
  const json& c = run.cfg;
  const json e = c.value("exhaustion", json::object());
  ExhaustionOptions opt;
  opt.truncation = get(e, "truncation", opt.truncation);
  opt.min_gap = get(e, "min_gap", opt.min_gap);
  opt.t_initial = get(e, "t_initial", opt.t_initial);
  opt.max_halvings = get(e, "max_halvings", opt.max_halvings);
  opt.k0_radius = get(e, "k0_radius", opt.k0_radius);
  opt.k_step = get(e, "k_step", opt.k_step);
  opt.k_margin = get(e, "k_margin", opt.k_margin);
  opt.modulus_per_ring = get(e, "modulus_per_ring", opt.modulus_per_ring);
  opt.c2_step = get(e, "c2_step", opt.c2_step);
  opt.c2_grid = get(e, "c2_grid", opt.c2_grid);
  opt.mesh = c.contains("mesh") ? mesh_options(c) : opt.mesh;
  const auto eps = get<std::vector<double>>(e, "epsilons", {1.0});
  const ExhaustionState st = run_exhaustion(polygon(c), eps, run.metric, solver_config(c), opt);

  json steps = json::array();
  bool all_ok = st.steps.size() == eps.size();
  for (const auto& s : st.steps) {
    json c2h = json::array();
    for (double v : s.c2_history) c2h.push_back(std::isnan(v) ? json(nullptr) : json(v));
    steps.push_back({{"index", s.index},
                     {"vertex_count", s.vertex_count},
                     {"feasibility", s.feasible},
                     {"t", s.t},
                     {"t_tried", s.t_tried},
                     {"c2_history", c2h},
                     {"c2", s.c2},
                     {"epsilon", s.epsilon},
                     {"c2_ok", s.c2_ok},
                     {"max_angle_gap", s.max_angle_gap},
                     {"angle_bound", s.angle_bound},
                     {"angle_ok", s.angle_ok},
                     {"k_radius", s.k_radius},
                     {"modulus", s.modulus},
                     {"modulus_ok", s.modulus_ok},
                     {"modulus_capped", s.modulus_capped},
                     {"note", s.note}});
    all_ok = all_ok && s.feasible && s.c2_ok && s.angle_ok;
  }
  json verts = json::array();
  for (const auto& v : st.vertices) verts.push_back(v.theta());
  write_json(run.out / "exhaustion.json", run.header,
             {{"steps", steps}, {"vertices", verts}, {"k_radius", st.k_radius}, {"epsilons", eps}});
  std::cout << "exhaustion: " << st.steps.size() << " step(s), " << (all_ok ? "all checks met" : "incomplete") << "\n";
  return all_ok ? kOk : kNegative;
}

int cmd_diagnose(Run& run) {
  const std::string what = get<std::string>(run.cfg, "diagnostic", "");
  if (what == "flux") return diagnose_flux(run);
  if (what == "modulus") return diagnose_modulus(run);
  if (what == "exhaustion") return diagnose_exhaustion(run);
  throw ConfigError("diagnostic must be flux, modulus or exhaustion");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal graphs with infinite boundary values on hyperbolic ideal polygons"};
  app.set_version_flag("--version", std::string("jsg ") + kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool force = false;
  long seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--force", force, "solve even when the existence conditions fail");
    sub->add_option("--seed", seed, "reserved; every algorithm is deterministic");
  };
  CLI::App* feas = app.add_subcommand("feasibility", "check the existence conditions of a polygon");
  CLI::App* solve = app.add_subcommand("solve", "solve and write field, mesh and summary files");
  CLI::App* diag = app.add_subcommand("diagnose", "flux, modulus or exhaustion reports");
  for (CLI::App* s : {feas, solve, diag}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    Run run;
    run.cfg = load_config(config_path);
    if (!run.cfg.is_object()) throw ConfigError("config must be a JSON object");
    run.out = out_dir;
    run.force = force;
    fs::create_directories(run.out);
    run.metric = Metric::hyperbolic(get(run.cfg, "kappa", -1.0));
    run.header.config_hash = config_hash(run.cfg.dump());
    if (feas->parsed()) {
      run.header.command = "feasibility";
      return cmd_feasibility(run);
    }
    if (solve->parsed()) {
      run.header.command = "solve";
      try {
        return cmd_solve(run);
      } catch (const SolverError& e) {
        write_json(run.out / "residuals.json", run.header, {{"error", e.what()}, {"history", e.history()}});
        throw;
      }
    }
    run.header.command = "diagnose";
    return cmd_diagnose(run);
  } catch (const Infeasible& e) {
    std::cerr << "jsg: " << e.what() << " (use --force to solve anyway)\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "jsg: " << e.what() << "\n";
    return kError;
  }
}
