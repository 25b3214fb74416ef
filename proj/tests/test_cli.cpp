#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "jsg_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Runs `jsg <command> --config <name>.json --out <out>`; returns the exit status.
int jsg(const std::string& command, const std::string& name, const json& cfg, const std::string& out,
        const std::string& extra = "") {
  const fs::path config = workdir() / (name + ".json");
  std::ofstream(config) << cfg.dump();
  const std::string cmd = std::string(JSG_CLI_PATH) + " " + command + " --config " + config.string() + " --out " +
                          (workdir() / out).string() + " " + extra + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

const json kSquare = {{"angles", {0.0, 1.5707963267948966, 3.141592653589793, 4.71238898038469}}};
const json kSkewed = {{"angles", {0.0, 0.5, 3.141592653589793, 4.71238898038469}}};

}  // namespace

TEST_CASE("feasibility exit codes") {
  CHECK(jsg("feasibility", "square", {{"polygon", kSquare}}, "feas_square") == 0);
  const json r = read_json(workdir() / "feas_square" / "feasibility.json");
  CHECK(r["feasible"] == true);
  CHECK(r["header"]["command"] == "feasibility");

  CHECK(jsg("feasibility", "skewed", {{"polygon", kSkewed}}, "feas_skewed") == 2);
  const json s = read_json(workdir() / "feas_skewed" / "feasibility.json");
  CHECK(s["feasible"] == false);
  CHECK(s.contains("violation"));

  CHECK(jsg("feasibility", "odd", {{"polygon", {{"angles", {0.0, 2.0, 4.0}}}}}, "feas_odd") == 1);
  CHECK(jsg("feasibility", "empty", json::object(), "feas_empty") == 1);
}

TEST_CASE("solve is deterministic and refuses infeasible input") {
  const json cfg = {{"polygon", kSquare}, {"truncation", 6.0}};
  REQUIRE(jsg("solve", "solve_sq", cfg, "solve_a") == 0);
  REQUIRE(jsg("solve", "solve_sq", cfg, "solve_b") == 0);
  const std::string a = slurp(workdir() / "solve_a" / "field.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(workdir() / "solve_b" / "field.csv"));
  CHECK(a.rfind("# tool jsg", 0) == 0);
  CHECK(read_json(workdir() / "solve_a" / "field_mesh.json")["triangles"].size() > 0);
  CHECK(read_json(workdir() / "solve_a" / "summary.json")["header"]["config_hash"] ==
        read_json(workdir() / "solve_b" / "summary.json")["header"]["config_hash"]);

  CHECK(jsg("solve", "solve_skewed", {{"polygon", kSkewed}}, "solve_skewed") == 1);
  CHECK_FALSE(fs::exists(workdir() / "solve_skewed" / "field.csv"));
  CHECK(jsg("solve", "solve_skewed", {{"polygon", kSkewed}}, "solve_forced", "--force") == 0);
  CHECK(read_json(workdir() / "solve_forced" / "summary.json")["feasible"] == false);
}

TEST_CASE("solve modes") {
  SUBCASE("half-plane sequence") {
    CHECK(jsg("solve", "hp", {{"mode", "halfplane"}, {"radii", {2, 3, 4}}, {"resolution", 8}}, "hp") == 0);
    const json s = read_json(workdir() / "hp" / "summary.json");
    CHECK(s["monotone"] == "pass");
    CHECK(s["nonnegative"] == "pass");
    CHECK(s["below_barrier"] == "pass");
  }
  SUBCASE("zero data at infinity") {
    const json cfg = {{"mode", "infinity"}, {"radii", {2, 3}}, {"phi", {{"type", "constant"}, {"value", 0.0}}}};
    REQUIRE(jsg("solve", "inf", cfg, "inf") == 0);
    std::ifstream in(workdir() / "inf" / "field_n1.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'i') continue;
      CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 0.0);
      ++rows;
    }
    CHECK(rows > 0);
  }
  SUBCASE("unknown mode") { CHECK(jsg("solve", "bad_mode", {{"mode", "nope"}}, "bad_mode") == 1); }
}

TEST_CASE("diagnose") {
  SUBCASE("closed-loop flux") {
    const json cfg = {{"diagnostic", "flux"}, {"polygon", kSquare}, {"flux", {{"radius", 0.2}}}};
    REQUIRE(jsg("diagnose", "flux", cfg, "flux") == 0);
    const json f = read_json(workdir() / "flux" / "flux.json");
    CHECK(f["ratio"].get<double>() <= 1e-6);
  }
  SUBCASE("flat modulus") {
    REQUIRE(jsg("diagnose", "modulus", {{"diagnostic", "modulus"}}, "modulus") == 0);
    const json m = read_json(workdir() / "modulus" / "modulus.json");
    CHECK(std::abs(m["modulus"].get<double>() - 0.15915494309189535) <= 1e-3);
  }
  SUBCASE("one exhaustion step") {
    const json cfg = {{"diagnostic", "exhaustion"}, {"polygon", kSquare}, {"exhaustion", {{"epsilons", {1.0}}}}};
    REQUIRE(jsg("diagnose", "exhaustion", cfg, "exhaustion") == 0);
    const json e = read_json(workdir() / "exhaustion" / "exhaustion.json");
    REQUIRE(e["steps"].size() == 1);
    CHECK(e["steps"][0]["feasibility"] == true);
    CHECK(e["vertices"].size() == 12);
  }
}
