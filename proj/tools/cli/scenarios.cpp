#include <cstdio>

#include "commands.hpp"

namespace tweezer::cli {

namespace {

const char* const kNearestNeighbor = R"([trap]
omega_x = 2.0
omega_y = 0.6
omega_z = 0.07
ions = 12

[target]
kind = nearest_neighbor

[drive]
axis = y

[pinning]
axes = y
max = 0.5
symmetry = reflection_z

[search]
mu_min = 0.40
mu_max = 0.60
grid_mu = 8
restarts = 4
stage1_geometry = equilibrium
final_geometry = equilibrium
)";

const char* const kLadder = R"([trap]
omega_x = 0.6
omega_y = 0.4
omega_z = 0.14
ions = 12

[target]
kind = spin_ladder

[drive]
axis = y

[pinning]
axes = yz
max = 0.7
symmetry = ladder

[search]
mu_min = 3.0
mu_max = 5.0
grid_mu = 5
restarts = 3
top_candidates = 2
)";

const char* const kTriangular = R"([trap]
omega_x = 2.4
omega_y = 0.16
omega_z = 0.16
ions = 19

[target]
kind = triangular_af

[drive]
axis = x

[pinning]
axes = x
max = 0.29
symmetry = c6

[search]
mu_min = 2.2
mu_max = 2.6
grid_mu = 9
restarts = 3
top_candidates = 2
)";

const char* const kMisalign = R"(
[misalign]
scale_min_nm = 1
scale_max_nm = 300
samples = 1000
seed = 7
)";

std::string power_law(double xi, const char* geometry) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, R"([trap]
omega_x = 0.6
omega_y = 0.6
omega_z = 0.1
ions = 12

[target]
kind = power_law
xi = %.1f

[drive]
axis = x

[pinning]
axes = x
max = 2.0
symmetry = reflection_z

[search]
mu_min = 0.65
mu_max = 5.0
grid_mu = 12
restarts = 2
top_candidates = 2
baseline_points = 400
stage1_geometry = %s
final_geometry = %s
)",
                xi, geometry, geometry);
  return buf;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"fig3", "fig4", "fig5", "fig6", "fig7", "table1", "table2"};
  return names;
}

std::vector<ScenarioRun> scenario_runs(const std::string& name) {
  if (name == "fig3") return {{"nearest_neighbor", "optimize", kNearestNeighbor, "", 0.0}};
  if (name == "fig5") return {{"spin_ladder", "optimize", kLadder, "", 0.0}};
  if (name == "fig6") return {{"triangular", "optimize", kTriangular, "", 0.0}};
  if (name == "fig7") return {{"misalignment", "misalign", std::string(kNearestNeighbor) + kMisalign, "", 0.0}};
  if (name == "table1")
    return {{"nearest_neighbor", "optimize", kNearestNeighbor, "", 0.0},
            {"power_law_xi3", "optimize", power_law(3.0, "equilibrium"), "", 3.0}};
  if (name == "table2")
    return {{"spin_ladder", "optimize", kLadder, "", 0.0}, {"triangular", "optimize", kTriangular, "", 0.0}};
  if (name == "fig4") {
    std::vector<ScenarioRun> runs;
    for (const char* geometry : {"equidistant", "equilibrium"})
      for (int k = 1; k <= 8; ++k) {
        const double xi = 0.5 * k;
        char dir[64];
        std::snprintf(dir, sizeof dir, "%s/xi_%.1f", geometry, xi);
        runs.push_back({dir, "optimize", power_law(xi, geometry), geometry, xi});
      }
    return runs;
  }
  fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

}  // namespace tweezer::cli
