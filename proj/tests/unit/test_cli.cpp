#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <tweezer/rng.hpp>

#include "artifacts.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace tweezer;
using namespace tweezer::cli;
namespace fs = std::filesystem;

namespace {

const char* const kSmall = R"(# four-ion chain
[trap]
omega_x = 2.0
omega_y = 1.2
omega_z = 0.2
ions = 4

[drive]
axis = x
mu = 2.3   ; beatnote

[pinning]
axes = x
max = 0.5
symmetry = reflection_z

[search]
mu_min = 2.1
mu_max = 2.3
grid_mu = 2
restarts = 2
top_candidates = 1
baseline_points = 20
)";

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("tweezer_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config text parses sections, comments and values") {
  const ConfigFile cfg = ConfigFile::parse(kSmall);
  CHECK(cfg.get("trap.ions") == "4");
  CHECK(cfg.get("drive.mu") == "2.3");
  CHECK_FALSE(cfg.get("drive.g"));

  const RunConfig rc = build_run_config(cfg);
  CHECK(rc.trap.ion_count == 4);
  CHECK(rc.trap.omega[1] == mhz_to_angular(1.2));
  CHECK(rc.drive.mu == mhz_to_angular(2.3));
  CHECK(rc.has_mu);
  CHECK(rc.space.mu_min == mhz_to_angular(2.1));
  CHECK(rc.space.omega_z_min == rc.trap.omega[2]);
  CHECK(rc.symmetry == SymmetryGroup::ReflectionZ);
  CHECK(rc.baseline_points == 20);
}

TEST_CASE("config errors name the offending key") {
  auto message = [](const std::string& text) {
    try {
      build_run_config(ConfigFile::parse(text, "bad.cfg"));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("[trap]\nomega_q = 1\n").find("trap.omega_q") != std::string::npos);
  CHECK(message("[trap]\nomega_x = 1\nomega_x = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("ions = 3\n").find("outside") != std::string::npos);
  CHECK(message("[trap]\nomega_x = 2\nomega_y = 1\nomega_z = fast\nions = 3\n").find("trap.omega_z") !=
        std::string::npos);
  CHECK(message("[trap]\nomega_x = 2\nomega_y = 1\nomega_z = 0.2\n").find("trap.ions") != std::string::npos);
  const std::string neg = std::string(kSmall) + "min = -0.1\n";
  // "min" lands in [search], which has no such key.
  CHECK(message(neg).find("search.min") != std::string::npos);
}

TEST_CASE("negative pinning requires the anticonfinement switch") {
  std::string text = kSmall;
  text.replace(text.find("max = 0.5"), 9, "max = 0.5\nmin = -0.2");
  CHECK_THROWS_AS(build_run_config(ConfigFile::parse(text)), Error);
  Overrides o;
  o.allow_anticonfinement = true;
  const RunConfig rc = build_run_config(assemble_config(ConfigFile::parse(text), o));
  CHECK(rc.space.pin_min == mhz_to_angular(-0.2));
}

TEST_CASE("flags override environment, environment overrides file") {
  ::setenv("TWEEZER_RUN_SEED", "11", 1);
  ::setenv("TWEEZER_TRAP_IONS", "6", 1);
  Overrides o;
  o.seed = 42;
  o.pin_axes = "yz";
  const ConfigFile cfg = assemble_config(ConfigFile::parse(kSmall), o);
  ::unsetenv("TWEEZER_RUN_SEED");
  ::unsetenv("TWEEZER_TRAP_IONS");
  const RunConfig rc = build_run_config(cfg);
  CHECK(rc.seed == 42);
  CHECK(rc.trap.ion_count == 6);
  CHECK(rc.pin_axes == AxisSet{Axis::Y, Axis::Z});

  o.nonnegative_pinning = true;
  CHECK(build_run_config(assemble_config(ConfigFile::parse(kSmall), o)).space.pinning_sign == PinningSign::Nonnegative);
}

TEST_CASE("rendered config parses back to the same values") {
  const ConfigFile cfg = ConfigFile::parse(kSmall);
  CHECK(ConfigFile::parse(render_config(cfg)).values() == cfg.values());
}

TEST_CASE("numbers and tables round-trip exactly") {
  CounterRng rng(3, 1);
  Eigen::MatrixXd m(7, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
  m(0, 0) = NAN;
  m(1, 1) = INFINITY;
  m(2, 2) = -INFINITY;
  m(3, 3) = 5e-324;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double v = m.data()[i];
    const double back = parse_number(format_number(v));
    CHECK((back == v || (std::isnan(v) && std::isnan(back))));
  }
  CHECK_THROWS_AS(parse_number("1.5x"), Error);

  TempDir dir;
  const Table a = matrix_table(m, "rad/s");
  const Table b = column_table({"a", "b", "c", "d", "e"}, m, 12, "MHz,1,1,1,1");
  write_table(dir.path / "a.csv", a);
  write_table(dir.path / "b.csv", b);
  CHECK(same_table(read_table(dir.path / "a.csv"), a));
  CHECK(same_table(read_table(dir.path / "b.csv"), b));
  CHECK(read_table(dir.path / "b.csv").columns.size() == 5);

  const Table empty = column_table({"x"}, Eigen::MatrixXd(0, 1), 0, "1");
  write_table(dir.path / "e.csv", empty);
  CHECK(same_table(read_table(dir.path / "e.csv"), empty));

  for (double v : {1.25, -0.0, double(NAN), double(INFINITY)}) {
    const double back = number_from_json(nlohmann::json::parse(json_number(v).dump()));
    CHECK((back == v || (std::isnan(v) && std::isnan(back))));
  }
}

TEST_CASE("exit codes and diagnostics") {
  TempDir dir;
  const auto bad = dir.write("bad.cfg", "[trap]\nomega_x = 2\nomegax = 1\n");
  Run r = invoke({"feasibility", "--config", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[invalid-argument]:", 0) == 0);
  CHECK(r.err.find("trap.omegax") != std::string::npos);

  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"modes"}).code == 1);
  CHECK(invoke({"reproduce", "fig9"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);

  const auto cfg = dir.write("small.cfg", kSmall);
  r = invoke({"modes", "--config", cfg.string(), "--out", (dir.path / "modes").string()});
  CHECK(r.code == 0);
  const Table modes = read_table(dir.path / "modes" / "modes.csv");
  CHECK(modes.n == 4);
  CHECK(modes.data.rows() == 12);
  CHECK(fs::exists(dir.path / "modes" / "config.cfg"));

  // Resonant beatnote: the top x mode of a 2 MHz trap is the COM mode.
  std::string text = kSmall;
  text.replace(text.find("mu = 2.3"), 8, "mu = 2.0");
  r = invoke({"couplings", "--config", dir.write("com.cfg", text).string(), "--out", (dir.path / "c").string()});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[resonance]:", 0) == 0);

  std::string capped = kSmall;
  capped += "max_iterations = 1\n";
  r = invoke({"optimize", "--config", dir.write("capped.cfg", capped).string(), "--out", (dir.path / "capped").string()});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error[convergence]:", 0) == 0);
  CHECK(fs::exists(dir.path / "capped" / "summary.json"));
}

TEST_CASE("optimize artifacts reload equal and reruns are byte-identical") {
  TempDir dir;
  const auto cfg = dir.write("small.cfg", kSmall);
  const CommandOutcome res = execute("optimize", assemble_config(cfg, {}));
  CHECK(res.converged);
  res.artifacts.write(dir.path / "a");
  for (const auto& [name, table] : res.artifacts.tables) {
    CAPTURE(name);
    CHECK(same_table(read_table(dir.path / "a" / name), table));
  }
  CHECK(read_json(dir.path / "a" / "summary.json") == res.artifacts.summary);
  CHECK(res.artifacts.tables.count("baseline.csv") == 1);
  CHECK(res.artifacts.tables.at("pinning.csv").data.rows() == 4);

  for (const char* threads : {"1", "3"}) {
    const fs::path out = dir.path / (std::string("t") + threads);
    CHECK(invoke({"optimize", "--config", cfg.string(), "--threads", threads, "--out", out.string()}).code == 0);
  }
  for (const auto& [name, table] : res.artifacts.tables) {
    CAPTURE(name);
    CHECK(slurp(dir.path / "t1" / name) == slurp(dir.path / "a" / name));
    CHECK(slurp(dir.path / "t3" / name) == slurp(dir.path / "a" / name));
  }
}

TEST_CASE("feasibility and experiment commands") {
  const CommandOutcome f = execute("feasibility", ConfigFile::parse(kSmall));
  const auto& s = f.artifacts.summary;
  CHECK(s.at("constraints").get<int>() == f.artifacts.tables.at("constraints.csv").data.rows());
  CHECK(f.artifacts.tables.at("witness.csv").data.rows() == 4);

  std::string text = kSmall;
  text += "\n[experiment]\npower_w = 1\nwaist_um = 1\nwavelength_nm = 1070\n";
  const CommandOutcome e = execute("experiment", ConfigFile::parse(text));
  const Table& est = e.artifacts.tables.at("estimates.csv");
  CHECK(est.data.rows() == 1);
  CHECK(est.data(0, 5) > 1.0);
  CHECK(est.data(0, 5) < 4.0);
  CHECK(e.artifacts.tables.at("wavelength_sweep.csv").data.rows() > 100);
}

TEST_CASE("every scenario is defined") {
  for (const auto& name : scenario_names()) {
    CAPTURE(name);
    const auto runs = scenario_runs(name);
    CHECK_FALSE(runs.empty());
    for (const auto& run : runs) CHECK_NOTHROW(build_run_config(ConfigFile::parse(run.config)));
  }
}
