#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tweezer::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::toupper(c)); });
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorCode::InvalidArgument, "config key '" + key + "': " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text, "expected a number");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, text, "expected an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  bad_value(key, text, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(to_double(key, item));
  return out;
}

Eigen::Vector3d to_direction(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "x") return Eigen::Vector3d::UnitX();
  if (s == "y") return Eigen::Vector3d::UnitY();
  if (s == "z") return Eigen::Vector3d::UnitZ();
  const auto v = to_list(key, text);
  if (v.size() != 3) bad_value(key, text, "expected x, y, z or three components");
  const Eigen::Vector3d d(v[0], v[1], v[2]);
  if (!(d.norm() > 0.0)) bad_value(key, text, "direction must be non-zero");
  return d.normalized();
}

AxisSet to_axes(const std::string& key, const std::string& text) {
  try {
    return AxisSet::parse(trim(text));
  } catch (const Error&) {
    bad_value(key, text, "expected axes such as x, yz or xyz");
  }
}

GeometryModel to_geometry(const std::string& key, const std::string& text) {
  const std::string s = lower(trim(text));
  if (s == "auto") return GeometryModel::Auto;
  if (s == "equidistant") return GeometryModel::Equidistant;
  if (s == "equilibrium" || s == "harmonic") return GeometryModel::Equilibrium;
  bad_value(key, text, "expected auto, equidistant or equilibrium");
}

template <class T, class F>
T convert(const std::string& key, const std::string& text, F&& f) {
  try {
    return f(trim(text));
  } catch (const Error&) {
    bad_value(key, text, "unrecognized value");
  }
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "species.name",           "species.mass_u",
      "trap.omega_x",           "trap.omega_y",
      "trap.omega_z",           "trap.ions",
      "trap.geometry",          "run.seed",
      "run.threads",            "target.kind",
      "target.sign",            "target.xi",
      "target.rung_sign",       "target.leg_sign",
      "target.distance",        "target.neighbor_factor",
      "target.matrix_file",     "target.edge_file",
      "drive.axis",             "drive.mu",
      "drive.g",                "drive.wavelength_nm",
      "drive.beam_angle_deg",   "drive.modes",
      "drive.resonance_guard",  "pinning.axes",
      "pinning.values",         "pinning.min",
      "pinning.max",            "pinning.sign",
      "pinning.symmetry",       "pinning.allow_anticonfinement",
      "search.omega_z_min",     "search.omega_z_max",
      "search.mu_min",          "search.mu_max",
      "search.grid_omega_z",    "search.grid_mu",
      "search.restarts",        "search.top_candidates",
      "search.feasibility_filter", "search.constraint_pairs",
      "search.stage1_geometry", "search.final_geometry",
      "search.optimize_mu",     "search.line_search",
      "search.max_iterations",  "search.memory",
      "search.baseline_points",
      "experiment.power_w",     "experiment.waist_um",
      "experiment.wavelength_nm", "experiment.polarization",
      "experiment.lines_file",  "experiment.hyperfine_mhz",
      "misalign.scale_min_nm",  "misalign.scale_max_nm",
      "misalign.samples",       "misalign.axes",
      "misalign.seed",
  };
  return keys;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    for (const char mark : {'#', ';'}) {
      const auto c = line.find(mark);
      if (c != std::string::npos) line.erase(c);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::InvalidArgument, where + ": malformed section header '" + line + "'");
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, where + ": expected 'key = value', got '" + line + "'");
    if (section.empty()) fail(ErrorCode::InvalidArgument, where + ": key outside of any [section]");
    const std::string key = section + "." + lower(trim(line.substr(0, eq)));
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(ErrorCode::InvalidArgument, where + ": unknown config key '" + key + "'");
    if (cfg.values_.count(key)) fail(ErrorCode::InvalidArgument, where + ": duplicate config key '" + key + "'");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

void ConfigFile::apply_environment(const std::string& prefix) {
  for (const auto& key : known_keys()) {
    std::string name = prefix + "_" + upper(key);
    std::replace(name.begin(), name.end(), '.', '_');
    if (const char* v = std::getenv(name.c_str())) values_[key] = v;
  }
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

RunConfig build_run_config(const ConfigFile& file) {
  RunConfig rc;
  auto get = [&](const std::string& key) { return file.get(key); };
  auto mhz = [&](const std::string& key) -> std::optional<double> {
    if (auto v = get(key)) return mhz_to_angular(to_double(key, *v));
    return std::nullopt;
  };
  auto need = [&](const std::string& key) {
    auto v = get(key);
    if (!v) fail(ErrorCode::InvalidArgument, "missing required config key '" + key + "'");
    return *v;
  };

  // species
  rc.species = ytterbium171();
  if (auto v = get("species.name")) {
    const std::string s = lower(*v);
    if (s != "yb171" && s != "171yb+" && s != "ytterbium171") bad_value("species.name", *v, "only yb171 is built in");
  }
  if (auto v = get("species.mass_u")) rc.species.mass = to_double("species.mass_u", *v) * kAtomicMassUnit;

  // trap
  for (int a = 0; a < 3; ++a) {
    const std::string key = std::string("trap.omega_") + "xyz"[a];
    rc.trap.omega[a] = mhz_to_angular(to_double(key, need(key)));
  }
  rc.trap.ion_count = int(to_integer("trap.ions", need("trap.ions")));
  try {
    validate(rc.trap);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidArgument, std::string("config section [trap]: ") + e.what());
  }
  if (auto v = get("trap.geometry")) rc.geometry = to_geometry("trap.geometry", *v);
  if (auto v = get("run.seed")) rc.seed = std::uint64_t(to_integer("run.seed", *v));
  if (auto v = get("run.threads")) rc.threads = int(to_integer("run.threads", *v));
  if (rc.threads < 1) bad_value("run.threads", *get("run.threads"), "must be at least 1");

  // target
  if (auto v = get("target.kind")) rc.target.kind = convert<TargetKind>("target.kind", *v, parse_target_kind);
  if (auto v = get("target.sign")) rc.target.sign = int(to_integer("target.sign", *v));
  if (auto v = get("target.xi")) rc.target.xi = to_double("target.xi", *v);
  if (auto v = get("target.rung_sign")) rc.target.rung_sign = int(to_integer("target.rung_sign", *v));
  if (auto v = get("target.leg_sign")) rc.target.leg_sign = int(to_integer("target.leg_sign", *v));
  if (auto v = get("target.distance")) {
    const std::string s = lower(*v);
    if (s == "actual") rc.target.distance = DistanceMode::Actual;
    else if (s == "index") rc.target.distance = DistanceMode::Index;
    else bad_value("target.distance", *v, "expected actual or index");
  }
  if (auto v = get("target.neighbor_factor")) rc.target.neighbor_factor = to_double("target.neighbor_factor", *v);
  if (get("target.matrix_file") && get("target.edge_file"))
    fail(ErrorCode::InvalidArgument, "config keys 'target.matrix_file' and 'target.edge_file' are exclusive");
  if (auto v = get("target.matrix_file")) rc.target.matrix = load_matrix_file(*v);
  if (auto v = get("target.edge_file")) rc.target.matrix = load_edge_list(*v, rc.trap.ion_count);
  if (rc.target.kind == TargetKind::Explicit && rc.target.matrix.size() == 0)
    fail(ErrorCode::InvalidArgument, "config key 'target.kind' = explicit needs target.matrix_file or target.edge_file");
  try {
    validate(rc.target);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidArgument, std::string("config section [target]: ") + e.what());
  }

  // drive
  if (auto v = get("drive.axis")) rc.drive.axis = to_direction("drive.axis", *v);
  if (auto v = mhz("drive.mu")) {
    rc.drive.mu = *v;
    rc.has_mu = true;
  }
  if (auto v = mhz("drive.g")) rc.drive.g = *v;
  const double lambda = nm_to_m(get("drive.wavelength_nm") ? to_double("drive.wavelength_nm", *get("drive.wavelength_nm")) : 369.0);
  const double angle = (get("drive.beam_angle_deg") ? to_double("drive.beam_angle_deg", *get("drive.beam_angle_deg")) : 90.0) *
                       std::numbers::pi / 180.0;
  if (!(lambda > 0.0)) bad_value("drive.wavelength_nm", *get("drive.wavelength_nm"), "must be positive");
  rc.drive.k_eff = 2.0 * (kTwoPi / lambda) * std::sin(angle / 2.0);
  if (auto v = get("drive.modes"); v && lower(trim(*v)) != "all") rc.mode_axes = to_axes("drive.modes", *v);
  if (auto v = mhz("drive.resonance_guard")) rc.drive.resonance_guard = *v;

  // pinning
  if (auto v = get("pinning.axes")) rc.pin_axes = to_axes("pinning.axes", *v);
  if (auto v = get("pinning.allow_anticonfinement")) rc.allow_anticonfinement = to_bool("pinning.allow_anticonfinement", *v);
  if (auto v = get("pinning.values")) {
    for (double f : to_list("pinning.values", *v)) rc.pinning.push_back(mhz_to_angular(f));
    if (rc.pinning.size() == 1) rc.pinning.assign(std::size_t(rc.trap.ion_count), rc.pinning.front());
    if (int(rc.pinning.size()) != rc.trap.ion_count)
      bad_value("pinning.values", *v, "expected one value or one per ion");
  }
  if (auto v = get("pinning.symmetry"))
    rc.symmetry = convert<SymmetryGroup>("pinning.symmetry", *v, parse_symmetry_group);

  // search
  SearchSpace& s = rc.space;
  s.omega_z_min = mhz("search.omega_z_min").value_or(rc.trap.omega[2]);
  s.omega_z_max = mhz("search.omega_z_max").value_or(s.omega_z_min);
  s.mu_min = mhz("search.mu_min").value_or(rc.drive.mu);
  s.mu_max = mhz("search.mu_max").value_or(s.mu_min);
  s.pin_min = mhz("pinning.min").value_or(0.0);
  s.pin_max = mhz("pinning.max").value_or(0.0);
  s.resonance_guard = rc.drive.resonance_guard;
  s.pin_axes = rc.pin_axes;
  s.drive_axis = rc.drive.axis;
  s.seed = rc.seed;
  s.threads = rc.threads;
  auto count = [&](const char* key, int& field) {
    if (auto v = get(key)) field = int(to_integer(key, *v));
  };
  count("search.grid_omega_z", s.grid_omega_z);
  count("search.grid_mu", s.grid_mu);
  count("search.restarts", s.restarts);
  count("search.top_candidates", s.top_candidates);
  count("search.max_iterations", s.minimizer.max_iterations);
  count("search.memory", s.minimizer.memory);
  count("search.baseline_points", rc.baseline_points);
  if (rc.baseline_points < 0) bad_value("search.baseline_points", *get("search.baseline_points"), "must be non-negative");
  if (auto v = get("search.feasibility_filter")) s.feasibility_filter = to_bool("search.feasibility_filter", *v);
  if (auto v = get("pinning.sign")) {
    const std::string t = lower(*v);
    if (t == "free") s.pinning_sign = PinningSign::Free;
    else if (t == "nonnegative") s.pinning_sign = PinningSign::Nonnegative;
    else bad_value("pinning.sign", *v, "expected free or nonnegative");
  }
  if (auto v = get("search.constraint_pairs")) {
    const std::string t = lower(*v);
    if (t == "target") s.constraint_pairs = PairSelection::TargetEdges;
    else if (t == "all") s.constraint_pairs = PairSelection::All;
    else if (t == "nearest_neighbor") s.constraint_pairs = PairSelection::NearestNeighbor;
    else bad_value("search.constraint_pairs", *v, "expected target, all or nearest_neighbor");
  }
  if (auto v = get("search.stage1_geometry")) s.stage1_geometry = to_geometry("search.stage1_geometry", *v);
  if (auto v = get("search.final_geometry")) s.final_geometry = to_geometry("search.final_geometry", *v);
  if (auto v = get("search.optimize_mu")) s.optimize_mu_in_stage3 = to_bool("search.optimize_mu", *v);
  if (auto v = get("search.line_search")) {
    const std::string t = lower(*v);
    if (t == "backtracking") s.minimizer.line_search = LineSearchKind::Backtracking;
    else if (t == "strong_wolfe") s.minimizer.line_search = LineSearchKind::StrongWolfe;
    else bad_value("search.line_search", *v, "expected backtracking or strong_wolfe");
  }

  const bool negative = s.pin_min < 0.0 || std::any_of(rc.pinning.begin(), rc.pinning.end(), [](double w) { return w < 0.0; });
  if (negative && !rc.allow_anticonfinement)
    fail(ErrorCode::InvalidArgument,
         "config keys 'pinning.min'/'pinning.values': negative pinning needs --allow-anticonfinement");

  // experiment
  auto positive = [&](const char* key, double fallback) {
    if (auto v = get(key)) {
      const double x = to_double(key, *v);
      if (!(x > 0.0)) bad_value(key, *v, "must be positive");
      return x;
    }
    return fallback;
  };
  rc.beam.power = positive("experiment.power_w", 1.0);
  rc.beam.waist = um_to_m(positive("experiment.waist_um", 1.0));
  rc.beam.wavelength = nm_to_m(positive("experiment.wavelength_nm", 1070.0));
  if (auto v = get("experiment.polarization")) rc.beam.polarization = trim(*v);
  const double hf = mhz_to_angular(positive("experiment.hyperfine_mhz", 12600.0));
  if (auto v = get("experiment.lines_file")) {
    rc.lines = load_atomic_lines(*v, hf);
  } else {
    rc.lines = ytterbium171_lines();
    if (get("experiment.hyperfine_mhz")) rc.lines.hyperfine_splitting = hf;
  }

  // misalignment
  rc.misalign.scale_min = nm_to_m(get("misalign.scale_min_nm") ? to_double("misalign.scale_min_nm", *get("misalign.scale_min_nm")) : 1.0);
  rc.misalign.scale_max = nm_to_m(get("misalign.scale_max_nm") ? to_double("misalign.scale_max_nm", *get("misalign.scale_max_nm")) : 300.0);
  if (auto v = get("misalign.samples")) rc.misalign.samples = int(to_integer("misalign.samples", *v));
  if (auto v = get("misalign.axes")) rc.misalign.axes = to_axes("misalign.axes", *v);
  rc.misalign.seed = get("misalign.seed") ? std::uint64_t(to_integer("misalign.seed", *get("misalign.seed"))) : rc.seed;
  rc.misalign.threads = rc.threads;
  return rc;
}

}  // namespace tweezer::cli
