#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <ostream>

#include <CLI11.hpp>

#include <tweezer/feasibility.hpp>
#include <tweezer/sensitivity.hpp>

namespace tweezer::cli {

namespace {

using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json mhz_list(const Eigen::VectorXd& omega) {
  json out = json::array();
  for (Eigen::Index i = 0; i < omega.size(); ++i) out.push_back(json_number(angular_to_mhz(omega[i])));
  return out;
}

json trap_json(const RunConfig& rc) {
  return {{"omega_mhz", mhz_list(rc.trap.omega)}, {"ions", rc.trap.ion_count}, {"seed", rc.seed}};
}

std::vector<double> pin_curvatures(const RunConfig& rc) {
  std::vector<double> k;
  for (double w : rc.pinning) k.push_back(w < 0.0 ? -w * w : w * w);
  return k;
}

TweezerPattern configured_tweezers(const RunConfig& rc) {
  if (rc.pinning.empty()) return TweezerPattern::none(rc.trap.ion_count);
  const auto k = pin_curvatures(rc);
  return TweezerPattern::on_axes(k, rc.pin_axes);
}

IonCrystal configured_crystal(const RunConfig& rc) {
  return stage_crystal(rc.trap, rc.trap.omega[2], rc.species, rc.geometry, rc.seed);
}

DriveConfig configured_drive(const RunConfig& rc, const ModeSpectrum& spectrum) {
  if (!rc.has_mu) fail(ErrorCode::InvalidArgument, "missing required config key 'drive.mu'");
  DriveConfig d = rc.drive;
  if (rc.mode_axes) d.mode_mask = modes_along(spectrum, *rc.mode_axes);
  validate(d);
  return d;
}

Table mode_table(const ModeSpectrum& s) {
  Eigen::MatrixXd data(s.mode_count(), 5);
  for (int m = 0; m < s.mode_count(); ++m)
    data.row(m) << m, angular_to_mhz(s.frequencies[m]), s.direction_weights(m, 0), s.direction_weights(m, 1),
        s.direction_weights(m, 2);
  return column_table({"mode", "frequency_mhz", "weight_x", "weight_y", "weight_z"}, data, s.ion_count(),
                      "MHz,fraction");
}

Table position_table(const Positions& p) { return matrix_table(p * 1e6, "um"); }

std::vector<IonPair> selected_pairs(PairSelection sel, const IonCrystal& crystal, const CouplingMatrix& target) {
  switch (sel) {
    case PairSelection::All: return all_pairs(crystal.ion_count());
    case PairSelection::NearestNeighbor: return nearest_neighbor_pairs(crystal.positions);
    case PairSelection::TargetEdges: break;
  }
  std::vector<IonPair> out;
  for (const auto& pr : all_pairs(crystal.ion_count()))
    if (target(pr.first, pr.second) != 0.0) out.push_back(pr);
  return out;
}

/// J in rad/s when g is configured, otherwise the unit-prefactor value in s^2.
std::pair<CouplingMatrix, std::string> physical_couplings(const CouplingMatrix& unit, const RunConfig& rc) {
  if (!rc.drive.g) return {unit, "s^2 per unit prefactor"};
  DriveConfig d = rc.drive;
  return {unit * coupling_prefactor(d, rc.species), "rad/s"};
}

json stage_json(const StageRecord& s) {
  return {{"iterations", s.iterations}, {"evaluations", s.evaluations}, {"converged", s.converged},
          {"seconds", s.seconds},       {"note", s.note}};
}

int status_code(const std::string& status) {
  static const char* const names[] = {"feasible", "infeasible", "resonant", "unstable", "skipped-filter-off"};
  for (int i = 0; i < 5; ++i)
    if (status == names[i]) return i;
  return -1;
}

// ---------------------------------------------------------------------------

Artifacts modes_command(const RunConfig& rc) {
  const IonCrystal crystal = configured_crystal(rc);
  const TweezerPattern tw = configured_tweezers(rc);
  const ModeSpectrum s = mode_spectrum(build_hessian(crystal, tw));
  Artifacts a;
  a.tables["positions.csv"] = position_table(crystal.positions);
  a.tables["modes.csv"] = mode_table(s);
  a.tables["eigenvectors.csv"] = matrix_table(s.vectors, "unit");
  a.summary = {{"trap", trap_json(rc)},
               {"dimensionality", crystal.dimensionality == Dimensionality::Chain ? "chain" : "planar"},
               {"frequencies_mhz", mhz_list(s.frequencies)}};
  return a;
}

Artifacts couplings_command(const RunConfig& rc) {
  const IonCrystal crystal = configured_crystal(rc);
  const ModeSpectrum s = mode_spectrum(build_hessian(crystal, configured_tweezers(rc)));
  const DriveConfig drive = configured_drive(rc, s);
  check_resonance(s, drive);
  DriveConfig unit = drive;
  unit.g.reset();
  const CouplingMatrix j = coupling_matrix(s, unit, rc.species);
  const CouplingMatrix target = build_target(rc.target, crystal.positions);
  const CouplingError e = coupling_error(target, j);
  const auto [phys, units] = physical_couplings(j, rc);

  Artifacts a;
  a.tables["positions.csv"] = position_table(crystal.positions);
  a.tables["couplings_raw.csv"] = matrix_table(phys, units);
  a.tables["couplings.csv"] = matrix_table(e.normalized, "max|J_T|");
  a.tables["target.csv"] = matrix_table(target, "max|J_T|");
  a.summary = {{"trap", trap_json(rc)},
               {"mu_mhz", angular_to_mhz(drive.mu)},
               {"target", std::string(to_string(rc.target.kind))},
               {"epsilon", json_number(e.epsilon)}};
  return a;
}

Artifacts feasibility_command(const RunConfig& rc) {
  const IonCrystal crystal = configured_crystal(rc);
  const ModeSpectrum s = mode_spectrum(build_hessian(crystal, configured_tweezers(rc)));
  DriveConfig drive = configured_drive(rc, s);
  drive.g.reset();
  check_resonance(s, drive);
  const CouplingMatrix native = coupling_matrix(s, drive, rc.species);
  const CouplingMatrix target = build_target(rc.target, crystal.positions);
  const auto pairs = selected_pairs(rc.space.constraint_pairs, crystal, target);
  const CouplingGradient grad =
      reduce_to_ions(coupling_gradient_adjoint(s, drive, rc.species, pairs), rc.pin_axes);
  const SignConstraintSystem sys = build_sign_constraints(target, native, grad, pairs, -1.0,
                                                          default_gradient_floor(native, s.reference_scale));
  const FeasibilityVerdict v = feasibility_test(sys, rc.space.pinning_sign);

  const int n = crystal.ion_count();
  std::vector<std::string> cols{"ion_j", "ion_k", "sign"};
  for (int i = 0; i < n; ++i) cols.push_back("d" + std::to_string(i));
  Eigen::MatrixXd rows(sys.constraint_count(), 3 + n);
  for (int r = 0; r < sys.constraint_count(); ++r) {
    const auto& p = sys.provenance[std::size_t(r)];
    rows(r, 0) = p.pair.first;
    rows(r, 1) = p.pair.second;
    rows(r, 2) = p.sign;
    rows.row(r).tail(n) = sys.x.row(r);
  }
  Eigen::MatrixXd witness(n, 2);
  for (int i = 0; i < n; ++i) witness.row(i) << i, v.witness.size() == n ? v.witness[i] : 0.0;

  Artifacts a;
  a.tables["constraints.csv"] = column_table(cols, rows, n, "s^4 per unit prefactor");
  a.tables["witness.csv"] = column_table({"ion", "direction"}, witness, n, "unit inf-norm");
  a.summary = {{"trap", trap_json(rc)},
               {"mu_mhz", angular_to_mhz(drive.mu)},
               {"target", std::string(to_string(rc.target.kind))},
               {"constraints", sys.constraint_count()},
               {"feasible", v.feasible},
               {"margin", json_number(v.margin)},
               {"pinning_sign", rc.space.pinning_sign == PinningSign::Free ? "free" : "nonnegative"}};
  return a;
}

Artifacts experiment_command(const RunConfig& rc) {
  validate(rc.beam);
  validate(rc.lines);
  const double h = kTwoPi * rc.species.constants.hbar;
  auto row = [&](const TweezerBeam& b) {
    Eigen::RowVectorXd r(7);
    r << b.power, b.waist * 1e6, b.wavelength * 1e9, dipole_potential(b, rc.lines) / h / 1e6,
        angular_to_mhz(tweezer_trap_frequency(b, rc.lines, rc.species)), scattering_rate(b, rc.lines),
        differential_stark_shift(b, rc.lines) / kTwoPi / 1e3;
    return r;
  };
  const std::vector<std::string> cols{"power_w",  "waist_um",         "wavelength_nm", "u0_mhz",
                                      "trap_mhz", "scattering_per_s", "stark_khz"};
  Artifacts a;
  a.tables["estimates.csv"] = column_table(cols, row(rc.beam), 1, "W,um,nm,MHz,MHz,1/s,kHz");

  std::vector<Eigen::RowVectorXd> sweep;
  for (int nm = 450; nm <= 1600; nm += 10) {
    TweezerBeam b = rc.beam;
    b.wavelength = nm_to_m(nm);
    sweep.push_back(row(b));
  }
  Eigen::MatrixXd data(Eigen::Index(sweep.size()), 7);
  for (std::size_t i = 0; i < sweep.size(); ++i) data.row(Eigen::Index(i)) = sweep[i];
  a.tables["wavelength_sweep.csv"] = column_table(cols, data, 1, "W,um,nm,MHz,MHz,1/s,kHz");

  json eta = json::array();
  for (int ax = 0; ax < 3; ++ax) eta.push_back(json_number(lamb_dicke_scale(rc.drive.k_eff, rc.trap.omega[ax], rc.species)));
  a.summary = {{"beam", {{"power_w", rc.beam.power}, {"waist_um", rc.beam.waist * 1e6},
                         {"wavelength_nm", rc.beam.wavelength * 1e9}, {"polarization", rc.beam.polarization}}},
               {"scattering_per_s", json_number(scattering_rate(rc.beam, rc.lines))},
               {"trap_khz", json_number(tweezer_trap_frequency(rc.beam, rc.lines, rc.species) / kTwoPi / 1e3)},
               {"stark_khz", json_number(differential_stark_shift(rc.beam, rc.lines) / kTwoPi / 1e3)},
               {"lamb_dicke_trap_axes", eta}};

  if (!rc.pinning.empty()) {
    const auto beams = stark_homogenize(rc.pinning, rc.beam, rc.lines, rc.species);
    Eigen::MatrixXd b(Eigen::Index(beams.size()), 4);
    for (std::size_t i = 0; i < beams.size(); ++i)
      b.row(Eigen::Index(i)) << double(i), angular_to_mhz(rc.pinning[i]), beams[i].power, beams[i].waist * 1e6;
    a.tables["beams.csv"] = column_table({"ion", "pin_mhz", "power_w", "waist_um"}, b, int(beams.size()), "MHz,W,um");
  }
  return a;
}

Artifacts misalign_command(const RunConfig& rc, bool& converged) {
  const OptimizeRun run = run_optimize(rc);
  Artifacts a = optimize_artifacts(rc, run);
  converged = run.result.converged;
  const auto t0 = std::chrono::steady_clock::now();
  const MisalignmentScan scan = misalignment_scan(run.result, rc.misalign);
  Eigen::MatrixXd data(Eigen::Index(scan.samples.size()), 4);
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    const auto& s = scan.samples[i];
    data.row(Eigen::Index(i)) << s.scale * 1e9, s.mean_offset * 1e9, s.epsilon, double(s.converged);
  }
  a.tables["misalignment.csv"] = column_table({"scale_nm", "mean_offset_nm", "epsilon", "converged"}, data,
                                              run.result.crystal.ion_count(), "nm,nm,1,flag");
  a.summary["misalignment"] = {{"aligned_epsilon", json_number(scan.aligned_epsilon)},
                               {"samples", int(scan.samples.size())},
                               {"excluded", scan.excluded},
                               {"seed", rc.misalign.seed},
                               {"seconds", seconds_since(t0)}};
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------

ConfigFile assemble_config(const ConfigFile& base, const Overrides& o) {
  ConfigFile cfg = base;
  cfg.apply_environment();
  if (o.threads) cfg.set("run.threads", std::to_string(*o.threads));
  if (o.seed) cfg.set("run.seed", std::to_string(*o.seed));
  if (o.pin_axes) cfg.set("pinning.axes", *o.pin_axes);
  if (o.allow_anticonfinement) cfg.set("pinning.allow_anticonfinement", "true");
  if (o.nonnegative_pinning) cfg.set("pinning.sign", "nonnegative");
  return cfg;
}

ConfigFile assemble_config(const std::filesystem::path& file, const Overrides& o) {
  return assemble_config(ConfigFile::load(file), o);
}

std::string render_config(const ConfigFile& cfg) {
  std::string out, section;
  for (const auto& [key, value] : cfg.values()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out += (section.empty() ? "[" : "\n[") + s + "]\n";
      section = s;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

OptimizeRun run_optimize(const RunConfig& rc) {
  if (!(rc.space.mu_min > 0.0)) fail(ErrorCode::InvalidArgument, "missing config key 'search.mu_min' (or 'drive.mu')");
  if (!(rc.space.pin_max > 0.0)) fail(ErrorCode::InvalidArgument, "missing config key 'pinning.max'");
  OptimizeRun run;
  run.result = run_pipeline(rc.target, rc.space, rc.trap, rc.species, rc.symmetry);
  if (rc.baseline_points > 0)
    run.baseline = unpinned_mu_scan(run.result.crystal, run.result.target, rc.space.drive_axis, rc.space.mu_min,
                                    rc.space.mu_max, rc.baseline_points, rc.space.resonance_guard);
  return run;
}

Artifacts optimize_artifacts(const RunConfig& rc, const OptimizeRun& run) {
  const OptimizationResult& r = run.result;
  const int n = r.crystal.ion_count();
  Artifacts a;
  a.tables["positions.csv"] = position_table(r.crystal.positions);

  Eigen::MatrixXd pin(n, 4);
  for (int i = 0; i < n; ++i)
    pin.row(i) << i, angular_to_mhz(r.pinning[i]), r.curvature[i], r.cells.orbit_of[std::size_t(i)];
  a.tables["pinning.csv"] = column_table({"ion", "pin_mhz", "curvature", "orbit"}, pin, n, "MHz,rad^2/s^2,index");

  a.tables["target.csv"] = matrix_table(r.target, "max|J_T|");
  a.tables["couplings.csv"] = matrix_table(r.normalized, "max|J_T|");
  const auto [phys, units] = physical_couplings(r.realized, rc);
  a.tables["couplings_raw.csv"] = matrix_table(phys, units);
  a.tables["modes.csv"] = mode_table(r.spectrum);
  try {
    a.tables["modes_unpinned.csv"] = mode_table(mode_spectrum(build_hessian(r.crystal)));
  } catch (const Error&) {
    // The bare crystal may be unstable when the optimum relies on pinning.
  }

  Eigen::MatrixXd grid(Eigen::Index(r.grid.size()), 7);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const CellReport& c = r.grid[i];
    grid.row(Eigen::Index(i)) << angular_to_mhz(c.omega_z), angular_to_mhz(c.mu), status_code(c.status),
        double(c.feasible), c.margin, c.constraints, c.epsilon;
  }
  a.tables["grid.csv"] = column_table({"omega_z_mhz", "mu_mhz", "status", "feasible", "margin", "constraints", "epsilon"},
                                      grid, n, "MHz,MHz,code,flag,1,count,1");

  std::vector<std::array<double, 3>> trace;
  int stage = 1;
  for (const StageRecord* s : {&r.stage1, &r.stage2, &r.stage3}) {
    for (std::size_t k = 0; k < s->trace.size(); ++k) trace.push_back({double(stage), double(k), s->trace[k]});
    ++stage;
  }
  Eigen::MatrixXd tr(Eigen::Index(trace.size()), 3);
  for (std::size_t i = 0; i < trace.size(); ++i) tr.row(Eigen::Index(i)) << trace[i][0], trace[i][1], trace[i][2];
  a.tables["trace.csv"] = column_table({"stage", "step", "epsilon"}, tr, n, "index,index,1");

  if (run.baseline) {
    const MuScan& b = *run.baseline;
    Eigen::MatrixXd scan(Eigen::Index(b.mus.size()), 2);
    for (std::size_t i = 0; i < b.mus.size(); ++i) scan.row(Eigen::Index(i)) << angular_to_mhz(b.mus[i]), b.epsilons[i];
    a.tables["baseline.csv"] = column_table({"mu_mhz", "epsilon"}, scan, n, "MHz,1");
  }

  int feasible = 0;
  for (const CellReport& c : r.grid) feasible += c.feasible;
  json pins = json::array();
  for (int i = 0; i < n; ++i) pins.push_back(json_number(angular_to_mhz(r.pinning[i])));
  a.summary = {
      {"trap", trap_json(rc)},
      {"target", std::string(to_string(rc.target.kind))},
      {"symmetry", std::string(to_string(rc.symmetry))},
      {"pin_axes", r.pin_axes.str()},
      {"bounds",
       {{"omega_z_mhz", {angular_to_mhz(rc.space.omega_z_min), angular_to_mhz(rc.space.omega_z_max)}},
        {"mu_mhz", {angular_to_mhz(rc.space.mu_min), angular_to_mhz(rc.space.mu_max)}},
        {"pin_mhz", {angular_to_mhz(rc.space.pin_min), angular_to_mhz(rc.space.pin_max)}}}},
      {"omega_z_mhz", json_number(angular_to_mhz(r.omega_z))},
      {"mu_mhz", json_number(angular_to_mhz(r.mu))},
      {"pin_mhz", pins},
      {"orbits", r.cells.orbit_count()},
      {"epsilon", json_number(r.epsilon)},
      {"converged", r.converged},
      {"feasibility", {{"cells", int(r.grid.size())}, {"feasible", feasible}, {"filter", rc.space.feasibility_filter}}},
      {"grid_status_codes", {"feasible", "infeasible", "resonant", "unstable", "skipped-filter-off"}},
      {"stages", {{"stage1", stage_json(r.stage1)}, {"stage2", stage_json(r.stage2)}, {"stage3", stage_json(r.stage3)}}},
      {"seconds", r.seconds}};
  if (run.baseline)
    a.summary["unpinned"] = {{"epsilon", json_number(run.baseline->epsilon)},
                             {"mu_mhz", json_number(angular_to_mhz(run.baseline->mu))}};
  return a;
}

CommandOutcome execute(const std::string& command, const ConfigFile& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig rc = build_run_config(cfg);
  CommandOutcome out;
  if (command == "modes") {
    out.artifacts = modes_command(rc);
  } else if (command == "couplings") {
    out.artifacts = couplings_command(rc);
  } else if (command == "feasibility") {
    out.artifacts = feasibility_command(rc);
  } else if (command == "optimize") {
    const OptimizeRun run = run_optimize(rc);
    out.artifacts = optimize_artifacts(rc, run);
    out.converged = run.result.converged;
  } else if (command == "misalign") {
    out.artifacts = misalign_command(rc, out.converged);
  } else if (command == "experiment") {
    out.artifacts = experiment_command(rc);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  }
  out.artifacts.summary["command"] = command;
  out.artifacts.summary["wall_seconds"] = seconds_since(t0);
  out.artifacts.config_text = render_config(cfg);
  return out;
}

namespace {

int reproduce(const std::string& name, const std::filesystem::path& dir, const Overrides& o, std::ostream& log) {
  json runs = json::array();
  bool converged = true;
  struct Point {
    double tag, eps, unpinned;
  };
  std::map<std::string, std::vector<Point>> groups;
  for (const ScenarioRun& run : scenario_runs(name)) {
    const ConfigFile cfg = assemble_config(ConfigFile::parse(run.config, name + "/" + run.dir), o);
    const CommandOutcome res = execute(run.command, cfg);
    res.artifacts.write(dir / run.dir);
    converged = converged && res.converged;
    json entry = res.artifacts.summary;
    entry.erase("stages");
    entry.erase("grid_status_codes");
    entry["dir"] = run.dir;
    runs.push_back(entry);
    if (!run.group.empty()) {
      const json& s = res.artifacts.summary;
      groups[run.group].push_back({run.tag, number_from_json(s.at("epsilon")),
                                   s.contains("unpinned") ? number_from_json(s["unpinned"]["epsilon"]) : NAN});
    }
    log << name << ": " << run.dir << " done";
    if (res.artifacts.summary.contains("epsilon"))
      log << " (epsilon " << format_number(number_from_json(res.artifacts.summary["epsilon"])) << ")";
    log << '\n';
  }
  for (const auto& [group, pts] : groups) {
    Eigen::MatrixXd data(Eigen::Index(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) data.row(Eigen::Index(i)) << pts[i].tag, pts[i].eps, pts[i].unpinned;
    write_table(dir / (group + "_sweep.csv"), column_table({"xi", "epsilon", "unpinned_epsilon"}, data, 0, "1"));
  }
  write_json(dir / "summary.json", {{"scenario", name}, {"runs", runs}, {"converged", converged}});
  return converged ? 0 : 2;
}

int error_exit(std::ostream& err, ErrorCode code, const std::string& what) {
  err << "error[" << to_string(code) << "]: " << what << '\n';
  return code == ErrorCode::Convergence ? 2 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phonon-mode engineering of trapped-ion spin couplings with optical tweezers", "tweezer"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config, outdir = "tweezer-out";
  Overrides o;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string axes;
  auto* config_opt = app.add_option("--config", config, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", outdir, "Output directory");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* axes_opt = app.add_option("--pin-axes", axes, "Pinning axes, e.g. x, yz");
  app.add_flag("--allow-anticonfinement", o.allow_anticonfinement, "Permit negative pinning curvature");
  app.add_flag("--nonnegative-pinning", o.nonnegative_pinning, "Feasibility test over confining pinning only");

  std::string command;
  for (const char* name : {"modes", "couplings", "feasibility", "optimize", "misalign", "experiment"}) {
    static const std::map<std::string, std::string> help{
        {"modes", "Normal-mode spectrum and eigenvectors"},
        {"couplings", "Spin-spin couplings at the configured beatnote and pinning"},
        {"feasibility", "Sign-structure feasibility verdict and witness"},
        {"optimize", "Three-stage pinning optimization"},
        {"misalign", "Optimize, then Monte Carlo over tweezer misalignment"},
        {"experiment", "Tweezer light-shift, scattering and Stark-shift estimates"}};
    app.add_subcommand(name, help.at(name))->callback([&command, name] { command = name; });
  }
  std::string scenario;
  auto* rep = app.add_subcommand("reproduce", "Canned scenarios of the published figures and tables");
  rep->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(scenario_names()));
  rep->callback([&command] { command = "reproduce"; });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    return error_exit(err, ErrorCode::InvalidArgument, e.what());
  }
  if (*threads_opt) o.threads = threads;
  if (*seed_opt) o.seed = seed;
  if (*axes_opt) o.pin_axes = axes;

  try {
    if (command == "reproduce") return reproduce(scenario, outdir, o, out);
    if (!*config_opt) return error_exit(err, ErrorCode::InvalidArgument, "--config is required for " + command);
    const CommandOutcome res = execute(command, assemble_config(std::filesystem::path(config), o));
    res.artifacts.write(outdir);
    out << command << ": wrote " << outdir;
    if (res.artifacts.summary.contains("epsilon"))
      out << " (epsilon " << format_number(number_from_json(res.artifacts.summary["epsilon"])) << ")";
    out << '\n';
    if (!res.converged) {
      err << "error[" << to_string(ErrorCode::Convergence) << "]: optimizer did not converge; results written\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    return error_exit(err, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_exit(err, ErrorCode::InvalidArgument, e.what());
  }
}

}  // namespace tweezer::cli
