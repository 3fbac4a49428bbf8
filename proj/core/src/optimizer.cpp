#include "tweezer/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

#include "detail/parallel.hpp"
#include "tweezer/rng.hpp"
#include "tweezer/sensitivity.hpp"

namespace tweezer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool barrier_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnstableCrystal:
    case ErrorCode::Resonance:
    case ErrorCode::UndefinedNormalization:
    case ErrorCode::DivisionGuard:
    case ErrorCode::Degeneracy:
      return true;
    default:
      return false;
  }
}

double signed_root(double k) { return k < 0.0 ? -std::sqrt(-k) : std::sqrt(k); }
double signed_square(double w) { return w < 0.0 ? -w * w : w * w; }

}  // namespace

void validate(const SearchSpace& s) {
  require(s.omega_z_min > 0.0 && s.omega_z_min <= s.omega_z_max, "search space: need 0 < omega_z_min <= omega_z_max");
  require(s.mu_min > 0.0 && s.mu_min <= s.mu_max, "search space: need 0 < mu_min <= mu_max");
  require(s.pin_max > 0.0, "search space: pin_max must be positive");
  require(s.pin_min <= s.pin_max, "search space: pin_min exceeds pin_max");
  require(!s.pin_axes.empty(), "search space: pinning axes must not be empty");
  require(std::abs(s.drive_axis.norm() - 1.0) < 1e-9, "search space: drive axis must be a unit vector");
  require(s.grid_omega_z >= 1 && s.grid_mu >= 1, "search space: grid sizes must be positive");
  require(s.restarts >= 1 && s.top_candidates >= 1, "search space: restarts and top_candidates must be positive");
  require(s.resonance_guard >= 0.0, "search space: resonance guard must be non-negative");
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  require(count >= 1 && lo <= hi, "linear_grid: invalid range");
  if (count == 1 || lo == hi) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
  out.back() = hi;
  return out;
}

PinningProblem::PinningProblem(IonCrystal crystal, CouplingMatrix target, AxisSet pin_axes,
                               Eigen::Vector3d drive_axis, double curvature_scale, double resonance_guard,
                               SymmetryCells cells)
    : crystal_(std::move(crystal)),
      target_(std::move(target)),
      axes_(pin_axes),
      drive_axis_(drive_axis),
      scale_(curvature_scale),
      guard_(resonance_guard),
      cells_(std::move(cells)) {
  require(target_.rows() == crystal_.ion_count(), "pinning problem: target size differs from ion count");
  require(int(cells_.orbit_of.size()) == crystal_.ion_count(), "pinning problem: orbit map size differs");
  require(scale_ > 0.0, "pinning problem: curvature scale must be positive");
  base_ = build_hessian(crystal_).a;
}

DriveConfig PinningProblem::drive(double mu) const {
  DriveConfig d;
  d.mu = mu;
  d.axis = drive_axis_;
  d.resonance_guard = guard_;
  return d;
}

Eigen::VectorXd PinningProblem::curvature(const Eigen::VectorXd& v) const { return scale_ * cells_.expand(v); }

TweezerPattern PinningProblem::pattern(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd k = curvature(v);
  return TweezerPattern::on_axes(std::span<const double>(k.data(), std::size_t(k.size())), axes_);
}

HessianMatrix PinningProblem::hessian(const Eigen::VectorXd& v) const {
  const Eigen::VectorXd k = curvature(v);
  HessianMatrix h;
  h.a = base_;
  for (Eigen::Index i = 0; i < k.size(); ++i)
    for (int a : axes_.indices()) h.a(3 * i + a, 3 * i + a) += k[i];
  const double wbar = crystal_.trap.mean_frequency();
  h.reference_scale = wbar * wbar;
  return h;
}

std::pair<CouplingMatrix, ModeSpectrum> PinningProblem::realize(const Eigen::VectorXd& v, double mu) const {
  ModeSpectrum s = mode_spectrum(hessian(v));
  CouplingMatrix j = coupling_matrix(s, drive(mu), crystal_.species);
  return {std::move(j), std::move(s)};
}

double PinningProblem::epsilon(const Eigen::VectorXd& v, double mu, Eigen::VectorXd* grad) const {
  try {
    const auto [j, spectrum] = realize(v, mu);
    const CouplingError e = coupling_error(target_, j);
    if (grad != nullptr) {
      const Eigen::MatrixXd r = target_ - e.normalized;
      const double rn = r.norm();
      grad->setZero(parameter_count());
      if (rn > 0.0) {
        // d(eps) through s J with s = max|J_T| / |J_rc|, the arg-max held fixed.
        Eigen::MatrixXd g = r;
        g(e.argmax_row, e.argmax_col) -= (r.cwiseProduct(j)).sum() / j(e.argmax_row, e.argmax_col);
        g *= -e.scale / (target_.norm() * rn);
        const Eigen::VectorXd diag = coupling_vjp(spectrum, drive(mu), crystal_.species, g);
        *grad = scale_ * cells_.reduce(reduce_to_ions(diag, axes_));
      }
    }
    return e.epsilon;
  } catch (const Error& err) {
    if (barrier_error(err.code())) return kInf;
    throw;
  }
}

IonCrystal stage_crystal(const TrapConfig& trap_template, double omega_z, const SpeciesConstants& species,
                         GeometryModel model, std::uint64_t seed) {
  TrapConfig trap = trap_template;
  trap.omega[2] = omega_z;
  validate(trap);
  auto equidistant = [&] {
    IonCrystal c;
    c.trap = trap;
    c.species = species;
    c.positions = trap.ion_count == 1
                      ? Positions(Positions::Zero(1, 3))
                      : make_lattice(LatticeKind::Chain, trap.ion_count,
                                     equidistant_spacing(omega_z, trap.ion_count, species));
    c.dimensionality = Dimensionality::Chain;
    return c;
  };
  if (model == GeometryModel::Equidistant) return equidistant();
  IonCrystal ground = solve_ground_state(trap, species, seed);
  if (model == GeometryModel::Auto && ground.dimensionality == Dimensionality::Chain) return equidistant();
  return ground;
}

namespace {

struct Bounds {
  Eigen::VectorXd lo, hi;
};

Bounds pin_bounds(const SearchSpace& space, int count) {
  const double scale = space.pin_max * space.pin_max;
  return {Eigen::VectorXd::Constant(count, signed_square(space.pin_min) / scale), Eigen::VectorXd::Ones(count)};
}

BoxObjective pin_objective(const PinningProblem& prob, double mu) {
  return [&prob, mu](const Eigen::VectorXd& v, Eigen::VectorXd* g) { return prob.epsilon(v, mu, g); };
}

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
  if (a.omega_z != b.omega_z) return a.omega_z < b.omega_z;
  if (a.mu != b.mu) return a.mu < b.mu;
  return std::lexicographical_compare(a.curvature.begin(), a.curvature.end(), b.curvature.begin(),
                                      b.curvature.end());
}

std::vector<IonPair> constraint_selection(const SearchSpace& space, const IonCrystal& crystal,
                                          const CouplingMatrix& target) {
  switch (space.constraint_pairs) {
    case PairSelection::NearestNeighbor:
      return nearest_neighbor_pairs(crystal.positions);
    case PairSelection::All:
      return all_pairs(crystal.ion_count());
    case PairSelection::TargetEdges:
      break;
  }
  std::vector<IonPair> pairs;
  for (const auto& pr : all_pairs(crystal.ion_count()))
    if (target(pr.first, pr.second) != 0.0) pairs.push_back(pr);
  return pairs;
}

struct CellOutcome {
  CellReport report;
  std::optional<Candidate> candidate;
  LbfgsbResult best_run;
  int iterations = 0;
  int evaluations = 0;
};

CellOutcome run_cell(const TargetSpec& target_spec, const SearchSpace& space, const IonCrystal& crystal,
                     double omega_z, double mu, std::uint64_t cell_key) {
  CellOutcome out;
  out.report.omega_z = omega_z;
  out.report.mu = mu;
  const int n = crystal.ion_count();
  const PinningProblem prob(crystal, build_target(target_spec, crystal.positions), space.pin_axes, space.drive_axis,
                            space.pin_max * space.pin_max, space.resonance_guard, trivial_cells(n));

  CouplingMatrix native;
  ModeSpectrum spectrum;
  try {
    std::tie(native, spectrum) = prob.realize(Eigen::VectorXd::Zero(n), mu);
  } catch (const Error& err) {
    if (!barrier_error(err.code())) throw;
    out.report.status = err.code() == ErrorCode::Resonance ? "resonant" : "unstable";
    return out;
  }

  if (space.feasibility_filter) {
    const auto selection = constraint_selection(space, crystal, prob.target());
    try {
      const CouplingGradient grads = reduce_to_ions(
          coupling_gradient_adjoint(spectrum, prob.drive(mu), crystal.species, selection), space.pin_axes);
      const double floor = default_gradient_floor(native, spectrum.reference_scale);
      const SignConstraintSystem sys = build_sign_constraints(prob.target(), native, grads, selection, -1.0, floor);
      const FeasibilityVerdict verdict = feasibility_test(sys, space.pinning_sign);
      out.report.feasible = verdict.feasible;
      out.report.margin = verdict.margin;
      out.report.constraints = sys.constraint_count();
    } catch (const Error& err) {
      if (!barrier_error(err.code())) throw;
      out.report.status = "degenerate";
      return out;
    }
    if (!out.report.feasible) {
      out.report.status = "infeasible";
      return out;
    }
    out.report.status = "feasible";
  } else {
    out.report.feasible = true;
    out.report.status = "skipped-filter-off";
  }

  const Bounds b = pin_bounds(space, n);
  const BoxObjective f = pin_objective(prob, mu);
  double best = kInf;
  for (int r = 0; r < space.restarts; ++r) {
    CounterRng rng(space.seed, (cell_key << 16) | std::uint64_t(r));
    Eigen::VectorXd v0(n);
    for (int i = 0; i < n; ++i) {
      const double w = rng.uniform(0.0, 0.1);
      v0[i] = w * w;
    }
    LbfgsbResult run = minimize_box(f, v0, b.lo, b.hi, space.minimizer);
    out.iterations += run.iterations;
    out.evaluations += run.evaluations;
    if (run.trace.empty()) continue;
    if (run.f < best) {
      best = run.f;
      out.best_run = std::move(run);
    }
  }
  if (std::isfinite(best)) {
    out.candidate = Candidate{omega_z, mu, prob.curvature(out.best_run.x), best};
    out.report.epsilon = best;
  }
  return out;
}

}  // namespace

Stage1Result stage1_search(const TargetSpec& target, const SearchSpace& space, const TrapConfig& trap_template,
                           const SpeciesConstants& species) {
  validate(space);
  validate(target);
  const auto t0 = std::chrono::steady_clock::now();
  const auto omegas = linear_grid(space.omega_z_min, space.omega_z_max, space.grid_omega_z);
  const auto mus = linear_grid(space.mu_min, space.mu_max, space.grid_mu);

  std::vector<std::optional<IonCrystal>> crystals(omegas.size());
  std::vector<std::string> crystal_errors(omegas.size());
  detail::parallel_for(int(omegas.size()), space.threads, [&](int i) {
    try {
      crystals[std::size_t(i)] = stage_crystal(trap_template, omegas[std::size_t(i)], species, space.stage1_geometry,
                                               space.seed);
    } catch (const Error& err) {
      crystal_errors[std::size_t(i)] = std::string("crystal-") + std::string(to_string(err.code()));
    }
  });

  const int cells = int(omegas.size() * mus.size());
  std::vector<CellOutcome> outcomes(static_cast<std::size_t>(cells));
  detail::parallel_for(cells, space.threads, [&](int c) {
    const std::size_t io = std::size_t(c) / mus.size();
    const std::size_t im = std::size_t(c) % mus.size();
    auto& out = outcomes[std::size_t(c)];
    if (!crystals[io]) {
      out.report = {omegas[io], mus[im], crystal_errors[io]};
      return;
    }
    out = run_cell(target, space, *crystals[io], omegas[io], mus[im], std::uint64_t(c));
  });

  Stage1Result result;
  const LbfgsbResult* best_run = nullptr;
  for (auto& o : outcomes) {
    result.cells.push_back(o.report);
    result.record.iterations += o.iterations;
    result.record.evaluations += o.evaluations;
    if (o.candidate) {
      result.candidates.push_back(*o.candidate);
      if (!best_run || o.best_run.f < best_run->f) best_run = &o.best_run;
    }
  }
  std::sort(result.candidates.begin(), result.candidates.end(), candidate_less);
  if (!result.candidates.empty()) {
    for (auto& o : outcomes)
      if (o.candidate && o.candidate->epsilon == result.candidates.front().epsilon &&
          o.candidate->omega_z == result.candidates.front().omega_z && o.candidate->mu == result.candidates.front().mu)
        best_run = &o.best_run;
    result.record.trace = best_run->trace;
    result.record.converged = best_run->converged;
    result.record.note = best_run->reason;
  } else {
    result.record.note = "no feasible grid cell";
  }
  result.record.seconds = seconds_since(t0);
  return result;
}

Candidate stage2_refine(const Candidate& candidate, const TargetSpec& target, SymmetryGroup group,
                        const SearchSpace& space, const TrapConfig& trap_template, const SpeciesConstants& species,
                        StageRecord* record) {
  validate(space);
  const auto t0 = std::chrono::steady_clock::now();
  const IonCrystal crystal = stage_crystal(trap_template, candidate.omega_z, species, space.stage1_geometry, space.seed);
  require(candidate.curvature.size() == crystal.ion_count(), "stage 2: candidate size differs from ion count");
  SymmetryCells cells = symmetry_orbits(crystal.positions, group, 1e-6 * crystal.length_scale());
  const double scale = space.pin_max * space.pin_max;
  const PinningProblem prob(crystal, build_target(target, crystal.positions), space.pin_axes, space.drive_axis, scale,
                            space.resonance_guard, cells);
  const Bounds b = pin_bounds(space, prob.parameter_count());
  const Eigen::VectorXd v0 = cells.average(candidate.curvature / scale).cwiseMax(b.lo).cwiseMin(b.hi);

  LbfgsbResult run = minimize_box(pin_objective(prob, candidate.mu), v0, b.lo, b.hi, space.minimizer);
  StageRecord rec;
  rec.iterations = run.iterations;
  rec.evaluations = run.evaluations;
  rec.converged = run.converged;
  rec.trace = run.trace;
  rec.note = run.reason;
  Candidate out = candidate;
  if (!run.trace.empty() && std::isfinite(run.f)) {
    out.curvature = prob.curvature(run.x);
    out.epsilon = run.f;
  } else {
    rec.note = "symmetrized start inadmissible; stage-1 pattern kept";
  }
  rec.seconds = seconds_since(t0);
  if (record != nullptr) *record = std::move(rec);
  return out;
}

OptimizationResult stage3_finalize(const Candidate& candidate, const TargetSpec& target_spec, SymmetryGroup group,
                                   const SearchSpace& space, const TrapConfig& trap_template,
                                   const SpeciesConstants& species) {
  validate(space);
  const auto t0 = std::chrono::steady_clock::now();
  OptimizationResult res;
  res.crystal = stage_crystal(trap_template, candidate.omega_z, species, space.final_geometry, space.seed);
  const int n = res.crystal.ion_count();
  require(candidate.curvature.size() == n, "stage 3: candidate size differs from ion count");
  try {
    res.cells = symmetry_orbits(res.crystal.positions, group, 1e-6 * res.crystal.length_scale());
  } catch (const Error&) {
    res.cells = trivial_cells(n);
    res.stage3.note = "symmetry absent at true positions; per-ion parameters used. ";
  }

  const double scale = space.pin_max * space.pin_max;
  res.target_spec = target_spec;
  res.target = build_target(target_spec, res.crystal.positions);
  const PinningProblem prob(res.crystal, res.target, space.pin_axes, space.drive_axis, scale, space.resonance_guard,
                            res.cells);
  const Bounds b = pin_bounds(space, prob.parameter_count());
  Eigen::VectorXd v0 = res.cells.average(candidate.curvature / scale).cwiseMax(b.lo).cwiseMin(b.hi);
  double mu0 = std::clamp(candidate.mu, space.mu_min, space.mu_max);

  if (!std::isfinite(prob.epsilon(v0, mu0))) {
    // Warm start lands on a pole or an unstable point at the true positions;
    // search the mu range for an admissible restart.
    double best = kInf;
    double best_mu = mu0;
    Eigen::VectorXd best_v = v0;
    for (const Eigen::VectorXd& v : {v0, Eigen::VectorXd(Eigen::VectorXd::Zero(v0.size()))})
      for (double mu : linear_grid(space.mu_min, space.mu_max, 4 * space.grid_mu + 1)) {
        const double e = prob.epsilon(v, mu);
        if (e < best) {
          best = e;
          best_mu = mu;
          best_v = v;
        }
      }
    if (!std::isfinite(best))
      throw ConvergenceError("stage 3: no admissible starting point at the true equilibrium", kInf);
    v0 = best_v;
    mu0 = best_mu;
    res.stage3.note += "warm start inadmissible; restarted from mu scan. ";
  }

  const int p = prob.parameter_count();
  LbfgsbResult run;
  if (space.optimize_mu_in_stage3) {
    const BoxObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
      const double mu = mu0 * x[p];
      Eigen::VectorXd gv;
      const double e = prob.epsilon(x.head(p), mu, g != nullptr ? &gv : nullptr);
      if (g != nullptr && std::isfinite(e)) {
        g->resize(p + 1);
        g->head(p) = gv;
        const double h = 1e-5 * mu;
        const double fp = prob.epsilon(x.head(p), mu + h);
        const double fm = prob.epsilon(x.head(p), mu - h);
        double d = 0.0;
        if (std::isfinite(fp) && std::isfinite(fm)) d = (fp - fm) / (2.0 * h);
        else if (std::isfinite(fp)) d = (fp - e) / h;
        else if (std::isfinite(fm)) d = (e - fm) / h;
        (*g)[p] = d * mu0;
      }
      return e;
    };
    Eigen::VectorXd x0(p + 1), lo(p + 1), hi(p + 1);
    x0 << v0, 1.0;
    lo << b.lo, space.mu_min / mu0;
    hi << b.hi, space.mu_max / mu0;
    run = minimize_box(f, x0, lo, hi, space.minimizer);
    res.mu = mu0 * run.x[p];
    v0 = run.x.head(p);
  } else {
    run = minimize_box(pin_objective(prob, mu0), v0, b.lo, b.hi, space.minimizer);
    res.mu = mu0;
    v0 = run.x;
  }

  res.stage3.iterations = run.iterations;
  res.stage3.evaluations = run.evaluations;
  res.stage3.converged = run.converged;
  res.stage3.trace = run.trace;
  res.stage3.note += run.reason;
  res.converged = run.converged;

  res.omega_z = candidate.omega_z;
  res.curvature = prob.curvature(v0);
  res.pinning = res.curvature.unaryExpr([](double k) { return signed_root(k); });
  res.tweezers = prob.pattern(v0);
  res.drive = prob.drive(res.mu);
  res.pin_axes = space.pin_axes;
  std::tie(res.realized, res.spectrum) = prob.realize(v0, res.mu);
  const CouplingError e = coupling_error(res.target, res.realized);
  res.normalized = e.normalized;
  res.epsilon = e.epsilon;
  res.stage3.seconds = seconds_since(t0);
  return res;
}

OptimizationResult run_pipeline(const TargetSpec& target, const SearchSpace& space, const TrapConfig& trap_template,
                                const SpeciesConstants& species, SymmetryGroup group) {
  const auto t0 = std::chrono::steady_clock::now();
  Stage1Result s1 = stage1_search(target, space, trap_template, species);
  if (s1.candidates.empty())
    throw ConvergenceError("stage 1: no grid cell passed the feasibility test or produced a finite error", kInf);

  std::optional<OptimizationResult> best;
  const std::size_t k = std::min<std::size_t>(std::size_t(space.top_candidates), s1.candidates.size());
  for (std::size_t c = 0; c < k; ++c) {
    StageRecord rec2;
    Candidate refined;
    try {
      refined = stage2_refine(s1.candidates[c], target, group, space, trap_template, species, &rec2);
    } catch (const Error& err) {
      throw Error(err.code(), std::string("stage 2: ") + err.what());
    }
    OptimizationResult r;
    try {
      r = stage3_finalize(refined, target, group, space, trap_template, species);
    } catch (const ConvergenceError&) {
      if (c + 1 < k || best) continue;
      throw;
    } catch (const Error& err) {
      throw Error(err.code(), std::string("stage 3: ") + err.what());
    }
    r.stage2 = std::move(rec2);
    if (!best || r.epsilon < best->epsilon) best = std::move(r);
  }
  if (!best) throw ConvergenceError("stage 3: no candidate could be finalized", kInf);
  best->grid = std::move(s1.cells);
  best->stage1 = std::move(s1.record);
  best->seconds = seconds_since(t0);
  return *best;
}

MuScan unpinned_mu_scan(const IonCrystal& crystal, const CouplingMatrix& target, const Eigen::Vector3d& drive_axis,
                        double mu_min, double mu_max, int points, double resonance_guard) {
  const PinningProblem prob(crystal, target, AxisSet{Axis::X}, drive_axis, 1.0, resonance_guard,
                            trivial_cells(crystal.ion_count()));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(crystal.ion_count());
  MuScan scan;
  scan.mus = linear_grid(mu_min, mu_max, points);
  std::size_t best = 0;
  for (std::size_t i = 0; i < scan.mus.size(); ++i) {
    scan.epsilons.push_back(prob.epsilon(zero, scan.mus[i]));
    if (scan.epsilons[i] < scan.epsilons[best]) best = i;
  }
  scan.mu = scan.mus[best];
  scan.epsilon = scan.epsilons[best];
  if (scan.mus.size() < 3 || !std::isfinite(scan.epsilon)) return scan;

  double a = scan.mus[best == 0 ? 0 : best - 1];
  double b = scan.mus[std::min(best + 1, scan.mus.size() - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = prob.epsilon(zero, c), fd = prob.epsilon(zero, d);
  for (int it = 0; it < 80 && b - a > 1e-12 * b; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - ratio * (b - a);
      fc = prob.epsilon(zero, c);
    } else {
      a = c, c = d, fc = fd;
      d = a + ratio * (b - a);
      fd = prob.epsilon(zero, d);
    }
  }
  for (auto [m, e] : {std::pair{c, fc}, std::pair{d, fd}})
    if (e < scan.epsilon) {
      scan.epsilon = e;
      scan.mu = m;
    }
  return scan;
}

}  // namespace tweezer
