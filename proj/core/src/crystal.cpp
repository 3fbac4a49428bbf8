#include "tweezer/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tweezer/rng.hpp"

namespace tweezer {

void validate(const SpeciesConstants& species) {
  require(species.mass > 0.0 && std::isfinite(species.mass), "species mass must be positive");
  require(species.charge > 0.0 && std::isfinite(species.charge), "species charge must be positive");
}

void validate(const TrapConfig& trap) {
  require(trap.ion_count >= 1, "trap: ion count must be at least 1");
  for (int a = 0; a < 3; ++a)
    require(trap.omega[a] > 0.0 && std::isfinite(trap.omega[a]), "trap: frequencies must be positive");
}

double equidistant_spacing(double omega_z_eff, int ion_count, const SpeciesConstants& species) {
  require(omega_z_eff > 0.0, "equidistant_spacing: omega must be positive");
  require(ion_count >= 2, "equidistant_spacing: need at least two ions");
  validate(species);
  return coulomb_length(omega_z_eff, species) * 2.0 / std::pow(double(ion_count), 0.56);
}

double min_pair_distance(const Positions& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < positions.rows(); ++i)
    for (Eigen::Index j = i + 1; j < positions.rows(); ++j)
      best = std::min(best, (positions.row(i) - positions.row(j)).norm());
  return best;
}

namespace {

void check_distinct(const Positions& positions) {
  for (Eigen::Index i = 0; i < positions.rows(); ++i)
    for (Eigen::Index j = i + 1; j < positions.rows(); ++j)
      if ((positions.row(i) - positions.row(j)).norm() <= 0.0)
        fail(ErrorCode::SingularGeometry,
             "ions " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

}  // namespace

PotentialEvaluation potential_and_gradient(const Positions& positions, const TrapConfig& trap,
                                           const SpeciesConstants& species,
                                           const TweezerPattern* tweezers) {
  check_distinct(positions);
  const Eigen::Index n = positions.rows();
  const double m = species.mass;
  const double kappa = species.coulomb_constant();
  const Eigen::RowVector3d k_trap = (m * trap.omega.array().square()).matrix().transpose();

  PotentialEvaluation out;
  out.gradient.setZero(n, 3);
  double energy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVector3d r = positions.row(i);
    energy += 0.5 * (k_trap.array() * r.array().square()).sum();
    out.gradient.row(i) += k_trap.cwiseProduct(r);
  }

  if (tweezers != nullptr && tweezers->anchors) {
    require(tweezers->ion_count() == n, "potential: tweezer pattern size differs from ion count");
    const Positions centers = tweezers->centers();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector3d d = (positions.row(i) - centers.row(i)).transpose();
      const Eigen::Vector3d f = m * (tweezers->curvature[static_cast<std::size_t>(i)] * d);
      energy += 0.5 * d.dot(f);
      out.gradient.row(i) += f.transpose();
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::RowVector3d r = positions.row(i) - positions.row(j);
      const double d = r.norm();
      energy += kappa / d;
      const Eigen::RowVector3d f = (kappa / (d * d * d)) * r;
      out.gradient.row(i) -= f;
      out.gradient.row(j) += f;
    }
  }
  out.energy = energy;
  return out;
}

Eigen::MatrixXd potential_hessian(const Positions& positions, const TrapConfig& trap,
                                  const SpeciesConstants& species, const TweezerPattern* tweezers) {
  check_distinct(positions);
  const Eigen::Index n = positions.rows();
  const double m = species.mass;
  const double kappa = species.coulomb_constant();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);

  for (Eigen::Index i = 0; i < n; ++i) {
    h.block<3, 3>(3 * i, 3 * i).diagonal() += m * trap.omega.array().square().matrix();
    if (tweezers != nullptr) h.block<3, 3>(3 * i, 3 * i) += m * tweezers->curvature[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Vector3d r = (positions.row(i) - positions.row(j)).transpose();
      const double d = r.norm();
      const double d3 = d * d * d;
      // d^2/dx_i dx_i of kappa/|r| = kappa (3 r r^T / d^2 - I) / d^3
      const Eigen::Matrix3d block = kappa * (3.0 * r * r.transpose() / (d * d) - Eigen::Matrix3d::Identity()) / d3;
      h.block<3, 3>(3 * i, 3 * i) += block;
      h.block<3, 3>(3 * j, 3 * j) += block;
      h.block<3, 3>(3 * i, 3 * j) -= block;
      h.block<3, 3>(3 * j, 3 * i) -= block;
    }
  }
  return h;
}

Positions reflect(const Positions& positions, Axis axis) {
  Positions out = positions;
  out.col(static_cast<int>(axis)) *= -1.0;
  return out;
}

namespace {

Eigen::VectorXd flatten(const Positions& p) { return Eigen::Map<const Eigen::VectorXd>(p.data(), p.size()); }

Positions unflatten(const Eigen::VectorXd& v) {
  return Eigen::Map<const Positions>(v.data(), v.size() / 3, 3);
}

Dimensionality classify_geometry(const Positions& p, const TrapConfig& trap, double length, bool strict) {
  const double tol = 1e-6 * length;
  if (p.rows() <= 1) return Dimensionality::Chain;
  for (int a = 0; a < 3; ++a) {
    bool collinear = true;
    for (int b = 0; b < 3 && collinear; ++b)
      if (b != a && p.col(b).cwiseAbs().maxCoeff() >= tol) collinear = false;
    if (collinear) return Dimensionality::Chain;
  }
  const double strongest = trap.omega.maxCoeff();
  for (int a = 0; a < 3; ++a) {
    if (trap.omega[a] < strongest * (1.0 - 1e-12)) continue;
    if (p.col(a).cwiseAbs().maxCoeff() < tol) return Dimensionality::Planar;
  }
  if (!strict) return Dimensionality::Planar;
  fail(ErrorCode::NonPlanar, "equilibrium is not confined to the plane of the two weakest trap axes");
}

}  // namespace

IonCrystal solve_equilibrium(const TrapConfig& trap, const SpeciesConstants& species,
                             const Positions& initial_guess, const TweezerPattern* tweezers,
                             const EquilibriumOptions& options) {
  validate(trap);
  validate(species);
  require(initial_guess.rows() == trap.ion_count, "solve_equilibrium: initial guess has wrong ion count");
  if (tweezers != nullptr) {
    validate(*tweezers);
    require(tweezers->ion_count() == trap.ion_count, "solve_equilibrium: tweezer pattern has wrong ion count");
  }
  check_distinct(initial_guess);

  // Centered tweezers have no force term; only anchored ones enter the solve.
  const TweezerPattern* active = (tweezers != nullptr && tweezers->anchors) ? tweezers : nullptr;

  const double omega_bar = trap.mean_frequency();
  const double length = coulomb_length(omega_bar, species);
  const double energy_unit = species.coulomb_constant() / length;
  const double force_unit = energy_unit / length;      // = M wbar^2 l
  const double stiffness_unit = force_unit / length;

  Eigen::VectorXd x = flatten(initial_guess) / length;
  auto evaluate = [&](const Eigen::VectorXd& xs) {
    auto pe = potential_and_gradient(unflatten(xs * length), trap, species, active);
    return std::pair<double, Eigen::VectorXd>{pe.energy / energy_unit, flatten(pe.gradient) / force_unit};
  };
  auto separated = [&](const Eigen::VectorXd& xs) {
    return min_pair_distance(unflatten(xs)) >= options.min_separation;
  };

  auto [energy, grad] = evaluate(x);
  double residual = grad.norm();
  int iteration = 0;
  while (residual >= options.tolerance) {
    if (iteration++ >= options.max_iterations)
      throw ConvergenceError("equilibrium solver did not converge (force residual " +
                                 std::to_string(residual) + ")",
                             residual);

    const Eigen::MatrixXd h = potential_hessian(unflatten(x * length), trap, species, active) / stiffness_unit;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    const double floor = 1e-9 * lam_max;

    Eigen::VectorXd step;
    const bool indefinite = lam.minCoeff() < -floor;
    if (!indefinite) {
      // Newton step on the non-degenerate subspace (drops symmetry zero modes).
      const Eigen::VectorXd proj = eig.eigenvectors().transpose() * grad;
      Eigen::VectorXd scaled = Eigen::VectorXd::Zero(proj.size());
      for (Eigen::Index k = 0; k < proj.size(); ++k)
        if (lam[k] > floor) scaled[k] = -proj[k] / lam[k];
      step = eig.eigenvectors() * scaled;
    } else {
      step = -grad / lam_max;
    }

    double alpha = 1.0;
    const double slope = grad.dot(step);
    bool accepted = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      const Eigen::VectorXd trial = x + alpha * step;
      if (!separated(trial)) continue;
      auto [e_trial, g_trial] = evaluate(trial);
      const bool armijo = e_trial <= energy + 1e-4 * alpha * slope;
      // Near convergence energy differences drop below rounding; use the residual instead.
      const bool flat = std::abs(e_trial - energy) <= 1e-13 * std::max(1.0, std::abs(energy));
      if (armijo || (flat && g_trial.norm() < residual)) {
        x = trial;
        energy = e_trial;
        grad = std::move(g_trial);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw ConvergenceError("equilibrium line search stalled (force residual " + std::to_string(residual) + ")",
                             residual);
    residual = grad.norm();
  }

  IonCrystal crystal;
  crystal.trap = trap;
  crystal.species = species;
  crystal.positions = unflatten(x * length);
  // Displaced tweezers may push ions out of plane on purpose; only trap-only
  // equilibria are required to be planar.
  crystal.dimensionality = classify_geometry(crystal.positions, trap, length, active == nullptr);
  return crystal;
}

Positions make_lattice(LatticeKind kind, int ion_count, double spacing, Axis normal) {
  require(spacing > 0.0, "make_lattice: spacing must be positive");
  require(ion_count >= 1, "make_lattice: ion count must be positive");
  Positions p = Positions::Zero(ion_count, 3);
  if (kind == LatticeKind::Chain) {
    for (int i = 0; i < ion_count; ++i) p(i, 2) = (i - 0.5 * (ion_count - 1)) * spacing;
    return p;
  }

  int shells = 0;
  while (hexagonal_count(shells) < ion_count) ++shells;
  if (hexagonal_count(shells) != ion_count)
    fail(ErrorCode::InvalidArgument,
         "make_lattice: triangular lattice supports centered hexagonal counts (1, 7, 19, 37, ...), got " +
             std::to_string(ion_count));

  const int n = static_cast<int>(normal);
  const int u = (n + 1) % 3;
  const int v = (n + 2) % 3;
  // Axial coordinates (q, r) with |q|, |r|, |q + r| <= shells, listed ring by ring.
  int idx = 0;
  for (int ring = 0; ring <= shells; ++ring) {
    for (int q = -ring; q <= ring; ++q) {
      for (int r = -ring; r <= ring; ++r) {
        const int s = -q - r;
        if (std::max({std::abs(q), std::abs(r), std::abs(s)}) != ring) continue;
        p(idx, u) = spacing * (q + 0.5 * r);
        p(idx, v) = spacing * (std::sqrt(3.0) / 2.0) * r;
        ++idx;
      }
    }
  }
  return p;
}

namespace {

bool is_stable(const IonCrystal& c) {
  const Eigen::MatrixXd a = potential_hessian(c.positions, c.trap, c.species) / c.species.mass;
  const double wbar = c.trap.mean_frequency();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() >
         -1e-6 * wbar * wbar;
}

}  // namespace

IonCrystal solve_ground_state(const TrapConfig& trap, const SpeciesConstants& species, std::uint64_t seed,
                              int random_restarts) {
  validate(trap);
  validate(species);
  const int n = trap.ion_count;

  Eigen::Index weak = 0, strong = 0;
  trap.omega.minCoeff(&weak);
  trap.omega.maxCoeff(&strong);

  std::vector<Positions> guesses;
  if (n == 1) {
    guesses.push_back(Positions::Zero(1, 3));
  } else {
    Positions chain = Positions::Zero(n, 3);
    const double d = equidistant_spacing(trap.omega[weak], n, species);
    for (int i = 0; i < n; ++i) chain(i, weak) = (i - 0.5 * (n - 1)) * d;
    guesses.push_back(chain);

    const int u = static_cast<int>((strong + 1) % 3);
    const int v = static_cast<int>((strong + 2) % 3);
    const double plane_omega = std::sqrt(trap.omega[u] * trap.omega[v]);
    const double ell = coulomb_length(plane_omega, species);
    int shells = 0;
    while (hexagonal_count(shells) < n) ++shells;
    if (hexagonal_count(shells) == n) guesses.push_back(make_lattice(LatticeKind::Triangular, n, ell, Axis(strong)));

    for (int r = 0; r < random_restarts; ++r) {
      CounterRng rng(seed, static_cast<std::uint64_t>(r));
      Positions g = Positions::Zero(n, 3);
      const double spread = ell * std::sqrt(double(n)) * 0.5;
      for (int i = 0; i < n; ++i) {
        g(i, u) = spread * rng.normal() * trap.omega[v] / plane_omega;
        g(i, v) = spread * rng.normal() * trap.omega[u] / plane_omega;
      }
      guesses.push_back(g);
    }
  }

  std::optional<IonCrystal> best;
  double best_energy = std::numeric_limits<double>::infinity();
  std::string last_error = "no initial guess converged";
  for (const auto& g : guesses) {
    try {
      IonCrystal c = solve_equilibrium(trap, species, g);
      if (!is_stable(c)) continue;
      const double e = potential_and_gradient(c.positions, trap, species).energy;
      if (!best || e < best_energy - 1e-12 * std::abs(best_energy)) {
        best_energy = e;
        best = std::move(c);
      }
    } catch (const Error& err) {
      last_error = err.what();
    }
  }
  if (!best) throw ConvergenceError("solve_ground_state: " + last_error, std::numeric_limits<double>::quiet_NaN());
  return *best;
}

}  // namespace tweezer
