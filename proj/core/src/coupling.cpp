#include "tweezer/coupling.hpp"

#include <cmath>
#include <complex>

namespace tweezer {

void validate(const DriveConfig& drive) {
  require(drive.mu > 0.0 && std::isfinite(drive.mu), "drive: beatnote must be positive");
  require(std::abs(drive.axis.norm() - 1.0) < 1e-9, "drive: axis must be a unit vector");
  require(drive.resonance_guard >= 0.0, "drive: resonance guard must be non-negative");
  if (drive.g) {
    require(*drive.g > 0.0, "drive: g must be positive");
    require(drive.k_eff > 0.0, "drive: k_eff must be positive when g is given");
  }
}

double coupling_prefactor(const DriveConfig& drive, const SpeciesConstants& species) {
  if (!drive.g) return 1.0;
  const double g = *drive.g;
  return g * g * species.constants.hbar * drive.k_eff * drive.k_eff / (2.0 * species.mass);
}

namespace {

bool coupled(const Eigen::MatrixXd& b, int m) { return b.col(m).squaredNorm() > 1e-10; }

}  // namespace

void check_resonance(const ModeSpectrum& spectrum, const DriveConfig& drive) {
  const Eigen::MatrixXd b = drive_projection(spectrum, drive.axis);
  for (int m = 0; m < spectrum.mode_count(); ++m) {
    if (!drive.includes(m) || !coupled(b, m)) continue;
    if (std::abs(drive.mu - spectrum.frequencies[m]) <= drive.resonance_guard)
      fail(ErrorCode::Resonance, "beatnote within the resonance guard of mode " + std::to_string(m));
  }
}

Eigen::VectorXd detuning_weights(const ModeSpectrum& spectrum, const DriveConfig& drive) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spectrum.mode_count());
  for (int m = 0; m < spectrum.mode_count(); ++m)
    if (drive.includes(m)) theta[m] = 1.0 / (drive.mu * drive.mu - spectrum.eigenvalues[m]);
  return theta;
}

CouplingMatrix clean_coupling(const Eigen::MatrixXd& m) {
  CouplingMatrix j = 0.5 * (m + m.transpose());
  j.diagonal().setZero();
  return j;
}

CouplingMatrix coupling_matrix(const ModeSpectrum& spectrum, const DriveConfig& drive,
                               const SpeciesConstants& species) {
  validate(drive);
  require(drive.mode_mask.empty() || int(drive.mode_mask.size()) == spectrum.mode_count(),
          "drive: mode mask size differs from mode count");
  check_resonance(spectrum, drive);
  const Eigen::MatrixXd b = drive_projection(spectrum, drive.axis);
  const Eigen::VectorXd theta = detuning_weights(spectrum, drive);
  return clean_coupling(coupling_prefactor(drive, species) * (b * theta.asDiagonal() * b.transpose()));
}

Eigen::MatrixXd drive_amplitudes(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                 const SpeciesConstants& species) {
  validate(drive);
  Eigen::MatrixXd b = drive_projection(spectrum, drive.axis);
  for (int m = 0; m < spectrum.mode_count(); ++m) {
    if (!drive.includes(m) || !coupled(b, m)) {
      b.col(m).setZero();
      continue;
    }
    const double w = spectrum.frequencies[m];
    if (drive.g)
      b.col(m) *= *drive.g * lamb_dicke_scale(drive.k_eff, w, species);
    else if (w > 0.0)
      b.col(m) /= std::sqrt(w);
    else
      fail(ErrorCode::DivisionGuard, "drive couples to a zero-frequency mode");
  }
  return b;
}

Eigen::MatrixXcd residual_displacement(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                       const SpeciesConstants& species, double t) {
  check_resonance(spectrum, drive);
  const Eigen::MatrixXd a = drive_amplitudes(spectrum, drive, species);
  const double mu = drive.mu;
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd out(a.rows(), a.cols());
  for (Eigen::Index m = 0; m < a.cols(); ++m) {
    const double w = spectrum.frequencies[m];
    const std::complex<double> bracket =
        mu - std::exp(i * (w * t)) * (mu * std::cos(mu * t) - i * w * std::sin(mu * t));
    const std::complex<double> factor = -i * bracket / (mu * mu - w * w);
    out.col(m) = a.col(m).cast<std::complex<double>>() * factor;
  }
  return out;
}

double ising_phase(const ModeSpectrum& spectrum, const DriveConfig& drive, const SpeciesConstants& species,
                   int j, int k, double t) {
  check_resonance(spectrum, drive);
  const Eigen::MatrixXd a = drive_amplitudes(spectrum, drive, species);
  require(j >= 0 && k >= 0 && j < a.rows() && k < a.rows(), "ising_phase: ion index out of range");
  const double mu = drive.mu;
  double beta = 0.0;
  for (Eigen::Index m = 0; m < a.cols(); ++m) {
    const double amp = a(j, m) * a(k, m);
    if (amp == 0.0) continue;
    const double w = spectrum.frequencies[m];
    const double bracket = mu * std::sin((mu - w) * t) / (mu - w) - mu * std::sin((mu + w) * t) / (mu + w) +
                           w * std::sin(2.0 * mu * t) / (2.0 * mu) - w * t;
    beta -= amp * bracket / (mu * mu - w * w);
  }
  return beta;
}

CouplingError coupling_error(const CouplingMatrix& target, const CouplingMatrix& realized) {
  require(target.rows() == realized.rows() && target.cols() == realized.cols(),
          "coupling_error: matrix sizes differ");
  CouplingError e;
  double peak = 0.0;
  for (Eigen::Index r = 0; r < realized.rows(); ++r)
    for (Eigen::Index c = 0; c < realized.cols(); ++c)
      if (std::abs(realized(r, c)) > peak) {
        peak = std::abs(realized(r, c));
        e.argmax_row = int(r);
        e.argmax_col = int(c);
      }
  if (!(peak > 0.0)) fail(ErrorCode::UndefinedNormalization, "coupling_error: realized couplings vanish");
  const double target_norm = target.norm();
  if (!(target_norm > 0.0)) fail(ErrorCode::UndefinedNormalization, "coupling_error: target couplings vanish");
  e.scale = target.cwiseAbs().maxCoeff() / peak;
  e.normalized = e.scale * realized;
  e.epsilon = (target - e.normalized).norm() / target_norm;
  return e;
}

}  // namespace tweezer
