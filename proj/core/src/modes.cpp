#include "tweezer/modes.hpp"

#include <cmath>

namespace tweezer {

HessianMatrix build_hessian(const IonCrystal& crystal, const TweezerPattern& tweezers) {
  validate(tweezers);
  require(tweezers.ion_count() == crystal.ion_count(), "build_hessian: tweezer pattern size differs from ion count");
  HessianMatrix h;
  h.a = potential_hessian(crystal.positions, crystal.trap, crystal.species) / crystal.species.mass;
  h.a = 0.5 * (h.a + h.a.transpose()).eval();
  // Harmonic tweezers add their (mass-normalized) curvature whatever their centers.
  for (int i = 0; i < crystal.ion_count(); ++i) h.a.block<3, 3>(3 * i, 3 * i) += tweezers.curvature[std::size_t(i)];
  const double wbar = crystal.trap.mean_frequency();
  h.reference_scale = wbar * wbar;
  return h;
}

HessianMatrix build_hessian(const IonCrystal& crystal) {
  return build_hessian(crystal, TweezerPattern::none(crystal.ion_count()));
}

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak * (1.0 - 1e-8)) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

// Replace the columns [begin, end) by an orthonormal basis of their span built
// from projected canonical vectors, so the result does not depend on the solver.
void canonicalize_subspace(Eigen::MatrixXd& vectors, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index dim = end - begin;
  const Eigen::MatrixXd basis = vectors.middleCols(begin, dim);
  Eigen::MatrixXd fresh(vectors.rows(), dim);
  Eigen::Index found = 0;
  for (Eigen::Index e = 0; e < vectors.rows() && found < dim; ++e) {
    Eigen::VectorXd v = basis * basis.row(e).transpose();
    for (Eigen::Index k = 0; k < found; ++k) v -= fresh.col(k).dot(v) * fresh.col(k);
    const double norm = v.norm();
    if (norm < 1e-6) continue;
    v /= norm;
    for (Eigen::Index k = 0; k < found; ++k) v -= fresh.col(k).dot(v) * fresh.col(k);
    fresh.col(found++) = v.normalized();
  }
  if (found == dim) vectors.middleCols(begin, dim) = fresh;
}

}  // namespace

ModeSpectrum mode_spectrum(const HessianMatrix& hessian) {
  const Eigen::Index n = hessian.a.rows();
  require(n > 0 && hessian.a.cols() == n, "mode_spectrum: Hessian must be square and non-empty");
  require(hessian.reference_scale > 0.0, "mode_spectrum: reference scale must be positive");
  const double asym = (hessian.a - hessian.a.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(1.0, hessian.a.cwiseAbs().maxCoeff()), "mode_spectrum: Hessian is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian.a);
  if (eig.info() != Eigen::Success) fail(ErrorCode::Convergence, "mode_spectrum: eigensolver failed");

  ModeSpectrum s;
  s.reference_scale = hessian.reference_scale;
  s.eigenvalues = eig.eigenvalues();
  s.vectors = eig.eigenvectors();
  if (s.eigenvalues[0] < -psd_tolerance(hessian.reference_scale))
    fail(ErrorCode::UnstableCrystal, "mode_spectrum: negative eigenvalue " + std::to_string(s.eigenvalues[0]) +
                                          " rad^2/s^2 (crystal unstable)");

  const double deg = degeneracy_tolerance(hessian.reference_scale);
  for (Eigen::Index begin = 0; begin < n;) {
    Eigen::Index end = begin + 1;
    while (end < n && s.eigenvalues[end] - s.eigenvalues[end - 1] < deg) ++end;
    if (end - begin > 1) canonicalize_subspace(s.vectors, begin, end);
    begin = end;
  }
  for (Eigen::Index m = 0; m < n; ++m) fix_sign(s.vectors.col(m));

  s.frequencies = s.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  s.direction_weights.resize(n, 3);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (int a = 0; a < 3; ++a) {
      double w = 0.0;
      for (Eigen::Index j = 0; j < n / 3; ++j) w += s.vectors(3 * j + a, m) * s.vectors(3 * j + a, m);
      s.direction_weights(m, a) = w;
    }
  }
  return s;
}

std::vector<bool> modes_along(const ModeSpectrum& spectrum, AxisSet axes, double threshold) {
  std::vector<bool> out(static_cast<std::size_t>(spectrum.mode_count()), false);
  for (int m = 0; m < spectrum.mode_count(); ++m) {
    double w = 0.0;
    for (int a : axes.indices()) w += spectrum.direction_weights(m, a);
    out[static_cast<std::size_t>(m)] = w >= threshold;
  }
  return out;
}

Eigen::MatrixXd drive_projection(const ModeSpectrum& spectrum, const Eigen::Vector3d& drive_axis) {
  require(std::abs(drive_axis.norm() - 1.0) < 1e-9, "drive axis must be a unit vector");
  const int n = spectrum.ion_count();
  Eigen::MatrixXd b(n, spectrum.mode_count());
  for (int j = 0; j < n; ++j) b.row(j) = drive_axis.transpose() * spectrum.vectors.middleRows(3 * j, 3);
  return b;
}

double lamb_dicke_scale(double k_eff, double omega, const SpeciesConstants& species) {
  if (!(omega > 0.0)) fail(ErrorCode::DivisionGuard, "Lamb-Dicke parameter of a zero-frequency mode");
  return k_eff * std::sqrt(species.constants.hbar / (2.0 * species.mass * omega));
}

Eigen::MatrixXd lamb_dicke(const ModeSpectrum& spectrum, double k_eff, const Eigen::Vector3d& drive_axis,
                           const SpeciesConstants& species) {
  Eigen::MatrixXd eta = drive_projection(spectrum, drive_axis);
  for (int m = 0; m < spectrum.mode_count(); ++m) {
    if (eta.col(m).squaredNorm() <= 1e-20) {
      eta.col(m).setZero();
      continue;
    }
    eta.col(m) *= lamb_dicke_scale(k_eff, spectrum.frequencies[m], species);
  }
  return eta;
}

}  // namespace tweezer
