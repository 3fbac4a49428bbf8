#include "tweezer/sensitivity.hpp"

#include <cmath>

namespace tweezer {

std::vector<IonPair> all_pairs(int ion_count) {
  std::vector<IonPair> out;
  for (int k = 0; k < ion_count; ++k)
    for (int l = k + 1; l < ion_count; ++l) out.emplace_back(k, l);
  return out;
}

namespace {

// phi(n, m) such that dJ = sum_nm C_nm (pref/2) S_nm phi_nm, C = U^T dA U.
Eigen::MatrixXd perturbation_kernel(const ModeSpectrum& spectrum, const DriveConfig& drive, const Eigen::MatrixXd& b) {
  const int n = spectrum.mode_count();
  const Eigen::VectorXd theta = detuning_weights(spectrum, drive);
  const Eigen::VectorXd& lam = spectrum.eigenvalues;
  const double deg = degeneracy_tolerance(spectrum.reference_scale);
  Eigen::VectorXd weight(n);
  for (int m = 0; m < n; ++m) weight[m] = b.col(m).squaredNorm();

  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const bool in_p = drive.includes(p);
      const bool in_q = drive.includes(q);
      if (in_p && in_q) {
        phi(p, q) = theta[p] * theta[q];
      } else if (in_p != in_q) {
        const int in = in_p ? p : q;
        const int out = in_p ? q : p;
        if (weight[in] <= 1e-10 || weight[out] <= 1e-10) continue;
        const double gap = lam[in] - lam[out];
        if (std::abs(gap) < deg)
          fail(ErrorCode::Degeneracy, "included mode " + std::to_string(in) + " is degenerate with excluded mode " +
                                          std::to_string(out));
        phi(p, q) = theta[in] / gap;
      }
    }
  }
  return phi;
}

Eigen::VectorXd diagonal_of_transform(const Eigen::MatrixXd& u, const Eigen::MatrixXd& k) {
  return ((u * k).cwiseProduct(u)).rowwise().sum();
}

}  // namespace

Eigen::VectorXd coupling_vjp(const ModeSpectrum& spectrum, const DriveConfig& drive, const SpeciesConstants& species,
                             const Eigen::MatrixXd& g) {
  validate(drive);
  const int n_ion = spectrum.ion_count();
  require(g.rows() == n_ion && g.cols() == n_ion, "coupling_vjp: cotangent has wrong size");
  check_resonance(spectrum, drive);
  Eigen::MatrixXd gs = 0.5 * (g + g.transpose());
  gs.diagonal().setZero();
  const Eigen::MatrixXd b = drive_projection(spectrum, drive.axis);
  const Eigen::MatrixXd phi = perturbation_kernel(spectrum, drive, b);
  const Eigen::MatrixXd k = coupling_prefactor(drive, species) * (b.transpose() * gs * b).cwiseProduct(phi);
  return diagonal_of_transform(spectrum.vectors, k);
}

CouplingGradient coupling_gradient_adjoint(const ModeSpectrum& spectrum, const DriveConfig& drive,
                                           const SpeciesConstants& species, const std::vector<IonPair>& pairs) {
  validate(drive);
  check_resonance(spectrum, drive);
  const int n_ion = spectrum.ion_count();
  const Eigen::MatrixXd b = drive_projection(spectrum, drive.axis);
  const Eigen::MatrixXd phi = perturbation_kernel(spectrum, drive, b);
  const double pref = coupling_prefactor(drive, species);

  CouplingGradient out;
  out.pairs = pairs;
  out.rows.resize(static_cast<Eigen::Index>(pairs.size()), spectrum.mode_count());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto [k, l] = pairs[r];
    require(k >= 0 && l >= 0 && k < n_ion && l < n_ion, "coupling gradient: ion index out of range");
    if (k == l) {
      out.rows.row(static_cast<Eigen::Index>(r)).setZero();
      continue;
    }
    const Eigen::MatrixXd s = b.row(k).transpose() * b.row(l) + b.row(l).transpose() * b.row(k);
    const Eigen::MatrixXd kern = 0.5 * pref * s.cwiseProduct(phi);
    out.rows.row(static_cast<Eigen::Index>(r)) = diagonal_of_transform(spectrum.vectors, kern).transpose();
  }
  return out;
}

Eigen::VectorXd reduce_to_ions(const Eigen::VectorXd& diagonal_gradient, AxisSet axes) {
  require(diagonal_gradient.size() % 3 == 0, "reduce_to_ions: length must be a multiple of 3");
  const Eigen::Index n = diagonal_gradient.size() / 3;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int a : axes.indices()) out[i] += diagonal_gradient[3 * i + a];
  return out;
}

CouplingGradient reduce_to_ions(const CouplingGradient& gradient, AxisSet axes) {
  CouplingGradient out;
  out.pairs = gradient.pairs;
  out.rows.resize(gradient.rows.rows(), gradient.rows.cols() / 3);
  for (Eigen::Index r = 0; r < gradient.rows.rows(); ++r)
    out.rows.row(r) = reduce_to_ions(Eigen::VectorXd(gradient.rows.row(r).transpose()), axes).transpose();
  return out;
}

CouplingGradient coupling_gradient_fd(const CouplingBuilder& builder, const Eigen::VectorXd& base, double step,
                                      const std::vector<IonPair>& pairs) {
  require(step > 0.0, "coupling_gradient_fd: step must be positive");
  CouplingGradient out;
  out.pairs = pairs;
  out.rows.resize(static_cast<Eigen::Index>(pairs.size()), base.size());
  for (Eigen::Index p = 0; p < base.size(); ++p) {
    Eigen::VectorXd plus = base, minus = base;
    plus[p] += step;
    minus[p] -= step;
    const CouplingMatrix jp = builder(plus);
    const CouplingMatrix jm = builder(minus);
    for (std::size_t r = 0; r < pairs.size(); ++r)
      out.rows(static_cast<Eigen::Index>(r), p) = (jp(pairs[r].first, pairs[r].second) -
                                                   jm(pairs[r].first, pairs[r].second)) / (2.0 * step);
  }
  return out;
}

}  // namespace tweezer
