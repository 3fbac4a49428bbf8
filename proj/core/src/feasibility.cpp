#include "tweezer/feasibility.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "tweezer/simplex.hpp"

namespace tweezer {

double default_delta_tolerance(const CouplingMatrix& target) { return 1e-3 * target.cwiseAbs().maxCoeff(); }

double default_gradient_floor(const CouplingMatrix& native, double reference_scale) {
  require(reference_scale > 0.0, "default_gradient_floor: reference scale must be positive");
  return 1e-12 * native.cwiseAbs().maxCoeff() / reference_scale;
}

SignConstraintSystem build_sign_constraints(const CouplingMatrix& target, const CouplingMatrix& native,
                                            const CouplingGradient& gradients, const std::vector<IonPair>& selection,
                                            double tol_delta, double gradient_floor) {
  require(target.rows() == native.rows() && target.cols() == native.cols(),
          "build_sign_constraints: target and native sizes differ");
  if (tol_delta < 0.0) tol_delta = default_delta_tolerance(target);

  std::map<IonPair, Eigen::Index> index;
  for (std::size_t r = 0; r < gradients.pairs.size(); ++r) {
    auto [k, l] = gradients.pairs[r];
    index[{std::min(k, l), std::max(k, l)}] = static_cast<Eigen::Index>(r);
  }

  const CouplingMatrix normalized = coupling_error(target, native).normalized;
  SignConstraintSystem sys;
  std::vector<Eigen::VectorXd> rows;
  for (const auto& [k0, l0] : selection) {
    const int k = std::min(k0, l0), l = std::max(k0, l0);
    auto it = index.find({k, l});
    if (it == index.end())
      fail(ErrorCode::InvalidArgument, "build_sign_constraints: no gradient for pair (" + std::to_string(k) + ", " +
                                           std::to_string(l) + ")");
    const double delta = target(k, l) - normalized(k, l);
    if (std::abs(delta) < tol_delta) continue;
    const int s = delta > 0.0 ? 1 : -1;
    Eigen::VectorXd row = double(s) * gradients.rows.row(it->second).transpose();
    if (row.cwiseAbs().maxCoeff() <= gradient_floor) row.setZero();
    rows.push_back(std::move(row));
    sys.provenance.push_back({{k, l}, s});
  }
  sys.x.resize(static_cast<Eigen::Index>(rows.size()), gradients.rows.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) sys.x.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return sys;
}

FeasibilityVerdict feasibility_test(const Eigen::MatrixXd& x, PinningSign sign, double tol_margin) {
  require(x.allFinite(), "feasibility_test: constraint matrix must be finite");
  const Eigen::Index c = x.rows();
  const Eigen::Index p = x.cols();
  FeasibilityVerdict v;
  if (c == 0) {
    v.feasible = true;
    v.witness = Eigen::VectorXd::Zero(p);
    v.margin = std::numeric_limits<double>::infinity();
    return v;
  }

  Eigen::MatrixXd xh = x;
  for (Eigen::Index r = 0; r < c; ++r) {
    const double s = xh.row(r).cwiseAbs().maxCoeff();
    if (s > 0.0) xh.row(r) /= s;
  }

  // Shift to non-negative variables: w = u - shift (shift 1 when free), t = tau - T0.
  // Each row becomes  -X_hat u + tau <= T0 - shift * rowsum, which is >= 1 > 0.
  const double shift = sign == PinningSign::Free ? 1.0 : 0.0;
  const double upper = sign == PinningSign::Free ? 2.0 : 1.0;
  const double t0 = double(p) + 1.0;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(c + p, p + 1);
  Eigen::VectorXd b(c + p);
  a.topLeftCorner(c, p) = -xh;
  a.topRightCorner(c, 1).setOnes();
  b.head(c) = Eigen::VectorXd::Constant(c, t0) - shift * xh.rowwise().sum();
  a.bottomLeftCorner(p, p).setIdentity();
  b.tail(p).setConstant(upper);
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(p + 1);
  obj[p] = 1.0;

  const LpResult lp = maximize_lp(obj, a, b);
  if (lp.status != LpStatus::Optimal) fail(ErrorCode::Convergence, "feasibility_test: LP did not reach optimum");
  Eigen::VectorXd w = lp.x.head(p).array() - shift;
  v.margin = lp.x[p] - t0;
  v.feasible = v.margin > tol_margin;
  const double norm = w.cwiseAbs().maxCoeff();
  v.witness = norm > 0.0 ? Eigen::VectorXd(w / norm) : w;
  return v;
}

FeasibilityVerdict feasibility_test(const SignConstraintSystem& system, PinningSign sign, double tol_margin) {
  return feasibility_test(system.x, sign, tol_margin);
}

}  // namespace tweezer
