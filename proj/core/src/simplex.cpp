#include "tweezer/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tweezer/error.hpp"

namespace tweezer {

LpResult maximize_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iterations) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  require(c.size() == n && b.size() == m, "maximize_lp: dimension mismatch");
  require(m == 0 || b.minCoeff() >= 0.0, "maximize_lp: right-hand side must be non-negative");
  // Reduced costs below -cost_tol enter; pivots need entries above pivot_tol.
  // Round-off on degenerate vertices can otherwise keep Bland's rule cycling.
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
  const double cost_tol = 1e-10 * scale;
  const double pivot_tol = 1e-11 * scale;

  // Tableau rows 0..m-1: [A | I | b]; row m: reduced costs [-c | 0 | z].
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.topRightCorner(m, 1) = b;
  t.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

  LpResult result;
  const Eigen::Index rhs = n + m;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (t(m, j) < -cost_tol) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    if (result.iterations >= max_iterations) {
      result.status = LpStatus::IterationLimit;
      break;
    }

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < m; ++r) {
      if (t(r, enter) <= pivot_tol) continue;
      const double ratio = t(r, rhs) / t(r, enter);
      const double tie = 1e-12 * std::max(1.0, std::abs(best));
      if (leave < 0 || ratio < best - tie ||
          (ratio <= best + tie && basis[std::size_t(r)] < basis[std::size_t(leave)])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave < 0) {
      result.status = LpStatus::Unbounded;
      break;
    }

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r <= m; ++r)
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    basis[std::size_t(leave)] = enter;
    // Keep degenerate rows exactly degenerate; tiny negatives would break the ratio test.
    for (Eigen::Index r = 0; r < m; ++r)
      if (t(r, rhs) < 0.0) t(r, rhs) = 0.0;
    ++result.iterations;
  }

  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r)
    if (basis[std::size_t(r)] < n) result.x[basis[std::size_t(r)]] = t(r, rhs);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace tweezer
