#include "tweezer/lbfgsb.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "tweezer/error.hpp"

namespace tweezer {

namespace {

struct Pair {
  Eigen::VectorXd s, y;
  double rho;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Variables pinned at a bound with the gradient pushing outward.
Eigen::ArrayXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                         const Eigen::VectorXd& hi) {
  Eigen::ArrayXd m = Eigen::ArrayXd::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0) || lo[i] == hi[i]) m[i] = 0.0;
  return m;
}

Eigen::VectorXd two_loop(const std::deque<Pair>& mem, const Eigen::VectorXd& g, const Eigen::ArrayXd& mask) {
  Eigen::VectorXd q = (g.array() * mask).matrix();
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    const Eigen::VectorXd s = (mem[k].s.array() * mask).matrix();
    alpha[k] = mem[k].rho * s.dot(q);
    q -= alpha[k] * (mem[k].y.array() * mask).matrix();
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const Eigen::VectorXd y = (mem[k].y.array() * mask).matrix();
    const double beta = mem[k].rho * y.dot(q);
    q += (alpha[k] - beta) * (mem[k].s.array() * mask).matrix();
  }
  return -(q.array() * mask).matrix();
}

struct Trial {
  Eigen::VectorXd x, g;
  double f = std::numeric_limits<double>::infinity();
};

class Searcher {
 public:
  Searcher(const BoxObjective& obj, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int& evals)
      : obj_(obj), lo_(lo), hi_(hi), evals_(evals) {}

  Trial at(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double a) {
    Trial t;
    t.x = project(x + a * d, lo_, hi_);
    t.g.resize(x.size());
    ++evals_;
    t.f = obj_(t.x, &t.g);
    if (!std::isfinite(t.f) || !t.g.allFinite()) t.f = std::numeric_limits<double>::infinity();
    return t;
  }

  bool sufficient(const Trial& t, double f0, const Eigen::VectorXd& x, const Eigen::VectorXd& g) const {
    return std::isfinite(t.f) && t.f <= f0 + 1e-4 * g.dot(t.x - x) && t.f <= f0;
  }

  std::optional<Trial> backtrack(const Eigen::VectorXd& x, double f0, const Eigen::VectorXd& g,
                                 const Eigen::VectorXd& d, double a, int steps) {
    for (int k = 0; k < steps; ++k, a *= 0.5) {
      Trial t = at(x, d, a);
      if (sufficient(t, f0, x, g)) return t;
    }
    return std::nullopt;
  }

  // Bracketing + bisection zoom on phi(a) = f(P(x + a d)); falls back to the
  // best Armijo point when the curvature condition cannot be met in budget.
  std::optional<Trial> wolfe(const Eigen::VectorXd& x, double f0, const Eigen::VectorXd& g, const Eigen::VectorXd& d,
                             double a, int steps) {
    const double slope0 = g.dot(d);
    const double c2 = 0.9;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    std::optional<Trial> best;
    for (int k = 0; k < steps; ++k) {
      Trial t = at(x, d, a);
      if (!sufficient(t, f0, x, g)) {
        hi = a;
      } else {
        if (!best || t.f < best->f) best = t;
        const Eigen::VectorXd step = t.x - x;
        const double slope = t.g.dot(d.cwiseProduct((step.array().abs() > 0).cast<double>().matrix()));
        if (std::abs(slope) <= -c2 * slope0) return t;
        if (slope > 0.0) hi = a;
        else lo = a;
      }
      a = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * a;
    }
    return best;
  }

 private:
  const BoxObjective& obj_;
  const Eigen::VectorXd& lo_;
  const Eigen::VectorXd& hi_;
  int& evals_;
};

}  // namespace

LbfgsbResult minimize_box(const BoxObjective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const LbfgsbOptions& options) {
  const Eigen::Index n = x0.size();
  require(lower.size() == n && upper.size() == n, "minimize_box: bound sizes differ from x0");
  require((lower.array() <= upper.array()).all(), "minimize_box: lower bound exceeds upper bound");
  require(options.memory >= 1 && options.max_iterations >= 0, "minimize_box: invalid options");

  LbfgsbResult r;
  r.x = project(x0, lower, upper);
  Eigen::VectorXd g(n);
  ++r.evaluations;
  r.f = objective(r.x, &g);
  if (!std::isfinite(r.f) || !g.allFinite()) {
    r.reason = "objective not finite at the starting point";
    return r;
  }
  r.trace.push_back(r.f);

  Searcher search(objective, lower, upper, r.evaluations);
  std::deque<Pair> mem;
  for (;;) {
    const Eigen::VectorXd pg = r.x - project(r.x - g, lower, upper);
    if (pg.size() == 0 || pg.cwiseAbs().maxCoeff() < options.pg_tolerance) {
      r.converged = true;
      r.reason = "projected gradient below tolerance";
      break;
    }
    if (r.iterations >= options.max_iterations) {
      r.reason = "iteration limit";
      break;
    }

    const Eigen::ArrayXd mask = free_mask(r.x, g, lower, upper);
    Eigen::VectorXd d = two_loop(mem, g, mask);
    if (!(g.dot(d) < 0.0)) {
      mem.clear();
      d = -(g.array() * mask).matrix();
    }
    const bool first = mem.empty();
    const double a0 = first ? std::min(1.0, 1.0 / d.cwiseAbs().maxCoeff()) : 1.0;

    auto attempt = [&](const Eigen::VectorXd& dir, double a) {
      return options.line_search == LineSearchKind::StrongWolfe
                 ? search.wolfe(r.x, r.f, g, dir, a, options.max_line_steps)
                 : search.backtrack(r.x, r.f, g, dir, a, options.max_line_steps);
    };
    std::optional<Trial> t = attempt(d, a0);
    if (!t && !first) {
      mem.clear();
      d = -(g.array() * mask).matrix();
      t = attempt(d, std::min(1.0, 1.0 / d.cwiseAbs().maxCoeff()));
    }
    if (!t) {
      r.reason = "line search failed";
      break;
    }

    ++r.iterations;
    const Eigen::VectorXd s = t->x - r.x;
    const Eigen::VectorXd y = t->g - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * y.squaredNorm() && sy > 0.0) {
      mem.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
    }
    const double df = r.f - t->f;
    r.x = t->x;
    r.f = t->f;
    g = t->g;
    r.trace.push_back(r.f);
    if (std::abs(df) < options.f_tolerance) {
      r.converged = true;
      r.reason = "objective change below tolerance";
      break;
    }
  }
  return r;
}

}  // namespace tweezer
