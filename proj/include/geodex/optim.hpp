#pragma once

// Numerical kernels for the embedding stages: weighted-stress majorization
// (local-global alternation with a fixed weighted Laplacian solved by
// warm-started conjugate gradient) and a limited-memory quasi-Newton
// minimizer with a strong Wolfe line search. Both are deterministic.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geodex {

struct SolverOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
  double relative_objective_tolerance = 1e-9;
  int memory = 10;  // quasi-Newton history length
  std::uint64_t seed = 0;

  // The majorizer converges linearly, so it gets a larger default budget.
  static SolverOptions stress_defaults() {
    SolverOptions o;
    o.max_iterations = 500;
    return o;
  }

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations < 1");
    if (!(gradient_tolerance > 0.0) ||
        !(relative_objective_tolerance > 0.0))
      throw std::invalid_argument("tolerances must be positive");
    if (memory < 1) throw std::invalid_argument("memory < 1");
  }
};

// Dense symmetric target distances plus per-pair weights; `dim` is the
// embedding dimensionality. Weight convention: 1/d^2 with the small-d cap
// applied by the caller, so the problem itself only demands finiteness.
struct StressProblem {
  Eigen::MatrixXd targets;
  Eigen::MatrixXd weights;
  int dim = 0;

  void validate() const {
    const auto n = targets.rows();
    if (targets.cols() != n || weights.rows() != n || weights.cols() != n)
      throw std::invalid_argument("target/weight matrices must be square");
    if (dim < 1) throw std::invalid_argument("embedding dim < 1");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (targets(i, i) != 0.0)
        throw std::invalid_argument("target diagonal must be zero");
      for (Eigen::Index j = 0; j < n; ++j) {
        if (targets(i, j) != targets(j, i))
          throw std::invalid_argument("target matrix not symmetric");
        if (i != j && !(targets(i, j) > 0.0))
          throw std::invalid_argument("off-diagonal targets must be > 0");
        if (i != j && !(std::isfinite(weights(i, j)) && weights(i, j) > 0.0))
          throw std::invalid_argument("weights must be finite and > 0");
      }
    }
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic unit direction for a coincident pair (i < j). Only the
// ordered pair is ever queried; the reverse direction is its negation by
// construction of the local step.
inline Eigen::VectorXd hash_direction(int i, int j, int dim) {
  Eigen::VectorXd u(dim);
  std::uint64_t state =
      (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      state = splitmix64(state);
      u[k] = 2.0 * (static_cast<double>(state >> 11) * 0x1.0p-53) - 1.0;
      norm2 += u[k] * u[k];
    }
  } while (norm2 < 1e-12);
  return u / std::sqrt(norm2);
}

}  // namespace detail

inline double stress_value(const StressProblem& p, const Eigen::MatrixXd& q) {
  double s = 0.0;
  const auto n = q.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = (q.row(i) - q.row(j)).norm();
      const double e = r - p.targets(i, j);
      s += p.weights(i, j) * e * e;
    }
  return s;
}

// d stress / d q; coincident pairs contribute the subgradient choice 0 in
// the radial term times the hash direction, which vanishes, so they are
// simply skipped (consistent with finite differences away from them).
inline Eigen::MatrixXd stress_gradient(const StressProblem& p,
                                       const Eigen::MatrixXd& q) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  const auto n = q.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::VectorXd diff = q.row(i) - q.row(j);
      const double r = diff.norm();
      if (r <= 0.0) continue;
      const Eigen::VectorXd term =
          (2.0 * p.weights(i, j) * (r - p.targets(i, j)) / r) * diff;
      g.row(i) += term;
      g.row(j) -= term;
    }
  return g;
}

struct StressResult {
  Eigen::MatrixXd coordinates;
  std::vector<double> history;  // stress before the run, then per iteration
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Jacobi-preconditioned CG on a dense SPSD system, warm-started from x.
// Each iterate minimizes the quadratic over a growing subspace through the
// start point, so the quadratic never increases: the caller's majorization
// argument needs exactly that, not full convergence.
inline void pcg_inplace(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                        Eigen::VectorXd& x, double rel_tol, int max_iter) {
  const Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
  Eigen::VectorXd r = b - A * x;
  const double stop = rel_tol * std::max(b.norm(), 1e-300);
  if (r.norm() <= stop) return;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd ap = A * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // nullspace direction; x already optimal there
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= stop) break;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
}

}  // namespace detail

// Local-global weighted-stress majorization. The local step projects each
// pair difference onto the target sphere (deterministic hashed direction
// for exactly coincident points); the global step solves the fixed
// weighted Laplacian per coordinate column, warm-started, then re-centers.
// The stress sequence is non-increasing by construction.
inline StressResult minimize_stress(const StressProblem& problem,
                                    const Eigen::MatrixXd& q0,
                                    const SolverOptions& opts =
                                        SolverOptions::stress_defaults()) {
  problem.validate();
  opts.validate();
  const auto n = problem.targets.rows();
  if (q0.rows() != n || q0.cols() != problem.dim)
    throw std::invalid_argument("initial coordinates have wrong shape");

  StressResult out;
  out.coordinates = q0;
  Eigen::MatrixXd& q = out.coordinates;
  if (n < 2) {
    out.converged = true;
    out.history.push_back(0.0);
    return out;
  }

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lap(i, j) = -problem.weights(i, j);
      lap(i, i) += problem.weights(i, j);
    }

  double prev = stress_value(problem, q);
  out.history.push_back(prev);
  Eigen::MatrixXd rhs(n, problem.dim);
  const int cg_cap = static_cast<int>(std::min<Eigen::Index>(n, 400));

  for (int it = 0; it < opts.max_iterations; ++it) {
    rhs.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Eigen::VectorXd diff = q.row(i) - q.row(j);
        const double r = diff.norm();
        const Eigen::VectorXd dir =
            r > 0.0 ? Eigen::VectorXd(diff / r)
                    : detail::hash_direction(static_cast<int>(i),
                                             static_cast<int>(j),
                                             problem.dim);
        const Eigen::VectorXd z =
            (problem.weights(i, j) * problem.targets(i, j)) * dir;
        rhs.row(i) += z;
        rhs.row(j) -= z;
      }
    for (int c = 0; c < problem.dim; ++c) {
      Eigen::VectorXd col = q.col(c);
      detail::pcg_inplace(lap, rhs.col(c), col, 1e-10, cg_cap);
      q.col(c) = col;
    }
    q.rowwise() -= q.colwise().mean();

    const double cur = stress_value(problem, q);
    out.history.push_back(cur);
    out.iterations = it + 1;
    const double grad_norm = stress_gradient(problem, q).norm();
    if (grad_norm <= opts.gradient_tolerance ||
        prev - cur <= opts.relative_objective_tolerance *
                          std::max(1.0, std::abs(prev))) {
      out.converged = true;
      prev = cur;
      break;
    }
    prev = cur;
  }
  return out;
}

struct QuasiNewtonResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Limited-memory BFGS with a strong Wolfe line search (two-loop recursion,
// curvature-guarded history). The callback evaluates the objective and
// writes the gradient: double fn(const VectorXd& x, VectorXd& grad).
// The result never exceeds the starting objective; a failed line search
// returns the best point seen with the flag set.
template <typename F>
QuasiNewtonResult quasi_newton_minimize(F&& fn, const Eigen::VectorXd& x0,
                                        const SolverOptions& opts = {}) {
  opts.validate();
  constexpr double kArmijo = 1e-4;
  constexpr double kCurvature = 0.9;

  QuasiNewtonResult out;
  out.x = x0;
  const auto dim = x0.size();
  Eigen::VectorXd g(dim);
  double f = fn(out.x, g);
  out.objective = f;
  out.gradient_norm = g.norm();

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> hist;  // (s, y)
  Eigen::VectorXd p(dim), x_try(dim), g_try(dim);

  // Strong Wolfe search along p from (out.x, f, g). Returns the accepted
  // step, or 0 on failure; on success x_try/g_try/f_try hold the new state.
  double f_try = f;
  const auto wolfe = [&](const Eigen::VectorXd& dirn, double dg0,
                         double first_step) -> double {
    const auto eval = [&](double a) {
      x_try = out.x + a * dirn;
      f_try = fn(x_try, g_try);
      return g_try.dot(dirn);
    };
    const auto zoom = [&](double lo, double f_lo, double hi) -> double {
      for (int k = 0; k < 60; ++k) {
        const double a = 0.5 * (lo + hi);
        const double dg = eval(a);
        if (f_try > f + kArmijo * a * dg0 || f_try >= f_lo) {
          hi = a;
        } else {
          if (std::abs(dg) <= -kCurvature * dg0) return a;
          if (dg * (hi - lo) >= 0.0) hi = lo;
          lo = a;
          f_lo = f_try;
        }
        if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
      // Tolerate a plain decrease when the curvature condition is
      // unreachable in floating point.
      eval(lo);
      return f_try < f ? lo : 0.0;
    };

    double a_prev = 0.0, f_prev = f;
    double a = first_step;
    for (int k = 0; k < 50; ++k) {
      const double dg = eval(a);
      if (f_try > f + kArmijo * a * dg0 || (k > 0 && f_try >= f_prev))
        return zoom(a_prev, f_prev, a);
      if (std::abs(dg) <= -kCurvature * dg0) return a;
      if (dg >= 0.0) return zoom(a, f_try, a_prev);
      a_prev = a;
      f_prev = f_try;
      a *= 2.0;
      if (a > 1e12) break;
    }
    return 0.0;
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it;
    if (out.gradient_norm <= opts.gradient_tolerance) {
      out.converged = true;
      return out;
    }

    // Two-loop recursion over the stored curvature pairs. Seeding with -g
    // bakes the descent sign in: the recursion is linear, so the result is
    // -H*grad directly.
    p = -g;
    std::vector<double> alpha(hist.size());
    for (std::size_t i = hist.size(); i-- > 0;) {
      const auto& [s, y] = hist[i];
      alpha[i] = s.dot(p) / s.dot(y);
      p -= alpha[i] * y;
    }
    if (!hist.empty()) {
      const auto& [s, y] = hist.back();
      p *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const auto& [s, y] = hist[i];
      const double beta = y.dot(p) / s.dot(y);
      p += (alpha[i] - beta) * s;
    }

    double dg0 = g.dot(p);
    if (!(dg0 < 0.0)) {  // not a descent direction: restart from steepest
      hist.clear();
      p = -g;
      dg0 = g.dot(p);
      if (!(dg0 < 0.0)) break;  // gradient numerically zero
    }
    const double first_step =
        hist.empty() ? std::min(1.0, 1.0 / std::max(out.gradient_norm, 1e-12))
                     : 1.0;
    const double a = wolfe(p, dg0, first_step);
    if (a == 0.0) {
      out.line_search_failed = true;
      break;
    }

    const Eigen::VectorXd s = a * p;
    const Eigen::VectorXd y = g_try - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      hist.emplace_back(s, y);
      if (static_cast<int>(hist.size()) > opts.memory) hist.pop_front();
    }

    const double drop = f - f_try;
    out.x = x_try;
    f = f_try;
    g = g_try;
    out.objective = f;
    out.gradient_norm = g.norm();
    out.iterations = it + 1;
    if (drop <= opts.relative_objective_tolerance *
                    std::max(1.0, std::abs(f))) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

}  // namespace geodex
