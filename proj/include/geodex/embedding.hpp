#pragma once

// Cascaded embedding of saddle vertices. Stage one places the saddles in
// R^m by weighted-stress minimization against their exact pairwise
// geodesic distances; each later round fits one (s, t) column pair to the
// remaining signed residuals, so the embedding distance
//   f(i, j) = |q_i - q_j| - |s_i - s_j|^2 + |t_i - t_j|^2
// can both shrink (s) and grow (t) beyond the Euclidean part. Rounds that
// fail to improve are reset to zero columns, which makes the recorded
// objective history non-increasing unconditionally.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "geodex/geodesic.hpp"
#include "geodex/mesh.hpp"
#include "geodex/optim.hpp"
#include "geodex/parallel.hpp"

namespace geodex {

struct Embedding {
  int dim_euclidean = 0;  // m
  int rounds = 0;         // l
  Eigen::MatrixXd euclidean;  // rows x m
  Eigen::MatrixXd s_block;    // rows x l, units sqrt(length)
  Eigen::MatrixXd t_block;    // rows x l
  std::vector<int> saddle_vertices;  // row -> mesh vertex
  std::vector<int> row_of_vertex;    // mesh vertex -> row, -1 elsewhere
  std::vector<double> objective_history;  // length rounds+1, non-increasing
  std::vector<double> epsilon_history;    // mean relative error per stage
  long long weight_cap_events = 0;

  int row_count() const { return static_cast<int>(euclidean.rows()); }
  int total_dim() const { return dim_euclidean + 2 * rounds; }

  void check_row(int r) const {
    if (r < 0 || r >= row_count())
      throw std::out_of_range("embedding row " + std::to_string(r));
  }
};

// Exact geodesic distance between saddle row i and saddle row j, in O(m+l).
inline double embed_distance(const Embedding& e, int i, int j) {
  e.check_row(i);
  e.check_row(j);
  double qq = 0.0;
  for (int c = 0; c < e.dim_euclidean; ++c) {
    const double d = e.euclidean(i, c) - e.euclidean(j, c);
    qq += d * d;
  }
  double ss = 0.0, tt = 0.0;
  for (int p = 0; p < e.rounds; ++p) {
    const double ds = e.s_block(i, p) - e.s_block(j, p);
    const double dt = e.t_block(i, p) - e.t_block(j, p);
    ss += ds * ds;
    tt += dt * dt;
  }
  return std::sqrt(qq) - ss + tt;
}

// One exact propagation per saddle; symmetrized with the smaller of the
// two directions (they agree to rounding for an exact method).
inline Eigen::MatrixXd ground_truth_saddle_distances(
    const Mesh& mesh, const VertexClassification& cls, int threads = 0) {
  const auto& sad = cls.saddles;
  const int k = static_cast<int>(sad.size());
  if (k < 2)
    throw std::invalid_argument("embedding needs at least two saddles");
  Eigen::MatrixXd d(k, k);
  parallel_for_blocks(k, resolve_threads(threads),
                      [&](std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                          auto field = ssad_exact(mesh, sad[i]);
                          for (int j = 0; j < k; ++j)
                            d(i, j) = field.distances[sad[j]];
                        }
                      });
  for (int i = 0; i < k; ++i) {
    d(i, i) = 0.0;
    for (int j = i + 1; j < k; ++j) {
      const double w = std::min(d(i, j), d(j, i));
      if (!(std::isfinite(w) && w > 0.0))
        throw std::runtime_error("saddle distance matrix has a bad entry");
      d(i, j) = d(j, i) = w;
    }
  }
  return d;
}

// Pair weights 1/d^2 with near-duplicate pairs capped so one tiny distance
// cannot dominate the objective; the cap count is surfaced as metadata.
inline Eigen::MatrixXd embedding_weights(const Eigen::MatrixXd& d,
                                         long long* cap_events = nullptr) {
  const auto n = d.rows();
  const double floor_d = 1e-6 * d.maxCoeff();
  long long capped = 0;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double dd = d(i, j);
      if (dd < floor_d) {
        dd = floor_d;
        if (i < j) ++capped;
      }
      w(i, j) = 1.0 / (dd * dd);
    }
  if (cap_events) *cap_events = capped;
  return w;
}

namespace detail {

struct MdsBasis {
  Eigen::MatrixXd coords;   // k x m
  Eigen::VectorXd eigvals;  // top m, descending, clamped at 0
  Eigen::MatrixXd eigvecs;  // k x m
  Eigen::VectorXd col_mean; // column means of the squared-distance matrix
};

// Classical MDS of a squared-distance matrix: double-center, take the top
// m eigenpairs, scale eigenvectors by sqrt(eigenvalue).
inline MdsBasis classical_mds(const Eigen::MatrixXd& d2, int m) {
  const auto k = d2.rows();
  MdsBasis out;
  out.col_mean = d2.colwise().mean();
  const double total = out.col_mean.mean();
  Eigen::MatrixXd b(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      b(i, j) = -0.5 * (d2(i, j) - out.col_mean[i] - out.col_mean[j] + total);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  out.coords = Eigen::MatrixXd::Zero(k, m);
  out.eigvals = Eigen::VectorXd::Zero(m);
  out.eigvecs = Eigen::MatrixXd::Zero(k, m);
  for (int c = 0; c < m && c < k; ++c) {
    const auto idx = k - 1 - c;  // eigenvalues come back ascending
    const double lam = es.eigenvalues()[idx];
    if (lam <= 0.0) break;
    out.eigvals[c] = lam;
    out.eigvecs.col(c) = es.eigenvectors().col(idx);
    out.coords.col(c) = es.eigenvectors().col(idx) * std::sqrt(lam);
  }
  return out;
}

// Landmark MDS: full spectral placement of an evenly sampled subset, then
// least-squares triangulation of everything else, then a seeded jitter so
// no two rows start coincident.
inline Eigen::MatrixXd landmark_init(const Eigen::MatrixXd& d, int m,
                                     std::uint64_t seed) {
  const auto n = d.rows();
  const int k = static_cast<int>(std::min<Eigen::Index>(n, 500));
  std::vector<int> lm(k);
  for (int i = 0; i < k; ++i)
    lm[i] = static_cast<int>(static_cast<std::int64_t>(i) * n / k);

  Eigen::MatrixXd d2(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      d2(i, j) = d(lm[i], lm[j]) * d(lm[i], lm[j]);
  MdsBasis basis = classical_mds(d2, m);

  Eigen::MatrixXd q(n, m);
  if (k == n) {
    q = basis.coords;
  } else {
    std::vector<char> is_lm(n, 0);
    for (int i = 0; i < k; ++i) {
      is_lm[lm[i]] = 1;
      q.row(lm[i]) = basis.coords.row(i);
    }
    Eigen::VectorXd delta(k);
    for (Eigen::Index u = 0; u < n; ++u) {
      if (is_lm[u]) continue;
      for (int i = 0; i < k; ++i) delta[i] = d(u, lm[i]) * d(u, lm[i]);
      delta -= basis.col_mean;
      for (int c = 0; c < m; ++c)
        q(u, c) = basis.eigvals[c] > 0.0
                      ? -0.5 * basis.eigvecs.col(c).dot(delta) /
                            std::sqrt(basis.eigvals[c])
                      : 0.0;
    }
  }

  const double amp = 1e-6 * d.maxCoeff();
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      q(i, c) += amp * (2.0 * u - 1.0);
    }
  return q;
}

inline double mean_abs_relative(const Eigen::MatrixXd& resid,
                                const Eigen::MatrixXd& d) {
  const auto n = d.rows();
  double acc = 0.0;
  std::int64_t cnt = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      acc += std::abs(resid(i, j)) / d(i, j);
      ++cnt;
    }
  return cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
}

}  // namespace detail

struct EuclideanStage {
  Eigen::MatrixXd coordinates;
  double mean_relative_error = 0.0;
  long long weight_cap_events = 0;
  int stress_iterations = 0;
};

inline EuclideanStage euclidean_embed(
    const Eigen::MatrixXd& d, int m,
    const SolverOptions& opts = SolverOptions::stress_defaults()) {
  StressProblem problem;
  problem.dim = m;
  problem.targets = d;
  EuclideanStage out;
  problem.weights = embedding_weights(d, &out.weight_cap_events);
  problem.validate();
  opts.validate();

  Eigen::MatrixXd q0 = detail::landmark_init(d, m, opts.seed);
  StressResult res = minimize_stress(problem, q0, opts);
  out.coordinates = std::move(res.coordinates);
  out.stress_iterations = res.iterations;

  Eigen::MatrixXd resid(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      resid(i, j) =
          (out.coordinates.row(i) - out.coordinates.row(j)).norm() - d(i, j);
  out.mean_relative_error = detail::mean_abs_relative(resid, d);
  return out;
}

// Signed gap between the embedding distance and the target for every pair,
// recomputed from scratch (the pipeline updates residuals incrementally;
// this is the independent route tests compare against).
inline Eigen::MatrixXd residual_matrix(const Eigen::MatrixXd& d,
                                       const Embedding& e) {
  if (d.rows() != e.row_count() || d.cols() != e.row_count())
    throw std::invalid_argument("distance matrix does not match embedding");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(d.rows(), d.cols());
  for (int i = 0; i < e.row_count(); ++i)
    for (int j = i + 1; j < e.row_count(); ++j) {
      const double f = embed_distance(e, i, j);
      r(i, j) = r(j, i) = f - d(i, j);
    }
  return r;
}

struct CascadeRound {
  Eigen::VectorXd s, t;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Value and gradient of one round's objective at the stacked point
// x = (s_0..s_{n-1}, t_0..t_{n-1}):
//   sum_{i<j} w_ij ((s_i-s_j)^2 - (t_i-t_j)^2 - r_ij)^2
inline double cascade_objective(const Eigen::MatrixXd& r,
                                const Eigen::MatrixXd& w,
                                const Eigen::VectorXd& x,
                                Eigen::VectorXd& g) {
  const auto n = r.rows();
  g.setZero(2 * n);
  double f = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double ds = x[i] - x[j];
      const double dt = x[n + i] - x[n + j];
      const double e = ds * ds - dt * dt - r(i, j);
      const double wij = w(i, j);
      f += wij * e * e;
      const double c = 4.0 * wij * e;
      g[i] += c * ds;
      g[j] -= c * ds;
      g[n + i] -= c * dt;
      g[n + j] += c * dt;
    }
  return f;
}

// Fit one (s, t) column pair to the residuals from a seeded jitter start
// (the origin is a stationary point of the objective).
inline CascadeRound cascade_round(const Eigen::MatrixXd& r,
                                  const Eigen::MatrixXd& w,
                                  const SolverOptions& opts = {}) {
  const auto n = r.rows();
  if (r.cols() != n || w.rows() != n || w.cols() != n)
    throw std::invalid_argument("residual/weight matrices must match");
  opts.validate();

  const auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    return cascade_objective(r, w, x, g);
  };

  const double delta = 1e-3 * std::sqrt(r.cwiseAbs().maxCoeff());
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 * n);
  std::mt19937_64 rng(opts.seed);
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x0[i] = delta * (2.0 * u - 1.0);
  }

  auto res = quasi_newton_minimize(fn, x0, opts);
  CascadeRound out;
  out.s = res.x.head(n);
  out.t = res.x.tail(n);
  out.objective = res.objective;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.line_search_failed = res.line_search_failed;
  return out;
}

// Full pipeline: exact saddle distances, Euclidean stage, then `rounds`
// cascade rounds with unconditional zero-reset monotonicity.
inline Embedding geodesic_embedding(
    const Mesh& mesh, const VertexClassification& cls, int m, int rounds,
    const SolverOptions& opts = {},
    const SolverOptions& stress_opts = SolverOptions::stress_defaults(),
    int threads = 0) {
  if (m < 1) throw std::invalid_argument("embedding dim must be >= 1");
  if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
  opts.validate();

  const Eigen::MatrixXd d = ground_truth_saddle_distances(mesh, cls, threads);
  const int n = static_cast<int>(d.rows());

  Embedding emb;
  emb.dim_euclidean = m;
  emb.rounds = rounds;
  emb.saddle_vertices = cls.saddles;
  emb.row_of_vertex.assign(mesh.vertex_count(), -1);
  for (int i = 0; i < n; ++i) emb.row_of_vertex[cls.saddles[i]] = i;

  EuclideanStage stage = euclidean_embed(d, m, stress_opts);
  emb.euclidean = std::move(stage.coordinates);
  emb.weight_cap_events = stage.weight_cap_events;
  emb.s_block = Eigen::MatrixXd::Zero(n, rounds);
  emb.t_block = Eigen::MatrixXd::Zero(n, rounds);

  const Eigen::MatrixXd w = embedding_weights(d);
  Eigen::MatrixXd resid(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      resid(i, j) = (emb.euclidean.row(i) - emb.euclidean.row(j)).norm() -
                    d(i, j);

  double objective = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      objective += w(i, j) * resid(i, j) * resid(i, j);
  emb.objective_history.push_back(objective);
  emb.epsilon_history.push_back(detail::mean_abs_relative(resid, d));

  for (int p = 0; p < rounds; ++p) {
    SolverOptions ropts = opts;
    ropts.seed = opts.seed + static_cast<std::uint64_t>(p) + 1;
    CascadeRound round = cascade_round(resid, w, ropts);
    if (round.objective <= objective) {
      emb.s_block.col(p) = round.s;
      emb.t_block.col(p) = round.t;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double ds = round.s[i] - round.s[j];
          const double dt = round.t[i] - round.t[j];
          const double adj = ds * ds - dt * dt;
          resid(i, j) -= adj;
          resid(j, i) = resid(i, j);
        }
      objective = round.objective;
    }
    // else: keep the zero columns; residuals and objective carry over.
    emb.objective_history.push_back(objective);
    emb.epsilon_history.push_back(detail::mean_abs_relative(resid, d));
  }
  return emb;
}

}  // namespace geodex
