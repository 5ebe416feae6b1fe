#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "gmclust/chordal.hpp"
#include "gmclust/dataset.hpp"
#include "gmclust/errors.hpp"
#include "gmclust/graph.hpp"
#include "gmclust/rng.hpp"

namespace gmclust {

/// Synthetic-scenario parameters: two latent groups whose graphs differ by
/// m_moves local moves, binary data obtained by thresholding Gaussians.
struct ScenarioSpec {
  int q = 20;
  std::vector<long> n_per_cluster = {200, 200};
  int truth_edges = 20;
  int m_moves = 10;
  std::vector<double> thresholds;  // per-variable quantile orders in (0,1)
  double edge_weight = 0.4;
  std::uint64_t seed = 1;
  bool allow_nonchordal = false;

  void validate() const {
    if (q < 1) throw config_error("q must be >= 1");
    if (n_per_cluster.empty() || n_per_cluster.size() > 2)
      throw config_error("n_per_cluster must list one or two cluster sizes");
    for (long nk : n_per_cluster)
      if (nk < 1) throw config_error("every cluster size must be >= 1");
    if (truth_edges < 0 || truth_edges > q * (q - 1) / 2)
      throw config_error("truth_edges out of range");
    if (m_moves < 0) throw config_error("m_moves must be >= 0");
    if (static_cast<int>(thresholds.size()) != q)
      throw config_error("thresholds must list one quantile order per variable");
    for (double t : thresholds)
      if (!(t > 0.0 && t < 1.0)) throw config_error("thresholds must lie in (0,1)");
    if (!(edge_weight > 0.0 && edge_weight < 1.0))
      throw config_error("edge_weight must lie in (0,1)");
  }
};

struct GroundTruth {
  std::vector<UndirectedGraph> graphs;
  std::vector<int> labels;  // 1-based true cluster per row
};

/// Quantile orders drawn once from U[0.35, 0.65] under the master seed, so
/// every scenario generated from that seed shares the same marginals.
inline std::vector<double> default_thresholds(int q, std::uint64_t master_seed) {
  Rng rng(master_seed ^ 0x7468726573686fULL);
  std::vector<double> t(q);
  for (double& x : t) x = 0.35 + 0.30 * uniform01(rng);
  return t;
}

/// Precision matrix whose zero pattern matches the graph: unit diagonal,
/// +/- w on edges (signs uniform), then the smallest ridge delta*I making the
/// minimum eigenvalue at least 0.1.
inline Eigen::MatrixXd precision_from_graph(const UndirectedGraph& g, double edge_weight,
                                            Rng& rng) {
  if (!(edge_weight > 0.0 && edge_weight < 1.0))
    throw config_error("edge_weight must lie in (0,1)");
  const int q = g.q();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(q, q);
  for (const auto& [u, v] : g.edges()) {
    const double s = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    omega(u, v) = s * edge_weight;
    omega(v, u) = s * edge_weight;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  const double delta = std::max(0.0, 0.1 - min_ev);
  if (delta > 0.0) omega += delta * Eigen::MatrixXd::Identity(q, q);
  return omega;
}

/// Draws n rows from N(0, Omega^{-1}) via the Cholesky factor of Omega,
/// standardizes each column (sample mean/SD; the raw value at n = 1), and
/// thresholds at the standard-normal quantiles of the given orders:
/// x_j = 0 if y_j < z_{alpha_j}, else 1.
inline CategoricalDataset sample_discretized(long n, const Eigen::MatrixXd& precision,
                                             const std::vector<double>& thresholds, Rng& rng) {
  const int q = static_cast<int>(precision.rows());
  if (static_cast<int>(thresholds.size()) != q)
    throw config_error("thresholds must list one quantile order per variable");
  if (n < 1) throw config_error("need at least one row");
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw numeric_error("precision matrix is not SPD");

  Eigen::MatrixXd y(n, q);
  Eigen::VectorXd z(q);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < q; ++j) z(j) = normal_draw(rng);
    y.row(i) = llt.matrixU().solve(z).transpose();  // cov = Omega^{-1}
  }

  for (int j = 0; j < q; ++j) {
    const double mean = y.col(j).mean();
    double sd = 1.0;
    if (n >= 2) {
      sd = std::sqrt((y.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
      y.col(j).array() -= mean;
    }
    if (sd > 0.0) y.col(j).array() /= sd;
  }

  const boost::math::normal_distribution<double> std_normal;
  std::vector<std::vector<int>> rows(n, std::vector<int>(q));
  for (int j = 0; j < q; ++j) {
    const double cut = boost::math::quantile(std_normal, thresholds[j]);
    for (long i = 0; i < n; ++i) rows[i][j] = y(i, j) < cut ? 0 : 1;
  }
  return CategoricalDataset::from_codes(rows, std::vector<int>(q, 2));
}

namespace detail {

inline UndirectedGraph random_graph_unconstrained(int q, int target_edges, Rng& rng) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < q; ++u)
    for (int v = u + 1; v < q; ++v) pairs.emplace_back(u, v);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  UndirectedGraph g(q);
  for (int e = 0; e < target_edges; ++e) g.set_edge(pairs[e].first, pairs[e].second, true);
  return g;
}

inline UndirectedGraph perturb_unconstrained(const UndirectedGraph& graph, int m, Rng& rng) {
  UndirectedGraph g = graph;
  const int q = g.q();
  for (int t = 0; t < m; ++t) {
    const auto pair_index = uniform_index(rng, static_cast<std::size_t>(q) * (q - 1) / 2);
    std::size_t c = 0;
    for (int u = 0; u < q; ++u)
      for (int v = u + 1; v < q; ++v)
        if (c++ == pair_index) g.set_edge(u, v, !g.has_edge(u, v));
  }
  return g;
}

}  // namespace detail

/// Builds the two cluster graphs (the second by m_moves local moves from the
/// first), per-cluster precision matrices, and the concatenated discretized
/// dataset with true labels. Deterministic given the spec seed.
inline std::pair<CategoricalDataset, GroundTruth> generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  UndirectedGraph g1 = spec.allow_nonchordal
                           ? detail::random_graph_unconstrained(spec.q, spec.truth_edges, rng)
                           : random_decomposable_graph(spec.q, spec.truth_edges, rng);
  UndirectedGraph g2 = spec.allow_nonchordal ? detail::perturb_unconstrained(g1, spec.m_moves, rng)
                                             : perturb_graph(g1, spec.m_moves, rng);

  GroundTruth truth;
  truth.graphs = {g1, g2};
  truth.graphs.resize(spec.n_per_cluster.size(), g2);

  std::vector<std::vector<int>> rows;
  for (std::size_t k = 0; k < spec.n_per_cluster.size(); ++k) {
    const Eigen::MatrixXd omega = precision_from_graph(truth.graphs[k], spec.edge_weight, rng);
    const CategoricalDataset part =
        sample_discretized(spec.n_per_cluster[k], omega, spec.thresholds, rng);
    for (long i = 0; i < part.n(); ++i) {
      rows.emplace_back(part.row(i).begin(), part.row(i).end());
      truth.labels.push_back(static_cast<int>(k) + 1);
    }
  }
  return {CategoricalDataset::from_codes(rows, std::vector<int>(spec.q, 2)), std::move(truth)};
}

}  // namespace gmclust
