#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gmclust/chordal.hpp"
#include "gmclust/dataset.hpp"
#include "gmclust/errors.hpp"
#include "gmclust/predictive.hpp"
#include "gmclust/priors.hpp"
#include "gmclust/rng.hpp"

namespace gmclust {

struct SamplerConfig {
  long iterations = 5000;
  long burn_in = 1000;
  long thin = 1;
  std::uint64_t seed = 1;
  int aux_components = 1;   // auxiliary graphs offered to a row opening a new cluster
  bool baseline_mode = false;  // restrict every graph to the empty graph
  long progress_interval = 0;  // 0 = silent
  HyperDirichletSpec hyper_dirichlet;
  GraphPriorSpec graph_prior;
  ConcentrationPriorSpec concentration;

  void validate() const {
    if (iterations < 1) throw config_error("iterations must be >= 1");
    if (burn_in < 0 || burn_in >= iterations) throw config_error("burn_in must be in [0, iterations)");
    if (thin < 1) throw config_error("thin must be >= 1");
    if (aux_components < 1) throw config_error("aux_components must be >= 1");
    hyper_dirichlet.validate();
    graph_prior.validate();
    concentration.validate();
  }
};

struct TraceDraw {
  long iter = 0;
  int K = 0;
  double alpha = 0.0;
  std::vector<int> assignments;                       // 1-based, canonical labels
  std::vector<std::vector<std::pair<int, int>>> graphs;  // edge list per cluster, canonical order
};

struct Trace {
  long n = 0;
  int q = 0;
  std::uint64_t seed = 0;
  long iterations = 0, burn_in = 0, thin = 1;
  bool baseline_mode = false;
  long graph_proposals = 0;
  long graph_accepts = 0;
  std::vector<TraceDraw> draws;

  double graph_acceptance_rate() const {
    return graph_proposals == 0 ? 0.0 : static_cast<double>(graph_accepts) /
                                            static_cast<double>(graph_proposals);
  }
};

/// Draws a decomposable graph from the beta-binomial prior by rejection:
/// pi ~ Beta(a_g, b_g), edges iid Bern(pi), retried until decomposable.
inline UndirectedGraph sample_graph_from_prior(int q, const GraphPriorSpec& spec, Rng& rng) {
  const long cap = std::max<long>(10L * q * q, 10);
  for (long attempt = 0; attempt < cap; ++attempt) {
    const double pi = beta_draw(rng, spec.a_g, spec.b_g);
    UndirectedGraph g(q);
    for (int u = 0; u < q; ++u)
      for (int v = u + 1; v < q; ++v)
        if (uniform01(rng) < pi) g.set_edge(u, v, true);
    if (is_decomposable(g)) return g;
  }
  throw numeric_error("decomposable-graph rejection cap exceeded; lower a_g/(a_g+b_g)");
}

/// Mixture weight g of the higher-shape Gamma component in the concentration
/// update: g/(1-g) = (c + K - 1) / (n (d - log eta)).
inline double escobar_west_weight(const ConcentrationPriorSpec& spec, int K, long n, double eta) {
  const double ratio = (spec.c + K - 1.0) / (static_cast<double>(n) * (spec.d - std::log(eta)));
  return ratio / (1.0 + ratio);
}

/// One auxiliary-variable update of the concentration parameter:
/// eta ~ Beta(alpha + 1, n), then alpha from the two-component Gamma mixture.
inline double sample_alpha(Rng& rng, double alpha, int K, long n,
                           const ConcentrationPriorSpec& spec) {
  const double eta = beta_draw(rng, alpha + 1.0, static_cast<double>(n));
  const double rate = spec.d - std::log(eta);
  const double g = escobar_west_weight(spec, K, n, eta);
  const double shape = (uniform01(rng) < g) ? spec.c + K : spec.c + K - 1.0;
  return gamma_draw(rng, shape, rate);
}

struct GraphMhCounters {
  long proposed = 0;
  long accepted = 0;
};

namespace detail {

/// Net log marginal-likelihood change between two decompositions over the same
/// rows. Shared cliques/separators cancel exactly before any evaluation.
inline double log_marginal_ratio(const CategoricalDataset& data, std::span<const long> rows,
                                 const CliqueDecomposition& proposed,
                                 const CliqueDecomposition& current,
                                 const HyperDirichletSpec& spec) {
  std::map<std::vector<int>, int> net;
  for (const auto& c : proposed.cliques) ++net[c];
  for (const auto& s : proposed.separators) --net[s];
  for (const auto& c : current.cliques) --net[c];
  for (const auto& s : current.separators) ++net[s];
  double delta = 0.0;
  for (const auto& [subset, mult] : net) {
    if (mult == 0) continue;
    delta += mult * log_marginal_subset_over_rows(data, rows, subset, spec);
  }
  return delta;
}

}  // namespace detail

/// One Metropolis-Hastings update of a cluster's graph: propose uniformly from
/// the valid single-edge moves, accept with
///   min{1, marginal ratio * prior ratio * |O_G| / |O_G~|},
/// rebuilding the sufficient statistics on acceptance. No-op when the graph
/// has no valid moves (q = 1).
inline bool mh_graph_step(ClusterSuffStats& cluster, const CategoricalDataset& data,
                          std::span<const long> members, const HyperDirichletSpec& hd,
                          const GraphPriorSpec& gp, Rng& rng, GraphMhCounters& counters) {
  const auto moves = enumerate_valid_moves(cluster.graph());
  if (moves.empty()) return false;
  ++counters.proposed;

  const auto& move = moves[uniform_index(rng, moves.size())];
  UndirectedGraph proposed = apply_move(cluster.graph(), move);
  const auto proposed_dec = clique_decomposition(proposed);
  const std::size_t reverse_move_count = enumerate_valid_moves(proposed).size();

  const double log_accept =
      detail::log_marginal_ratio(data, members, proposed_dec, cluster.decomposition(), hd) +
      log_graph_prior(proposed, gp) - log_graph_prior(cluster.graph(), gp) +
      std::log(static_cast<double>(moves.size())) -
      std::log(static_cast<double>(reverse_move_count));

  if (std::log(uniform01(rng)) < log_accept) {
    cluster.reset_graph(data, std::move(proposed), members);
    ++counters.accepted;
    return true;
  }
  return false;
}

/// Cluster indicators, per-cluster graphs with sufficient statistics, and the
/// concentration parameter of one chain. Clusters are kept nonempty; emptied
/// clusters are removed immediately.
class ClusterState {
 public:
  ClusterState(const CategoricalDataset& data, const SamplerConfig& config)
      : data_(&data), config_(config), assignments_(data.n(), 0) {
    alpha_ = config.concentration.c / config.concentration.d;
    clusters_.emplace_back(data, UndirectedGraph(data.q()));
    for (long i = 0; i < data.n(); ++i) clusters_[0].add_row(data.row(i));
  }

  /// Warm start from an explicit partition (0-based labels 0..K-1, every label
  /// occupied) with one graph per cluster.
  ClusterState(const CategoricalDataset& data, const SamplerConfig& config,
               std::vector<int> assignments, const std::vector<UndirectedGraph>& graphs,
               double alpha)
      : data_(&data), config_(config), assignments_(std::move(assignments)), alpha_(alpha) {
    if (static_cast<long>(assignments_.size()) != data.n())
      throw data_error("assignment vector length disagrees with the dataset");
    const int K = static_cast<int>(graphs.size());
    std::vector<long> sizes(K, 0);
    for (int a : assignments_) {
      if (a < 0 || a >= K) throw data_error("assignment label out of range");
      ++sizes[a];
    }
    for (long s : sizes)
      if (s == 0) throw data_error("every cluster label must be occupied");
    for (const auto& g : graphs) clusters_.emplace_back(data, g);
    for (long i = 0; i < data.n(); ++i) clusters_[assignments_[i]].add_row(data.row(i));
  }

  int K() const { return static_cast<int>(clusters_.size()); }
  double alpha() const { return alpha_; }
  void set_alpha(double a) { alpha_ = a; }
  const std::vector<int>& assignments() const { return assignments_; }
  const ClusterSuffStats& cluster(int k) const { return clusters_.at(k); }

  std::vector<long> members_of(int k) const {
    std::vector<long> rows;
    for (long i = 0; i < static_cast<long>(assignments_.size()); ++i)
      if (assignments_[i] == k) rows.push_back(i);
    return rows;
  }

  /// Gibbs scan of the cluster indicators. Each row is removed from its
  /// cluster (deleting the cluster if emptied) and reassigned among the
  /// existing clusters (weight n_k times the posterior predictive) and
  /// aux_components candidate graphs drawn fresh from the graph prior for a
  /// new cluster (weight alpha/m times the prior predictive). Discarding an
  /// emptied cluster's graph is exact here: the prior predictive of a single
  /// row does not depend on the graph, so a singleton's graph conditional is
  /// the prior itself.
  void update_assignments(Rng& rng) {
    const int m = config_.aux_components;
    const double log_alpha_m = std::log(alpha_) - std::log(static_cast<double>(m));
    for (long i = 0; i < static_cast<long>(assignments_.size()); ++i) {
      const auto row = data_->row(i);
      {
        const int k = assignments_[i];
        clusters_[k].remove_row(row);
        if (clusters_[k].size() == 0) {
          clusters_.erase(clusters_.begin() + k);
          for (auto& a : assignments_)
            if (a > k) --a;
        }
        assignments_[i] = -1;
      }

      std::vector<UndirectedGraph> candidates;
      candidates.reserve(m);
      if (config_.baseline_mode) {
        candidates.assign(m, UndirectedGraph(data_->q()));
      } else {
        while (static_cast<int>(candidates.size()) < m)
          candidates.push_back(sample_graph_from_prior(data_->q(), config_.graph_prior, rng));
      }

      std::vector<double> log_w;
      log_w.reserve(clusters_.size() + candidates.size());
      for (const auto& cl : clusters_)
        log_w.push_back(std::log(static_cast<double>(cl.size())) +
                        log_posterior_predictive(row, cl, config_.hyper_dirichlet, false));
      for (const auto& g : candidates)
        log_w.push_back(log_alpha_m + log_prior_predictive(row, g, data_->level_vector(),
                                                           config_.hyper_dirichlet));

      std::size_t pick;
      try {
        pick = sample_from_log_weights(rng, log_w);
      } catch (const numeric_error& e) {
        throw numeric_error(diagnostics("assignment update", i) + ": " + e.what());
      }
      if (pick < clusters_.size()) {
        assignments_[i] = static_cast<int>(pick);
        clusters_[pick].add_row(row);
      } else {
        clusters_.emplace_back(*data_, std::move(candidates[pick - clusters_.size()]));
        assignments_[i] = static_cast<int>(clusters_.size()) - 1;
        clusters_.back().add_row(row);
      }
    }
  }

  /// Metropolis-Hastings graph update for every cluster.
  void update_graphs(Rng& rng, GraphMhCounters& counters) {
    for (int k = 0; k < K(); ++k) {
      const auto members = members_of(k);
      mh_graph_step(clusters_[k], *data_, members, config_.hyper_dirichlet, config_.graph_prior,
                    rng, counters);
    }
  }

  void update_alpha(Rng& rng) {
    alpha_ = sample_alpha(rng, alpha_, K(), data_->n(), config_.concentration);
  }

  bool consistent() const {
    long total = 0;
    for (int k = 0; k < K(); ++k) {
      const auto members = members_of(k);
      if (members.empty()) return false;
      if (!clusters_[k].consistent_with(*data_, members)) return false;
      total += static_cast<long>(members.size());
    }
    return total == data_->n();
  }

  /// Canonical snapshot: clusters ordered by smallest member index, labels
  /// renumbered from 1.
  TraceDraw snapshot(long iter) const {
    TraceDraw d;
    d.iter = iter;
    d.K = K();
    d.alpha = alpha_;
    std::vector<long> first_member(K(), std::numeric_limits<long>::max());
    for (long i = 0; i < static_cast<long>(assignments_.size()); ++i)
      first_member[assignments_[i]] = std::min(first_member[assignments_[i]], i);
    std::vector<int> order(K());
    for (int k = 0; k < K(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return first_member[a] < first_member[b]; });
    std::vector<int> new_label(K());
    for (int rank = 0; rank < K(); ++rank) new_label[order[rank]] = rank + 1;
    d.assignments.resize(assignments_.size());
    for (std::size_t i = 0; i < assignments_.size(); ++i)
      d.assignments[i] = new_label[assignments_[i]];
    d.graphs.reserve(K());
    for (int rank = 0; rank < K(); ++rank) d.graphs.push_back(clusters_[order[rank]].graph().edges());
    return d;
  }

 private:
  std::string diagnostics(const std::string& where, long i) const {
    std::ostringstream msg;
    msg << where << " failed at row " << i << ", K=" << K() << ", sizes=[";
    for (int k = 0; k < K(); ++k) msg << (k ? "," : "") << clusters_[k].size();
    msg << "], alpha=" << alpha_;
    return msg.str();
  }

  const CategoricalDataset* data_;
  SamplerConfig config_;
  std::vector<int> assignments_;
  std::vector<ClusterSuffStats> clusters_;
  double alpha_ = 1.0;
};

/// Runs the three-step Gibbs sampler: reassign rows, update graphs (skipped in
/// baseline mode), update the concentration. Starts from a single cluster with
/// the empty graph and alpha at its prior mean. Deterministic given the seed.
inline Trace run_sampler(const CategoricalDataset& data, const SamplerConfig& config) {
  config.validate();
  Rng rng(config.seed);
  ClusterState state(data, config);

  Trace trace;
  trace.n = data.n();
  trace.q = data.q();
  trace.seed = config.seed;
  trace.iterations = config.iterations;
  trace.burn_in = config.burn_in;
  trace.thin = config.thin;
  trace.baseline_mode = config.baseline_mode;
  trace.draws.reserve((config.iterations - config.burn_in) / config.thin);

  GraphMhCounters counters;
  for (long it = 1; it <= config.iterations; ++it) {
    try {
      state.update_assignments(rng);
    } catch (const numeric_error& e) {
      throw numeric_error("iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!config.baseline_mode) state.update_graphs(rng, counters);
    state.update_alpha(rng);
#ifndef NDEBUG
    if (!state.consistent())
      throw numeric_error("sufficient statistics inconsistent after iteration " +
                          std::to_string(it));
#endif
    if (config.progress_interval > 0 && it % config.progress_interval == 0)
      std::cerr << "[gmclust] iter " << it << "/" << config.iterations << " K=" << state.K()
                << " alpha=" << state.alpha() << "\n";
    if (it > config.burn_in && (it - config.burn_in) % config.thin == 0)
      trace.draws.push_back(state.snapshot(it));
  }
  trace.graph_proposals = counters.proposed;
  trace.graph_accepts = counters.accepted;
  return trace;
}

}  // namespace gmclust
