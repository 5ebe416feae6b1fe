#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gmclust/chordal.hpp"
#include "gmclust/dataset.hpp"
#include "gmclust/errors.hpp"
#include "gmclust/graph.hpp"
#include "gmclust/priors.hpp"

namespace gmclust {

/// Log Dirichlet-multinomial marginal of the counts in `table` under cell
/// hyperparameters a / |X_S|:
///   log [ G(a)/G(a+n) * prod_observed G(a_S + n_S)/G(a_S) ].
/// Unobserved cells contribute 1; the empty subset yields 0.
inline double log_marginal_subset(const MarginalCountTable& table, const HyperDirichletSpec& spec) {
  const double a_cell = spec.a / table.cell_space();
  double lm = std::lgamma(spec.a) - std::lgamma(spec.a + static_cast<double>(table.total()));
  const double lg_a_cell = std::lgamma(a_cell);
  table.for_each_observed([&](long cnt) {
    lm += std::lgamma(a_cell + static_cast<double>(cnt)) - lg_a_cell;
  });
  return lm;
}

inline double log_marginal_subset_over_rows(const CategoricalDataset& data,
                                            std::span<const long> rows,
                                            const std::vector<int>& subset,
                                            const HyperDirichletSpec& spec) {
  return log_marginal_subset(marginal_counts(data, rows, subset), spec);
}

/// Log marginal likelihood of the rows under a decomposition:
///   sum_C log m(X_C) - sum_S log m(X_S), separators with multiplicity.
inline double log_marginal_graph(const CategoricalDataset& data, std::span<const long> rows,
                                 const CliqueDecomposition& dec, const HyperDirichletSpec& spec) {
  double lm = 0.0;
  for (const auto& clique : dec.cliques)
    lm += log_marginal_subset_over_rows(data, rows, clique, spec);
  for (const auto& sep : dec.separators)
    lm -= log_marginal_subset_over_rows(data, rows, sep, spec);
  return lm;
}

inline double log_marginal_graph(const CategoricalDataset& data, std::span<const long> rows,
                                 const UndirectedGraph& graph, const HyperDirichletSpec& spec) {
  return log_marginal_graph(data, rows, clique_decomposition(graph), spec);
}

/// Log prior predictive of a single complete row under a decomposable graph:
///   (|S| - |C|) log a + sum_C log a_C - sum_S log a_S.
inline double log_prior_predictive(std::span<const int> row, const CliqueDecomposition& dec,
                                   const std::vector<int>& levels,
                                   const HyperDirichletSpec& spec) {
  (void)row;  // uniform cell hyperparameters make every configuration equal
  double lp = (static_cast<double>(dec.separators.size()) -
               static_cast<double>(dec.cliques.size())) *
              std::log(spec.a);
  for (const auto& clique : dec.cliques) lp += std::log(hyperparameter(spec, levels, clique));
  for (const auto& sep : dec.separators) lp -= std::log(hyperparameter(spec, levels, sep));
  return lp;
}

inline double log_prior_predictive(std::span<const int> row, const UndirectedGraph& graph,
                                   const std::vector<int>& levels,
                                   const HyperDirichletSpec& spec) {
  return log_prior_predictive(row, clique_decomposition(graph), levels, spec);
}

/// Graph plus incrementally maintained clique/separator count tables over the
/// rows of one cluster.
class ClusterSuffStats {
 public:
  ClusterSuffStats(const CategoricalDataset& data, UndirectedGraph graph)
      : graph_(std::move(graph)), decomp_(clique_decomposition(graph_)) {
    make_tables(data);
  }

  const UndirectedGraph& graph() const { return graph_; }
  const CliqueDecomposition& decomposition() const { return decomp_; }
  long size() const { return size_; }
  const std::vector<MarginalCountTable>& clique_tables() const { return clique_tables_; }
  const std::vector<MarginalCountTable>& separator_tables() const { return separator_tables_; }

  void add_row(std::span<const int> row) {
    for (auto& t : clique_tables_) t.add_row(row);
    for (auto& t : separator_tables_) t.add_row(row);
    ++size_;
  }

  void remove_row(std::span<const int> row) {
    if (size_ <= 0) throw numeric_error("removing a row from an empty cluster");
    for (auto& t : clique_tables_) t.remove_row(row);
    for (auto& t : separator_tables_) t.remove_row(row);
    --size_;
  }

  /// Swaps in a new graph and recounts the member rows under its decomposition.
  void reset_graph(const CategoricalDataset& data, UndirectedGraph graph,
                   std::span<const long> members) {
    graph_ = std::move(graph);
    decomp_ = clique_decomposition(graph_);
    make_tables(data);
    for (long i : members) add_row(data.row(i));
  }

  /// True iff a fresh recount of `members` reproduces every table.
  bool consistent_with(const CategoricalDataset& data, std::span<const long> members) const {
    if (static_cast<long>(members.size()) != size_) return false;
    for (std::size_t k = 0; k < decomp_.cliques.size(); ++k)
      if (!marginal_counts(data, members, decomp_.cliques[k]).same_counts(clique_tables_[k]))
        return false;
    for (std::size_t k = 0; k < decomp_.separators.size(); ++k)
      if (!marginal_counts(data, members, decomp_.separators[k]).same_counts(separator_tables_[k]))
        return false;
    return true;
  }

 private:
  void make_tables(const CategoricalDataset& data) {
    clique_tables_.clear();
    separator_tables_.clear();
    size_ = 0;
    auto levels_of = [&](const std::vector<int>& subset) {
      std::vector<int> ls;
      for (int j : subset) ls.push_back(data.levels(j));
      return ls;
    };
    for (const auto& clique : dec().cliques)
      clique_tables_.emplace_back(clique, levels_of(clique));
    for (const auto& sep : dec().separators)
      separator_tables_.emplace_back(sep, levels_of(sep));
  }

  const CliqueDecomposition& dec() const { return decomp_; }

  UndirectedGraph graph_;
  CliqueDecomposition decomp_;
  std::vector<MarginalCountTable> clique_tables_;
  std::vector<MarginalCountTable> separator_tables_;
  long size_ = 0;
};

/// Log posterior predictive of a row given the other rows of a cluster:
///   (|S|-|C|) log(a + n_k - 1{in}) + sum_C log(a_C + n_C(x) - 1{in})
///                                  - sum_S log(a_S + n_S(x) - 1{in}),
/// where 1{in} = includes_x indicates that x is currently counted in `stats`.
inline double log_posterior_predictive(std::span<const int> row, const ClusterSuffStats& stats,
                                       const HyperDirichletSpec& spec, bool includes_x) {
  const double ind = includes_x ? 1.0 : 0.0;
  auto term = [&](const MarginalCountTable& table) {
    const long cnt = table.count_row(row);
    if (includes_x && cnt == 0)
      throw numeric_error("cluster statistics do not contain the row they claim to include");
    const double arg = spec.a / table.cell_space() + static_cast<double>(cnt) - ind;
    if (!(arg > 0)) throw numeric_error("nonpositive predictive factor");
    return std::log(arg);
  };
  const auto& dec = stats.decomposition();
  double lp = (static_cast<double>(dec.separators.size()) -
               static_cast<double>(dec.cliques.size())) *
              std::log(spec.a + static_cast<double>(stats.size()) - ind);
  for (const auto& t : stats.clique_tables()) lp += term(t);
  for (const auto& t : stats.separator_tables()) lp -= term(t);
  return lp;
}

}  // namespace gmclust
