#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <string>
#include <vector>

#include "gmclust/graph.hpp"
#include "gmclust/rng.hpp"

namespace gmclust {

/// Cliques C_1..C_K in a running-intersection order together with the
/// separators S_k = C_k ∩ (C_1 ∪ ... ∪ C_{k-1}), k = 2..K. Separators are kept
/// with multiplicity and may be empty (disconnected graphs). Vertex sets are
/// sorted.
struct CliqueDecomposition {
  std::vector<std::vector<int>> cliques;
  std::vector<std::vector<int>> separators;
};

namespace detail {

struct McsResult {
  std::vector<int> order;                   // visit order, ties broken by smallest index
  std::vector<std::vector<int>> parents;    // parents[i]: earlier-visited neighbors of order[i]
  std::vector<int> position;                // position[v]: visit index of vertex v
};

/// Maximum cardinality search. O(q^2) with the adjacency-matrix graph.
inline McsResult mcs(const UndirectedGraph& g) {
  const int q = g.q();
  McsResult res;
  res.order.reserve(q);
  res.parents.resize(q);
  res.position.assign(q, -1);
  std::vector<int> weight(q, 0);
  std::vector<bool> visited(q, false);
  for (int step = 0; step < q; ++step) {
    int best = -1;
    for (int v = 0; v < q; ++v)
      if (!visited[v] && (best == -1 || weight[v] > weight[best])) best = v;
    visited[best] = true;
    res.position[best] = step;
    res.order.push_back(best);
    auto& par = res.parents[step];
    for (int u = 0; u < q; ++u) {
      if (g.has_edge(best, u)) {
        if (visited[u])
          par.push_back(u);
        else
          ++weight[u];
      }
    }
  }
  return res;
}

/// Tarjan-Yannakakis check that the MCS order certifies chordality: for each
/// vertex, its earlier neighbors minus the last-visited one must all be
/// adjacent to that last-visited one.
inline bool peo_holds(const UndirectedGraph& g, const McsResult& m) {
  const int q = g.q();
  for (int i = 0; i < q; ++i) {
    const auto& par = m.parents[i];
    if (par.size() < 2) continue;
    int last = par[0];
    for (int u : par)
      if (m.position[u] > m.position[last]) last = u;
    for (int u : par)
      if (u != last && !g.has_edge(u, last)) return false;
  }
  return true;
}

}  // namespace detail

/// True iff every cycle of length >= 4 has a chord.
inline bool is_decomposable(const UndirectedGraph& g) {
  return detail::peo_holds(g, detail::mcs(g));
}

/// Clique/separator decomposition in MCS order. Throws std::domain_error on a
/// non-decomposable graph.
inline CliqueDecomposition clique_decomposition(const UndirectedGraph& g) {
  const auto m = detail::mcs(g);
  if (!detail::peo_holds(g, m)) throw std::domain_error("graph is not decomposable");

  const int q = g.q();
  // Candidate cliques {v} ∪ parents(v); the maximal ones, in the visit order
  // of their generating vertex, satisfy the running intersection property.
  std::vector<std::vector<int>> candidates(q);
  for (int i = 0; i < q; ++i) {
    candidates[i] = m.parents[i];
    candidates[i].push_back(m.order[i]);
    std::sort(candidates[i].begin(), candidates[i].end());
  }
  CliqueDecomposition dec;
  for (int i = 0; i < q; ++i) {
    bool maximal = true;
    for (int j = 0; j < q && maximal; ++j) {
      if (candidates[j].size() <= candidates[i].size()) continue;
      maximal = !std::includes(candidates[j].begin(), candidates[j].end(),
                               candidates[i].begin(), candidates[i].end());
    }
    if (maximal) dec.cliques.push_back(candidates[i]);
  }

  std::vector<bool> seen(q, false);
  for (std::size_t k = 0; k < dec.cliques.size(); ++k) {
    if (k > 0) {
      std::vector<int> sep;
      for (int v : dec.cliques[k])
        if (seen[v]) sep.push_back(v);
      dec.separators.push_back(std::move(sep));
    }
    for (int v : dec.cliques[k]) seen[v] = true;
  }
  return dec;
}

struct GraphMove {
  enum class Kind { deletion, insertion };
  Kind kind;
  int u, v;  // u < v

  bool operator==(const GraphMove&) const = default;
};

/// All single-edge insertions/deletions whose result is decomposable, in
/// lexicographic endpoint order.
inline std::vector<GraphMove> enumerate_valid_moves(const UndirectedGraph& g) {
  if (!is_decomposable(g)) throw std::domain_error("graph is not decomposable");
  std::vector<GraphMove> moves;
  UndirectedGraph probe = g;
  for (int u = 0; u < g.q(); ++u) {
    for (int v = u + 1; v < g.q(); ++v) {
      const bool present = g.has_edge(u, v);
      probe.set_edge(u, v, !present);
      if (is_decomposable(probe))
        moves.push_back({present ? GraphMove::Kind::deletion : GraphMove::Kind::insertion, u, v});
      probe.set_edge(u, v, present);
    }
  }
  return moves;
}

/// Applies a single valid move; throws std::domain_error if the move is not in
/// the valid-move set of `g`.
inline UndirectedGraph apply_move(const UndirectedGraph& g, const GraphMove& move) {
  if (!is_decomposable(g)) throw std::domain_error("graph is not decomposable");
  UndirectedGraph out = g;
  const bool insert = move.kind == GraphMove::Kind::insertion;
  if (g.has_edge(move.u, move.v) == insert)
    throw std::domain_error("move does not match the current edge state");
  out.set_edge(move.u, move.v, insert);
  if (!is_decomposable(out)) throw std::domain_error("move leaves the decomposable class");
  return out;
}

/// Grows a decomposable graph from the empty graph by uniformly chosen valid
/// insertions until target_edges is reached.
inline UndirectedGraph random_decomposable_graph(int q, int target_edges, Rng& rng) {
  if (target_edges < 0 || target_edges > q * (q - 1) / 2)
    throw std::out_of_range("target edge count out of range");
  UndirectedGraph g(q);
  while (g.edge_count() < target_edges) {
    std::vector<GraphMove> insertions;
    for (const auto& mv : enumerate_valid_moves(g))
      if (mv.kind == GraphMove::Kind::insertion) insertions.push_back(mv);
    // Below the complete graph a valid insertion always exists.
    assert(!insertions.empty());
    g = apply_move(g, insertions[uniform_index(rng, insertions.size())]);
  }
  return g;
}

/// Applies m uniformly chosen valid moves in sequence.
inline UndirectedGraph perturb_graph(const UndirectedGraph& graph, int m, Rng& rng) {
  UndirectedGraph g = graph;
  for (int t = 0; t < m; ++t) {
    const auto moves = enumerate_valid_moves(g);
    if (moves.empty()) break;  // q = 1
    g = apply_move(g, moves[uniform_index(rng, moves.size())]);
  }
  return g;
}

}  // namespace gmclust
