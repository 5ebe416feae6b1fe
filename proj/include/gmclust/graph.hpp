#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace gmclust {

/// Symmetric, loop-free adjacency over vertices 0..q-1.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int q) : q_(q), adj_(static_cast<std::size_t>(q) * q, 0) {
    if (q < 1) throw std::out_of_range("graph needs at least one vertex");
  }

  static UndirectedGraph from_edges(int q, const std::vector<std::pair<int, int>>& edges) {
    UndirectedGraph g(q);
    for (const auto& [u, v] : edges) g.set_edge(u, v, true);
    return g;
  }

  int q() const { return q_; }
  int edge_count() const { return edges_; }
  int max_edges() const { return q_ * (q_ - 1) / 2; }

  bool has_edge(int u, int v) const { return adj_[static_cast<std::size_t>(u) * q_ + v] != 0; }

  void set_edge(int u, int v, bool present) {
    check_pair(u, v);
    const bool had = has_edge(u, v);
    if (had == present) {
      if (present) throw std::domain_error("edge already present");
      throw std::domain_error("edge already absent");
    }
    adj_[static_cast<std::size_t>(u) * q_ + v] = present ? 1 : 0;
    adj_[static_cast<std::size_t>(v) * q_ + u] = present ? 1 : 0;
    edges_ += present ? 1 : -1;
  }

  /// Edges as (u,v) with u < v, lexicographic.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_);
    for (int u = 0; u < q_; ++u)
      for (int v = u + 1; v < q_; ++v)
        if (has_edge(u, v)) out.emplace_back(u, v);
    return out;
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < q_; ++u)
      if (has_edge(v, u)) out.push_back(u);
    return out;
  }

  int hamming_distance(const UndirectedGraph& other) const {
    if (other.q_ != q_) throw std::out_of_range("vertex counts differ");
    int d = 0;
    for (int u = 0; u < q_; ++u)
      for (int v = u + 1; v < q_; ++v)
        if (has_edge(u, v) != other.has_edge(u, v)) ++d;
    return d;
  }

  bool operator==(const UndirectedGraph& other) const = default;

 private:
  void check_pair(int u, int v) const {
    if (u < 0 || u >= q_ || v < 0 || v >= q_) throw std::out_of_range("vertex index out of range");
    if (u == v) throw std::domain_error("self-loops are not allowed");
  }

  int q_;
  int edges_ = 0;
  std::vector<char> adj_;
};

}  // namespace gmclust
