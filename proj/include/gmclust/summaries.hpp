#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gmclust/dataset.hpp"
#include "gmclust/errors.hpp"
#include "gmclust/graph.hpp"
#include "gmclust/sampler.hpp"

namespace gmclust {

/// Shortest round-trip decimal form, used by all CSV writers.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Posterior co-clustering proportions: entry (i,i') is the fraction of draws
/// assigning subjects i and i' to the same cluster.
struct SimilarityMatrix {
  long n = 0;
  std::vector<double> values;  // row-major n*n

  double at(long i, long j) const { return values[i * n + j]; }
  double& at(long i, long j) { return values[i * n + j]; }
};

inline SimilarityMatrix similarity_matrix(const Trace& trace) {
  if (trace.draws.empty()) throw data_error("trace has no draws");
  const long n = static_cast<long>(trace.draws.front().assignments.size());
  std::vector<long> together(n * n, 0);
  for (const auto& d : trace.draws) {
    for (long i = 0; i < n; ++i)
      for (long j = i; j < n; ++j)
        if (d.assignments[i] == d.assignments[j]) ++together[i * n + j];
  }
  SimilarityMatrix sim;
  sim.n = n;
  sim.values.resize(n * n);
  const double draws = static_cast<double>(trace.draws.size());
  for (long i = 0; i < n; ++i)
    for (long j = i; j < n; ++j) {
      const double p = together[i * n + j] / draws;
      sim.at(i, j) = p;
      sim.at(j, i) = p;
    }
  return sim;
}

/// Cluster labels 1..K in first-occurrence order.
using Partition = std::vector<int>;

inline Partition canonicalize_partition(std::span<const int> labels) {
  Partition out(labels.size());
  std::map<int, int> relabel;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(labels[i], static_cast<int>(relabel.size()) + 1);
    out[i] = it->second;
  }
  return out;
}

namespace detail {

// Summing in sorted order makes the result a function of the term multiset
// alone, so VI is bitwise symmetric and label-permutation invariant.
inline double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace detail

/// Variation of Information with natural-log entropies:
///   VI = H(c1) + H(c2) - 2 I(c1, c2).
inline double vi_distance(const Partition& c1, const Partition& c2) {
  if (c1.size() != c2.size()) throw data_error("partitions have different lengths");
  const double n = static_cast<double>(c1.size());
  std::map<int, long> n1, n2;
  std::map<std::pair<int, int>, long> joint;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    ++n1[c1[i]];
    ++n2[c2[i]];
    ++joint[{c1[i], c2[i]}];
  }
  std::vector<double> h1_terms, h2_terms, mi_terms;
  for (const auto& [lab, cnt] : n1) h1_terms.push_back((cnt / n) * std::log(n / cnt));
  for (const auto& [lab, cnt] : n2) h2_terms.push_back((cnt / n) * std::log(n / cnt));
  for (const auto& [labs, cnt] : joint)
    mi_terms.push_back((cnt / n) * std::log((cnt * n) / (static_cast<double>(n1[labs.first]) *
                                                         n2[labs.second])));
  return detail::sorted_sum(h1_terms) + detail::sorted_sum(h2_terms) -
         2.0 * detail::sorted_sum(mi_terms);
}

/// Jensen lower bound to the posterior expected VI of candidate partition c:
///   (1/n) sum_i [ log sum_j 1{c_i=c_j} + log sum_j S_ij
///                 - 2 log sum_j 1{c_i=c_j} S_ij ].
inline double minvi_lower_bound(const Partition& c, const SimilarityMatrix& sim) {
  const long n = sim.n;
  if (static_cast<long>(c.size()) != n) throw data_error("partition/similarity size mismatch");
  double lb = 0.0;
  for (long i = 0; i < n; ++i) {
    double block = 0.0, simsum = 0.0, block_sim = 0.0;
    for (long j = 0; j < n; ++j) {
      simsum += sim.at(i, j);
      if (c[i] == c[j]) {
        block += 1.0;
        block_sim += sim.at(i, j);
      }
    }
    lb += std::log(block) + std::log(simsum) - 2.0 * std::log(block_sim);
  }
  return lb / static_cast<double>(n);
}

/// Among the distinct sampled partitions, the minimizer of the VI lower bound;
/// ties broken by fewer clusters, then first occurrence.
inline Partition minvi_point_estimate(const Trace& trace, const SimilarityMatrix& sim) {
  if (trace.draws.empty()) throw data_error("trace has no draws");
  std::vector<Partition> candidates;
  std::set<Partition> seen;
  for (const auto& d : trace.draws) {
    Partition c = canonicalize_partition(d.assignments);
    if (seen.insert(c).second) candidates.push_back(std::move(c));
  }
  std::size_t best = 0;
  double best_lb = minvi_lower_bound(candidates[0], sim);
  int best_k = *std::max_element(candidates[0].begin(), candidates[0].end());
  for (std::size_t t = 1; t < candidates.size(); ++t) {
    const double lb = minvi_lower_bound(candidates[t], sim);
    const int k = *std::max_element(candidates[t].begin(), candidates[t].end());
    if (lb < best_lb || (lb == best_lb && k < best_k)) {
      best = t;
      best_lb = lb;
      best_k = k;
    }
  }
  return candidates[best];
}

/// Per-subject posterior edge-inclusion proportions over the q variables.
struct PpiMatrix {
  int q = 0;
  std::vector<double> values;  // row-major q*q, zero diagonal, symmetric

  double at(int u, int v) const { return values[static_cast<std::size_t>(u) * q + v]; }
  double& at(int u, int v) { return values[static_cast<std::size_t>(u) * q + v]; }
};

inline PpiMatrix ppi(const Trace& trace, long subject) {
  if (trace.draws.empty()) throw data_error("trace has no draws");
  const long n = static_cast<long>(trace.draws.front().assignments.size());
  if (subject < 0 || subject >= n) throw std::out_of_range("subject index out of range");
  const int q = trace.q;
  std::vector<long> counts(static_cast<std::size_t>(q) * q, 0);
  for (const auto& d : trace.draws) {
    const int label = d.assignments[subject];
    for (const auto& [u, v] : d.graphs.at(label - 1)) {
      ++counts[static_cast<std::size_t>(u) * q + v];
      ++counts[static_cast<std::size_t>(v) * q + u];
    }
  }
  PpiMatrix p;
  p.q = q;
  p.values.resize(counts.size());
  const double draws = static_cast<double>(trace.draws.size());
  for (std::size_t t = 0; t < counts.size(); ++t) p.values[t] = counts[t] / draws;
  return p;
}

/// Subject-specific graph estimate: keep edges with PPI strictly above z. The
/// result is a plain summary and need not be decomposable.
inline UndirectedGraph threshold_graph(const PpiMatrix& p, double z) {
  if (!(z > 0.0 && z < 1.0)) throw config_error("threshold z must lie in (0,1)");
  UndirectedGraph g(p.q);
  for (int u = 0; u < p.q; ++u)
    for (int v = u + 1; v < p.q; ++v)
      if (p.at(u, v) > z) g.set_edge(u, v, true);
  return g;
}

/// Subject order for heatmaps: clusters by size descending (ties by smallest
/// member), members by index.
inline std::vector<long> heatmap_order(const Partition& c) {
  std::map<int, std::vector<long>> blocks;
  for (long i = 0; i < static_cast<long>(c.size()); ++i) blocks[c[i]].push_back(i);
  std::vector<std::vector<long>> groups;
  for (auto& [lab, members] : blocks) groups.push_back(std::move(members));
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  std::vector<long> order;
  for (const auto& g : groups) order.insert(order.end(), g.begin(), g.end());
  return order;
}

inline void write_matrix_csv(const std::string& path, long rows, long cols,
                             const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (j) out << ',';
      out << format_double(values[i * cols + j]);
    }
    out << '\n';
  }
}

inline void write_similarity_csv(const std::string& path, const SimilarityMatrix& sim) {
  write_matrix_csv(path, sim.n, sim.n, sim.values);
}

inline void write_partition_csv(const std::string& path, const Partition& c) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  for (int label : c) out << label << '\n';
}

inline void write_ppi_csv(const std::string& path, const PpiMatrix& p) {
  write_matrix_csv(path, p.q, p.q, p.values);
}

/// Binary PGM (P5) image of the similarity matrix with subjects rearranged by
/// `order`; 255 encodes probability one.
inline void write_similarity_pgm(const std::string& path, const SimilarityMatrix& sim,
                                 const std::vector<long>& order) {
  if (static_cast<long>(order.size()) != sim.n) throw data_error("order/similarity size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write file: " + path);
  out << "P5\n" << sim.n << " " << sim.n << "\n255\n";
  for (long i = 0; i < sim.n; ++i)
    for (long j = 0; j < sim.n; ++j) {
      const double v = sim.at(order[i], order[j]);
      out.put(static_cast<char>(std::lround(255.0 * v)));
    }
}

/// Long-format support table for known groups: per (group, cluster, variable,
/// level), the share of that level among the group's rows in the cluster.
/// Cluster 0 aggregates the whole group.
struct GroupSupportRow {
  std::string group;
  int cluster = 0;  // 0 = group-wide
  std::string variable;
  std::string level;
  long count = 0;
  long total = 0;
};

inline std::vector<GroupSupportRow> group_support_table(const CategoricalDataset& data,
                                                        const std::vector<std::string>& groups,
                                                        const Partition& partition) {
  if (static_cast<long>(groups.size()) != data.n() ||
      static_cast<long>(partition.size()) != data.n())
    throw data_error("group labels or partition length disagrees with the dataset");
  std::vector<GroupSupportRow> rows;
  std::set<std::string> group_names(groups.begin(), groups.end());
  const int K = *std::max_element(partition.begin(), partition.end());
  for (const auto& gname : group_names) {
    for (int cl = 0; cl <= K; ++cl) {
      std::vector<long> members;
      for (long i = 0; i < data.n(); ++i)
        if (groups[i] == gname && (cl == 0 || partition[i] == cl)) members.push_back(i);
      if (members.empty()) continue;
      for (int j = 0; j < data.q(); ++j) {
        std::vector<long> level_counts(data.levels(j), 0);
        for (long i : members) ++level_counts[data.code(i, j)];
        for (int l = 0; l < data.levels(j); ++l)
          rows.push_back({gname, cl, data.variable_names()[j], data.level_labels(j)[l],
                          level_counts[l], static_cast<long>(members.size())});
      }
    }
  }
  return rows;
}

inline void write_group_support_csv(const std::string& path,
                                    const std::vector<GroupSupportRow>& rows) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  out << "group,cluster,variable,level,count,total,proportion\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.cluster << ',' << r.variable << ',' << r.level << ',' << r.count
        << ',' << r.total << ',' << format_double(static_cast<double>(r.count) / r.total) << '\n';
  }
}

}  // namespace gmclust
