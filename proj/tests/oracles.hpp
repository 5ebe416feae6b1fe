// Independent reference implementations used only by the test suites. These
// deliberately avoid the library's code paths: chordality by induced-cycle
// enumeration, marginal likelihoods by dense-table evaluation, distribution
// checks by quadrature and Kolmogorov-Smirnov statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "gmclust/dataset.hpp"
#include "gmclust/graph.hpp"

namespace oracle {

/// Chordality by brute force: a graph is chordal iff no vertex subset of size
/// >= 4 induces a cycle (connected, all degrees exactly 2).
inline bool is_chordal(const gmclust::UndirectedGraph& g) {
  const int q = g.q();
  for (unsigned mask = 0; mask < (1u << q); ++mask) {
    std::vector<int> verts;
    for (int v = 0; v < q; ++v)
      if (mask & (1u << v)) verts.push_back(v);
    if (verts.size() < 4) continue;

    bool all_degree_two = true;
    for (int u : verts) {
      int deg = 0;
      for (int v : verts)
        if (u != v && g.has_edge(u, v)) ++deg;
      if (deg != 2) {
        all_degree_two = false;
        break;
      }
    }
    if (!all_degree_two) continue;

    // connected?
    std::vector<int> stack{verts[0]};
    std::vector<bool> seen(q, false);
    seen[verts[0]] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : verts)
        if (!seen[v] && g.has_edge(u, v)) {
          seen[v] = true;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached == verts.size()) return false;  // induced chordless cycle
  }
  return true;
}

/// Toggle-and-test move enumeration against the brute-force chordality check.
inline std::vector<std::pair<int, int>> valid_toggles(const gmclust::UndirectedGraph& g) {
  std::vector<std::pair<int, int>> out;
  gmclust::UndirectedGraph probe = g;
  for (int u = 0; u < g.q(); ++u)
    for (int v = u + 1; v < g.q(); ++v) {
      const bool present = g.has_edge(u, v);
      probe.set_edge(u, v, !present);
      if (is_chordal(probe)) out.emplace_back(u, v);
      probe.set_edge(u, v, present);
    }
  return out;
}

/// Dense Dirichlet-multinomial log marginal over every cell of the subset's
/// table:  log G(sum a_c) - log G(sum a_c + n) + sum_cells [G(a_c+n_c)-G(a_c)].
inline double log_marginal_dense(const gmclust::CategoricalDataset& data,
                                 std::span<const long> rows, const std::vector<int>& subset,
                                 double a_total) {
  long cells = 1;
  for (int j : subset) cells *= data.levels(j);
  std::vector<long> counts(cells, 0);
  for (long i : rows) {
    long key = 0, stride = 1;
    for (int j : subset) {
      key += stride * data.code(i, j);
      stride *= data.levels(j);
    }
    ++counts[key];
  }
  const double a_cell = a_total / static_cast<double>(cells);
  double sum_a = 0.0;
  for (long c = 0; c < cells; ++c) sum_a += a_cell;
  double lm = std::lgamma(sum_a) - std::lgamma(sum_a + static_cast<double>(rows.size()));
  for (long c = 0; c < cells; ++c)
    lm += std::lgamma(a_cell + static_cast<double>(counts[c])) - std::lgamma(a_cell);
  return lm;
}

/// All configurations of the full variable space, odometer order.
inline std::vector<std::vector<int>> all_configurations(const std::vector<int>& levels) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(levels.size(), 0);
  while (true) {
    out.push_back(cur);
    std::size_t j = 0;
    while (j < levels.size() && ++cur[j] == levels[j]) cur[j++] = 0;
    if (j == levels.size()) break;
  }
  return out;
}

/// All set partitions of {0..n-1} as restricted-growth label vectors (1-based).
inline std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> labels(n, 1);
  std::function<void(int, int)> rec = [&](int i, int max_used) {
    if (i == n) {
      out.push_back(labels);
      return;
    }
    for (int l = 1; l <= max_used + 1; ++l) {
      labels[i] = l;
      rec(i + 1, std::max(max_used, l));
    }
  };
  rec(0, 0);
  return out;
}

/// Asymptotic Kolmogorov distribution tail Q(lambda) = P(D > lambda-ish).
inline double ks_tail(double lambda) {
  double q = 0.0;
  for (int k = 1; k <= 100; ++k)
    q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

/// Two-sample KS statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

inline double ks_two_sample_pvalue(const std::vector<double>& a, const std::vector<double>& b) {
  const double d = ks_two_sample(a, b);
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double sq = std::sqrt(ne);
  return ks_tail((sq + 0.12 + 0.11 / sq) * d);
}

/// One-sample KS statistic against a CDF.
inline double ks_one_sample(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

/// CDF of an unnormalized log-density tabulated by the trapezoid rule.
class QuadratureCdf {
 public:
  QuadratureCdf(const std::function<double(double)>& log_density, double lo, double hi,
                int grid = 20000)
      : lo_(lo), hi_(hi) {
    xs_.resize(grid + 1);
    std::vector<double> f(grid + 1);
    double max_ld = -std::numeric_limits<double>::infinity();
    std::vector<double> ld(grid + 1);
    for (int i = 0; i <= grid; ++i) {
      xs_[i] = lo + (hi - lo) * i / grid;
      ld[i] = log_density(xs_[i]);
      max_ld = std::max(max_ld, ld[i]);
    }
    for (int i = 0; i <= grid; ++i) f[i] = std::exp(ld[i] - max_ld);
    cdf_.assign(grid + 1, 0.0);
    for (int i = 1; i <= grid; ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (f[i] + f[i - 1]) * (xs_[i] - xs_[i - 1]);
    for (double& c : cdf_) c /= cdf_.back();
  }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
  }

 private:
  double lo_, hi_;
  std::vector<double> xs_, cdf_;
};

/// Pearson chi-square independence statistic for two binary columns.
inline double chisq_independence_binary(const gmclust::CategoricalDataset& data, int j1, int j2) {
  long n = data.n();
  long c[2][2] = {{0, 0}, {0, 0}};
  for (long i = 0; i < n; ++i) ++c[data.code(i, j1)][data.code(i, j2)];
  const double r0 = c[0][0] + c[0][1], r1 = c[1][0] + c[1][1];
  const double k0 = c[0][0] + c[1][0], k1 = c[0][1] + c[1][1];
  double stat = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double expect = (a ? r1 : r0) * (b ? k1 : k0) / static_cast<double>(n);
      if (expect > 0) stat += (c[a][b] - expect) * (c[a][b] - expect) / expect;
    }
  return stat;
}

}  // namespace oracle
