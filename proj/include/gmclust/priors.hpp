#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gmclust/errors.hpp"
#include "gmclust/graph.hpp"

namespace gmclust {

/// Hyper-Dirichlet total mass a; induced cell hyperparameters a / |X_S| are
/// hyperconsistent across overlapping cliques by construction.
struct HyperDirichletSpec {
  double a = 1.0;

  void validate() const {
    if (!(a > 0)) throw config_error("hyperparameter a must be positive");
  }
};

/// Beta(a_g, b_g) on the edge-inclusion probability, marginalized out.
struct GraphPriorSpec {
  double a_g = 1.0;
  double b_g = 1.0;

  void validate() const {
    if (!(a_g > 0) || !(b_g > 0)) throw config_error("graph prior a_g, b_g must be positive");
  }
};

/// Gamma(c, d) on the concentration parameter (shape c, rate d).
struct ConcentrationPriorSpec {
  double c = 3.0;
  double d = 1.0;

  void validate() const {
    if (!(c > 0) || !(d > 0)) throw config_error("concentration prior c, d must be positive");
  }
};

/// Per-cell Dirichlet hyperparameter a / prod_{j in S} l_j; the empty subset
/// returns a.
inline double hyperparameter(const HyperDirichletSpec& spec, const std::vector<int>& levels,
                             std::span<const int> subset) {
  double cells = 1.0;
  for (int j : subset) cells *= static_cast<double>(levels.at(j));
  return spec.a / cells;
}

/// Log of the beta-binomial marginal graph prior, unnormalized over the
/// decomposable class. Depends on the graph only through its edge count.
inline double log_graph_prior_edges(int edge_count, int q, const GraphPriorSpec& spec) {
  const double pairs = 0.5 * q * (q - 1);
  return std::lgamma(spec.a_g + edge_count) + std::lgamma(spec.b_g + pairs - edge_count) -
         std::lgamma(pairs + spec.a_g + spec.b_g) + std::lgamma(spec.a_g + spec.b_g) -
         std::lgamma(spec.a_g) - std::lgamma(spec.b_g);
}

inline double log_graph_prior(const UndirectedGraph& g, const GraphPriorSpec& spec) {
  return log_graph_prior_edges(g.edge_count(), g.q(), spec);
}

}  // namespace gmclust
