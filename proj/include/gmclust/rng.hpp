#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "gmclust/errors.hpp"

namespace gmclust {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Gamma(shape, rate) draw, mean shape/rate.
inline double gamma_draw(Rng& rng, double shape, double rate) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

inline double beta_draw(Rng& rng, double a, double b) {
  const double x = gamma_draw(rng, a, 1.0);
  const double y = gamma_draw(rng, b, 1.0);
  return x / (x + y);
}

inline double normal_draw(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Samples an index proportional to exp(log_weights[k]), subtracting the
/// maximum before exponentiating. Throws on non-finite weights.
inline std::size_t sample_from_log_weights(Rng& rng, std::span<const double> log_weights) {
  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      std::ostringstream msg;
      msg << "non-finite log-weight in categorical draw:";
      for (double w : log_weights) msg << ' ' << w;
      throw numeric_error(msg.str());
    }
    max_lw = std::max(max_lw, lw);
  }
  if (!std::isfinite(max_lw)) throw numeric_error("all categorical log-weights are -inf");

  std::vector<double> cum(log_weights.size());
  double run = 0.0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    run += std::exp(log_weights[k] - max_lw);
    cum[k] = run;
  }
  const double u = uniform01(rng) * run;
  for (std::size_t k = 0; k < cum.size(); ++k) {
    if (u <= cum[k]) return k;
  }
  return cum.size() - 1;
}

}  // namespace gmclust
