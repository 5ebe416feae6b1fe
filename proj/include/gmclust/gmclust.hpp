#pragma once

// Clustering of multivariate categorical data with a Dirichlet Process
// mixture of decomposable graphical models.

#include "gmclust/chordal.hpp"
#include "gmclust/dataset.hpp"
#include "gmclust/errors.hpp"
#include "gmclust/graph.hpp"
#include "gmclust/predictive.hpp"
#include "gmclust/priors.hpp"
#include "gmclust/rng.hpp"
#include "gmclust/sampler.hpp"
#include "gmclust/simulate.hpp"
#include "gmclust/summaries.hpp"
#include "gmclust/trace_io.hpp"
