#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmclust/summaries.hpp"
#include "oracles.hpp"

using namespace gmclust;
using Catch::Matchers::WithinAbs;

namespace {

Trace trace_of(const std::vector<std::vector<int>>& assignment_draws,
               const std::vector<std::vector<std::vector<std::pair<int, int>>>>& graph_draws = {},
               int q = 2) {
  Trace t;
  t.n = static_cast<long>(assignment_draws.front().size());
  t.q = q;
  for (std::size_t s = 0; s < assignment_draws.size(); ++s) {
    TraceDraw d;
    d.iter = static_cast<long>(s) + 1;
    d.assignments = assignment_draws[s];
    d.K = *std::max_element(d.assignments.begin(), d.assignments.end());
    d.alpha = 1.0;
    if (!graph_draws.empty())
      d.graphs = graph_draws[s];
    else
      d.graphs.assign(d.K, {});
    t.draws.push_back(std::move(d));
  }
  return t;
}

}  // namespace

TEST_CASE("similarity matrix from draws") {
  SECTION("single one-cluster draw gives all ones") {
    const auto t = trace_of({{1, 1, 1}});
    const auto sim = similarity_matrix(t);
    for (long i = 0; i < 3; ++i)
      for (long j = 0; j < 3; ++j) CHECK(sim.at(i, j) == 1.0);
  }
  SECTION("two draws average the co-clustering indicators") {
    const auto t = trace_of({{1, 1, 2}, {1, 2, 2}});
    const auto sim = similarity_matrix(t);
    CHECK(sim.at(0, 1) == 0.5);
    CHECK(sim.at(1, 2) == 0.5);
    CHECK(sim.at(0, 2) == 0.0);
  }
  SECTION("symmetry, unit diagonal, and an independent recount") {
    const auto t = trace_of({{1, 2, 1, 2}, {1, 1, 2, 2}, {1, 2, 2, 1}, {1, 1, 1, 2}});
    const auto sim = similarity_matrix(t);
    for (long i = 0; i < 4; ++i) {
      CHECK(sim.at(i, i) == 1.0);
      for (long j = 0; j < 4; ++j) {
        CHECK(sim.at(i, j) == sim.at(j, i));
        long same = 0;
        for (const auto& d : t.draws)
          if (d.assignments[i] == d.assignments[j]) ++same;
        CHECK(sim.at(i, j) == same / 4.0);
      }
    }
  }
  SECTION("empty trace is an error") {
    Trace t;
    CHECK_THROWS_AS(similarity_matrix(t), data_error);
  }
}

TEST_CASE("variation of information") {
  SECTION("identical partitions have distance zero") {
    const Partition c{1, 2, 1, 3};
    CHECK(vi_distance(c, c) == 0.0);
  }
  SECTION("crossed pair partitions on four points give exactly 2 log 2") {
    const Partition c1{1, 1, 2, 2}, c2{1, 2, 1, 2};
    CHECK(vi_distance(c1, c2) == 2.0 * std::log(2.0));
  }
  SECTION("one block against singletons is log n") {
    const Partition block(8, 1);
    Partition singletons(8);
    for (int i = 0; i < 8; ++i) singletons[i] = i + 1;
    CHECK_THAT(vi_distance(block, singletons), WithinAbs(std::log(8.0), 1e-14));
  }
  SECTION("length mismatch is an error") {
    CHECK_THROWS_AS(vi_distance({1, 2}, {1, 2, 3}), data_error);
  }
}

TEST_CASE("VI is a permutation-invariant metric on all partitions of five points") {
  const auto parts = oracle::all_partitions(5);
  REQUIRE(parts.size() == 52);

  std::vector<std::vector<double>> d(parts.size(), std::vector<double>(parts.size()));
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = 0; b < parts.size(); ++b) d[a][b] = vi_distance(parts[a], parts[b]);

  for (std::size_t a = 0; a < parts.size(); ++a) {
    CHECK(d[a][a] == 0.0);
    for (std::size_t b = a + 1; b < parts.size(); ++b) {
      CHECK(d[a][b] == d[b][a]);
      CHECK(d[a][b] > 0.0);  // distinct canonical partitions
    }
  }
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = 0; b < parts.size(); ++b)
      for (std::size_t c = 0; c < parts.size(); ++c)
        REQUIRE(d[a][c] <= d[a][b] + d[b][c] + 1e-12);

  // relabeling one side must not change the distance
  const Partition base{1, 2, 2, 3, 1};
  const Partition relabeled{3, 1, 1, 2, 3};
  for (const auto& p : parts)
    CHECK_THAT(vi_distance(p, base), WithinAbs(vi_distance(p, relabeled), 1e-14));
}

TEST_CASE("minVI point estimate") {
  SECTION("a trace of identical draws returns that partition") {
    const auto t = trace_of({{1, 1, 2}, {1, 1, 2}, {1, 1, 2}});
    const auto sim = similarity_matrix(t);
    CHECK(minvi_point_estimate(t, sim) == Partition{1, 1, 2});
  }
  SECTION("two-draw trace agrees with the exhaustive expected-VI oracle") {
    const auto t = trace_of({{1, 1, 2}, {1, 2, 2}});
    const auto sim = similarity_matrix(t);
    const auto chosen = minvi_point_estimate(t, sim);

    // exact posterior expected VI for every partition of three points
    const std::vector<Partition> sampled{{1, 1, 2}, {1, 2, 2}};
    auto expected_vi = [&](const Partition& c) {
      return 0.5 * vi_distance(c, sampled[0]) + 0.5 * vi_distance(c, sampled[1]);
    };
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : sampled) best = std::min(best, expected_vi(c));
    CHECK_THAT(expected_vi(chosen), WithinAbs(best, 1e-12));

    // and the lower bound of the choice is minimal among candidates
    for (const auto& c : sampled)
      CHECK(minvi_lower_bound(chosen, sim) <= minvi_lower_bound(c, sim) + 1e-12);
  }
  SECTION("a clean block similarity returns the block partition with zero bound") {
    const auto t = trace_of({{1, 1, 2, 2}, {1, 1, 2, 2}, {1, 1, 2, 2}, {2, 2, 1, 1}});
    const auto sim = similarity_matrix(t);
    const auto chosen = minvi_point_estimate(t, sim);
    CHECK(chosen == Partition{1, 1, 2, 2});
    CHECK_THAT(minvi_lower_bound(chosen, sim), WithinAbs(0.0, 1e-12));
  }
  SECTION("empty trace is an error") {
    Trace t;
    SimilarityMatrix sim;
    CHECK_THROWS_AS(minvi_point_estimate(t, sim), data_error);
  }
}

TEST_CASE("per-subject edge inclusion proportions") {
  const std::vector<std::vector<std::pair<int, int>>> empty_graphs{{}};
  const std::vector<std::vector<std::pair<int, int>>> triangle{{{0, 1}, {0, 2}, {1, 2}}};

  SECTION("empty graphs give a zero matrix") {
    const auto t = trace_of({{1, 1}, {1, 1}}, {empty_graphs, empty_graphs}, 3);
    const auto p = ppi(t, 0);
    for (double v : p.values) CHECK(v == 0.0);
  }
  SECTION("a triangle in every draw gives ones off the diagonal") {
    const auto t = trace_of({{1, 1}, {1, 1}}, {triangle, triangle}, 3);
    const auto p = ppi(t, 1);
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) CHECK(p.at(u, v) == (u == v ? 0.0 : 1.0));
  }
  SECTION("two equally frequent graphs differing in one edge") {
    const std::vector<std::vector<std::pair<int, int>>> g1{{{0, 1}}};
    const std::vector<std::vector<std::pair<int, int>>> g2{{{0, 1}, {1, 2}}};
    const auto t = trace_of({{1, 1}, {1, 1}}, {g1, g2}, 3);
    const auto p = ppi(t, 0);
    CHECK(p.at(0, 1) == 1.0);
    CHECK(p.at(1, 2) == 0.5);
    CHECK(p.at(0, 2) == 0.0);
    CHECK(p.at(1, 2) == p.at(2, 1));
  }
  SECTION("subject follows its own cluster's graph") {
    const std::vector<std::vector<std::pair<int, int>>> two{{{0, 1}}, {}};
    const auto t = trace_of({{1, 2}}, {two}, 2);
    CHECK(ppi(t, 0).at(0, 1) == 1.0);
    CHECK(ppi(t, 1).at(0, 1) == 0.0);
  }
  SECTION("out-of-range subject is a bounds error") {
    const auto t = trace_of({{1, 1}}, {empty_graphs}, 3);
    CHECK_THROWS_AS(ppi(t, 2), std::out_of_range);
    CHECK_THROWS_AS(ppi(t, -1), std::out_of_range);
  }
}

TEST_CASE("thresholded graph estimate") {
  PpiMatrix p;
  p.q = 3;
  p.values = {0.0, 0.5, 0.9, 0.5, 0.0, 0.2, 0.9, 0.2, 0.0};

  SECTION("strictly greater than z") {
    const auto g = threshold_graph(p, 0.5);
    CHECK_FALSE(g.has_edge(0, 1));  // exactly at the threshold: excluded
    CHECK(g.has_edge(0, 2));
    CHECK_FALSE(g.has_edge(1, 2));
  }
  SECTION("extreme matrices") {
    PpiMatrix ones;
    ones.q = 3;
    ones.values.assign(9, 1.0);
    for (int v = 0; v < 3; ++v) ones.at(v, v) = 0.0;
    CHECK(threshold_graph(ones, 0.5).edge_count() == 3);
    PpiMatrix zeros;
    zeros.q = 3;
    zeros.values.assign(9, 0.0);
    CHECK(threshold_graph(zeros, 0.5).edge_count() == 0);
  }
  SECTION("z outside (0,1) is rejected") {
    CHECK_THROWS_AS(threshold_graph(p, 0.0), config_error);
    CHECK_THROWS_AS(threshold_graph(p, 1.0), config_error);
  }
}

TEST_CASE("heatmap order sorts clusters by size then members by index") {
  const Partition c{2, 1, 1, 2, 1, 3};
  const auto order = heatmap_order(c);
  CHECK(order == std::vector<long>{1, 2, 4, 0, 3, 5});
}

TEST_CASE("group support table aggregates per group, cluster, and level") {
  const auto data = CategoricalDataset::from_codes({{0}, {1}, {1}, {0}}, {2});
  const std::vector<std::string> groups{"a", "a", "b", "b"};
  const Partition part{1, 2, 2, 1};
  const auto rows = group_support_table(data, groups, part);
  // group a overall: level 0 once, level 1 once
  bool found = false;
  for (const auto& r : rows) {
    if (r.group == "a" && r.cluster == 0 && r.level == "1") {
      CHECK(r.count == 1);
      CHECK(r.total == 2);
      found = true;
    }
    if (r.group == "b" && r.cluster == 2 && r.level == "1") {
      CHECK(r.count == 1);
      CHECK(r.total == 1);
    }
  }
  CHECK(found);
  CHECK_THROWS_AS(group_support_table(data, {"a"}, part), data_error);
}
