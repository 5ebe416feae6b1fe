#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmclust/errors.hpp"
#include "gmclust/sampler.hpp"

namespace gmclust {

/// Writes one JSON object per saved draw, then a trailing metadata object
/// carrying the run parameters and graph-move acceptance counters.
inline void write_trace_jsonl(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write trace file: " + path);
  for (const auto& d : trace.draws) {
    nlohmann::json j;
    j["iter"] = d.iter;
    j["K"] = d.K;
    j["alpha"] = d.alpha;
    j["assignments"] = d.assignments;
    auto graphs = nlohmann::json::array();
    for (const auto& edges : d.graphs) {
      auto g = nlohmann::json::array();
      for (const auto& [u, v] : edges) g.push_back({u, v});
      graphs.push_back(g);
    }
    j["graphs"] = graphs;
    out << j.dump() << "\n";
  }
  nlohmann::json meta;
  meta["meta"] = {{"n", trace.n},
                  {"q", trace.q},
                  {"seed", trace.seed},
                  {"iterations", trace.iterations},
                  {"burn_in", trace.burn_in},
                  {"thin", trace.thin},
                  {"baseline_mode", trace.baseline_mode},
                  {"graph_proposals", trace.graph_proposals},
                  {"graph_accepts", trace.graph_accepts}};
  out << meta.dump() << "\n";
  if (!out) throw data_error("failed while writing trace file: " + path);
}

inline Trace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open trace file: " + path);
  Trace trace;
  bool meta_seen = false;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      trace.n = m.at("n").get<long>();
      trace.q = m.at("q").get<int>();
      trace.seed = m.at("seed").get<std::uint64_t>();
      trace.iterations = m.at("iterations").get<long>();
      trace.burn_in = m.at("burn_in").get<long>();
      trace.thin = m.at("thin").get<long>();
      trace.baseline_mode = m.value("baseline_mode", false);
      trace.graph_proposals = m.at("graph_proposals").get<long>();
      trace.graph_accepts = m.at("graph_accepts").get<long>();
      meta_seen = true;
      continue;
    }
    TraceDraw d;
    d.iter = j.at("iter").get<long>();
    d.K = j.at("K").get<int>();
    d.alpha = j.at("alpha").get<double>();
    d.assignments = j.at("assignments").get<std::vector<int>>();
    for (const auto& g : j.at("graphs")) {
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : g) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      d.graphs.push_back(std::move(edges));
    }
    if (static_cast<int>(d.graphs.size()) != d.K)
      throw data_error(path + ":" + std::to_string(line_no) + ": draw has " +
                       std::to_string(d.graphs.size()) + " graphs but K=" + std::to_string(d.K));
    for (int a : d.assignments)
      if (a < 1 || a > d.K)
        throw data_error(path + ":" + std::to_string(line_no) + ": assignment label out of range");
    trace.draws.push_back(std::move(d));
  }
  if (!meta_seen) throw data_error(path + ": missing trailing metadata object");
  for (const auto& d : trace.draws)
    if (static_cast<long>(d.assignments.size()) != trace.n)
      throw data_error(path + ": draw length disagrees with metadata n");
  return trace;
}

/// Concatenates the draws of several traces; all must share n and q.
inline Trace merge_traces(const std::vector<Trace>& traces) {
  if (traces.empty()) throw data_error("no traces to merge");
  Trace merged = traces.front();
  for (std::size_t t = 1; t < traces.size(); ++t) {
    const Trace& tr = traces[t];
    if (tr.n != merged.n || tr.q != merged.q)
      throw data_error("traces disagree on n or q and cannot be merged");
    merged.draws.insert(merged.draws.end(), tr.draws.begin(), tr.draws.end());
    merged.graph_proposals += tr.graph_proposals;
    merged.graph_accepts += tr.graph_accepts;
  }
  return merged;
}

}  // namespace gmclust
