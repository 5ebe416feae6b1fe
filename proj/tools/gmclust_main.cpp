// gmclust command line: simulate synthetic two-group categorical data, fit the
// Dirichlet Process mixture of decomposable graphical models, and summarize
// posterior draws. Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric
// failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmclust/gmclust.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw gmclust::config_error("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw gmclust::config_error("config parse error in " + path + ": " + e.what());
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw gmclust::config_error("--set expects key=value, got: " + ov);
    const std::string key = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    try {
      cfg[key] = json::parse(value);
    } catch (const json::exception&) {
      cfg[key] = value;  // plain string
    }
  }
  return cfg;
}

const json& require_key(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw gmclust::config_error("missing required config key: " + key);
  return cfg.at(key);
}

template <typename T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw gmclust::config_error("config key '" + key + "': " + e.what());
  }
}

long progress_from_env(long configured) {
  const char* env = std::getenv("GMCLUST_LOG");
  if (!env) return configured;
  const std::string level(env);
  if (level == "quiet") return 0;
  if (level == "debug" && configured == 0) return 100;
  return configured;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw gmclust::data_error("cannot create output directory: " + dir);
}

void write_dataset_csv(const std::string& path, const gmclust::CategoricalDataset& data) {
  std::ofstream out(path);
  if (!out) throw gmclust::data_error("cannot write file: " + path);
  const auto& names = data.variable_names();
  for (int j = 0; j < data.q(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (long i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.q(); ++j) out << (j ? "," : "") << data.decode(i, j);
    out << '\n';
  }
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw gmclust::data_error("cannot write file: " + path);
  out << "label\n";
  for (int l : labels) out << l << '\n';
}

json graph_to_json(const gmclust::UndirectedGraph& g) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return json{{"q", g.q()}, {"edges", edges}};
}

int cmd_simulate(const json& cfg) {
  const std::string out_dir = require_key(cfg, "output_dir").get<std::string>();
  gmclust::ScenarioSpec spec;
  spec.q = get_or(cfg, "q", 20);
  spec.n_per_cluster = get_or(cfg, "n_per_cluster", std::vector<long>{200, 200});
  spec.truth_edges = get_or(cfg, "truth_edges", 20);
  spec.m_moves = get_or(cfg, "m_moves", 10);
  spec.edge_weight = get_or(cfg, "edge_weight", 0.4);
  spec.seed = get_or(cfg, "seed", std::uint64_t{1});
  spec.allow_nonchordal = get_or(cfg, "allow_nonchordal", false);
  if (cfg.contains("thresholds")) {
    spec.thresholds = cfg.at("thresholds").get<std::vector<double>>();
  } else {
    const std::string mode = get_or<std::string>(cfg, "threshold_mode", "uniform");
    const auto master = get_or(cfg, "master_seed", spec.seed);
    if (mode == "uniform")
      spec.thresholds = gmclust::default_thresholds(spec.q, master);
    else if (mode == "half")
      spec.thresholds.assign(spec.q, 0.5);
    else
      throw gmclust::config_error("threshold_mode must be 'uniform' or 'half'");
  }

  const auto [data, truth] = gmclust::generate_scenario(spec);
  ensure_dir(out_dir);
  write_dataset_csv(out_dir + "/dataset.csv", data);
  write_labels_csv(out_dir + "/truth.csv", truth.labels);
  json graphs = json::array();
  for (const auto& g : truth.graphs) graphs.push_back(graph_to_json(g));
  json meta{{"graphs", graphs},
            {"thresholds", spec.thresholds},
            {"edge_weight", spec.edge_weight},
            {"seed", spec.seed}};
  std::ofstream gout(out_dir + "/graphs.json");
  gout << meta.dump(2) << '\n';
  if (!gout) throw gmclust::data_error("cannot write file: " + out_dir + "/graphs.json");
  std::cerr << "[gmclust] wrote dataset.csv, truth.csv, graphs.json to " << out_dir << "\n";
  return 0;
}

gmclust::SamplerConfig sampler_config_from(const json& cfg) {
  gmclust::SamplerConfig sc;
  sc.iterations = get_or(cfg, "iterations", 5000L);
  sc.burn_in = get_or(cfg, "burn_in", 1000L);
  sc.thin = get_or(cfg, "thin", 1L);
  sc.seed = get_or(cfg, "seed", std::uint64_t{1});
  sc.aux_components = get_or(cfg, "aux_components", 1);
  sc.baseline_mode = get_or(cfg, "baseline_mode", false);
  sc.progress_interval = progress_from_env(get_or(cfg, "progress_interval", 0L));
  sc.hyper_dirichlet.a = get_or(cfg, "a", 1.0);
  sc.graph_prior.a_g = get_or(cfg, "a_g", 1.0);
  sc.graph_prior.b_g = get_or(cfg, "b_g", 1.0);
  sc.concentration.c = get_or(cfg, "c", 3.0);
  sc.concentration.d = get_or(cfg, "d", 1.0);
  sc.validate();
  return sc;
}

int cmd_fit(const json& cfg) {
  const std::string input = require_key(cfg, "input").get<std::string>();
  const std::string out_dir = require_key(cfg, "output_dir").get<std::string>();
  std::optional<std::string> missing;
  if (cfg.contains("missing_token") && !cfg.at("missing_token").is_null())
    missing = cfg.at("missing_token").get<std::string>();
  const int chains = get_or(cfg, "chains", 1);
  if (chains < 1) throw gmclust::config_error("chains must be >= 1");

  const gmclust::CategoricalDataset data = gmclust::load_csv(input, missing);
  gmclust::SamplerConfig base = sampler_config_from(cfg);
  ensure_dir(out_dir);

  json chain_meta = json::array();
  for (int c = 0; c < chains; ++c) {
    gmclust::SamplerConfig sc = base;
    sc.seed = base.seed + static_cast<std::uint64_t>(c);
    const auto t0 = std::chrono::steady_clock::now();
    const gmclust::Trace trace = gmclust::run_sampler(data, sc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string path = out_dir + "/trace_" + std::to_string(c + 1) + ".jsonl";
    gmclust::write_trace_jsonl(path, trace);
    chain_meta.push_back({{"file", path},
                          {"seed", sc.seed},
                          {"draws", trace.draws.size()},
                          {"graph_acceptance_rate", trace.graph_acceptance_rate()},
                          {"wall_seconds", secs}});
    std::cerr << "[gmclust] chain " << (c + 1) << "/" << chains << " done in " << secs << "s, "
              << trace.draws.size() << " draws\n";
  }

  json meta{{"config", cfg}, {"n", data.n()}, {"q", data.q()}, {"chains", chain_meta}};
  std::ofstream mout(out_dir + "/fit_meta.json");
  mout << meta.dump(2) << '\n';
  if (!mout) throw gmclust::data_error("cannot write file: " + out_dir + "/fit_meta.json");
  return 0;
}

std::vector<std::string> read_label_lines(const std::string& path, long n) {
  std::ifstream in(path);
  if (!in) throw gmclust::data_error("cannot open labels file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (static_cast<long>(lines.size()) == n + 1) lines.erase(lines.begin());  // header row
  if (static_cast<long>(lines.size()) != n)
    throw gmclust::data_error("labels file has " + std::to_string(lines.size()) +
                              " entries, expected " + std::to_string(n));
  return lines;
}

int cmd_summarize(const std::vector<std::string>& trace_paths, const std::string& out_dir,
                  const std::vector<long>& subjects, bool heatmap,
                  const std::string& labels_path, const std::string& data_path,
                  const std::string& missing_token) {
  std::vector<gmclust::Trace> traces;
  for (const auto& p : trace_paths) traces.push_back(gmclust::read_trace_jsonl(p));
  const gmclust::Trace merged = gmclust::merge_traces(traces);
  if (merged.draws.empty()) throw gmclust::data_error("merged trace has no draws");

  ensure_dir(out_dir);
  const auto sim = gmclust::similarity_matrix(merged);
  const gmclust::Partition point = gmclust::minvi_point_estimate(merged, sim);
  gmclust::write_similarity_csv(out_dir + "/similarity.csv", sim);
  gmclust::write_partition_csv(out_dir + "/partition.csv", point);

  {
    std::ofstream out(out_dir + "/alpha_posterior.csv");
    if (!out) throw gmclust::data_error("cannot write file: " + out_dir + "/alpha_posterior.csv");
    for (const auto& d : merged.draws) out << gmclust::format_double(d.alpha) << '\n';
  }

  for (long s : subjects) {
    const auto p = gmclust::ppi(merged, s);
    gmclust::write_ppi_csv(out_dir + "/ppi_" + std::to_string(s) + ".csv", p);
  }

  if (heatmap)
    gmclust::write_similarity_pgm(out_dir + "/similarity.pgm", sim, gmclust::heatmap_order(point));

  if (!labels_path.empty()) {
    if (data_path.empty())
      throw gmclust::config_error("--labels requires --data to recover the level labels");
    std::optional<std::string> missing;
    if (!missing_token.empty()) missing = missing_token;
    const auto data = gmclust::load_csv(data_path, missing);
    if (data.n() != merged.n)
      throw gmclust::data_error("dataset row count disagrees with the traces");
    const auto groups = read_label_lines(labels_path, merged.n);
    const auto rows = gmclust::group_support_table(data, groups, point);
    gmclust::write_group_support_csv(out_dir + "/group_support.csv", rows);
  }

  std::cerr << "[gmclust] summarized " << merged.draws.size() << " draws into " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet Process mixture of decomposable graphical models for "
               "clustering categorical data"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic two-group dataset");
  sim_cmd->add_option("--config", config_path, "JSON config file")->required();
  sim_cmd->add_option("--set", overrides, "override a config key (key=value)");

  auto* fit_cmd = app.add_subcommand("fit", "run the Gibbs sampler on a CSV dataset");
  fit_cmd->add_option("--config", config_path, "JSON config file")->required();
  fit_cmd->add_option("--set", overrides, "override a config key (key=value)");

  std::vector<std::string> trace_paths;
  std::string out_dir = "summary";
  std::vector<long> subjects;
  bool heatmap = false;
  std::string labels_path, data_path, missing_token;
  auto* sum_cmd = app.add_subcommand("summarize", "compute posterior summaries from traces");
  sum_cmd->add_option("traces", trace_paths, "trace files (JSON lines)")->required();
  sum_cmd->add_option("--output-dir", out_dir, "output directory");
  sum_cmd->add_option("--subjects", subjects, "subject indices for PPI matrices");
  sum_cmd->add_flag("--heatmap", heatmap, "write a reordered similarity heatmap (PGM)");
  sum_cmd->add_option("--labels", labels_path, "known group labels, one per row");
  sum_cmd->add_option("--data", data_path, "dataset CSV (needed with --labels)");
  sum_cmd->add_option("--missing-token", missing_token, "missing-value token of the dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(load_config(config_path, overrides));
    if (fit_cmd->parsed()) return cmd_fit(load_config(config_path, overrides));
    return cmd_summarize(trace_paths, out_dir, subjects, heatmap, labels_path, data_path,
                         missing_token);
  } catch (const gmclust::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gmclust::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::out_of_range& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
