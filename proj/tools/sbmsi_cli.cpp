// Command-line front end: one subcommand per experiment kind plus graph
// generation, a config-file runner and the brute-force oracle.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "sbmsi/error.hpp"
#include "sbmsi/experiment.hpp"
#include "sbmsi/graph_io.hpp"
#include "sbmsi/oracle.hpp"
#include "sbmsi/seed.hpp"

namespace {

using sbmsi::ExperimentKind;
using sbmsi::ExperimentSpec;

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out = "out";
};

struct ModelFlags {
  std::int64_t n = 0;
  double a = 15.0;
  double b = 5.0;
  double alpha = 0.2;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m, bool with_n) {
  if (with_n) cmd->add_option("--n", m.n, "vertex count")->capture_default_str();
  cmd->add_option("--a", m.a, "in-class rate")->capture_default_str();
  cmd->add_option("--b", m.b, "cross-class rate")->capture_default_str();
  cmd->add_option("--alpha", m.alpha, "label noise")->capture_default_str();
}

sbmsi::ModelParams checked_model(const ModelFlags& m) {
  const auto p = sbmsi::validate_params(m.n, m.a, m.b, m.alpha);
  const double ratio = std::max(p.a / p.b, p.b / p.a);
  if (ratio > 100.0) std::cerr << "warning: a/b ratio " << ratio << " is far from the balanced regime\n";
  if (p.n > 0 && p.a > std::pow(static_cast<double>(p.n), 0.25)) {
    std::cerr << "warning: a = " << p.a << " exceeds n^(1/4); asymptotic statements may not apply\n";
  }
  return p;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw sbmsi::Error(sbmsi::Errc::InvalidConfig, "bad number '" + item + "' in list");
    out.push_back(x);
  }
  return out;
}

ExperimentSpec base_spec(ExperimentKind kind, const Globals& g) {
  ExperimentSpec s;
  s.kind = kind;
  s.master_seed = g.seed;
  s.workers = g.workers;
  s.out_dir = g.out;
  return s;
}

void report(const sbmsi::Manifest& m) {
  for (const auto& a : m.artifacts) std::cout << a.name << " " << a.sha1 << "\n";
  std::cout << "summary " << m.summary.string() << "\n";
  std::cout << "content_hash " << m.content_hash << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw sbmsi::Error(sbmsi::Errc::Io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief propagation, tree recursions and density evolution for the block model with side information"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  ModelFlags model;
  model.n = 10000;
  unsigned t = 3;
  std::size_t replicas = 10000;
  std::size_t graphs = 1;
  std::string mode = "both";
  std::string engine = "auto";
  std::string graph_dir;
  sbmsi::DeConfig de;
  sbmsi::SweepGrid sweep;
  std::string alphas_text = "0.05,0.1,0.2,0.3,0.45";
  std::string config_path;
  unsigned vertex = 0;

  auto* generate = app.add_subcommand("generate", "sample a labeled graph and store it in --out");
  add_model_flags(generate, model, true);

  auto* bp_run = app.add_subcommand("bp-run", "run local belief propagation on a stored or fresh graph");
  add_model_flags(bp_run, model, true);
  bp_run->add_option("--graph", graph_dir, "directory written by 'generate'");
  bp_run->add_option("--t", t, "BP depth (t-1 message rounds)")->capture_default_str();

  auto* tree_sim = app.add_subcommand("tree-sim", "Monte Carlo estimates of optimal tree accuracies");
  add_model_flags(tree_sim, model, false);
  tree_sim->add_option("--t", t, "tree depth")->capture_default_str();
  tree_sim->add_option("--replicas", replicas)->capture_default_str();
  tree_sim->add_option("--mode", mode, "exact, noisy or both")->capture_default_str();
  tree_sim->add_option("--engine", engine, "auto, explicit or pooled")->capture_default_str();

  auto* de_solve = app.add_subcommand("de-solve", "fixed points of density evolution");
  de_solve->add_option("--mu", de.mu)->required();
  de_solve->add_option("--alpha", de.alpha)->required();
  de_solve->add_option("--quad", de.quad_points)->capture_default_str();
  de_solve->add_option("--tol", de.tol)->capture_default_str();
  de_solve->add_option("--max-iter", de.max_iter)->capture_default_str();

  auto* de_sweep = app.add_subcommand("de-sweep", "error and h' curves over a mu grid");
  de_sweep->add_option("--mu-min", sweep.mu_min)->capture_default_str();
  de_sweep->add_option("--mu-max", sweep.mu_max)->capture_default_str();
  de_sweep->add_option("--mu-steps", sweep.mu_steps)->capture_default_str();
  de_sweep->add_option("--alphas", alphas_text, "comma-separated list")->capture_default_str();
  de_sweep->add_option("--quad", de.quad_points)->capture_default_str();

  auto* gap = app.add_subcommand("boundary-gap", "boundary sensitivity e(1..t)");
  add_model_flags(gap, model, false);
  gap->add_option("--t", t)->capture_default_str();
  gap->add_option("--replicas", replicas)->capture_default_str();

  auto* compare = app.add_subcommand("compare", "graph BP vs tree optimum vs density evolution");
  add_model_flags(compare, model, true);
  compare->add_option("--t", t)->capture_default_str();
  compare->add_option("--replicas", replicas, "tree replicas")->capture_default_str();
  compare->add_option("--graphs", graphs, "sampled graphs")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "exact posterior of one vertex on a small stored graph");
  oracle->add_option("--graph", graph_dir)->required();
  oracle->add_option("--vertex", vertex)->required();

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      const auto p = checked_model(model);
      sbmsi::StoredGraph stored;
      const std::uint64_t seed = sbmsi::derive_seed(g.seed, sbmsi::stream_id(sbmsi::StreamPurpose::Graph, 0));
      stored.header = {p.n, p.a, p.b, p.alpha, seed};
      stored.graph = sbmsi::sample_sbm(p, seed);
      sbmsi::write_graph(g.out, stored);
      std::cout << "wrote " << stored.graph.n() << " vertices, " << stored.graph.edge_count() << " edges to " << g.out
                << "\n";
    } else if (bp_run->parsed()) {
      auto s = base_spec(ExperimentKind::GraphBp, g);
      s.t = t;
      if (!graph_dir.empty()) {
        s.graph_path = graph_dir;
      } else {
        s.model = checked_model(model);
      }
      report(sbmsi::run_experiment(s));
    } else if (tree_sim->parsed()) {
      auto s = base_spec(ExperimentKind::TreeSim, g);
      model.n = 0;
      s.model = checked_model(model);
      s.t = t;
      s.replicas = replicas;
      s.metrics = sbmsi::parse_metric_mode(mode);
      s.engine = sbmsi::parse_engine(engine);
      report(sbmsi::run_experiment(s));
    } else if (de_solve->parsed()) {
      auto s = base_spec(ExperimentKind::DeSolve, g);
      s.de = de;
      sbmsi::run_experiment(s);
      std::cout << read_file((s.out_dir / "de_result.json").string());
    } else if (de_sweep->parsed()) {
      auto s = base_spec(ExperimentKind::DeSweep, g);
      s.de = de;
      sweep.alphas = parse_list(alphas_text);
      s.sweep = sweep;
      report(sbmsi::run_experiment(s));
    } else if (gap->parsed()) {
      auto s = base_spec(ExperimentKind::BoundaryGap, g);
      model.n = 0;
      s.model = checked_model(model);
      s.t = t;
      s.replicas = replicas;
      report(sbmsi::run_experiment(s));
    } else if (compare->parsed()) {
      auto s = base_spec(ExperimentKind::Compare, g);
      s.model = checked_model(model);
      s.t = t;
      s.replicas = replicas;
      s.graphs = graphs;
      report(sbmsi::run_experiment(s));
    } else if (oracle->parsed()) {
      const auto stored = sbmsi::read_graph(graph_dir);
      const auto p = sbmsi::validate_params(stored.header.n, stored.header.a, stored.header.b, stored.header.alpha);
      const auto r = sbmsi::exact_graph_posterior(stored.graph, p, vertex);
      nlohmann::ordered_json j;
      j["vertex"] = vertex;
      j["p_plus"] = r.p_plus;
      j["log_partition"] = r.log_partition;
      j["enumerated_states"] = r.enumerated_states;
      std::cout << j.dump(2) << "\n";
    } else if (run->parsed()) {
      auto s = sbmsi::spec_from_json(read_file(config_path));
      report(sbmsi::run_experiment(s));
    }
  } catch (const sbmsi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_validation() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
