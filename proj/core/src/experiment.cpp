#include "sbmsi/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "sbmsi/bp.hpp"
#include "sbmsi/error.hpp"
#include "sbmsi/graph_io.hpp"
#include "sbmsi/parallel.hpp"
#include "sbmsi/seed.hpp"
#include "sbmsi/stats.hpp"

namespace sbmsi {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::GraphBp, "graph-bp"},       {ExperimentKind::TreeSim, "tree-sim"},
    {ExperimentKind::DeSolve, "de-solve"},       {ExperimentKind::DeSweep, "de-sweep"},
    {ExperimentKind::BoundaryGap, "boundary-gap"}, {ExperimentKind::Compare, "compare"},
};

std::string_view metric_mode_name(MetricMode m) {
  switch (m) {
    case MetricMode::Exact: return "exact";
    case MetricMode::Noisy: return "noisy";
    case MetricMode::Both: return "both";
  }
  return "both";
}

std::string_view engine_name(TreeEngine e) {
  switch (e) {
    case TreeEngine::Auto: return "auto";
    case TreeEngine::Explicit: return "explicit";
    case TreeEngine::Pooled: return "pooled";
  }
  return "auto";
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!obj.is_object()) throw Error(Errc::InvalidConfig, std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (auto name : allowed) ok = ok || item.key() == name;
    if (!ok) throw Error(Errc::InvalidConfig, "unknown key '" + item.key() + "' in " + std::string(where));
  }
}

template <class T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

class Csv {
 public:
  explicit Csv(std::string_view header) {
    out_.append(header);
    out_.push_back('\n');
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((append_cell(cells, first)), ...);
    out_.push_back('\n');
  }
  const std::string& str() const { return out_; }

 private:
  void sep(bool& first) {
    if (!first) out_.push_back(',');
    first = false;
  }
  void append_cell(double x, bool& first) {
    sep(first);
    out_ += format_double(x);
  }
  void append_cell(std::string_view s, bool& first) {
    sep(first);
    out_.append(s);
  }
  void append_cell(const char* s, bool& first) { append_cell(std::string_view(s), first); }
  template <class I>
    requires std::is_integral_v<I>
  void append_cell(I v, bool& first) {
    sep(first);
    out_ += std::to_string(v);
  }

  std::string out_;
};

class Emitter {
 public:
  explicit Emitter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void emit(const std::string& name, const std::string& bytes) {
    write_text_file(dir_ / name, bytes);
    manifest_.artifacts.push_back({name, git_blob_sha1(bytes)});
  }

  Manifest finish(const ExperimentSpec& spec, ordered_json results, double wall_ms) {
    std::string joined;
    for (const auto& a : manifest_.artifacts) joined += a.name + " " + a.sha1 + "\n";
    manifest_.content_hash = git_blob_sha1(joined);
    manifest_.wall_time_ms = wall_ms;

    ordered_json summary;
    summary["spec"] = ordered_json::parse(spec_to_json(spec));
    summary["results"] = std::move(results);
    ordered_json arts = ordered_json::array();
    for (const auto& a : manifest_.artifacts) arts.push_back({{"path", a.name}, {"sha1", a.sha1}});
    summary["artifacts"] = std::move(arts);
    summary["content_hash"] = manifest_.content_hash;
    summary["wall_time_ms"] = wall_ms;
    manifest_.summary = dir_ / "summary.json";
    write_text_file(manifest_.summary, summary.dump(2) + "\n");
    return manifest_;
  }

 private:
  std::filesystem::path dir_;
  Manifest manifest_;
};

std::uint64_t graph_seed(std::uint64_t master, std::size_t g) {
  return derive_seed(master, stream_id(StreamPurpose::Graph, g));
}

std::uint64_t tree_master(std::uint64_t master) { return derive_seed(master, stream_id(StreamPurpose::Tree, 0)); }

TreeSimOptions tree_options(const ExperimentSpec& spec) {
  TreeSimOptions o;
  o.workers = spec.workers;
  o.engine = spec.engine;
  o.pool_size = spec.pool_size;
  return o;
}

[[noreturn]] void rethrow_indexed(const Error& e, std::string_view what, std::size_t index) {
  throw Error(e.code(), std::string(what) + " " + std::to_string(index) + ": " + e.what());
}

ordered_json run_graph_bp(const ExperimentSpec& spec, Emitter& em) {
  StoredGraph stored;
  if (spec.graph_path) {
    stored = read_graph(*spec.graph_path);
  } else {
    const std::uint64_t seed = graph_seed(spec.master_seed, 0);
    stored.header = {spec.model.n, spec.model.a, spec.model.b, spec.model.alpha, seed};
    stored.graph = sample_sbm(spec.model, seed);
  }
  const ModelParams params = spec.graph_path
                                 ? validate_params(stored.header.n, stored.header.a, stored.header.b, stored.header.alpha)
                                 : spec.model;
  const Derived dc = derived_constants(params);
  const BpRun run = run_bp(stored.graph, dc, spec.t, spec.workers);
  const LabeledGraph& g = stored.graph;

  Csv csv("vertex,sigma,sigma_tilde,belief,label");
  for (std::size_t i = 0; i < g.n(); ++i) {
    csv.row(i, int{g.sigma()[i]}, int{g.sigma_tilde()[i]}, run.beliefs[i], int{run.labels[i]});
  }
  em.emit("bp.csv", csv.str());

  double total_ms = 0.0;
  for (double ms : run.iteration_ms) total_ms += ms;
  ordered_json r;
  r["accuracy"] = empirical_accuracy(run.labels, g.sigma());
  r["iterations"] = spec.t;
  r["wall_time_ms"] = total_ms;
  r["iteration_ms"] = run.iteration_ms;
  return r;
}

ordered_json run_tree_sim(const ExperimentSpec& spec, Emitter& em) {
  const TreeMetrics m = estimate_tree_metrics(spec.model, spec.t, spec.replicas, tree_master(spec.master_seed),
                                              tree_options(spec));
  Csv csv("metric,t,estimate,std_error,replicas");
  ordered_json r;
  auto add = [&](const char* name, const Estimate& e) {
    csv.row(name, spec.t, e.value, e.std_error, m.replicas);
    r[name] = {{"estimate", e.value}, {"std_error", e.std_error}};
  };
  if (spec.metrics != MetricMode::Noisy) add("p_star", m.p_star);
  if (spec.metrics != MetricMode::Exact) add("q_star", m.q_star);
  if (spec.metrics == MetricMode::Both) add("gap", m.gap);
  em.emit("tree_metrics.csv", csv.str());
  return r;
}

ordered_json de_result_json(const DeConfig& cfg, const DeResult& d) {
  ordered_json r;
  r["mu"] = cfg.mu;
  r["alpha"] = cfg.alpha;
  r["v_low"] = d.v_low;
  r["v_high"] = d.v_high;
  r["acc_low"] = d.acc_low;
  r["acc_high"] = d.acc_high;
  r["converged_low"] = d.converged_low;
  r["converged_high"] = d.converged_high;
  r["unique"] = d.unique;
  r["iterations_low"] = d.trajectory_low.size() - 1;
  r["iterations_high"] = d.trajectory_high.size() - 1;
  return r;
}

ordered_json run_de_solve(const ExperimentSpec& spec, Emitter& em) {
  const DeResult d = solve_de(spec.de);
  Csv csv("direction,k,v");
  for (std::size_t k = 0; k < d.trajectory_low.size(); ++k) csv.row("low", k, d.trajectory_low[k]);
  for (std::size_t k = 0; k < d.trajectory_high.size(); ++k) csv.row("high", k + 1, d.trajectory_high[k]);
  em.emit("de_trajectory.csv", csv.str());
  ordered_json r = de_result_json(spec.de, d);
  em.emit("de_result.json", r.dump(2) + "\n");
  return r;
}

ordered_json run_de_sweep(const ExperimentSpec& spec, Emitter& em) {
  const auto mus = spec.sweep.mu_grid();
  const SweepResult s = sweep_curves(mus, spec.sweep.alphas, spec.de, spec.workers, spec.sweep.hprime_steps);
  Csv curves("mu,alpha,error,v_low,v_high,error_high,converged");
  std::size_t unconverged = 0;
  for (const auto& row : s.rows) {
    curves.row(row.mu, row.alpha, row.err_low, row.v_low, row.v_high, row.err_high, int{row.converged});
    unconverged += row.converged ? 0 : 1;
  }
  em.emit("de_sweep.csv", curves.str());
  Csv hp("v,alpha,hprime");
  for (const auto& row : s.hprime) hp.row(row.v, row.alpha, row.hprime);
  em.emit("de_hprime.csv", hp.str());
  ordered_json r;
  r["rows"] = s.rows.size();
  r["unconverged_rows"] = unconverged;
  return r;
}

ordered_json run_boundary_gap(const ExperimentSpec& spec, Emitter& em) {
  const BoundaryGapResult g = boundary_gap(spec.model, spec.t, spec.replicas, tree_master(spec.master_seed),
                                           tree_options(spec));
  Csv csv("t,e,std_error,ratio,ratio_std_error,replicas");
  for (std::size_t k = 0; k < g.gap.size(); ++k) {
    const bool has_ratio = k < g.ratio.size();
    const double ratio = has_ratio ? g.ratio[k].value : std::nan("");
    const double ratio_se = has_ratio ? g.ratio[k].std_error : std::nan("");
    csv.row(k + 1, g.gap[k].value, g.gap[k].std_error, ratio, ratio_se, g.replicas);
  }
  em.emit("boundary_gap.csv", csv.str());
  const Derived dc = derived_constants(spec.model);
  ordered_json r;
  r["e1_reference"] = 2.0 * dc.beta * dc.d;
  r["contraction_reference"] = std::abs(dc.theta) * dc.d;
  return r;
}

ordered_json run_compare(const ExperimentSpec& spec, Emitter& em) {
  const Derived dc = derived_constants(spec.model);

  std::vector<double> accuracy(spec.graphs);
  for (std::size_t g = 0; g < spec.graphs; ++g) {
    try {
      const LabeledGraph graph = sample_sbm(spec.model, graph_seed(spec.master_seed, g));
      const BpRun run = run_bp(graph, dc, spec.t, spec.workers);
      accuracy[g] = empirical_accuracy(run.labels, graph.sigma());
    } catch (const Error& e) {
      rethrow_indexed(e, "graph", g);
    }
  }
  const Estimate bp = mean_estimate(accuracy);
  const TreeMetrics tm = estimate_tree_metrics(spec.model, spec.t, spec.replicas, tree_master(spec.master_seed),
                                               tree_options(spec));
  DeConfig de = spec.de;
  de.mu = dc.mu_hat;
  de.alpha = spec.model.alpha;
  const GammaMoments gm = predict_gamma_moments(de, spec.t);
  const double de_acc = de_accuracy(gm.variance, spec.model.alpha);

  Csv csv("source,accuracy,std_error");
  csv.row("graph_bp", bp.value, bp.std_error);
  csv.row("tree_q_star", tm.q_star.value, tm.q_star.std_error);
  csv.row("tree_p_star", tm.p_star.value, tm.p_star.std_error);
  csv.row("de_prediction", de_acc, 0.0);
  em.emit("compare.csv", csv.str());

  Csv per_graph("graph,seed,accuracy");
  for (std::size_t g = 0; g < spec.graphs; ++g) {
    per_graph.row(g, graph_seed(spec.master_seed, g), accuracy[g]);
  }
  em.emit("compare_graphs.csv", per_graph.str());

  ordered_json r;
  r["graph_bp"] = bp.value;
  r["tree_q_star"] = tm.q_star.value;
  r["tree_p_star"] = tm.p_star.value;
  r["de_prediction"] = de_acc;
  r["de_v_t"] = gm.variance;
  return r;
}

bool uses_model(ExperimentKind k) {
  return k == ExperimentKind::GraphBp || k == ExperimentKind::TreeSim || k == ExperimentKind::BoundaryGap ||
         k == ExperimentKind::Compare;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error(Errc::InvalidConfig, "unknown experiment kind '" + std::string(name) + "'");
}

MetricMode parse_metric_mode(std::string_view s) {
  if (s == "exact") return MetricMode::Exact;
  if (s == "noisy") return MetricMode::Noisy;
  if (s == "both") return MetricMode::Both;
  throw Error(Errc::InvalidConfig, "unknown metric mode '" + std::string(s) + "'");
}

TreeEngine parse_engine(std::string_view s) {
  if (s == "auto") return TreeEngine::Auto;
  if (s == "explicit") return TreeEngine::Explicit;
  if (s == "pooled") return TreeEngine::Pooled;
  throw Error(Errc::InvalidConfig, "unknown tree engine '" + std::string(s) + "'");
}

std::vector<double> SweepGrid::mu_grid() const {
  std::vector<double> out;
  if (mu_steps == 0) return out;
  if (mu_steps == 1) return {mu_min};
  out.reserve(mu_steps);
  for (unsigned k = 0; k < mu_steps; ++k) {
    out.push_back(mu_min + (mu_max - mu_min) * static_cast<double>(k) / static_cast<double>(mu_steps - 1));
  }
  return out;
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.replicas < 1) throw Error(Errc::InvalidConfig, "replicas must be >= 1");
  if (spec.graphs < 1) throw Error(Errc::InvalidConfig, "graphs must be >= 1");
  if (uses_model(spec.kind) && !(spec.kind == ExperimentKind::GraphBp && spec.graph_path)) {
    validate_params(spec.model.n, spec.model.a, spec.model.b, spec.model.alpha);
  }
  switch (spec.kind) {
    case ExperimentKind::GraphBp:
    case ExperimentKind::Compare:
      if (spec.t < 1) throw Error(Errc::InvalidConfig, "belief propagation needs t >= 1");
      if (spec.kind == ExperimentKind::Compare) {
        DeConfig de = spec.de;
        de.alpha = spec.model.alpha;
        de.mu = 0.0;
        validate_de_config(de);
      }
      break;
    case ExperimentKind::BoundaryGap:
      if (spec.t < 1) throw Error(Errc::InvalidConfig, "boundary gap needs t >= 1");
      break;
    case ExperimentKind::TreeSim:
      break;
    case ExperimentKind::DeSolve:
      validate_de_config(spec.de);
      break;
    case ExperimentKind::DeSweep: {
      if (spec.sweep.mu_steps < 1) throw Error(Errc::InvalidConfig, "mu_steps must be >= 1");
      if (spec.sweep.alphas.empty()) throw Error(Errc::InvalidConfig, "alphas must be nonempty");
      DeConfig de = spec.de;
      for (double a : spec.sweep.alphas) {
        de.alpha = a;
        validate_de_config(de);
      }
      break;
    }
  }
}

ExperimentSpec spec_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"schema", "kind", "model", "de", "sweep", "t", "replicas", "graphs", "seed", "workers", "out",
                  "metrics", "engine", "pool_size", "graph"},
                 "config");
  int schema = 0;
  read_field(j, "schema", schema);
  if (schema != kConfigSchema) {
    throw Error(Errc::InvalidConfig, "config schema must be " + std::to_string(kConfigSchema));
  }
  if (!j.contains("kind")) throw Error(Errc::InvalidConfig, "config needs a 'kind'");

  ExperimentSpec s;
  std::string text_field;
  read_field(j, "kind", text_field);
  s.kind = parse_kind(text_field);
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, {"n", "a", "b", "alpha"}, "model");
    read_field(m, "n", s.model.n);
    read_field(m, "a", s.model.a);
    read_field(m, "b", s.model.b);
    read_field(m, "alpha", s.model.alpha);
  }
  if (j.contains("de")) {
    const auto& d = j.at("de");
    reject_unknown(d, {"mu", "alpha", "quad_points", "tol", "max_iter"}, "de");
    read_field(d, "mu", s.de.mu);
    read_field(d, "alpha", s.de.alpha);
    read_field(d, "quad_points", s.de.quad_points);
    read_field(d, "tol", s.de.tol);
    read_field(d, "max_iter", s.de.max_iter);
  }
  if (j.contains("sweep")) {
    const auto& w = j.at("sweep");
    reject_unknown(w, {"mu_min", "mu_max", "mu_steps", "alphas", "hprime_steps"}, "sweep");
    read_field(w, "mu_min", s.sweep.mu_min);
    read_field(w, "mu_max", s.sweep.mu_max);
    read_field(w, "mu_steps", s.sweep.mu_steps);
    read_field(w, "alphas", s.sweep.alphas);
    read_field(w, "hprime_steps", s.sweep.hprime_steps);
  }
  read_field(j, "t", s.t);
  read_field(j, "replicas", s.replicas);
  read_field(j, "graphs", s.graphs);
  read_field(j, "seed", s.master_seed);
  read_field(j, "workers", s.workers);
  std::string out;
  read_field(j, "out", out);
  if (!out.empty()) s.out_dir = out;
  if (j.contains("metrics")) {
    read_field(j, "metrics", text_field);
    s.metrics = parse_metric_mode(text_field);
  }
  if (j.contains("engine")) {
    read_field(j, "engine", text_field);
    s.engine = parse_engine(text_field);
  }
  read_field(j, "pool_size", s.pool_size);
  if (j.contains("graph")) {
    std::string path;
    read_field(j, "graph", path);
    s.graph_path = path;
  }
  validate_spec(s);
  return s;
}

std::string spec_to_json(const ExperimentSpec& s) {
  ordered_json j;
  j["schema"] = kConfigSchema;
  j["kind"] = to_string(s.kind);
  if (uses_model(s.kind) && !s.graph_path) {
    j["model"] = {{"n", s.model.n}, {"a", s.model.a}, {"b", s.model.b}, {"alpha", s.model.alpha}};
  }
  j["de"] = {{"mu", s.de.mu},
             {"alpha", s.de.alpha},
             {"quad_points", s.de.quad_points},
             {"tol", s.de.tol},
             {"max_iter", s.de.max_iter}};
  if (s.kind == ExperimentKind::DeSweep) {
    j["sweep"] = {{"mu_min", s.sweep.mu_min},
                  {"mu_max", s.sweep.mu_max},
                  {"mu_steps", s.sweep.mu_steps},
                  {"alphas", s.sweep.alphas},
                  {"hprime_steps", s.sweep.hprime_steps}};
  }
  j["t"] = s.t;
  j["replicas"] = s.replicas;
  j["graphs"] = s.graphs;
  j["seed"] = s.master_seed;
  j["workers"] = s.workers;
  j["out"] = s.out_dir.string();
  j["metrics"] = metric_mode_name(s.metrics);
  j["engine"] = engine_name(s.engine);
  j["pool_size"] = s.pool_size;
  if (s.graph_path) j["graph"] = s.graph_path->string();
  return j.dump(2);
}

Manifest run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + spec.out_dir.string() + ": " + ec.message());

  Emitter em(spec.out_dir);
  ordered_json results;
  switch (spec.kind) {
    case ExperimentKind::GraphBp: results = run_graph_bp(spec, em); break;
    case ExperimentKind::TreeSim: results = run_tree_sim(spec, em); break;
    case ExperimentKind::DeSolve: results = run_de_solve(spec, em); break;
    case ExperimentKind::DeSweep: results = run_de_sweep(spec, em); break;
    case ExperimentKind::BoundaryGap: results = run_boundary_gap(spec, em); break;
    case ExperimentKind::Compare: results = run_compare(spec, em); break;
  }
  const auto stop = std::chrono::steady_clock::now();
  return em.finish(spec, std::move(results), std::chrono::duration<double, std::milli>(stop - start).count());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string git_blob_sha1(std::string_view bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error(Errc::Internal, "cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(Errc::Internal, "SHA-1 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::Io, "write to " + path.string() + " failed");
}

}  // namespace sbmsi
