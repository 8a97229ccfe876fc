#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbmsi/de.hpp"
#include "sbmsi/model.hpp"
#include "sbmsi/treesim.hpp"

namespace sbmsi {

enum class ExperimentKind { GraphBp, TreeSim, DeSolve, DeSweep, BoundaryGap, Compare };

std::string_view to_string(ExperimentKind kind) noexcept;
/// Accepts graph-bp, tree-sim, de-solve, de-sweep, boundary-gap, compare.
ExperimentKind parse_kind(std::string_view name);

/// Which tree metrics a TreeSim experiment reports.
enum class MetricMode { Exact, Noisy, Both };

/// "exact", "noisy", "both"; throws InvalidConfig.
MetricMode parse_metric_mode(std::string_view name);
/// "auto", "explicit", "pooled"; throws InvalidConfig.
TreeEngine parse_engine(std::string_view name);

struct SweepGrid {
  double mu_min = 0.0;
  double mu_max = 6.0;
  unsigned mu_steps = 25;  ///< number of grid points, endpoints included
  std::vector<double> alphas{0.05, 0.1, 0.2, 0.3, 0.45};
  unsigned hprime_steps = 100;

  std::vector<double> mu_grid() const;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Compare;
  ModelParams model;
  DeConfig de;
  SweepGrid sweep;
  unsigned t = 1;
  std::size_t replicas = 1;
  std::size_t graphs = 1;  ///< Compare: number of sampled graphs
  std::uint64_t master_seed = 0;
  unsigned workers = 1;    ///< 0 = all hardware threads
  std::filesystem::path out_dir = ".";
  MetricMode metrics = MetricMode::Both;
  TreeEngine engine = TreeEngine::Auto;
  std::size_t pool_size = 0;
  /// GraphBp: read this stored graph instead of sampling one.
  std::optional<std::filesystem::path> graph_path;
};

inline constexpr int kConfigSchema = 1;

/// Checks the fields relevant to spec.kind. Throws sbmsi::Error.
void validate_spec(const ExperimentSpec& spec);

/// JSON config with a "schema" field equal to 1. Unknown keys are rejected
/// with InvalidConfig.
ExperimentSpec spec_from_json(std::string_view text);
std::string spec_to_json(const ExperimentSpec& spec);

struct Artifact {
  std::string name;  ///< file name inside out_dir
  std::string sha1;  ///< git blob hash of the file contents
};

struct Manifest {
  std::vector<Artifact> artifacts;  ///< data files, in emission order
  std::filesystem::path summary;    ///< summary.json
  std::string content_hash;         ///< hash over all artifact hashes
  double wall_time_ms = 0.0;
};

/// Runs the pipeline named by spec.kind and writes CSV/JSON artifacts plus
/// summary.json into spec.out_dir (created if needed). Data artifacts depend
/// only on the ExperimentSpec and its master seed, not on the worker count. Module errors
/// are rethrown with the failing replica or graph index in the message.
Manifest run_experiment(const ExperimentSpec& spec);

/// "%.17g", with inf/-inf/nan spelled out.
std::string format_double(double x);

/// SHA-1 of "blob <size>\0<bytes>", as printed by git hash-object.
std::string git_blob_sha1(std::string_view bytes);

/// Writes bytes to path; throws Io.
void write_text_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace sbmsi
