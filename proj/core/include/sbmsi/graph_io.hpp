#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sbmsi/model.hpp"

namespace sbmsi {

/// Provenance stored alongside a serialized graph.
struct GraphHeader {
  std::int64_t n = 0;
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  friend bool operator==(const GraphHeader&, const GraphHeader&) = default;
};

struct StoredGraph {
  GraphHeader header;
  LabeledGraph graph;
};

/// On-disk layout, all inside one directory:
///   graph.json   {"n":..,"a":..,"b":..,"alpha":..,"seed":..}
///   edges.csv    "u,v" then one row per edge, sorted lexicographically
///   labels.csv   "vertex,sigma,sigma_tilde" then one row per vertex
/// Doubles use the shortest representation that round-trips, so
/// write -> read -> write reproduces identical bytes.
inline constexpr const char* kGraphHeaderFile = "graph.json";
inline constexpr const char* kEdgesFile = "edges.csv";
inline constexpr const char* kLabelsFile = "labels.csv";

std::string header_to_json(const GraphHeader& h);
std::string edges_to_csv(const LabeledGraph& g);
std::string labels_to_csv(const LabeledGraph& g);

void write_graph(const std::filesystem::path& dir, const StoredGraph& stored);

/// Throws Io for missing/unreadable files and MalformedGraph for bad content.
StoredGraph read_graph(const std::filesystem::path& dir);

}  // namespace sbmsi
