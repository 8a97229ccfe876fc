#include "sbmsi/graph_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string_view>

#include "sbmsi/error.hpp"

namespace sbmsi {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::vector<long long> parse_ints(std::string_view line, std::size_t expected, const char* file) {
  std::vector<long long> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string_view::npos) end = line.size();
    const std::string field(line.substr(pos, end - pos));
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(field, &used);
    } catch (const std::exception&) {
      throw Error(Errc::MalformedGraph, std::string(file) + ": bad integer '" + field + "'");
    }
    if (used != field.size()) throw Error(Errc::MalformedGraph, std::string(file) + ": bad integer '" + field + "'");
    out.push_back(value);
    pos = end + 1;
  }
  if (out.size() != expected) {
    throw Error(Errc::MalformedGraph, std::string(file) + ": expected " + std::to_string(expected) + " columns");
  }
  return out;
}

}  // namespace

std::string header_to_json(const GraphHeader& h) {
  nlohmann::ordered_json j;
  j["n"] = h.n;
  j["a"] = h.a;
  j["b"] = h.b;
  j["alpha"] = h.alpha;
  j["seed"] = h.seed;
  return j.dump(2) + "\n";
}

std::string edges_to_csv(const LabeledGraph& g) {
  std::string out = "u,v\n";
  out.reserve(out.size() + g.edge_count() * 14);
  for (const auto& e : g.edges()) {
    out += std::to_string(e.u);
    out += ',';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

std::string labels_to_csv(const LabeledGraph& g) {
  std::string out = "vertex,sigma,sigma_tilde\n";
  out.reserve(out.size() + g.n() * 14);
  for (std::size_t i = 0; i < g.n(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(static_cast<int>(g.sigma()[i]));
    out += ',';
    out += std::to_string(static_cast<int>(g.sigma_tilde()[i]));
    out += '\n';
  }
  return out;
}

void write_graph(const std::filesystem::path& dir, const StoredGraph& stored) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / kGraphHeaderFile, header_to_json(stored.header));
  write_file(dir / kEdgesFile, edges_to_csv(stored.graph));
  write_file(dir / kLabelsFile, labels_to_csv(stored.graph));
}

StoredGraph read_graph(const std::filesystem::path& dir) {
  StoredGraph stored;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / kGraphHeaderFile));
    stored.header.n = j.at("n").get<std::int64_t>();
    stored.header.a = j.at("a").get<double>();
    stored.header.b = j.at("b").get<double>();
    stored.header.alpha = j.at("alpha").get<double>();
    stored.header.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedGraph, std::string("graph.json: ") + e.what());
  }
  if (stored.header.n < 0) throw Error(Errc::MalformedGraph, "graph.json: negative n");
  const auto n = static_cast<std::size_t>(stored.header.n);

  const std::string edge_text = read_file(dir / kEdgesFile);
  const auto edge_lines = split_lines(edge_text);
  if (edge_lines.empty() || edge_lines.front() != "u,v") {
    throw Error(Errc::MalformedGraph, "edges.csv: missing header 'u,v'");
  }
  std::vector<Edge> edges;
  edges.reserve(edge_lines.size() - 1);
  for (std::size_t i = 1; i < edge_lines.size(); ++i) {
    const auto f = parse_ints(edge_lines[i], 2, kEdgesFile);
    if (f[0] < 0 || f[1] < 0 || static_cast<std::size_t>(f[0]) >= n || static_cast<std::size_t>(f[1]) >= n) {
      throw Error(Errc::MalformedGraph, "edges.csv: endpoint out of range");
    }
    edges.push_back({static_cast<Vertex>(f[0]), static_cast<Vertex>(f[1])});
  }

  const std::string label_text = read_file(dir / kLabelsFile);
  const auto label_lines = split_lines(label_text);
  if (label_lines.empty() || label_lines.front() != "vertex,sigma,sigma_tilde") {
    throw Error(Errc::MalformedGraph, "labels.csv: missing header");
  }
  if (label_lines.size() - 1 != n) throw Error(Errc::LengthMismatch, "labels.csv: expected one row per vertex");
  std::vector<Label> sigma(n);
  std::vector<Label> sigma_tilde(n);
  for (std::size_t i = 1; i < label_lines.size(); ++i) {
    const auto f = parse_ints(label_lines[i], 3, kLabelsFile);
    if (f[0] != static_cast<long long>(i - 1)) throw Error(Errc::MalformedGraph, "labels.csv: rows out of order");
    if ((f[1] != 1 && f[1] != -1) || (f[2] != 1 && f[2] != -1)) {
      throw Error(Errc::MalformedGraph, "labels.csv: labels must be +1 or -1");
    }
    sigma[i - 1] = static_cast<Label>(f[1]);
    sigma_tilde[i - 1] = static_cast<Label>(f[2]);
  }
  stored.graph = LabeledGraph(n, std::move(edges), std::move(sigma), std::move(sigma_tilde));
  return stored;
}

}  // namespace sbmsi
