#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flatlabel/bidecomposition.hpp"
#include "flatlabel/embedding.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/treewidth.hpp"

namespace flatlabel {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline bool looks_like_json(const std::string& text) {
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '{' || c == '[';
  return false;
}

inline Json graph_to_json(const Graph& g) {
  Json edges = Json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  return {{"n", g.size()}, {"edges", edges}};
}

inline Graph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw FormatError("graph JSON needs \"n\" and \"edges\"");
  auto n = j.at("n").get<std::size_t>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a pair");
    edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
  }
  return Graph(n, edges);
}

inline std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  os << g.size() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
  return os.str();
}

inline Graph graph_from_text(const std::string& text) {
  std::istringstream is(text);
  std::uint64_t n = 0, m = 0;
  if (!(is >> n >> m)) throw FormatError("graph header must be \"n m\"");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    std::int64_t u = 0, v = 0;
    if (!(is >> u >> v)) throw FormatError("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    if (u < 0 || v < 0) throw FormatError("negative vertex in edge " + std::to_string(i));
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  std::string extra;
  if (is >> extra) throw FormatError("unexpected trailing content: " + extra);
  return Graph(n, edges);
}

inline Graph parse_graph(const std::string& text) {
  if (looks_like_json(text)) return graph_from_json(Json::parse(text));
  return graph_from_text(text);
}

inline Graph read_graph(const std::string& path) { return parse_graph(read_file(path)); }

inline Json embedding_to_json(const ProductEmbedding& e) {
  Json map = Json::array();
  for (const auto& p : e.map) map.push_back({p.host, p.coord});
  return {{"host", graph_to_json(e.host)}, {"d", e.path_len}, {"map", map}};
}

inline ProductEmbedding embedding_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("host") || !j.contains("d") || !j.contains("map"))
    throw FormatError("embedding JSON needs \"host\", \"d\" and \"map\"");
  ProductEmbedding e;
  e.host = graph_from_json(j.at("host"));
  auto d = j.at("d").get<std::int64_t>();
  if (d < 0) throw FormatError("path length must be nonnegative");
  e.path_len = static_cast<std::uint32_t>(d);
  for (const auto& p : j.at("map")) {
    if (!p.is_array() || p.size() != 2) throw FormatError("map entry must be [host, coord]");
    e.map.push_back({p[0].get<Vertex>(), p[1].get<std::uint32_t>()});
  }
  return e;
}

inline ProductEmbedding read_embedding(const std::string& path) {
  return embedding_from_json(Json::parse(read_file(path)));
}

inline Json decomposition_to_json(const TreeDecomposition& td) {
  return {{"nodes", td.node_count()}, {"parent", td.parent}, {"bags", td.bags}};
}

inline TreeDecomposition decomposition_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("parent") || !j.contains("bags"))
    throw FormatError("decomposition JSON needs \"parent\" and \"bags\"");
  TreeDecomposition td;
  td.parent = j.at("parent").get<std::vector<std::int32_t>>();
  td.bags = j.at("bags").get<std::vector<std::vector<Vertex>>>();
  if (td.parent.size() != td.bags.size()) throw FormatError("parent and bags differ in length");
  if (j.contains("nodes") && j.at("nodes").get<std::size_t>() != td.bags.size())
    throw FormatError("\"nodes\" does not match the bag count");
  return td;
}

inline TreeDecomposition read_decomposition(const std::string& path) {
  return decomposition_from_json(Json::parse(read_file(path)));
}

/// JSON array or whitespace-separated vertex indices.
inline VertexSet parse_vertex_set(const std::string& text) {
  std::vector<Vertex> vs;
  if (looks_like_json(text)) {
    vs = Json::parse(text).get<std::vector<Vertex>>();
  } else {
    std::istringstream is(text);
    std::int64_t x;
    while (is >> x) {
      if (x < 0) throw FormatError("negative vertex in set");
      vs.push_back(static_cast<Vertex>(x));
    }
    if (!is.eof()) throw FormatError("vertex set must hold integers");
  }
  return VertexSet(std::move(vs));
}

inline VertexSet read_vertex_set(const std::string& path) { return parse_vertex_set(read_file(path)); }

inline Json bidecomposition_to_json(const Bidecomposition& bd) {
  Json nodes = Json::array();
  for (std::size_t x = 0; x < bd.node_count(); ++x) {
    nodes.push_back({{"parent", bd.parent[x]},
                     {"side", bd.side[x] == 0 ? "left" : "right"},
                     {"depth", bd.depth[x]},
                     {"part", bd.parts[x]}});
  }
  return {{"height", bd.height()}, {"nodes", nodes}};
}

}  // namespace flatlabel
