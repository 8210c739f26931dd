#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatlabel/graph.hpp"

namespace flatlabel {

/// Image of a graph vertex in H x P: host vertex and path coordinate.
struct Placement {
  Vertex host = 0;
  std::uint32_t coord = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
  friend auto operator<=>(const Placement&, const Placement&) = default;
};

/// Injective map of graph vertices into V(host) x {0..path_len}.
struct ProductEmbedding {
  Graph host;
  std::uint32_t path_len = 0;
  std::vector<Placement> map;  // indexed by graph vertex

  const Placement& at(Vertex u) const {
    if (u >= map.size()) throw std::out_of_range("vertex outside embedding");
    return map[u];
  }
};

/// Adjacency of the images of a and b in host x P (strong product).
inline bool strong_product_adjacent(const ProductEmbedding& e, Vertex a, Vertex b) {
  const Placement& pa = e.at(a);
  const Placement& pb = e.at(b);
  if (pa == pb) return false;
  std::uint32_t gap = pa.coord > pb.coord ? pa.coord - pb.coord : pb.coord - pa.coord;
  if (gap > 1) return false;
  return pa.host == pb.host || e.host.adjacent(pa.host, pb.host);
}

struct EmbeddingReport {
  bool ok = true;
  std::vector<Vertex> out_of_range;            // unmapped, bad host or coord
  std::vector<std::pair<Vertex, Vertex>> collisions;
  std::vector<Edge> bad_edges;                 // not a strong-product edge

  std::string summary() const {
    std::ostringstream os;
    if (ok) return "ok";
    os << "invalid embedding:";
    if (!out_of_range.empty()) os << " " << out_of_range.size() << " vertices out of range";
    if (!collisions.empty()) os << " " << collisions.size() << " collisions";
    if (!bad_edges.empty()) {
      os << " " << bad_edges.size() << " bad edges (first " << bad_edges[0].first << "-"
         << bad_edges[0].second << ")";
    }
    return os.str();
  }
};

inline EmbeddingReport validate_embedding(const Graph& g, const ProductEmbedding& e) {
  EmbeddingReport r;
  for (Vertex u = 0; u < g.size(); ++u) {
    if (u >= e.map.size() || e.map[u].host >= e.host.size() || e.map[u].coord > e.path_len)
      r.out_of_range.push_back(u);
  }
  if (!r.out_of_range.empty()) {
    r.ok = false;
    return r;
  }
  std::vector<Vertex> order(g.size());
  for (Vertex u = 0; u < g.size(); ++u) order[u] = u;
  std::sort(order.begin(), order.end(),
            [&](Vertex a, Vertex b) { return e.map[a] < e.map[b] || (e.map[a] == e.map[b] && a < b); });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (e.map[order[i - 1]] == e.map[order[i]]) r.collisions.emplace_back(order[i - 1], order[i]);
  for (auto [u, v] : g.edges())
    if (!strong_product_adjacent(e, u, v)) r.bad_edges.emplace_back(u, v);
  r.ok = r.collisions.empty() && r.bad_edges.empty();
  return r;
}

struct PrunedEmbedding {
  ProductEmbedding embedding;
  std::uint32_t coord_shift = 0;        // old coord = new coord + shift
  std::vector<Vertex> host_to_original;  // pruned host vertex -> original host vertex
};

/// Restricts the host to vertices used on first coordinates and shifts
/// coordinates so the smallest used one is 0.
inline PrunedEmbedding prune_unused(const ProductEmbedding& e) {
  PrunedEmbedding out;
  std::vector<Vertex> used;
  used.reserve(e.map.size());
  std::uint32_t lo = 0, hi = 0;
  if (!e.map.empty()) {
    lo = e.map[0].coord;
    hi = e.map[0].coord;
  }
  for (const auto& p : e.map) {
    used.push_back(p.host);
    lo = std::min(lo, p.coord);
    hi = std::max(hi, p.coord);
  }
  VertexSet keep(std::move(used));
  Subgraph sub = induced_subgraph(e.host, keep);
  std::vector<Vertex> local(e.host.size(), no_vertex);
  for (Vertex i = 0; i < sub.to_parent.size(); ++i) local[sub.to_parent[i]] = i;
  out.embedding.host = std::move(sub.graph);
  out.embedding.path_len = hi - lo;
  out.embedding.map.reserve(e.map.size());
  for (const auto& p : e.map) out.embedding.map.push_back({local[p.host], p.coord - lo});
  out.coord_shift = lo;
  out.host_to_original = std::move(sub.to_parent);
  return out;
}

}  // namespace flatlabel
