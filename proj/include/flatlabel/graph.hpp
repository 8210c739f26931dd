#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flatlabel {

using Vertex = std::uint32_t;
inline constexpr Vertex no_vertex = static_cast<Vertex>(-1);

using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph on vertices 0..n-1, stored as CSR with sorted
/// neighbor lists. Immutable after construction.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  Graph(std::size_t n, std::span<const Edge> edges) : n_(n) {
    std::vector<std::size_t> degree(n, 0);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
      ++degree[u];
      ++degree[v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t u = 0; u < n; ++u) offsets_[u + 1] = offsets_[u] + degree[u];
    targets_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (auto [u, v] : edges) {
      targets_[fill[u]++] = v;
      targets_[fill[v]++] = u;
    }
    for (std::size_t u = 0; u < n; ++u) {
      auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u]);
      auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[u + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last)
        throw std::invalid_argument("parallel edge at vertex " + std::to_string(u));
    }
  }

  Graph(std::size_t n, const std::vector<Edge>& edges)
      : Graph(n, std::span<const Edge>(edges)) {}

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

  std::size_t degree(Vertex u) const { return offsets_[u + 1] - offsets_[u]; }

  bool adjacent(Vertex u, Vertex v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edges as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
};

/// Sorted, duplicate-free list of vertex indices.
class VertexSet {
 public:
  VertexSet() = default;

  explicit VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  const std::vector<Vertex>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  /// Throws unless every member is < n.
  void check_bounds(std::size_t n) const {
    if (!members_.empty() && members_.back() >= n)
      throw std::invalid_argument("vertex set member out of range");
  }

 private:
  std::vector<Vertex> members_;
};

/// A graph derived from a parent graph, with local -> parent vertex map.
struct Subgraph {
  Graph graph;
  std::vector<Vertex> to_parent;
};

/// Subgraph of g induced by `keep` (local index = rank in keep).
inline Subgraph induced_subgraph(const Graph& g, const VertexSet& keep) {
  std::vector<Vertex> local(g.size(), no_vertex);
  Vertex next = 0;
  for (Vertex v : keep) local[v] = next++;
  std::vector<Edge> edges;
  for (Vertex u : keep)
    for (Vertex v : g.neighbors(u))
      if (u < v && local[v] != no_vertex) edges.emplace_back(local[u], local[v]);
  return {Graph(keep.size(), edges), keep.members()};
}

/// Connected components; returns component id per vertex and the count.
inline std::pair<std::vector<std::uint32_t>, std::uint32_t> connected_components(
    const Graph& g) {
  std::vector<std::uint32_t> comp(g.size(), static_cast<std::uint32_t>(-1));
  std::uint32_t count = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < g.size(); ++s) {
    if (comp[s] != static_cast<std::uint32_t>(-1)) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      for (Vertex v : g.neighbors(u))
        if (comp[v] == static_cast<std::uint32_t>(-1)) {
          comp[v] = count;
          stack.push_back(v);
        }
    }
    ++count;
  }
  return {std::move(comp), count};
}

/// Dense adjacency matrix, for oracles on small and medium graphs.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(const Graph& g) : n_(g.size()), bits_(n_ * n_, false) {
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : g.neighbors(u)) bits_[u * n_ + v] = true;
  }
  bool operator()(Vertex u, Vertex v) const { return bits_[u * n_ + v]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<bool> bits_;
};

}  // namespace flatlabel
