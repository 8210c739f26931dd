#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flatlabel/embedding.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/treewidth.hpp"

namespace flatlabel {

/// mt19937_64 with bounded draws written out by hand, since the standard
/// distributions are not reproducible across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound); rejection sampling on the top of the range.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % bound;
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct KTreeInstance {
  Graph graph;
  TreeDecomposition decomposition;
};

struct ProductInstance {
  Graph graph;
  ProductEmbedding embedding;
  TreeDecomposition host_decomposition;
};

/// Random k-tree: each new vertex joins a random k-subset of a random
/// existing (k+1)-clique bag. Edges are then kept with probability keep.
inline KTreeInstance gen_ktree(std::uint64_t seed, std::size_t n, std::size_t k, double keep = 1.0) {
  if (n < k + 1) throw std::invalid_argument("k-tree needs n >= k+1");
  if (keep < 0.0 || keep > 1.0) throw std::invalid_argument("keep probability outside [0,1]");
  Rng rng(seed);
  KTreeInstance out;
  TreeDecomposition& td = out.decomposition;
  std::vector<Edge> edges;
  std::vector<Vertex> first(k + 1);
  for (Vertex v = 0; v <= k; ++v) {
    first[v] = v;
    for (Vertex u = 0; u < v; ++u) edges.emplace_back(u, v);
  }
  td.parent.push_back(-1);
  td.bags.push_back(first);
  for (Vertex v = static_cast<Vertex>(k + 1); v < n; ++v) {
    auto x = static_cast<std::uint32_t>(rng.below(td.bags.size()));
    std::vector<Vertex> bag = td.bags[x];
    bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(rng.below(bag.size())));
    for (Vertex u : bag) edges.emplace_back(u, v);
    bag.push_back(v);
    std::sort(bag.begin(), bag.end());
    td.parent.push_back(static_cast<std::int32_t>(x));
    td.bags.push_back(std::move(bag));
  }
  if (keep < 1.0) {
    std::vector<Edge> kept;
    for (const Edge& e : edges)
      if (rng.bernoulli(keep)) kept.push_back(e);
    edges = std::move(kept);
  }
  out.graph = Graph(n, edges);
  return out;
}

namespace detail {

/// Subgraph of host x P on the chosen (host, coord) cells, graph vertices
/// numbered in (host, coord) order, product edges kept with probability keep.
inline ProductInstance product_on_cells(Graph host, TreeDecomposition td, std::uint32_t d,
                                        const std::vector<bool>& chosen, double keep, Rng& rng) {
  const std::size_t cols = static_cast<std::size_t>(d) + 1;
  std::vector<Vertex> id(chosen.size(), no_vertex);
  ProductInstance out;
  for (Vertex v = 0; v < host.size(); ++v)
    for (std::uint32_t i = 0; i <= d; ++i)
      if (chosen[v * cols + i]) {
        id[v * cols + i] = static_cast<Vertex>(out.embedding.map.size());
        out.embedding.map.push_back({v, i});
      }
  std::vector<Edge> edges;
  auto offer = [&](Vertex a, Vertex b) {
    if (a != no_vertex && b != no_vertex && rng.bernoulli(keep)) edges.emplace_back(a, b);
  };
  for (Vertex v = 0; v < host.size(); ++v)
    for (std::uint32_t i = 0; i <= d; ++i) {
      Vertex a = id[v * cols + i];
      if (a == no_vertex) continue;
      if (i < d) offer(a, id[v * cols + i + 1]);
      for (Vertex w : host.neighbors(v)) {
        if (w < v) continue;
        for (int t = -1; t <= 1; ++t) {
          auto j = static_cast<std::int64_t>(i) + t;
          if (j < 0 || j > static_cast<std::int64_t>(d)) continue;
          offer(a, id[w * cols + static_cast<std::size_t>(j)]);
        }
      }
    }
  out.graph = Graph(out.embedding.map.size(), edges);
  out.embedding.host = std::move(host);
  out.embedding.path_len = d;
  out.host_decomposition = std::move(td);
  return out;
}

}  // namespace detail

/// Random subgraph of H x P with H a random k-tree on host_n vertices and P
/// the path 0..d. Each cell is used with probability vertex_prob and each
/// product edge between used cells is kept with probability keep.
inline ProductInstance gen_product_instance(std::uint64_t seed, std::size_t host_n, std::size_t k,
                                            std::uint32_t d, double keep, double vertex_prob = 0.5) {
  if (host_n == 0) throw std::invalid_argument("host must be nonempty");
  if (keep < 0.0 || keep > 1.0 || vertex_prob < 0.0 || vertex_prob > 1.0)
    throw std::invalid_argument("probability outside [0,1]");
  KTreeInstance h = gen_ktree(seed, host_n, std::min(k, host_n - 1));
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<bool> chosen(host_n * (static_cast<std::size_t>(d) + 1));
  for (std::size_t c = 0; c < chosen.size(); ++c) chosen[c] = rng.bernoulli(vertex_prob);
  return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), d, chosen, keep, rng);
}

/// Exactly n vertices: a random k-tree host on ceil(sqrt n) vertices and n
/// cells drawn uniformly from host x [0, ceil(n / host_n) - 1].
inline ProductInstance gen_sized_instance(std::uint64_t seed, std::size_t n, std::size_t k, double keep = 0.8) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  auto host_n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  auto d = static_cast<std::uint32_t>((n + host_n - 1) / host_n - 1);
  KTreeInstance h = gen_ktree(seed, host_n, std::min(k, host_n - 1));
  Rng rng(seed ^ 0x2545f4914f6cdd1dULL);
  const std::size_t total = host_n * (static_cast<std::size_t>(d) + 1);
  std::vector<std::uint32_t> cell(total);
  for (std::uint32_t c = 0; c < total; ++c) cell[c] = c;
  for (std::size_t i = 0; i < n; ++i) std::swap(cell[i], cell[i + rng.below(total - i)]);
  std::vector<bool> chosen(total, false);
  for (std::size_t i = 0; i < n; ++i) chosen[cell[i]] = true;
  return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), d, chosen, keep, rng);
}

inline const std::vector<std::string>& adversarial_kinds() {
  static const std::vector<std::string> kinds = {"all-one-fiber", "border-heavy", "single-column",
                                                 "tiny-n"};
  return kinds;
}

/// Stress instances for the flat scheme.
inline ProductInstance gen_adversarial(std::string_view kind, std::uint64_t seed, std::size_t n,
                                       std::size_t k = 1) {
  Rng rng(seed);
  auto cells = [](std::size_t host_n, std::uint32_t d, std::size_t count) {
    std::vector<bool> chosen(host_n * (static_cast<std::size_t>(d) + 1));
    // Fill coordinate-major so the first `count` cells cover whole layers.
    std::size_t placed = 0;
    for (std::uint32_t i = 0; i <= d && placed < count; ++i)
      for (std::size_t v = 0; v < host_n && placed < count; ++v, ++placed)
        chosen[v * (static_cast<std::size_t>(d) + 1) + i] = true;
    return chosen;
  };
  if (kind == "all-one-fiber") {
    if (n == 0) throw std::invalid_argument("n must be positive");
    KTreeInstance h = gen_ktree(seed, n, std::min(k, n - 1));
    return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), 0,
                                    std::vector<bool>(n, true), 1.0, rng);
  }
  if (kind == "border-heavy") {
    if (n == 0) throw std::invalid_argument("n must be positive");
    auto host_n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    auto d = static_cast<std::uint32_t>((n + host_n - 1) / host_n - 1);
    KTreeInstance h = gen_ktree(seed, host_n, std::min(k, host_n - 1));
    return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), d,
                                    cells(host_n, d, n), 1.0, rng);
  }
  if (kind == "single-column") {
    if (n == 0) throw std::invalid_argument("n must be positive");
    KTreeInstance h = gen_ktree(seed, 1, 0);
    auto d = static_cast<std::uint32_t>(n - 1);
    return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), d,
                                    std::vector<bool>(n, true), 1.0, rng);
  }
  if (kind == "tiny-n") {
    std::size_t m = std::clamp<std::size_t>(n, 1, 8);
    std::size_t host_n = m == 1 ? 1 : 2;
    auto d = static_cast<std::uint32_t>((m + host_n - 1) / host_n - 1);
    KTreeInstance h = gen_ktree(seed, host_n, host_n - 1);
    return detail::product_on_cells(std::move(h.graph), std::move(h.decomposition), d,
                                    cells(host_n, d, m), 0.7, rng);
  }
  throw std::invalid_argument("unknown adversarial kind: " + std::string(kind));
}

}  // namespace flatlabel
