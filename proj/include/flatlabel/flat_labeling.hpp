#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatlabel/codec.hpp"
#include "flatlabel/embedding.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/product_labeling.hpp"
#include "flatlabel/treewidth.hpp"
#include "flatlabel/tw_labeling.hpp"

namespace flatlabel {

/// Smallest d with d^3 >= n.
inline std::uint32_t block_width(std::size_t n) {
  std::uint64_t d = 1;
  while (d * d * d < n) ++d;
  return static_cast<std::uint32_t>(d);
}

/// Offset a in [0, d) minimizing |W_a u W_{a+1}|, ties to the smallest a.
inline std::uint32_t choose_block_offset(const ProductEmbedding& e, std::uint32_t d) {
  if (d < 3) throw std::invalid_argument("block width must be at least 3");
  std::vector<std::size_t> count(d, 0);
  for (const auto& p : e.map) ++count[p.coord % d];
  std::uint32_t best = 0;
  std::size_t best_size = count[0] + count[1];
  for (std::uint32_t a = 1; a < d; ++a) {
    std::size_t s = count[a] + count[(a + 1) % d];
    if (s < best_size) best = a, best_size = s;
  }
  return best;
}

inline bool in_border(std::uint32_t coord, std::uint32_t a, std::uint32_t d) {
  std::uint32_t r = coord % d;
  return r == a || r == (a + 1) % d;
}

struct GraphSplit {
  Subgraph g1;        // border vertices with the crossing edges E1
  Graph g2;           // all vertices with E2 = E \ E1
  VertexSet border;   // W_a u W_{a+1}
  std::vector<Edge> e1;
};

inline GraphSplit split_graph(const Graph& g, const ProductEmbedding& e, std::uint32_t a, std::uint32_t d) {
  if (d < 3 || a >= d) throw std::invalid_argument("offset outside [0, d)");
  GraphSplit out;
  std::vector<Vertex> border;
  for (Vertex u = 0; u < g.size(); ++u)
    if (in_border(e.map[u].coord, a, d)) border.push_back(u);
  out.border = VertexSet(border);
  std::vector<Vertex> local(g.size(), no_vertex);
  for (Vertex i = 0; i < border.size(); ++i) local[border[i]] = i;

  std::vector<Edge> e1_local, e2;
  for (auto [u, v] : g.edges()) {
    std::uint32_t ru = e.map[u].coord % d, rv = e.map[v].coord % d;
    bool crossing = (ru == a && rv == (a + 1) % d) || (rv == a && ru == (a + 1) % d);
    if (crossing) {
      out.e1.emplace_back(u, v);
      e1_local.emplace_back(local[u], local[v]);
    } else {
      e2.emplace_back(u, v);
    }
  }
  out.g1.graph = Graph(border.size(), e1_local);
  out.g1.to_parent = std::move(border);
  out.g2 = Graph(g.size(), e2);
  return out;
}

namespace detail {

inline std::uint64_t cell_key(Vertex host, std::int64_t coord) {
  return (static_cast<std::uint64_t>(host) << 32) | static_cast<std::uint32_t>(coord);
}

/// Appends `part` to `whole`, hanging its root below the previous root.
inline void append_chained(TreeDecomposition& whole, const TreeDecomposition& part, std::int32_t& last_root) {
  const auto offset = static_cast<std::int32_t>(whole.node_count());
  for (std::size_t x = 0; x < part.node_count(); ++x) {
    std::int32_t p = part.parent[x];
    if (p < 0) {
      whole.parent.push_back(last_root);
      last_root = offset + static_cast<std::int32_t>(x);
    } else {
      whole.parent.push_back(offset + p);
    }
    whole.bags.push_back(part.bags[x]);
  }
}

inline TreeDecomposition finish_chained(TreeDecomposition td) {
  if (td.node_count() == 0) {
    td.parent.push_back(-1);
    td.bags.emplace_back();
  }
  return normalize(td);
}

}  // namespace detail

/// Decomposition of G1 of width at most 2w+1: each component lives in two
/// consecutive layers, so it is covered by the host decomposition restricted
/// to its host vertices with every host vertex doubled.
inline TreeDecomposition border_decomposition(const ProductEmbedding& e, const TreeDecomposition& td_host,
                                              const Subgraph& g1, std::uint32_t a, std::uint32_t d) {
  const std::size_t m = g1.graph.size();
  const std::size_t hn = e.host.size();
  EliminationForest forest(orient_decomposition(hn, normalize(td_host), nullptr));
  auto [comp, count] = connected_components(g1.graph);

  std::vector<std::pair<std::uint64_t, Vertex>> cells(m);
  for (Vertex x = 0; x < m; ++x) {
    const Placement& p = e.map[g1.to_parent[x]];
    cells[x] = {detail::cell_key(p.host, p.coord), x};
  }
  std::sort(cells.begin(), cells.end());
  auto lookup = [&](Vertex host, std::int64_t coord) -> Vertex {
    if (coord < 0) return no_vertex;
    auto key = detail::cell_key(host, coord);
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair<std::uint64_t, Vertex>{key, 0});
    return it != cells.end() && it->first == key ? it->second : no_vertex;
  };

  std::vector<std::vector<Vertex>> members(count);
  for (Vertex x = 0; x < m; ++x) members[comp[x]].push_back(x);

  std::vector<std::uint32_t> stamp(hn, 0);
  TreeDecomposition whole;
  std::int32_t last_root = -1;
  for (std::uint32_t c = 0; c < count; ++c) {
    const Placement& first = e.map[g1.to_parent[members[c][0]]];
    std::int64_t base = first.coord % d == a ? first.coord : static_cast<std::int64_t>(first.coord) - 1;
    std::vector<Vertex> hosts;
    for (Vertex x : members[c]) {
      Vertex h = e.map[g1.to_parent[x]].host;
      if (stamp[h] != c + 1) stamp[h] = c + 1, hosts.push_back(h);
    }
    forest.sort_by_preorder(hosts);
    TreeDecomposition view = forest.restrict(hosts, [&](Vertex h) { return stamp[h] == c + 1; });
    for (auto& bag : view.bags) {
      std::vector<Vertex> doubled;
      for (Vertex h : bag)
        for (std::int64_t s = 0; s <= 1; ++s) {
          Vertex x = lookup(h, base + s);
          if (x != no_vertex && comp[x] == c) doubled.push_back(x);
        }
      std::sort(doubled.begin(), doubled.end());
      bag = std::move(doubled);
    }
    detail::append_chained(whole, view, last_root);
  }
  return detail::finish_chained(std::move(whole));
}

struct HostCopy {
  Vertex host = 0;
  std::uint32_t copy = 0;

  friend bool operator==(const HostCopy&, const HostCopy&) = default;
  friend auto operator<=>(const HostCopy& a, const HostCopy& b) {
    return a.copy != b.copy ? a.copy <=> b.copy : a.host <=> b.host;
  }
};

struct StripEmbedding {
  ProductEmbedding embedding;   // into H' x P' with P' of length d-1
  std::vector<HostCopy> origin;  // H' vertex -> (H vertex, copy), sorted
};

/// Re-embeds every vertex at (v, j div d, j mod d) with j = i + d - a - 1,
/// keeping only the used copies of H.
inline StripEmbedding strip_embedding(const ProductEmbedding& e, std::uint32_t a, std::uint32_t d) {
  if (d < 3 || a >= d) throw std::invalid_argument("offset outside [0, d)");
  StripEmbedding out;
  std::vector<HostCopy> placed(e.map.size());
  for (std::size_t u = 0; u < e.map.size(); ++u) {
    std::uint64_t j = std::uint64_t{e.map[u].coord} + d - a - 1;
    placed[u] = {e.map[u].host, static_cast<std::uint32_t>(j / d)};
  }
  out.origin = placed;
  std::sort(out.origin.begin(), out.origin.end());
  out.origin.erase(std::unique(out.origin.begin(), out.origin.end()), out.origin.end());
  auto index_of = [&](const HostCopy& hc) -> Vertex {
    auto it = std::lower_bound(out.origin.begin(), out.origin.end(), hc);
    return it != out.origin.end() && *it == hc ? static_cast<Vertex>(it - out.origin.begin()) : no_vertex;
  };
  std::vector<Edge> edges;
  for (Vertex x = 0; x < out.origin.size(); ++x) {
    const HostCopy& hc = out.origin[x];
    for (Vertex w : e.host.neighbors(hc.host)) {
      if (w < hc.host) continue;
      Vertex y = index_of({w, hc.copy});
      if (y != no_vertex) edges.emplace_back(x, y);
    }
  }
  out.embedding.host = Graph(out.origin.size(), edges);
  out.embedding.path_len = d - 1;
  out.embedding.map.resize(e.map.size());
  for (std::size_t u = 0; u < e.map.size(); ++u) {
    std::uint64_t j = std::uint64_t{e.map[u].coord} + d - a - 1;
    out.embedding.map[u] = {index_of(placed[u]), static_cast<std::uint32_t>(j % d)};
  }
  return out;
}

/// Decomposition of H' from the host decomposition, one restricted copy per
/// used block, copies chained.
inline TreeDecomposition strip_host_decomposition(const Graph& host, const TreeDecomposition& td_host,
                                                  const StripEmbedding& strip) {
  const std::size_t hn = host.size();
  EliminationForest forest(orient_decomposition(hn, normalize(td_host), nullptr));
  std::vector<Vertex> rename(hn, no_vertex);
  TreeDecomposition whole;
  std::int32_t last_root = -1;
  const auto& origin = strip.origin;
  for (std::size_t lo = 0; lo < origin.size();) {
    std::size_t hi = lo;
    std::vector<Vertex> hosts;
    while (hi < origin.size() && origin[hi].copy == origin[lo].copy) {
      rename[origin[hi].host] = static_cast<Vertex>(hi);
      hosts.push_back(origin[hi].host);
      ++hi;
    }
    forest.sort_by_preorder(hosts);
    TreeDecomposition view =
        forest.restrict(hosts, [&](Vertex h) { return rename[h] != no_vertex; }, rename);
    detail::append_chained(whole, view, last_root);
    for (Vertex h : hosts) rename[h] = no_vertex;
    lo = hi;
  }
  return detail::finish_chained(std::move(whole));
}

struct FlatOptions {
  bool q_saving = true;            // short host labels for border vertices
  bool compress_endpoints = true;  // tagged coordinates in the strip labels
};

struct FlatSchemeMeta {
  std::uint32_t n = 0;
  std::uint32_t block = 0;   // d
  std::uint32_t offset = 0;  // a
  std::uint32_t border_len_bits = 0;
  std::uint32_t q_saving = 0;
  std::uint32_t compress = 0;
  TwSchemeMeta border;
  ProductSchemeMeta strip;

  static constexpr std::size_t word_count = 6 + TwSchemeMeta::word_count + ProductSchemeMeta::word_count;

  std::vector<std::uint32_t> to_words() const {
    std::vector<std::uint32_t> w = {n, block, offset, border_len_bits, q_saving, compress};
    auto b = border.to_words();
    auto s = strip.to_words();
    w.insert(w.end(), b.begin(), b.end());
    w.insert(w.end(), s.begin(), s.end());
    return w;
  }
  static FlatSchemeMeta from_words(std::span<const std::uint32_t> w) {
    if (w.size() < word_count) throw DecodeError("truncated flat meta");
    FlatSchemeMeta m;
    m.n = w[0];
    m.block = w[1];
    m.offset = w[2];
    m.border_len_bits = w[3];
    m.q_saving = w[4];
    m.compress = w[5];
    m.border = TwSchemeMeta::from_words(w.subspan(6));
    m.strip = ProductSchemeMeta::from_words(w.subspan(6 + TwSchemeMeta::word_count));
    return m;
  }
  friend bool operator==(const FlatSchemeMeta&, const FlatSchemeMeta&) = default;
};

/// Encoder-side facts about one flat encoding.
struct FlatInfo {
  std::size_t border_size = 0;
  std::size_t e1_size = 0;
  int border_width = 0;  // width of the G1 decomposition
  std::size_t strip_hosts = 0;
  std::size_t max_border_label = 0;
  std::size_t max_interior_label = 0;
  std::size_t max_lambda1 = 0;
  std::size_t max_lambda2 = 0;
};

struct FlatEncoding {
  bool fallback = false;  // n <= 8: plain product labels
  FlatSchemeMeta meta;
  ProductSchemeMeta fallback_meta;
  std::vector<BitString> labels;
  FlatInfo info;
  std::uint32_t host_width = 0;
};

inline constexpr std::size_t flat_fallback_limit = 8;

inline FlatEncoding flat_encode(const Graph& g, const ProductEmbedding& e, const TreeDecomposition& td_host,
                                FlatOptions options = {}) {
  EmbeddingReport report = validate_embedding(g, e);
  if (!report.ok) throw std::invalid_argument(report.summary());
  DecompositionReport host_report = validate_decomposition(e.host, td_host);
  if (!host_report.ok) throw std::invalid_argument("host decomposition: " + host_report.summary());

  const std::size_t n = g.size();
  FlatEncoding out;
  out.host_width = static_cast<std::uint32_t>(std::max(td_host.width(), 0));
  if (n <= flat_fallback_limit) {
    ProductEncoding pe = product_encode(g, e, td_host, {}, options.compress_endpoints);
    out.fallback = true;
    out.fallback_meta = pe.meta;
    out.labels = std::move(pe.labels);
    for (const auto& l : out.labels) out.info.max_interior_label = std::max(out.info.max_interior_label, l.size());
    return out;
  }

  PrunedEmbedding pruned = prune_unused(e);
  const ProductEmbedding& pe = pruned.embedding;
  TreeDecomposition td = restrict_decomposition(e.host.size(), td_host, VertexSet(pruned.host_to_original));

  FlatSchemeMeta& meta = out.meta;
  meta.n = static_cast<std::uint32_t>(n);
  meta.block = block_width(n);
  meta.offset = choose_block_offset(pe, meta.block);
  meta.q_saving = options.q_saving ? 1 : 0;
  meta.compress = options.compress_endpoints ? 1 : 0;

  GraphSplit sp = split_graph(g, pe, meta.offset, meta.block);
  TreeDecomposition td1 = border_decomposition(pe, td, sp.g1, meta.offset, meta.block);
  out.info.border_size = sp.border.size();
  out.info.e1_size = sp.e1.size();
  out.info.border_width = td1.width();

  TwEncoding lambda1;
  if (sp.g1.graph.size() > 0) {
    lambda1 = tw_encode(sp.g1.graph, td1, {});
    meta.border = lambda1.meta;
  }

  StripEmbedding strip = strip_embedding(pe, meta.offset, meta.block);
  TreeDecomposition td_strip = strip_host_decomposition(pe.host, td, strip);
  out.info.strip_hosts = strip.embedding.host.size();
  ProductEncoding lambda2 = product_encode(sp.g2, strip.embedding, td_strip,
                                           options.q_saving ? sp.border : VertexSet{}, options.compress_endpoints);
  meta.strip = lambda2.meta;

  std::size_t max1 = 0;
  for (const auto& l : lambda1.labels) max1 = std::max(max1, l.size());
  meta.border_len_bits = bits_for(max1);
  out.info.max_lambda1 = max1;

  out.labels.resize(n);
  for (Vertex u = 0; u < n; ++u) {
    BitString& s = out.labels[u];
    const BitString& l2 = lambda2.labels[u];
    out.info.max_lambda2 = std::max(out.info.max_lambda2, l2.size());
    if (sp.border.contains(u)) {
      auto x = static_cast<std::size_t>(std::lower_bound(sp.border.begin(), sp.border.end(), u) - sp.border.begin());
      const BitString& l1 = lambda1.labels[x];
      s.push_back(true);
      s.append_bits(l1.size(), meta.border_len_bits);
      s.append(l1);
      s.append(l2);
      out.info.max_border_label = std::max(out.info.max_border_label, s.size());
    } else {
      s.push_back(false);
      s.append(l2);
      out.info.max_interior_label = std::max(out.info.max_interior_label, s.size());
    }
  }
  return out;
}

struct FlatParts {
  bool border = false;
  BitView lambda1;
  BitView lambda2;
};

inline FlatParts flat_parts(BitView label, const FlatSchemeMeta& meta) {
  try {
    BitReader r(label);
    FlatParts p;
    p.border = r.read_bit();
    if (p.border) p.lambda1 = r.read_length_prefixed(meta.border_len_bits);
    p.lambda2 = r.rest();
    return p;
  } catch (const std::underflow_error& e) {
    throw DecodeError(std::string("malformed flat label: ") + e.what());
  }
}

inline bool flat_adjacent(BitView x, BitView y, const FlatSchemeMeta& meta) {
  if (x == y) throw std::invalid_argument("identical labels");
  FlatParts px = flat_parts(x, meta);
  FlatParts py = flat_parts(y, meta);
  if (px.border && py.border && tw_adjacent(px.lambda1, py.lambda1, meta.border)) return true;
  return product_adjacent(px.lambda2, py.lambda2, meta.strip);
}

}  // namespace flatlabel
