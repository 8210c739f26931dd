#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatlabel/bidecomposition.hpp"
#include "flatlabel/codec.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/treewidth.hpp"

namespace flatlabel {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First field of every bounded-treewidth label.
inline constexpr unsigned scheme_tag_bits = 3;
inline constexpr std::uint64_t tw_scheme_tag = 1;

/// Out-degree ceiling for decoding without allocation.
inline constexpr std::size_t max_gamma = 64;

/// Field widths shared by encoder and decoder of one tw encoding.
struct TwSchemeMeta {
  std::uint32_t n = 0;
  std::uint32_t width = 0;            // out-degree bound k
  std::uint32_t depth_bits = 0;       // depth and suffix-length fields
  std::uint32_t part_width_bits = 0;  // prefix holding the part-index width
  std::uint32_t count_bits = 0;       // neighbor count field
  std::uint32_t height = 0;           // bidecomposition height
  std::uint32_t max_part = 0;         // largest part

  static constexpr std::size_t word_count = 7;

  std::vector<std::uint32_t> to_words() const {
    return {n, width, depth_bits, part_width_bits, count_bits, height, max_part};
  }
  static TwSchemeMeta from_words(std::span<const std::uint32_t> w) {
    if (w.size() < word_count) throw DecodeError("truncated tw meta");
    return {w[0], w[1], w[2], w[3], w[4], w[5], w[6]};
  }
  friend bool operator==(const TwSchemeMeta&, const TwSchemeMeta&) = default;
};

/// (path bits to alpha(u), index of u in its part, depth of alpha(u)).
struct TwIdentifier {
  std::uint64_t path = 0;
  std::uint32_t depth = 0;
  std::uint32_t part_index = 0;

  friend bool operator==(const TwIdentifier&, const TwIdentifier&) = default;
};

struct GammaEntry {
  TwIdentifier id;
  bool in_graph = false;
};

/// Fully decoded label; gamma is ordered by (depth, part_index).
struct TwDecoded {
  TwIdentifier id;
  std::uint64_t full_path = 0;  // P_u
  std::uint32_t full_depth = 0;
  std::uint32_t gamma_size = 0;
  std::array<GammaEntry, max_gamma> gamma;

  std::span<const GammaEntry> neighbors() const { return {gamma.data(), gamma_size}; }

  /// Position of `other` in gamma, or -1.
  int find(const TwIdentifier& other) const {
    for (std::uint32_t i = 0; i < gamma_size; ++i)
      if (gamma[i].id == other) return static_cast<int>(i);
    return -1;
  }
};

struct TwEncoding {
  TwSchemeMeta meta;
  std::vector<BitString> labels;
  /// Out-neighbors of each vertex in the decoder's gamma order.
  std::vector<std::vector<Vertex>> gamma_vertices;
  Bidecomposition bidecomposition;
  VertexSet saving_set;  // S = union of K_u over u in Q
};

namespace detail {

inline void write_part_index(BitString& s, std::uint32_t index, std::uint32_t part_size,
                             const TwSchemeMeta& meta) {
  unsigned w = bits_for(part_size - 1);
  s.append_bits(w, meta.part_width_bits);
  s.append_bits(index, w);
}

inline std::uint32_t read_part_index(BitReader& r, const TwSchemeMeta& meta) {
  auto w = static_cast<unsigned>(r.read_fixed(meta.part_width_bits));
  if (w > 32) throw DecodeError("part index wider than 32 bits");
  return static_cast<std::uint32_t>(r.read_fixed(w));
}

inline TwIdentifier read_identifier(BitReader& r, const TwSchemeMeta& meta) {
  if (r.read_fixed(scheme_tag_bits) != tw_scheme_tag) throw DecodeError("not a tw label");
  TwIdentifier id;
  id.depth = static_cast<std::uint32_t>(r.read_fixed(meta.depth_bits));
  if (id.depth > 63) throw DecodeError("depth out of range");
  id.path = r.read_fixed(id.depth);
  id.part_index = read_part_index(r, meta);
  return id;
}

}  // namespace detail

/// Labels of length about log n + O(k log log n); vertices of q get labels
/// of about log |q| + O(k log log n). Requires td valid for g.
inline TwEncoding tw_encode(const Graph& g, const TreeDecomposition& td, const VertexSet& q = {}) {
  const std::size_t n = g.size();
  q.check_bounds(n);
  TreeDecomposition norm = normalize(td);
  ChordalOrientation orient = orient_decomposition(n, norm, &g);
  if (orient.max_out_degree() >= max_gamma)
    throw std::invalid_argument("decomposition too wide for labeling");

  TwEncoding enc;
  std::vector<Vertex> s_members;
  for (Vertex u : q) {
    s_members.push_back(u);
    for (const auto& a : orient.out[u]) s_members.push_back(a.to);
  }
  enc.saving_set = VertexSet(std::move(s_members));
  Graph completion = completion_graph(orient);
  enc.bidecomposition = build_bidecomposition(completion, norm, enc.saving_set);
  const Bidecomposition& bd = enc.bidecomposition;

  TwSchemeMeta& meta = enc.meta;
  meta.n = static_cast<std::uint32_t>(n);
  meta.width = static_cast<std::uint32_t>(std::max(norm.width(), 0));
  meta.height = bd.height();
  meta.depth_bits = bits_for(meta.height);
  meta.max_part = static_cast<std::uint32_t>(bd.max_part());
  meta.part_width_bits = bits_for(bits_for(meta.max_part > 0 ? meta.max_part - 1 : 0));
  meta.count_bits = bits_for(meta.width);

  enc.labels.resize(n);
  enc.gamma_vertices.resize(n);
  for (Vertex u = 0; u < n; ++u) {
    const std::uint32_t x = bd.alpha[u];
    std::uint32_t deepest = x;
    auto& nbrs = enc.gamma_vertices[u];
    for (const auto& a : orient.out[u]) {
      nbrs.push_back(a.to);
      std::uint32_t y = bd.alpha[a.to];
      if (!bd.related(x, y) || !bd.related(deepest, y))
        throw std::logic_error("clique not on a root path of the bidecomposition");
      if (bd.depth[y] > bd.depth[deepest]) deepest = y;
    }
    std::sort(nbrs.begin(), nbrs.end(), [&](Vertex a, Vertex b) {
      auto da = bd.depth[bd.alpha[a]], db = bd.depth[bd.alpha[b]];
      return da != db ? da < db : bd.part_index[a] < bd.part_index[b];
    });
    const std::uint32_t depth = bd.depth[x];
    const std::uint32_t suffix_len = bd.depth[deepest] - depth;

    BitString& s = enc.labels[u];
    s.append_bits(tw_scheme_tag, scheme_tag_bits);
    s.append_bits(depth, meta.depth_bits);
    s.append_bits(bd.path[x], depth);
    detail::write_part_index(s, bd.part_index[u], static_cast<std::uint32_t>(bd.parts[x].size()), meta);
    s.append_bits(suffix_len, meta.depth_bits);
    s.append_bits(bd.path[deepest] & ((std::uint64_t{1} << suffix_len) - 1), suffix_len);
    s.append_bits(nbrs.size(), meta.count_bits);
    for (Vertex v : nbrs) {
      std::uint32_t y = bd.alpha[v];
      s.append_bits(bd.depth[y], meta.depth_bits);
      detail::write_part_index(s, bd.part_index[v], static_cast<std::uint32_t>(bd.parts[y].size()), meta);
      bool in_graph = false;
      for (const auto& a : orient.out[u])
        if (a.to == v) in_graph = a.in_graph;
      s.push_back(in_graph);
    }
  }
  return enc;
}

/// Identifier from the fixed-position prefix of a label.
inline TwIdentifier tw_iota(BitView label, const TwSchemeMeta& meta) {
  try {
    BitReader r(label);
    return detail::read_identifier(r, meta);
  } catch (const std::underflow_error& e) {
    throw DecodeError(std::string("malformed tw label: ") + e.what());
  }
}

inline void tw_decode(BitView label, const TwSchemeMeta& meta, TwDecoded& out) {
  try {
    BitReader r(label);
    out.id = detail::read_identifier(r, meta);
    auto suffix_len = static_cast<std::uint32_t>(r.read_fixed(meta.depth_bits));
    out.full_depth = out.id.depth + suffix_len;
    if (out.full_depth > 63) throw DecodeError("path too long");
    out.full_path = (out.id.path << suffix_len) | r.read_fixed(suffix_len);
    out.gamma_size = static_cast<std::uint32_t>(r.read_fixed(meta.count_bits));
    if (out.gamma_size > max_gamma) throw DecodeError("neighbor count out of range");
    for (std::uint32_t i = 0; i < out.gamma_size; ++i) {
      GammaEntry& e = out.gamma[i];
      e.id.depth = static_cast<std::uint32_t>(r.read_fixed(meta.depth_bits));
      if (e.id.depth > out.full_depth) throw DecodeError("neighbor below the stored path");
      e.id.path = out.full_path >> (out.full_depth - e.id.depth);
      e.id.part_index = detail::read_part_index(r, meta);
      e.in_graph = r.read_bit();
    }
    if (!r.at_end()) throw DecodeError("trailing bits in tw label");
  } catch (const std::underflow_error& e) {
    throw DecodeError(std::string("malformed tw label: ") + e.what());
  }
}

inline TwDecoded tw_decode(BitView label, const TwSchemeMeta& meta) {
  TwDecoded d;
  tw_decode(label, meta, d);
  return d;
}

/// Identifiers of the out-neighbors with their graph-edge flags.
inline std::vector<GammaEntry> tw_gamma(BitView label, const TwSchemeMeta& meta) {
  TwDecoded d = tw_decode(label, meta);
  auto nb = d.neighbors();
  return {nb.begin(), nb.end()};
}

inline bool tw_adjacent_decoded(const TwDecoded& a, const TwDecoded& b) {
  int i = b.find(a.id);
  if (i >= 0 && b.gamma[static_cast<std::size_t>(i)].in_graph) return true;
  int j = a.find(b.id);
  return j >= 0 && a.gamma[static_cast<std::size_t>(j)].in_graph;
}

inline bool tw_adjacent(BitView a, BitView b, const TwSchemeMeta& meta) {
  if (a == b) throw std::invalid_argument("identical labels");
  TwDecoded da, db;
  tw_decode(a, meta, da);
  tw_decode(b, meta, db);
  return tw_adjacent_decoded(da, db);
}

}  // namespace flatlabel
