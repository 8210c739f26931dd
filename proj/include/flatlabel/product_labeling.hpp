#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatlabel/codec.hpp"
#include "flatlabel/embedding.hpp"
#include "flatlabel/graph.hpp"
#include "flatlabel/treewidth.hpp"
#include "flatlabel/tw_labeling.hpp"

namespace flatlabel {

enum class CoordTag : std::uint8_t { zero = 0, one = 1, middle = 2, d_minus_1 = 3, d = 4 };

inline constexpr unsigned coord_tag_bits = 3;

/// A path coordinate as seen by the decoder. Uncompressed coordinates are
/// carried as MIDDLE with their value.
struct CoordField {
  CoordTag tag = CoordTag::middle;
  std::uint32_t value = 0;

  bool has_value() const { return tag == CoordTag::one || tag == CoordTag::middle || tag == CoordTag::d_minus_1; }
  friend bool operator==(const CoordField&, const CoordField&) = default;
};

/// Compression needs five distinct tag classes, i.e. path length d >= 4.
inline bool compression_applies(std::uint32_t path_len) { return path_len >= 4; }

inline CoordField make_coord_field(std::uint32_t i, std::uint32_t path_len, bool compressed) {
  if (i > path_len) throw std::out_of_range("coordinate beyond path");
  if (!compressed) return {CoordTag::middle, i};
  if (!compression_applies(path_len)) throw std::invalid_argument("compression needs d >= 4");
  if (i == 0) return {CoordTag::zero, 0};
  if (i == path_len) return {CoordTag::d, 0};
  if (i == 1) return {CoordTag::one, 1};
  if (i == path_len - 1) return {CoordTag::d_minus_1, i};
  return {CoordTag::middle, i};
}

/// a - b when |a - b| <= 1, nullopt otherwise. Never needs d.
inline std::optional<int> coord_diff(const CoordField& a, const CoordField& b) {
  auto near = [](std::int64_t x) -> std::optional<int> {
    if (x >= -1 && x <= 1) return static_cast<int>(x);
    return std::nullopt;
  };
  if (a.has_value() && b.has_value())
    return near(static_cast<std::int64_t>(a.value) - static_cast<std::int64_t>(b.value));
  if (!a.has_value() && !b.has_value()) {
    if (a.tag == b.tag) return 0;
    return std::nullopt;
  }
  const bool flip = a.has_value();
  const CoordField& bare = flip ? b : a;
  const CoordField& full = flip ? a : b;
  std::optional<int> r;
  if (bare.tag == CoordTag::zero) {
    if (full.tag != CoordTag::d_minus_1) r = near(-static_cast<std::int64_t>(full.value));
  } else if (full.tag == CoordTag::d_minus_1) {
    r = 1;
  }
  if (r && flip) r = -*r;
  return r;
}

struct ProductSchemeMeta {
  TwSchemeMeta host;
  std::uint32_t n = 0;
  std::uint32_t path_len = 0;
  std::uint32_t slots = 0;  // w + 1 host candidates in the adjacency code
  std::uint32_t compressed = 0;
  std::uint32_t coord_bits = 0;
  std::uint32_t kappa_len_bits = 0;
  std::uint32_t coord_len_bits = 0;

  static constexpr std::size_t word_count = 7 + TwSchemeMeta::word_count;

  std::uint32_t code_bits() const { return 3 * slots; }

  std::vector<std::uint32_t> to_words() const {
    std::vector<std::uint32_t> w = {n, path_len, slots, compressed, coord_bits, kappa_len_bits, coord_len_bits};
    auto h = host.to_words();
    w.insert(w.end(), h.begin(), h.end());
    return w;
  }
  static ProductSchemeMeta from_words(std::span<const std::uint32_t> w) {
    if (w.size() < word_count) throw DecodeError("truncated product meta");
    ProductSchemeMeta m;
    m.n = w[0];
    m.path_len = w[1];
    m.slots = w[2];
    m.compressed = w[3];
    m.coord_bits = w[4];
    m.kappa_len_bits = w[5];
    m.coord_len_bits = w[6];
    m.host = TwSchemeMeta::from_words(w.subspan(7));
    if (m.slots > max_gamma + 1) throw DecodeError("adjacency code too wide");
    return m;
  }
  friend bool operator==(const ProductSchemeMeta&, const ProductSchemeMeta&) = default;
};

struct ProductEncoding {
  ProductSchemeMeta meta;
  std::vector<BitString> labels;
  TwEncoding host;
};

inline void write_coord_field(BitString& s, const CoordField& c, const ProductSchemeMeta& meta) {
  if (meta.compressed) {
    s.append_bits(static_cast<std::uint64_t>(c.tag), coord_tag_bits);
    if (c.has_value()) s.append_bits(c.value, meta.coord_bits);
  } else {
    s.append_bits(c.value, meta.coord_bits);
  }
}

inline CoordField read_coord_field(BitView bits, const ProductSchemeMeta& meta) {
  BitReader r(bits);
  CoordField c;
  if (meta.compressed) {
    auto tag = r.read_fixed(coord_tag_bits);
    if (tag > static_cast<std::uint64_t>(CoordTag::d)) throw DecodeError("bad coordinate tag");
    c.tag = static_cast<CoordTag>(tag);
    if (c.has_value()) c.value = static_cast<std::uint32_t>(r.read_fixed(meta.coord_bits));
  } else {
    c.value = static_cast<std::uint32_t>(r.read_fixed(meta.coord_bits));
  }
  if (!r.at_end()) throw DecodeError("trailing bits in coordinate field");
  return c;
}

/// Labels for a graph given with an embedding into H x P and a
/// decomposition of H. Host vertices carrying q get the short host labels.
inline ProductEncoding product_encode(const Graph& g, const ProductEmbedding& e, const TreeDecomposition& td_host,
                                      const VertexSet& q = {}, bool compress_endpoints = false) {
  EmbeddingReport report = validate_embedding(g, e);
  if (!report.ok) throw std::invalid_argument(report.summary());
  DecompositionReport host_report = validate_decomposition(e.host, td_host);
  if (!host_report.ok) throw std::invalid_argument("host decomposition: " + host_report.summary());
  q.check_bounds(g.size());

  const std::size_t n = g.size();
  std::vector<Vertex> host_q;
  for (Vertex u : q) host_q.push_back(e.map[u].host);

  ProductEncoding enc;
  enc.host = tw_encode(e.host, td_host, VertexSet(std::move(host_q)));
  ProductSchemeMeta& meta = enc.meta;
  meta.host = enc.host.meta;
  meta.n = static_cast<std::uint32_t>(n);
  meta.path_len = e.path_len;
  meta.slots = meta.host.width + 1;
  meta.compressed = compress_endpoints && compression_applies(e.path_len) ? 1 : 0;
  meta.coord_bits = bits_for(e.path_len);

  // Graph vertices on each host fiber, sorted by coordinate.
  const std::size_t hn = e.host.size();
  std::vector<std::uint32_t> start(hn + 1, 0);
  for (Vertex u = 0; u < n; ++u) ++start[e.map[u].host + 1];
  for (std::size_t v = 0; v < hn; ++v) start[v + 1] += start[v];
  std::vector<Vertex> fiber(n);
  {
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (Vertex u = 0; u < n; ++u) fiber[fill[e.map[u].host]++] = u;
    for (std::size_t v = 0; v < hn; ++v)
      std::sort(fiber.begin() + start[v], fiber.begin() + start[v + 1],
                [&](Vertex a, Vertex b) { return e.map[a].coord < e.map[b].coord; });
  }
  auto at = [&](Vertex host, std::int64_t coord) -> Vertex {
    if (coord < 0 || coord > static_cast<std::int64_t>(e.path_len)) return no_vertex;
    auto first = fiber.begin() + start[host], last = fiber.begin() + start[host + 1];
    auto it = std::lower_bound(first, last, coord, [&](Vertex a, std::int64_t c) {
      return static_cast<std::int64_t>(e.map[a].coord) < c;
    });
    return it != last && e.map[*it].coord == coord ? *it : no_vertex;
  };

  std::vector<CoordField> coords(n);
  std::size_t max_kappa = 0, max_coord = 0;
  for (Vertex u = 0; u < n; ++u) {
    coords[u] = make_coord_field(e.map[u].coord, e.path_len, meta.compressed != 0);
    BitString c;
    write_coord_field(c, coords[u], meta);
    max_coord = std::max(max_coord, c.size());
    max_kappa = std::max(max_kappa, enc.host.labels[e.map[u].host].size());
  }
  meta.kappa_len_bits = bits_for(max_kappa);
  meta.coord_len_bits = bits_for(max_coord);

  enc.labels.resize(n);
  for (Vertex u = 0; u < n; ++u) {
    const Placement& p = e.map[u];
    BitString coord;
    write_coord_field(coord, coords[u], meta);
    const BitString& kappa = enc.host.labels[p.host];
    BitString& s = enc.labels[u];
    s.append_bits(kappa.size(), meta.kappa_len_bits);
    s.append_bits(coord.size(), meta.coord_len_bits);
    s.append(kappa);
    s.append(coord);
    const auto& gamma = enc.host.gamma_vertices[p.host];
    for (std::uint32_t slot = 0; slot < meta.slots; ++slot) {
      for (int t = -1; t <= 1; ++t) {
        bool bit = false;
        if (slot <= gamma.size()) {
          Vertex host = slot == 0 ? p.host : gamma[slot - 1];
          Vertex other = at(host, static_cast<std::int64_t>(p.coord) + t);
          bit = other != no_vertex && other != u && g.adjacent(u, other);
        }
        s.push_back(bit);
      }
    }
  }
  return enc;
}

/// Label fields without decoding the host label.
struct ProductParts {
  BitView kappa;
  CoordField coord;
  BitView code;
};

inline ProductParts product_parts(BitView label, const ProductSchemeMeta& meta) {
  try {
    BitReader r(label);
    auto kl = r.read_fixed(meta.kappa_len_bits);
    auto cl = r.read_fixed(meta.coord_len_bits);
    ProductParts parts;
    parts.kappa = r.read_view(kl);
    parts.coord = read_coord_field(r.read_view(cl), meta);
    parts.code = r.rest();
    if (parts.code.size() != meta.code_bits()) throw DecodeError("adjacency code has wrong length");
    return parts;
  } catch (const std::underflow_error& e) {
    throw DecodeError(std::string("malformed product label: ") + e.what());
  }
}

inline bool product_adjacent(BitView a, BitView b, const ProductSchemeMeta& meta) {
  if (a == b) throw std::invalid_argument("identical labels");
  ProductParts pa = product_parts(a, meta);
  ProductParts pb = product_parts(b, meta);
  TwDecoded ka, kb;
  tw_decode(pa.kappa, meta.host, ka);
  tw_decode(pb.kappa, meta.host, kb);

  // Find the label whose candidate list names the other's host vertex.
  const ProductParts* own = nullptr;
  const ProductParts* other = nullptr;
  std::uint32_t slot = 0;
  if (ka.id == kb.id) {
    own = &pa, other = &pb;
  } else if (int j = kb.find(ka.id); j >= 0) {
    own = &pb, other = &pa, slot = static_cast<std::uint32_t>(j) + 1;
  } else if (int i = ka.find(kb.id); i >= 0) {
    own = &pa, other = &pb, slot = static_cast<std::uint32_t>(i) + 1;
  } else {
    return false;
  }
  std::optional<int> t = coord_diff(other->coord, own->coord);
  if (!t) return false;
  if (slot >= meta.slots) throw DecodeError("candidate outside adjacency code");
  return own->code[3 * slot + static_cast<std::size_t>(*t + 1)];
}

}  // namespace flatlabel
