#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flatlabel/codec.hpp"
#include "flatlabel/flat_labeling.hpp"
#include "flatlabel/product_labeling.hpp"
#include "flatlabel/tw_labeling.hpp"

namespace flatlabel {

enum class SchemeKind : std::uint32_t { tw = 1, product = 2, flat = 3 };

inline std::string to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::tw: return "tw";
    case SchemeKind::product: return "product";
    case SchemeKind::flat: return "flat";
  }
  return "unknown";
}

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "tw") return SchemeKind::tw;
  if (s == "product") return SchemeKind::product;
  if (s == "flat") return SchemeKind::flat;
  throw std::invalid_argument("unknown scheme: " + s);
}

inline constexpr char archive_magic[4] = {'F', 'L', 'B', 'L'};
inline constexpr std::uint32_t archive_version = 1;

/// Labels of one encoding plus the header a decoder needs.
class LabelArchive {
 public:
  using Meta = std::variant<TwSchemeMeta, ProductSchemeMeta, FlatSchemeMeta>;

  LabelArchive() = default;

  LabelArchive(SchemeKind kind, bool fallback, std::uint32_t w, std::uint32_t d, Meta meta,
               const std::vector<BitString>& labels)
      : kind_(kind), fallback_(fallback), w_(w), d_(d), meta_(std::move(meta)), labels_(labels) {
    check_meta();
  }

  static LabelArchive from(const TwEncoding& enc) {
    return {SchemeKind::tw, false, enc.meta.width, 0, enc.meta, enc.labels};
  }
  static LabelArchive from(const ProductEncoding& enc) {
    return {SchemeKind::product, false, enc.meta.host.width, enc.meta.path_len, enc.meta, enc.labels};
  }
  static LabelArchive from(const FlatEncoding& enc) {
    if (enc.fallback)
      return {SchemeKind::flat, true, enc.host_width, enc.fallback_meta.path_len, enc.fallback_meta, enc.labels};
    return {SchemeKind::flat, false, enc.host_width, enc.meta.block, enc.meta, enc.labels};
  }

  SchemeKind kind() const { return kind_; }
  bool fallback() const { return fallback_; }
  std::size_t size() const { return labels_.size(); }
  std::uint32_t w() const { return w_; }
  std::uint32_t d() const { return d_; }
  const Meta& meta() const { return meta_; }
  const LabelStore& labels() const { return labels_; }
  BitView label(std::size_t u) const {
    if (u >= labels_.size()) throw std::out_of_range("vertex outside archive");
    return labels_[u];
  }

  /// Decoder: adjacency from two labels and the header.
  bool adjacent(BitView a, BitView b) const {
    return std::visit(
        [&](const auto& m) -> bool {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, TwSchemeMeta>) return tw_adjacent(a, b, m);
          else if constexpr (std::is_same_v<M, ProductSchemeMeta>) return product_adjacent(a, b, m);
          else return flat_adjacent(a, b, m);
        },
        meta_);
  }

  bool adjacent(std::size_t u, std::size_t v) const { return adjacent(label(u), label(v)); }

  std::vector<std::uint32_t> meta_words() const {
    return std::visit([](const auto& m) { return m.to_words(); }, meta_);
  }

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out(archive_magic, archive_magic + 4);
    auto put = [&](std::uint32_t x) {
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    };
    put(archive_version);
    put(static_cast<std::uint32_t>(kind_));
    put(fallback_ ? 1 : 0);
    put(static_cast<std::uint32_t>(labels_.size()));
    put(w_);
    put(d_);
    auto words = meta_words();
    put(static_cast<std::uint32_t>(words.size()));
    for (auto x : words) put(x);
    for (std::size_t u = 0; u < labels_.size(); ++u) {
      BitView l = labels_[u];
      put(static_cast<std::uint32_t>(l.size()));
      std::size_t i = 0;
      for (; i + 8 <= l.size(); i += 8) out.push_back(static_cast<std::uint8_t>(l.bits(i, 8)));
      if (i < l.size()) {
        auto rest = static_cast<unsigned>(l.size() - i);
        out.push_back(static_cast<std::uint8_t>(l.bits(i, rest) << (8 - rest)));
      }
    }
    return out;
  }

  static LabelArchive deserialize(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto need = [&](std::size_t k) {
      if (bytes.size() - pos < k) throw DecodeError("truncated archive");
    };
    auto get = [&]() {
      need(4);
      std::uint32_t x = 0;
      for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
      pos += 4;
      return x;
    };
    need(4);
    if (std::memcmp(bytes.data(), archive_magic, 4) != 0) throw DecodeError("not a label archive");
    pos = 4;
    if (get() != archive_version) throw DecodeError("unsupported archive version");
    std::uint32_t kind = get();
    if (kind < 1 || kind > 3) throw DecodeError("unknown scheme kind");
    std::uint32_t fallback = get();
    if (fallback > 1) throw DecodeError("bad fallback flag");
    std::uint32_t n = get();
    std::uint32_t w = get();
    std::uint32_t d = get();
    std::uint32_t count = get();
    need(std::size_t{count} * 4);
    std::vector<std::uint32_t> words(count);
    for (auto& x : words) x = get();

    LabelArchive ar;
    ar.kind_ = static_cast<SchemeKind>(kind);
    ar.fallback_ = fallback != 0;
    ar.w_ = w;
    ar.d_ = d;
    auto expect = [&](std::size_t c) {
      if (words.size() != c) throw DecodeError("meta table has wrong size");
    };
    if (ar.kind_ == SchemeKind::tw) {
      expect(TwSchemeMeta::word_count);
      ar.meta_ = TwSchemeMeta::from_words(words);
    } else if (ar.kind_ == SchemeKind::product || ar.fallback_) {
      expect(ProductSchemeMeta::word_count);
      ar.meta_ = ProductSchemeMeta::from_words(words);
    } else {
      expect(FlatSchemeMeta::word_count);
      ar.meta_ = FlatSchemeMeta::from_words(words);
    }
    for (std::uint32_t u = 0; u < n; ++u) {
      std::uint32_t bits = get();
      std::size_t len = (std::size_t{bits} + 7) / 8;
      need(len);
      try {
        ar.labels_.push_back(BitString::from_bytes(bytes.subspan(pos, len), bits));
      } catch (const std::invalid_argument& e) {
        throw DecodeError(std::string("label ") + std::to_string(u) + ": " + e.what());
      }
      pos += len;
    }
    if (pos != bytes.size()) throw DecodeError("trailing bytes after archive");
    ar.check_meta();
    return ar;
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    auto bytes = serialize();
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
  }

  static LabelArchive load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
  }

 private:
  void check_meta() const {
    bool ok = false;
    if (kind_ == SchemeKind::tw) ok = std::holds_alternative<TwSchemeMeta>(meta_);
    else if (kind_ == SchemeKind::product || fallback_) ok = std::holds_alternative<ProductSchemeMeta>(meta_);
    else ok = std::holds_alternative<FlatSchemeMeta>(meta_);
    if (!ok) throw std::invalid_argument("meta does not match scheme kind");
  }

  SchemeKind kind_ = SchemeKind::tw;
  bool fallback_ = false;
  std::uint32_t w_ = 0;
  std::uint32_t d_ = 0;
  Meta meta_;
  LabelStore labels_;
};

}  // namespace flatlabel
