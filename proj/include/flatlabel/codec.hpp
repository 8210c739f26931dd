#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flatlabel {

/// Bits needed to write any value in [0, max_value]; 0 for max_value == 0.
constexpr unsigned bits_for(std::uint64_t max_value) {
  return static_cast<unsigned>(std::bit_width(max_value));
}

namespace detail {

// Bit i of a word array lives in word i / 64 at position 63 - i % 64.
inline std::uint64_t get_bits(const std::uint64_t* words, std::size_t pos, unsigned width) {
  if (width == 0) return 0;
  std::size_t wi = pos >> 6;
  unsigned bo = static_cast<unsigned>(pos & 63);
  std::uint64_t hi = words[wi] << bo;
  if (bo + width > 64) hi |= words[wi + 1] >> (64 - bo);
  return hi >> (64 - width);
}

}  // namespace detail

/// Non-owning view of a bit sequence.
class BitView {
 public:
  BitView() = default;
  BitView(const std::uint64_t* words, std::size_t offset, std::size_t length)
      : words_(words), offset_(offset), length_(length) {}

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }

  bool operator[](std::size_t i) const { return detail::get_bits(words_, offset_ + i, 1) != 0; }

  /// Reads `width` (<= 64) bits starting at `pos`, big-endian.
  std::uint64_t bits(std::size_t pos, unsigned width) const {
    return detail::get_bits(words_, offset_ + pos, width);
  }

  BitView subview(std::size_t pos, std::size_t len) const {
    if (pos + len > length_) throw std::underflow_error("bit view out of range");
    return {words_, offset_ + pos, len};
  }

  std::string to_string() const {
    std::string s;
    s.reserve(length_);
    for (std::size_t i = 0; i < length_; ++i) s.push_back((*this)[i] ? '1' : '0');
    return s;
  }

  friend bool operator==(const BitView& a, const BitView& b) {
    if (a.length_ != b.length_) return false;
    std::size_t i = 0;
    for (; i + 64 <= a.length_; i += 64)
      if (a.bits(i, 64) != b.bits(i, 64)) return false;
    unsigned rest = static_cast<unsigned>(a.length_ - i);
    return a.bits(i, rest) == b.bits(i, rest);
  }

 private:
  const std::uint64_t* words_ = nullptr;
  std::size_t offset_ = 0;
  std::size_t length_ = 0;
};

/// Growable bit sequence; unused trailing bits of the last word stay zero.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(std::string_view bits) {
    BitString s;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0/1");
      s.push_back(c == '1');
    }
    return s;
  }

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }
  const std::vector<std::uint64_t>& words() const { return words_; }

  BitView view() const { return {words_.data(), 0, length_}; }
  operator BitView() const { return view(); }  // NOLINT(google-explicit-constructor)

  bool operator[](std::size_t i) const { return view()[i]; }

  void push_back(bool bit) { append_bits(bit ? 1 : 0, 1); }

  /// Appends `width` bits of `value`, big-endian. Throws if value >= 2^width.
  void append_bits(std::uint64_t value, unsigned width) {
    if (width > 64) throw std::invalid_argument("field wider than 64 bits");
    if (width < 64 && (value >> width) != 0)
      throw std::overflow_error("value " + std::to_string(value) + " does not fit in " +
                                std::to_string(width) + " bits");
    if (width == 0) return;
    std::size_t new_len = length_ + width;
    words_.resize((new_len + 63) / 64, 0);
    std::size_t wi = length_ >> 6;
    unsigned bo = static_cast<unsigned>(length_ & 63);
    std::uint64_t v = value << (64 - width);
    words_[wi] |= v >> bo;
    if (bo + width > 64) words_[wi + 1] |= v << (64 - bo);
    length_ = new_len;
  }

  void append(BitView bits) {
    std::size_t i = 0;
    for (; i + 64 <= bits.size(); i += 64) append_bits(bits.bits(i, 64), 64);
    unsigned rest = static_cast<unsigned>(bits.size() - i);
    append_bits(bits.bits(i, rest), rest);
  }

  std::string to_string() const { return view().to_string(); }

  /// Byte form: bit 0 is the MSB of byte 0; only the last byte is padded.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((length_ + 7) / 8);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<std::uint8_t>(words_[i / 8] >> (56 - 8 * (i % 8)));
    return out;
  }

  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_length) {
    if ((bit_length + 7) / 8 != bytes.size())
      throw std::invalid_argument("byte count does not match bit length");
    BitString s;
    s.words_.assign((bit_length + 63) / 64, 0);
    for (std::size_t i = 0; i < bytes.size(); ++i)
      s.words_[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (56 - 8 * (i % 8));
    unsigned pad = static_cast<unsigned>(bytes.size() * 8 - bit_length);
    if (pad != 0 && (bytes.back() & ((1u << pad) - 1)) != 0)
      throw std::invalid_argument("nonzero padding bits");
    s.length_ = bit_length;
    return s;
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t length_ = 0;
};

inline void write_fixed(BitString& s, std::uint64_t value, unsigned width) {
  s.append_bits(value, width);
}

/// Appends the payload length in `prefix_width` bits, then the payload.
inline void write_length_prefixed(BitString& s, BitView payload, unsigned prefix_width) {
  if (prefix_width < 64 && (payload.size() >> prefix_width) != 0)
    throw std::overflow_error("payload of " + std::to_string(payload.size()) +
                              " bits too long for a " + std::to_string(prefix_width) +
                              "-bit length prefix");
  s.append_bits(payload.size(), prefix_width);
  s.append(payload);
}

/// Sequential reader with a private cursor.
class BitReader {
 public:
  explicit BitReader(BitView source) : source_(source) {}

  std::size_t position() const { return cursor_; }
  std::size_t remaining() const { return source_.size() - cursor_; }
  bool at_end() const { return cursor_ == source_.size(); }

  std::uint64_t read_fixed(unsigned width) {
    require(width);
    std::uint64_t v = source_.bits(cursor_, width);
    cursor_ += width;
    return v;
  }

  bool read_bit() { return read_fixed(1) != 0; }

  BitView read_view(std::size_t length) {
    require(length);
    BitView v = source_.subview(cursor_, length);
    cursor_ += length;
    return v;
  }

  BitView read_length_prefixed(unsigned prefix_width) {
    std::size_t len = read_fixed(prefix_width);
    return read_view(len);
  }

  BitView rest() { return read_view(remaining()); }

 private:
  void require(std::size_t width) const {
    if (width > source_.size() - cursor_)
      throw std::underflow_error("truncated bit stream: need " + std::to_string(width) +
                                 " bits, have " + std::to_string(source_.size() - cursor_));
  }

  BitView source_;
  std::size_t cursor_ = 0;
};

/// All labels of one encoding in a single word pool; each label starts on a
/// word boundary.
class LabelStore {
 public:
  LabelStore() = default;

  explicit LabelStore(const std::vector<BitString>& labels) {
    for (const auto& l : labels) push_back(l);
  }

  void push_back(BitView label) {
    starts_.push_back(words_.size());
    lengths_.push_back(label.size());
    std::size_t i = 0;
    for (; i + 64 <= label.size(); i += 64) words_.push_back(label.bits(i, 64));
    unsigned rest = static_cast<unsigned>(label.size() - i);
    if (rest != 0) words_.push_back(label.bits(i, rest) << (64 - rest));
  }

  std::size_t size() const { return starts_.size(); }

  BitView operator[](std::size_t u) const { return {words_.data() + starts_[u], 0, lengths_[u]}; }

  BitString copy(std::size_t u) const {
    BitString s;
    s.append((*this)[u]);
    return s;
  }

  std::size_t max_bits() const {
    std::size_t m = 0;
    for (auto l : lengths_) m = std::max(m, l);
    return m;
  }

  double mean_bits() const {
    if (lengths_.empty()) return 0.0;
    double total = 0;
    for (auto l : lengths_) total += static_cast<double>(l);
    return total / static_cast<double>(lengths_.size());
  }

 private:
  std::vector<std::uint64_t> words_;
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> lengths_;
};

}  // namespace flatlabel
