#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "flatlabel/codec.hpp"
#include "flatlabel/flat_labeling.hpp"

namespace flatlabel {

/// Constants of the label-length ledger, fixed from the worst-case layout
/// below (w <= 4, 2^8 <= n <= 2^16) and never refit to measurements.
inline constexpr double ledger_c = 16.0;
inline constexpr double ledger_c0 = 112.0;

inline double log2_of(double x) { return std::log2(std::max(x, 2.0)); }

/// C * (k+1) * log log n + C0.
inline double ledger_slack(std::size_t n, std::size_t k) {
  return ledger_c * static_cast<double>(k + 1) * log2_of(log2_of(static_cast<double>(n))) + ledger_c0;
}

inline double tw_length_bound(std::size_t n, std::size_t k) {
  return log2_of(static_cast<double>(n)) + ledger_slack(n, k);
}

inline double tw_q_length_bound(std::size_t q, std::size_t n, std::size_t k) {
  return log2_of(static_cast<double>(q)) + ledger_slack(n, k);
}

inline double product_length_bound(std::size_t n, std::size_t d, std::size_t w) {
  return log2_of(static_cast<double>(n)) + std::log2(static_cast<double>(d) + 1) + ledger_slack(n, w);
}

inline double flat_length_bound(std::size_t n, std::size_t w) {
  return 4.0 / 3.0 * log2_of(static_cast<double>(n)) + ledger_slack(n, w);
}

/// Longest possible tw label when every field takes its worst width: height
/// floor(log2 n) + 8 (or floor(log2 (q (k+1))) + 8 on the saving set) and
/// parts of 6 (k+1) ceil(log2 n) vertices.
inline std::size_t tw_layout_bound(std::size_t n, std::size_t k, std::size_t q = 0) {
  const auto lg = static_cast<std::size_t>(std::floor(log2_of(static_cast<double>(n))));
  const std::size_t h = lg + 8;
  const std::size_t path =
      q == 0 ? h : static_cast<std::size_t>(std::floor(log2_of(static_cast<double>(q * (k + 1))))) + 8;
  const std::size_t part = 6 * (k + 1) * static_cast<std::size_t>(std::ceil(log2_of(static_cast<double>(n))));
  const std::size_t bp = bits_for(part - 1), pw = bits_for(bits_for(part)), depth = bits_for(h);
  return scheme_tag_bits + 2 * depth + path + pw + bp + bits_for(k) + k * (depth + pw + bp + 1);
}

inline std::size_t product_layout_bound(std::size_t host_n, std::size_t d, std::size_t w, std::size_t q = 0,
                                        bool endpoint = false) {
  const std::size_t kappa = tw_layout_bound(host_n, w, q);
  const std::size_t coord = endpoint ? coord_tag_bits : coord_tag_bits + bits_for(d);
  return bits_for(kappa) + bits_for(coord_tag_bits + bits_for(d)) + kappa + coord + 3 * (w + 1);
}

inline std::size_t flat_layout_bound(std::size_t n, std::size_t w) {
  const std::uint32_t d = block_width(n);
  const std::size_t border = 2 * n / d + 2;
  const std::size_t l1 = tw_layout_bound(border, 2 * w + 1);
  const std::size_t b = 1 + bits_for(l1) + l1 + product_layout_bound(n, d - 1, w, border, true);
  const std::size_t i = 1 + product_layout_bound(n, d - 1, w);
  return std::max(b, i);
}

}  // namespace flatlabel
