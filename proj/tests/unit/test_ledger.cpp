#include <gtest/gtest.h>

#include <cmath>

#include "flatlabel/ledger.hpp"

using namespace flatlabel;

// The ledger constants must cover the worst-case field layout on the whole
// sweep range, not only the measured labels.
TEST(Ledger, LayoutFitsTwBound) {
  for (int e = 4; e <= 16; ++e) {
    std::size_t n = std::size_t{1} << e;
    for (std::size_t k = 1; k <= 4; ++k) EXPECT_LE(tw_layout_bound(n, k), tw_length_bound(n, k)) << n << " " << k;
  }
}

TEST(Ledger, LayoutFitsFlatBound) {
  for (int e = 8; e <= 16; ++e) {
    std::size_t n = std::size_t{1} << e;
    for (std::size_t w = 1; w <= 4; ++w) EXPECT_LE(flat_layout_bound(n, w), flat_length_bound(n, w)) << n << " " << w;
  }
}

TEST(Ledger, BoundsGrowWithN) {
  EXPECT_LT(flat_length_bound(256, 3), flat_length_bound(65536, 3));
  EXPECT_NEAR(flat_length_bound(65536, 3) - ledger_slack(65536, 3), 4.0 / 3.0 * 16, 1e-9);
  EXPECT_NEAR(tw_q_length_bound(32, 1 << 14, 3) - ledger_slack(1 << 14, 3), 5.0, 1e-9);
}
