#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace flatlabel;

TEST(Rng, ReproducibleAndBounded) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    auto x = a.below(7);
    EXPECT_EQ(x, b.below(7));
    EXPECT_LT(x, 7u);
    double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_THROW(a.below(0), std::invalid_argument);
}

TEST(Rng, FirstOutputsMatchMersenneTwister) {
  // mt19937_64 seeded with 5489 yields 14514284786278117030 first (C++ standard check value
  // is the 10000th output, 9981545732273789042).
  Rng r(5489);
  EXPECT_EQ(r.next(), 14514284786278117030ULL);
  for (int i = 1; i < 9999; ++i) r.next();
  EXPECT_EQ(r.next(), 9981545732273789042ULL);
}

TEST(GenKTree, SmallestIsClique) {
  for (std::size_t k = 0; k <= 4; ++k) {
    KTreeInstance kt = gen_ktree(1, k + 1, k);
    EXPECT_EQ(kt.graph.edge_count(), k * (k + 1) / 2);
    EXPECT_EQ(kt.decomposition.node_count(), 1u);
  }
  EXPECT_THROW(gen_ktree(1, 2, 3), std::invalid_argument);
}

TEST(GenKTree, Deterministic) {
  KTreeInstance a = gen_ktree(1, 100, 3), b = gen_ktree(1, 100, 3);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.decomposition.bags, b.decomposition.bags);
  KTreeInstance c = gen_ktree(2, 100, 3);
  EXPECT_FALSE(a.graph == c.graph);
}

TEST(GenKTree, FullKTreeEdgeCount) {
  // a k-tree on n vertices has k(k+1)/2 + (n-k-1)k edges
  KTreeInstance kt = gen_ktree(3, 50, 3);
  EXPECT_EQ(kt.graph.edge_count(), 6u + 46u * 3u);
}

TEST(GenKTree, ValidWithWidthK) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::size_t k = seed % 5;
    KTreeInstance kt = gen_ktree(seed, 30 + seed, k, 0.5);
    EXPECT_TRUE(oracle::decomposition_valid(kt.graph, kt.decomposition));
    EXPECT_LE(kt.decomposition.width(), static_cast<int>(k));
  }
}

TEST(GenProduct, KeepProbabilityExtremes) {
  ProductInstance none = gen_product_instance(1, 10, 2, 6, 0.0, 0.7);
  EXPECT_EQ(none.graph.edge_count(), 0u);
  ProductInstance all = gen_product_instance(1, 10, 2, 6, 1.0, 0.7);
  ASSERT_EQ(all.graph.size(), none.graph.size());
  for (Vertex u = 0; u < all.graph.size(); ++u)
    for (Vertex v = u + 1; v < all.graph.size(); ++v)
      EXPECT_EQ(all.graph.adjacent(u, v), strong_product_adjacent(all.embedding, u, v));
}

TEST(GenProduct, ValidAndDeterministic) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ProductInstance a = gen_product_instance(seed, 5 + seed, 1 + seed % 4, 3 + seed % 7, 0.6);
    ProductInstance b = gen_product_instance(seed, 5 + seed, 1 + seed % 4, 3 + seed % 7, 0.6);
    EXPECT_TRUE(validate_embedding(a.graph, a.embedding).ok);
    EXPECT_TRUE(validate_decomposition(a.embedding.host, a.host_decomposition).ok);
    EXPECT_EQ(a.graph, b.graph);
    EXPECT_EQ(a.embedding.map, b.embedding.map);
  }
  EXPECT_THROW(gen_product_instance(1, 0, 1, 3, 0.5), std::invalid_argument);
  EXPECT_THROW(gen_product_instance(1, 4, 1, 3, 1.5), std::invalid_argument);
}

TEST(GenSized, ExactVertexCount) {
  for (std::size_t n : {1u, 2u, 17u, 256u, 1000u}) {
    ProductInstance inst = gen_sized_instance(n, n, 3);
    EXPECT_EQ(inst.graph.size(), n);
    EXPECT_TRUE(validate_embedding(inst.graph, inst.embedding).ok);
  }
}

TEST(GenAdversarial, KindsAreValid) {
  for (const auto& kind : adversarial_kinds()) {
    ProductInstance inst = gen_adversarial(kind, 2, 50, 2);
    EXPECT_TRUE(validate_embedding(inst.graph, inst.embedding).ok) << kind;
    EXPECT_TRUE(validate_decomposition(inst.embedding.host, inst.host_decomposition).ok) << kind;
  }
  EXPECT_EQ(gen_adversarial("single-column", 1, 10).embedding.host.size(), 1u);
  EXPECT_LE(gen_adversarial("tiny-n", 1, 5).graph.size(), 8u);
  EXPECT_THROW(gen_adversarial("spiral", 1, 10), std::invalid_argument);
}
