#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

using namespace flatlabel;

namespace {

std::vector<std::int32_t> random_tree(Rng& rng, std::size_t m) {
  std::vector<std::int32_t> parent(m, -1);
  for (std::size_t i = 1; i < m; ++i) parent[i] = static_cast<std::int32_t>(rng.below(i));
  return parent;
}

// Heaviest component of the forest once `cut` nodes are removed.
std::int64_t heaviest_forest_component(const std::vector<std::int32_t>& parent, const std::vector<std::int64_t>& w,
                                       const std::vector<std::uint32_t>& cut) {
  std::vector<bool> removed(parent.size(), false);
  for (auto x : cut) removed[x] = true;
  std::vector<Edge> edges;
  for (std::size_t x = 0; x < parent.size(); ++x)
    if (parent[x] >= 0) edges.emplace_back(static_cast<Vertex>(x), static_cast<Vertex>(parent[x]));
  Graph tree(parent.size(), edges);
  std::int64_t best = 0;
  for (const auto& comp : oracle::components_without(tree, removed)) {
    std::int64_t s = 0;
    for (Vertex v : comp) s += w[v];
    best = std::max(best, s);
  }
  return best;
}

std::int64_t heaviest_component(const Graph& g, const WeightFn<std::int64_t>& w, const VertexSet& z) {
  std::vector<bool> removed(g.size(), false);
  for (Vertex v : z) removed[v] = true;
  std::int64_t best = 0;
  for (const auto& comp : oracle::components_without(g, removed)) {
    std::int64_t s = 0;
    for (Vertex v : comp) s += w[v];
    best = std::max(best, s);
  }
  return best;
}

Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

TreeDecomposition path_decomposition(std::size_t n) {
  TreeDecomposition td;
  for (Vertex i = 0; i + 1 < n; ++i) {
    td.parent.push_back(static_cast<std::int32_t>(i) - 1);
    td.bags.push_back({i, i + 1});
  }
  return td;
}

}  // namespace

TEST(TreeSeparator, StarSelectsRoot) {
  std::vector<std::int32_t> parent = {-1, 0, 0};
  std::vector<std::int64_t> w = {1, 1, 1};
  auto s = tree_balanced_separator<std::int64_t>(parent, w, Epsilon(1, 2));
  EXPECT_EQ(s, (std::vector<std::uint32_t>{0}));
  EXPECT_EQ(heaviest_forest_component(parent, w, s), 1);
}

TEST(TreeSeparator, ZeroWeightGivesEmptySet) {
  Rng rng(3);
  auto parent = random_tree(rng, 50);
  std::vector<std::int64_t> w(50, 0);
  EXPECT_TRUE(tree_balanced_separator<std::int64_t>(parent, w, Epsilon(1, 4)).empty());
}

TEST(TreeSeparator, RandomTreesMeetBothBounds) {
  Rng rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    std::size_t m = 1 + rng.below(500);
    auto parent = random_tree(rng, m);
    std::vector<std::int64_t> w(m);
    for (auto& x : w) x = static_cast<std::int64_t>(rng.below(10));
    Epsilon eps(1, std::int64_t{2} << rng.below(3));
    auto s = tree_balanced_separator<std::int64_t>(parent, w, eps);
    std::int64_t total = std::accumulate(w.begin(), w.end(), std::int64_t{0});
    EXPECT_LE(static_cast<std::int64_t>(s.size()), eps.floor_inverse());
    EXPECT_LE(heaviest_forest_component(parent, w, s) * eps.den, total * eps.num);
  }
}

TEST(TreeSeparator, RejectsUnorderedTree) {
  std::vector<std::int32_t> parent = {1, -1};
  std::vector<std::int64_t> w = {1, 1};
  EXPECT_THROW(tree_balanced_separator<std::int64_t>(parent, w, Epsilon(1, 2)), std::invalid_argument);
}

TEST(TwSeparator, ZeroWeights) {
  KTreeInstance kt = gen_ktree(5, 40, 2);
  WeightFn<std::int64_t> w(std::vector<std::int64_t>(40, 0));
  VertexSet z = tw_balanced_separator(kt.graph, kt.decomposition, w, Epsilon(1, 2));
  EXPECT_EQ(heaviest_component(kt.graph, w, z), 0);
}

TEST(TwSeparator, PathHalves) {
  for (std::size_t n : {2u, 3u, 10u, 33u, 100u}) {
    Graph g = path(n);
    auto w = WeightFn<std::int64_t>::unit(n);
    VertexSet z = tw_balanced_separator(g, path_decomposition(n), w, Epsilon(1, 2));
    EXPECT_LE(z.size(), 4u);
    EXPECT_LE(2 * heaviest_component(g, w, z), static_cast<std::int64_t>(n));
  }
}

TEST(TwSeparator, RandomPartialKTrees) {
  Rng rng(23);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    std::size_t k = 1 + seed % 4;
    KTreeInstance kt = gen_ktree(seed, 30 + rng.below(200), k, 0.7);
    std::vector<std::int64_t> wv(kt.graph.size());
    for (auto& x : wv) x = static_cast<std::int64_t>(rng.below(5));
    WeightFn<std::int64_t> w(wv);
    for (Epsilon eps : {Epsilon(1, 2), Epsilon(1, 4)}) {
      VertexSet z = tw_balanced_separator(kt.graph, kt.decomposition, w, eps);
      EXPECT_LE(static_cast<std::int64_t>(z.size()), eps.ceil_inverse() * static_cast<std::int64_t>(k + 1));
      EXPECT_LE(heaviest_component(kt.graph, w, z) * eps.den, w.total() * eps.num);
    }
  }
}

TEST(TwoWeightPartition, ZeroFirstWeightFillsGreedily) {
  WeightFn<std::int64_t> w1(std::vector<std::int64_t>(6, 0));
  WeightFn<std::int64_t> w2(std::vector<std::int64_t>{1, 1, 1, 1, 1, 1});
  auto p = two_weight_partition(w1, w2, Epsilon(1, 4));
  EXPECT_EQ(p.y, (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(p.z, (std::vector<std::uint32_t>{3, 4, 5}));
}

TEST(TwoWeightPartition, FourUniformItems) {
  auto w = WeightFn<std::int64_t>::unit(4);
  auto p = two_weight_partition(w, w, Epsilon(1, 4));
  EXPECT_EQ(p.y.size(), 2u);
  EXPECT_EQ(p.z.size(), 2u);
}

TEST(TwoWeightPartition, HeavyItemRejected) {
  WeightFn<std::int64_t> w1(std::vector<std::int64_t>{10, 1, 1});
  auto w2 = WeightFn<std::int64_t>::unit(3);
  try {
    two_weight_partition(w1, w2, Epsilon(1, 2));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("element too heavy"), std::string::npos);
  }
}

TEST(TwoWeightPartition, RandomSmallInstancesAgainstExhaustiveSearch) {
  Rng rng(99);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t m = 1 + rng.below(12);
    std::vector<std::int64_t> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = static_cast<std::int64_t>(rng.below(4));
      b[i] = static_cast<std::int64_t>(rng.below(4));
    }
    Epsilon eps(1, 2 + static_cast<std::int64_t>(rng.below(7)));
    WeightFn<std::int64_t> w1(a), w2(b);
    bool pre = true;
    for (std::size_t i = 0; i < m; ++i)
      pre = pre && a[i] * eps.den <= eps.num * w1.total() && b[i] * eps.den <= eps.num * w2.total();
    if (!pre) {
      EXPECT_THROW(two_weight_partition(w1, w2, eps), std::invalid_argument);
      continue;
    }
    ++checked;
    auto p = two_weight_partition(w1, w2, eps);
    std::vector<int> seen(m, 0);
    for (auto i : p.y) ++seen[i];
    for (auto i : p.z) ++seen[i];
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    // (1/2 + 3 eps) * total, scaled by 2 * den
    auto within = [&](const std::vector<std::uint32_t>& side, const std::vector<std::int64_t>& w, std::int64_t total) {
      std::int64_t s = 0;
      for (auto i : side) s += w[i];
      return 2 * eps.den * s <= (eps.den + 6 * eps.num) * total;
    };
    EXPECT_TRUE(within(p.y, a, w1.total()) && within(p.z, a, w1.total()));
    EXPECT_TRUE(within(p.y, b, w2.total()) && within(p.z, b, w2.total()));
    if (!p.order.empty() && w1.total() > 0 && w2.total() > 0) {
      std::int64_t prefix = 0;
      for (auto i : p.order) {
        prefix += a[i] * w2.total() - b[i] * w1.total();
        EXPECT_LE(std::abs(prefix) * eps.den, 2 * eps.num * w1.total() * w2.total());
      }
    }
    bool exists = false;
    for (std::uint32_t mask = 0; mask < (1u << m) && !exists; ++mask) {
      std::vector<std::uint32_t> y, z;
      for (std::uint32_t i = 0; i < m; ++i) (mask >> i & 1 ? y : z).push_back(i);
      exists = within(y, a, w1.total()) && within(z, a, w1.total()) && within(y, b, w2.total()) &&
               within(z, b, w2.total());
    }
    EXPECT_TRUE(exists);
  }
  EXPECT_GT(checked, 100);
}

TEST(Split, EmptyGraph) {
  Graph g;
  TreeDecomposition td;
  auto r = split(g, td, WeightFn<std::int64_t>{}, WeightFn<std::int64_t>{}, Epsilon(1, 4));
  EXPECT_TRUE(r.a.empty() && r.x.empty() && r.b.empty());
}

TEST(Split, PathWithMarkedEnds) {
  Graph g = path(16);
  auto w1 = WeightFn<std::int64_t>::unit(16);
  auto w2 = WeightFn<std::int64_t>::indicator(16, VertexSet({0, 15}));
  auto r = split(g, path_decomposition(16), w1, w2, Epsilon(1, 4));
  for (auto [u, v] : g.edges()) {
    EXPECT_FALSE(r.a.contains(u) && r.b.contains(v));
    EXPECT_FALSE(r.b.contains(u) && r.a.contains(v));
  }
  EXPECT_EQ(r.a.size() + r.x.size() + r.b.size(), 16u);
  EXPECT_LE(r.a.size(), 12u);
  EXPECT_LE(r.b.size(), 12u);
  auto marked = [](const VertexSet& s) { return (s.contains(0) ? 1 : 0) + (s.contains(15) ? 1 : 0); };
  EXPECT_LE(marked(r.a), 1);
  EXPECT_LE(marked(r.b), 1);
}

TEST(Split, RandomPartialKTrees) {
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::size_t k = 1 + seed % 4;
    std::size_t n = 20 + rng.below(380);
    KTreeInstance kt = gen_ktree(seed, n, k, 0.7);
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v)
      if (rng.bernoulli(0.2)) s.push_back(v);
    auto w1 = WeightFn<std::int64_t>::unit(n);
    auto w2 = WeightFn<std::int64_t>::indicator(n, VertexSet(s));
    Epsilon eps(1, 8);
    auto r = split(kt.graph, kt.decomposition, w1, w2, eps);
    for (auto [u, v] : kt.graph.edges()) {
      EXPECT_FALSE(r.a.contains(u) && r.b.contains(v));
      EXPECT_FALSE(r.b.contains(u) && r.a.contains(v));
    }
    EXPECT_EQ(r.a.size() + r.x.size() + r.b.size(), n);
    EXPECT_LE(static_cast<std::int64_t>(r.x.size()), 2 * eps.divided_by(3).ceil_inverse() *
                                                         static_cast<std::int64_t>(k + 1));
    auto weigh = [](const VertexSet& side, const WeightFn<std::int64_t>& w) {
      std::int64_t t = 0;
      for (Vertex v : side) t += w[v];
      return t;
    };
    for (const auto* w : {&w1, &w2}) {
      EXPECT_LE(2 * weigh(r.a, *w) * eps.den, (eps.den + 2 * eps.num) * w->total());
      EXPECT_LE(2 * weigh(r.b, *w) * eps.den, (eps.den + 2 * eps.num) * w->total());
    }
  }
}

TEST(Bidecomposition, SingleEdgeIsOneNode) {
  Graph g(2, std::vector<Edge>{{0, 1}});
  TreeDecomposition td{{-1}, {{0, 1}}};
  Bidecomposition bd = build_bidecomposition(g, td, VertexSet{});
  EXPECT_EQ(bd.node_count(), 1u);
  EXPECT_EQ(bd.height(), 0u);
  EXPECT_EQ(bd.alpha[0], bd.alpha[1]);
}

TEST(Bidecomposition, RandomInstancesMeetStructuralBounds) {
  Rng rng(8);
  for (std::size_t n : {64u, 256u, 1024u}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::size_t k = 1 + seed % 4;
      KTreeInstance kt = gen_ktree(seed + n, n, k, 0.8);
      auto s_size = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
      std::vector<Vertex> all(n);
      std::iota(all.begin(), all.end(), Vertex{0});
      for (std::size_t i = 0; i < s_size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
      VertexSet s(std::vector<Vertex>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(s_size)));
      Bidecomposition bd = build_bidecomposition(kt.graph, kt.decomposition, s);

      EXPECT_LE(bd.height(), std::log2(n) + 8);
      for (Vertex v : s) EXPECT_LE(bd.depth[bd.alpha[v]], std::log2(s_size) + 8);
      EXPECT_LE(bd.max_part(), 6 * (k + 1) * static_cast<std::size_t>(ceil_log2(n)));
      for (auto [u, v] : kt.graph.edges()) EXPECT_TRUE(bd.related(bd.alpha[u], bd.alpha[v]));
      std::vector<int> seen(n, 0);
      for (std::size_t x = 0; x < bd.node_count(); ++x)
        for (std::size_t i = 0; i < bd.parts[x].size(); ++i) {
          Vertex v = bd.parts[x][i];
          ++seen[v];
          EXPECT_EQ(bd.alpha[v], x);
          EXPECT_EQ(bd.part_index[v], i);
        }
      EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      for (std::size_t x = 1; x < bd.node_count(); ++x) {
        auto p = static_cast<std::size_t>(bd.parent[x]);
        EXPECT_LT(p, x);
        EXPECT_EQ(bd.depth[x], bd.depth[p] + 1);
        EXPECT_EQ(bd.path[x], (bd.path[p] << 1) | bd.side[x]);
      }
    }
  }
}

TEST(Bidecomposition, FullSetMatchesHeightBound) {
  KTreeInstance kt = gen_ktree(2, 300, 2);
  std::vector<Vertex> all(300);
  std::iota(all.begin(), all.end(), Vertex{0});
  Bidecomposition bd = build_bidecomposition(kt.graph, kt.decomposition, VertexSet(all));
  for (Vertex v = 0; v < 300; ++v) EXPECT_LE(bd.depth[bd.alpha[v]], std::log2(300.0) + 8);
}

TEST(Bidecomposition, EpsilonFollowsLogN) {
  EXPECT_EQ(bidecomposition_epsilon(2).den, 8);
  EXPECT_EQ(bidecomposition_epsilon(256).den, 8);
  EXPECT_EQ(bidecomposition_epsilon(257).den, 9);
  EXPECT_EQ(bidecomposition_epsilon(1 << 16).den, 16);
}
