#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "flatlabel/graph.hpp"
#include "flatlabel/treewidth.hpp"

namespace flatlabel {

/// Rational epsilon num/den > 0.
struct Epsilon {
  std::int64_t num = 1;
  std::int64_t den = 8;

  Epsilon() = default;
  Epsilon(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (n <= 0 || d <= 0) throw std::invalid_argument("epsilon must be positive");
  }

  static Epsilon inverse_of(std::int64_t d) { return {1, d}; }

  Epsilon divided_by(std::int64_t k) const { return {num, den * k}; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  /// ceil(1 / eps)
  std::int64_t ceil_inverse() const { return (den + num - 1) / num; }
  /// floor(1 / eps)
  std::int64_t floor_inverse() const { return den / num; }
};

/// Comparisons of the form a <=> (c * eps) * total, exact for integral
/// weights and with relative tolerance 1e-9 for floating ones.
template <typename W>
struct WeightOps {
  static_assert(std::is_arithmetic_v<W>);
  using Wide = std::conditional_t<std::is_integral_v<W>, __int128, long double>;

  static Wide scaled(W a, std::int64_t k) { return static_cast<Wide>(a) * static_cast<Wide>(k); }

  // sign of (a * lhs_k - b * rhs_k), with tolerance for floating W
  static int compare(Wide lhs, Wide rhs) {
    if constexpr (std::is_integral_v<W>) {
      return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    } else {
      long double tol = 1e-9L * std::max({std::fabs(lhs), std::fabs(rhs), 1e-300L});
      if (lhs < rhs - tol) return -1;
      if (lhs > rhs + tol) return 1;
      return 0;
    }
  }

  /// a >= eps * total
  static bool at_least(W a, Epsilon eps, W total) {
    return compare(scaled(a, eps.den), scaled(total, eps.num)) >= 0;
  }
  /// a <= c * eps * total
  static bool at_most(W a, Epsilon eps, W total, std::int64_t c = 1) {
    return compare(scaled(a, eps.den), scaled(total, eps.num * c)) <= 0;
  }
};

/// Nonnegative per-vertex (or per-item) weights with cached total.
template <typename W = std::int64_t>
class WeightFn {
 public:
  WeightFn() = default;
  explicit WeightFn(std::vector<W> values) : values_(std::move(values)) {
    for (W w : values_) {
      if (w < W{0}) throw std::invalid_argument("negative weight");
      total_ += w;
    }
  }

  static WeightFn unit(std::size_t n) { return WeightFn(std::vector<W>(n, W{1})); }

  static WeightFn indicator(std::size_t n, const VertexSet& s) {
    std::vector<W> v(n, W{0});
    for (Vertex x : s) v.at(x) = W{1};
    return WeightFn(std::move(v));
  }

  W operator[](std::size_t i) const { return values_[i]; }
  W total() const { return total_; }
  std::size_t size() const { return values_.size(); }
  std::span<const W> values() const { return values_; }

 private:
  std::vector<W> values_;
  W total_{0};
};

/// Bottom-up marking on a rooted forest (parent[x] < x, roots -1): every
/// node whose unmarked-subtree weight reaches eps * total is selected.
/// Result: at most 1/eps nodes; every component of the rest weighs less than
/// eps * total.
template <typename W>
std::vector<std::uint32_t> tree_balanced_separator(std::span<const std::int32_t> parent,
                                                   std::span<const W> weight, Epsilon eps) {
  const std::size_t m = parent.size();
  if (weight.size() != m) throw std::invalid_argument("weight/tree size mismatch");
  for (std::size_t x = 0; x < m; ++x)
    if (parent[x] >= static_cast<std::int32_t>(x))
      throw std::invalid_argument("tree nodes must be numbered parents first");
  W total{0};
  for (W w : weight) total += w;
  std::vector<std::uint32_t> selected;
  if (total == W{0}) return selected;
  std::vector<W> pending(weight.begin(), weight.end());
  for (std::size_t i = m; i-- > 0;) {
    if (WeightOps<W>::at_least(pending[i], eps, total)) {
      selected.push_back(static_cast<std::uint32_t>(i));
      pending[i] = W{0};
    } else if (parent[i] >= 0) {
      pending[static_cast<std::size_t>(parent[i])] += pending[i];
    }
  }
  std::reverse(selected.begin(), selected.end());
  return selected;
}

namespace detail {

// Separator Z = union of bags of tree_balanced_separator over the margin
// weights; bags must be sorted.
template <typename W, typename WeightOf>
std::vector<Vertex> bag_separator(const TreeDecomposition& td, const WeightOf& weight_of,
                                  Epsilon eps) {
  const std::size_t m = td.node_count();
  std::vector<W> margin(m, W{0});
  for (std::size_t x = 0; x < m; ++x) {
    const std::vector<Vertex>* up =
        td.parent[x] < 0 ? nullptr : &td.bags[static_cast<std::size_t>(td.parent[x])];
    for (Vertex v : td.bags[x])
      if (!up || !std::binary_search(up->begin(), up->end(), v)) margin[x] += weight_of(v);
  }
  std::vector<Vertex> z;
  for (auto x : tree_balanced_separator<W>(td.parent, margin, eps))
    z.insert(z.end(), td.bags[x].begin(), td.bags[x].end());
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

}  // namespace detail

/// Vertex set of size at most ceil(1/eps) * (width + 1) whose removal leaves
/// components of weight at most eps * total.
template <typename W>
VertexSet tw_balanced_separator(const Graph& g, const TreeDecomposition& td, const WeightFn<W>& w,
                                Epsilon eps) {
  if (w.size() != g.size()) throw std::invalid_argument("weight function size mismatch");
  TreeDecomposition norm = normalize(td);
  return VertexSet(detail::bag_separator<W>(norm, [&](Vertex v) { return w[v]; }, eps));
}

struct TwoWeightPartition {
  std::vector<std::uint32_t> y, z;
  std::vector<std::uint32_t> order;  // signed-prefix ordering (empty in degenerate cases)
};

namespace detail {

// Greedy fill in index order until 2 * w(Y) >= total.
template <typename W>
TwoWeightPartition greedy_half(std::span<const W> w, W total) {
  TwoWeightPartition r;
  W acc{0};
  for (std::uint32_t i = 0; i < w.size(); ++i) {
    if (WeightOps<W>::compare(WeightOps<W>::scaled(acc, 2), WeightOps<W>::scaled(total, 1)) >= 0)
      r.z.push_back(i);
    else {
      r.y.push_back(i);
      acc += w[i];
    }
  }
  return r;
}

// Ordering with |prefix sum of xi| <= 2 eps where xi = w1/t1 - w2/t2
// (computed scaled by t1 * t2), cut at the first prefix holding half of w1.
template <typename W>
TwoWeightPartition signed_prefix_partition(std::span<const W> w1, std::span<const W> w2, W t1,
                                           W t2, Epsilon eps) {
  using Ops = WeightOps<W>;
  using Wide = typename Ops::Wide;
  if (t1 == W{0} && t2 == W{0}) return greedy_half<W>(w2, t2);
  if (t1 == W{0}) return greedy_half<W>(w2, t2);
  if (t2 == W{0}) return greedy_half<W>(w1, t1);
  const std::size_t m = w1.size();
  std::vector<Wide> xi(m);
  std::vector<std::uint32_t> nonpositive, positive;
  for (std::uint32_t i = 0; i < m; ++i) {
    xi[i] = static_cast<Wide>(w1[i]) * static_cast<Wide>(t2) -
            static_cast<Wide>(w2[i]) * static_cast<Wide>(t1);
    (Ops::compare(xi[i], Wide{0}) <= 0 ? nonpositive : positive).push_back(i);
  }
  const Wide bound = static_cast<Wide>(2 * eps.num) * static_cast<Wide>(t1) * static_cast<Wide>(t2);
  TwoWeightPartition r;
  r.order.reserve(m);
  std::size_t np = 0, pp = 0;
  Wide prefix{0};
  for (std::size_t step = 0; step < m; ++step) {
    bool want_nonpositive = Ops::compare(prefix, Wide{0}) >= 0;
    std::uint32_t pick;
    if (want_nonpositive ? np < nonpositive.size() : pp >= positive.size())
      pick = nonpositive[np++];
    else
      pick = positive[pp++];
    prefix += xi[pick];
    Wide mag = prefix < Wide{0} ? -prefix : prefix;
    if (Ops::compare(mag * static_cast<Wide>(eps.den), bound) > 0)
      throw std::logic_error("signed prefix invariant violated");
    r.order.push_back(pick);
  }
  W acc{0};
  std::size_t cut = m;
  for (std::size_t i = 0; i < m; ++i) {
    acc += w1[r.order[i]];
    if (Ops::compare(Ops::scaled(acc, 2), Ops::scaled(t1, 1)) >= 0) {
      cut = i + 1;
      break;
    }
  }
  r.y.assign(r.order.begin(), r.order.begin() + static_cast<std::ptrdiff_t>(cut));
  r.z.assign(r.order.begin() + static_cast<std::ptrdiff_t>(cut), r.order.end());
  std::sort(r.y.begin(), r.y.end());
  std::sort(r.z.begin(), r.z.end());
  return r;
}

// Same guarantee relative to reference totals r_t >= sum of w_t: the gap is
// filled with virtual items of weight at most eps * r_t, which are dropped
// from the result.
template <typename W>
TwoWeightPartition padded_partition(std::span<const W> w1, std::span<const W> w2, W r1, W r2,
                                    Epsilon eps) {
  const std::size_t real = w1.size();
  std::vector<W> a(w1.begin(), w1.end()), b(w2.begin(), w2.end());
  W s1{0}, s2{0};
  for (std::size_t i = 0; i < real; ++i) {
    s1 += a[i];
    s2 += b[i];
  }
  auto pad = [&](W gap, W ref, std::vector<W>& mine, std::vector<W>& other) {
    W chunk;
    if constexpr (std::is_integral_v<W>)
      chunk = static_cast<W>((static_cast<__int128>(ref) * eps.num) / eps.den);
    else
      chunk = ref * static_cast<W>(eps.value());
    if (chunk <= W{0}) return;
    while (gap > W{0}) {
      W piece = std::min(chunk, gap);
      mine.push_back(piece);
      other.push_back(W{0});
      gap -= piece;
    }
  };
  if (s1 < r1 && s1 > W{0}) pad(r1 - s1, r1, a, b);
  if (s2 < r2 && s2 > W{0}) pad(r2 - s2, r2, b, a);
  W t1{0}, t2{0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    t1 += a[i];
    t2 += b[i];
  }
  TwoWeightPartition p = signed_prefix_partition<W>(a, b, t1, t2, eps);
  auto drop = [&](std::vector<std::uint32_t>& v) {
    v.erase(std::remove_if(v.begin(), v.end(), [&](std::uint32_t i) { return i >= real; }), v.end());
  };
  drop(p.y);
  drop(p.z);
  drop(p.order);
  return p;
}

}  // namespace detail

/// Partition of items into Y, Z with w_t(W) <= (1/2 + 3 eps) w_t(total) for
/// both weights. Requires every item to weigh at most eps * total under both.
template <typename W>
TwoWeightPartition two_weight_partition(const WeightFn<W>& w1, const WeightFn<W>& w2, Epsilon eps) {
  if (w1.size() != w2.size()) throw std::invalid_argument("weight functions differ in size");
  for (std::size_t i = 0; i < w1.size(); ++i)
    if (!WeightOps<W>::at_most(w1[i], eps, w1.total()) ||
        !WeightOps<W>::at_most(w2[i], eps, w2.total()))
      throw std::invalid_argument("element too heavy: item " + std::to_string(i));
  return detail::signed_prefix_partition<W>(w1.values(), w2.values(), w1.total(), w2.total(), eps);
}

struct SplitResult {
  VertexSet a, x, b;
};

namespace detail {

// Scratch arrays indexed by global vertex id, reused across recursive calls.
struct SplitScratch {
  explicit SplitScratch(std::size_t n) : mark(n, 0), comp(n, 0) {}
  std::vector<std::uint32_t> mark;  // == generation: vertex in R and not in X
  std::vector<std::uint32_t> comp;  // component index within the call
  std::uint32_t generation = 0;
};

struct SplitSides {
  std::vector<Vertex> a, x, b;  // a and b keep the order of `region`
};

// One balanced split of g[region].
// `separator(weight_of, eps)` returns a sorted balanced separator of g[region].
template <typename W, typename Separator>
SplitSides split_region(const Graph& g, std::span<const Vertex> region, const Separator& separator,
                        std::span<const W> w1, std::span<const W> w2, Epsilon eps,
                        SplitScratch& scratch) {
  SplitSides out;
  if (region.empty()) return out;
  W t1{0}, t2{0};
  for (Vertex v : region) {
    t1 += w1[v];
    t2 += w2[v];
  }
  Epsilon inner = eps.divided_by(3);
  auto z1 = separator([&](Vertex v) { return w1[v]; }, inner);
  auto z2 = separator([&](Vertex v) { return w2[v]; }, inner);
  std::set_union(z1.begin(), z1.end(), z2.begin(), z2.end(), std::back_inserter(out.x));

  const std::uint32_t gen = ++scratch.generation;
  for (Vertex v : region) scratch.mark[v] = gen;
  for (Vertex v : out.x) scratch.mark[v] = 0;
  // Components of g[region] - X in order of first vertex in `region`.
  std::vector<W> c1, c2;
  std::vector<Vertex> stack;
  const std::uint32_t seen = ++scratch.generation;
  for (Vertex s : region) {
    if (scratch.mark[s] != gen) continue;
    auto id = static_cast<std::uint32_t>(c1.size());
    c1.push_back(W{0});
    c2.push_back(W{0});
    scratch.mark[s] = seen;
    stack.push_back(s);
    while (!stack.empty()) {
      Vertex u = stack.back();
      stack.pop_back();
      scratch.comp[u] = id;
      c1[id] += w1[u];
      c2[id] += w2[u];
      for (Vertex v : g.neighbors(u))
        if (scratch.mark[v] == gen) {
          scratch.mark[v] = seen;
          stack.push_back(v);
        }
    }
  }
  for (std::size_t i = 0; i < c1.size(); ++i)
    if (!WeightOps<W>::at_most(c1[i], inner, t1) || !WeightOps<W>::at_most(c2[i], inner, t2))
      throw std::logic_error("separator left a component above the balance threshold");
  TwoWeightPartition part = padded_partition<W>(c1, c2, t1, t2, inner);
  std::vector<std::uint8_t> in_y(c1.size(), 0);
  for (auto i : part.y) in_y[i] = 1;
  for (Vertex v : region) {
    if (scratch.mark[v] != seen) continue;
    (in_y[scratch.comp[v]] ? out.a : out.b).push_back(v);
  }
  return out;
}

}  // namespace detail

/// Partition (A, X, B) of V(g): no A-B edge, |X| <= 2 * ceil(3/eps) * (width+1),
/// w_t(A), w_t(B) <= (1/2 + eps) * w_t(g).
template <typename W>
SplitResult split(const Graph& g, const TreeDecomposition& td, const WeightFn<W>& w1,
                  const WeightFn<W>& w2, Epsilon eps) {
  if (w1.size() != g.size() || w2.size() != g.size())
    throw std::invalid_argument("weight function size mismatch");
  TreeDecomposition norm = normalize(td);
  std::vector<Vertex> region(g.size());
  std::iota(region.begin(), region.end(), Vertex{0});
  detail::SplitScratch scratch(g.size());
  auto separator = [&](const auto& weight_of, Epsilon e) { return detail::bag_separator<W>(norm, weight_of, e); };
  auto sides = detail::split_region<W>(g, region, separator, w1.values(), w2.values(), eps, scratch);
  return {VertexSet(std::move(sides.a)), VertexSet(std::move(sides.x)), VertexSet(std::move(sides.b))};
}

/// Rooted binary tree with a vertex-to-node map; endpoints of every edge map
/// to ancestor-related nodes. Nodes are numbered in preorder.
struct Bidecomposition {
  std::vector<std::int32_t> parent;
  std::vector<std::uint8_t> side;   // 0 = left child, 1 = right child (root: 0)
  std::vector<std::uint32_t> depth;
  std::vector<std::uint64_t> path;  // left/right bits from the root, big-endian
  std::vector<std::vector<Vertex>> parts;
  std::vector<std::uint32_t> alpha;       // vertex -> node
  std::vector<std::uint32_t> part_index;  // vertex -> index within its part

  std::size_t node_count() const { return parts.size(); }

  std::uint32_t height() const {
    std::uint32_t h = 0;
    for (auto d : depth) h = std::max(h, d);
    return h;
  }

  std::size_t max_part() const {
    std::size_t m = 0;
    for (const auto& p : parts) m = std::max(m, p.size());
    return m;
  }

  /// One node is an ancestor of (or equal to) the other.
  bool related(std::uint32_t x, std::uint32_t y) const {
    if (depth[x] > depth[y]) std::swap(x, y);
    return (path[y] >> (depth[y] - depth[x])) == path[x];
  }
};

struct BidecompositionStats {
  Epsilon eps;
  std::vector<std::size_t> level_work;  // sum of |R| over calls at each depth
};

/// log2 rounded up, with ceil_log2(1) = 0.
inline std::int64_t ceil_log2(std::uint64_t n) {
  return n <= 1 ? 0 : static_cast<std::int64_t>(std::bit_width(n - 1));
}

/// eps = 1 / max(8, ceil(log2 n)).
inline Epsilon bidecomposition_epsilon(std::size_t n) {
  return Epsilon::inverse_of(std::max<std::int64_t>(8, ceil_log2(n)));
}

/// Recursive balanced splitting with w1 = unit weights and w2 = indicator of
/// `s`. Every part has at most 2 * ceil(3/eps) * (width+1) vertices, the tree
/// has height at most log2 n + 8 and members of s sit at depth at most
/// log2 |s| + 8.
inline Bidecomposition build_bidecomposition(const Graph& g, const TreeDecomposition& td,
                                             const VertexSet& s,
                                             BidecompositionStats* stats = nullptr) {
  const std::size_t n = g.size();
  s.check_bounds(n);
  Bidecomposition bd;
  bd.alpha.assign(n, 0);
  bd.part_index.assign(n, 0);
  if (n == 0) return bd;
  const Epsilon eps = bidecomposition_epsilon(n);
  if (stats) {
    stats->eps = eps;
    stats->level_work.clear();
  }
  EliminationForest forest(orient_decomposition(n, normalize(td), nullptr));
  std::vector<std::int64_t> w1(n, 1), w2(n, 0);
  for (Vertex v : s) w2[v] = 1;
  detail::SplitScratch scratch(n);
  std::vector<std::uint32_t> member(n, 0);
  std::uint32_t member_gen = 0;

  auto build = [&](auto&& self, std::vector<Vertex> region, std::int32_t parent, std::uint8_t side,
                   std::uint32_t depth, std::uint64_t path) -> void {
    if (region.empty()) return;
    if (stats) {
      if (stats->level_work.size() <= depth) stats->level_work.resize(depth + 1, 0);
      stats->level_work[depth] += region.size();
    }
    const std::uint32_t gen = ++member_gen;
    for (Vertex v : region) member[v] = gen;
    // In the restricted forest the margin of node i is {region[i]}.
    std::vector<std::int32_t> view = forest.restricted_parents(region);
    std::vector<std::int64_t> margin(region.size());
    auto separator = [&](const auto& weight_of, Epsilon e) {
      for (std::size_t i = 0; i < region.size(); ++i) margin[i] = weight_of(region[i]);
      std::vector<Vertex> z;
      for (auto i : tree_balanced_separator<std::int64_t>(view, margin, e)) {
        z.push_back(region[i]);
        for (Vertex w : forest.upper(region[i]))
          if (member[w] == gen) z.push_back(w);
      }
      std::sort(z.begin(), z.end());
      z.erase(std::unique(z.begin(), z.end()), z.end());
      return z;
    };
    auto sides = detail::split_region<std::int64_t>(g, region, separator, w1, w2, eps, scratch);
    auto node = static_cast<std::uint32_t>(bd.parts.size());
    bd.parent.push_back(parent);
    bd.side.push_back(side);
    bd.depth.push_back(depth);
    bd.path.push_back(path);
    for (std::uint32_t i = 0; i < sides.x.size(); ++i) {
      bd.alpha[sides.x[i]] = node;
      bd.part_index[sides.x[i]] = i;
    }
    bd.parts.push_back(std::move(sides.x));
    region.clear();
    region.shrink_to_fit();
    self(self, std::move(sides.a), static_cast<std::int32_t>(node), 0, depth + 1, path << 1);
    self(self, std::move(sides.b), static_cast<std::int32_t>(node), 1, depth + 1, (path << 1) | 1);
  };
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  forest.sort_by_preorder(all);
  build(build, std::move(all), -1, 0, 0, 0);
  return bd;
}

}  // namespace flatlabel
