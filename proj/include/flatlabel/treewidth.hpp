#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "flatlabel/graph.hpp"

namespace flatlabel {

/// Rooted tree decomposition. After normalize(): node 0 is the root
/// (parent -1), every parent index is smaller than its child's, bags sorted.
struct TreeDecomposition {
  std::vector<std::int32_t> parent;
  std::vector<std::vector<Vertex>> bags;

  std::size_t node_count() const { return bags.size(); }

  /// max bag size - 1; -1 for a decomposition without vertices.
  int width() const {
    std::size_t m = 0;
    for (const auto& b : bags) m = std::max(m, b.size());
    return static_cast<int>(m) - 1;
  }
};

class ExceedsWidthHint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-roots node ids so the root is 0 and parents precede children (BFS
/// order). Throws if the parent array is not a single rooted tree.
inline TreeDecomposition normalize(const TreeDecomposition& td) {
  const std::size_t m = td.bags.size();
  if (td.parent.size() != m) throw std::invalid_argument("parent/bags size mismatch");
  TreeDecomposition out;
  if (m == 0) return out;
  std::vector<std::vector<std::uint32_t>> children(m);
  std::int32_t root = -1;
  for (std::size_t x = 0; x < m; ++x) {
    auto p = td.parent[x];
    if (p < 0) {
      if (root >= 0) throw std::invalid_argument("decomposition has more than one root");
      root = static_cast<std::int32_t>(x);
    } else {
      if (static_cast<std::size_t>(p) >= m) throw std::invalid_argument("parent index out of range");
      children[static_cast<std::size_t>(p)].push_back(static_cast<std::uint32_t>(x));
    }
  }
  if (root < 0) throw std::invalid_argument("decomposition has no root");
  std::vector<std::uint32_t> order{static_cast<std::uint32_t>(root)};
  std::vector<std::int32_t> new_id(m, -1);
  new_id[static_cast<std::size_t>(root)] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto c : children[order[i]]) {
      new_id[c] = static_cast<std::int32_t>(order.size());
      order.push_back(c);
    }
  if (order.size() != m) throw std::invalid_argument("decomposition tree is not connected");
  out.parent.resize(m);
  out.bags.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto x = order[i];
    out.parent[i] = td.parent[x] < 0 ? -1 : new_id[static_cast<std::size_t>(td.parent[x])];
    out.bags[i] = td.bags[x];
    std::sort(out.bags[i].begin(), out.bags[i].end());
    out.bags[i].erase(std::unique(out.bags[i].begin(), out.bags[i].end()), out.bags[i].end());
  }
  return out;
}

struct DecompositionReport {
  bool ok = true;
  int width = -1;
  std::vector<std::string> tree_errors;
  std::vector<Edge> uncovered_edges;
  std::vector<Vertex> missing_vertices;       // in no bag
  std::vector<Vertex> disconnected_vertices;  // bags containing it not connected
  std::vector<Vertex> out_of_range;

  std::string summary() const {
    if (ok) return "ok, width " + std::to_string(width);
    std::ostringstream os;
    os << "invalid decomposition:";
    for (const auto& e : tree_errors) os << " " << e << ";";
    if (!uncovered_edges.empty())
      os << " " << uncovered_edges.size() << " uncovered edges (first " << uncovered_edges[0].first
         << "-" << uncovered_edges[0].second << ");";
    if (!missing_vertices.empty()) os << " " << missing_vertices.size() << " vertices in no bag;";
    if (!disconnected_vertices.empty())
      os << " " << disconnected_vertices.size() << " vertices with disconnected bags;";
    if (!out_of_range.empty()) os << " " << out_of_range.size() << " out-of-range bag entries;";
    return os.str();
  }
};

inline DecompositionReport validate_decomposition(const Graph& g, const TreeDecomposition& input) {
  DecompositionReport r;
  TreeDecomposition td;
  try {
    td = normalize(input);
  } catch (const std::invalid_argument& e) {
    r.ok = false;
    r.tree_errors.emplace_back(e.what());
    return r;
  }
  r.width = td.width();
  const std::size_t n = g.size();
  for (const auto& bag : td.bags)
    for (Vertex v : bag)
      if (v >= n) r.out_of_range.push_back(v);
  if (!r.out_of_range.empty()) {
    r.ok = false;
    return r;
  }
  std::vector<std::uint32_t> tops(n, 0);
  for (std::size_t x = 0; x < td.bags.size(); ++x) {
    const std::vector<Vertex>* up = td.parent[x] < 0 ? nullptr : &td.bags[static_cast<std::size_t>(td.parent[x])];
    for (Vertex v : td.bags[x])
      if (!up || !std::binary_search(up->begin(), up->end(), v)) ++tops[v];
  }
  for (Vertex v = 0; v < n; ++v) {
    if (tops[v] == 0) r.missing_vertices.push_back(v);
    if (tops[v] > 1) r.disconnected_vertices.push_back(v);
  }
  std::vector<std::vector<std::uint32_t>> nodes_of(n);
  for (std::size_t x = 0; x < td.bags.size(); ++x)
    for (Vertex v : td.bags[x]) nodes_of[v].push_back(static_cast<std::uint32_t>(x));
  std::vector<Vertex> stamp(n, no_vertex);
  for (Vertex u = 0; u < n; ++u) {
    for (auto x : nodes_of[u])
      for (Vertex w : td.bags[x]) stamp[w] = u;
    for (Vertex v : g.neighbors(u))
      if (u < v && stamp[v] != u) r.uncovered_edges.emplace_back(u, v);
  }
  r.ok = r.uncovered_edges.empty() && r.missing_vertices.empty() && r.disconnected_vertices.empty();
  return r;
}

/// Acyclic orientation of the chordal completion (bags turned into cliques):
/// every vertex u has at most `bound` out-neighbors and K_u = {u} + out(u)
/// is a clique of the completion.
struct ChordalOrientation {
  struct Arc {
    Vertex to;
    bool in_graph;  // arc is an edge of the input graph, not a fill edge
  };

  std::vector<Vertex> order;                // elimination order
  std::vector<std::uint32_t> rank;          // position in order
  std::vector<std::vector<Arc>> out;        // sorted by target vertex
  int bound = 0;                            // width of the decomposition used

  std::size_t size() const { return out.size(); }

  std::size_t max_out_degree() const {
    std::size_t m = 0;
    for (const auto& a : out) m = std::max(m, a.size());
    return m;
  }

  /// Elimination-tree parent: the out-neighbor eliminated first.
  Vertex elimination_parent(Vertex u) const {
    Vertex best = no_vertex;
    for (const auto& a : out[u])
      if (best == no_vertex || rank[a.to] < rank[best]) best = a.to;
    return best;
  }
};

namespace detail {

inline std::vector<std::uint32_t> post_order(const TreeDecomposition& td) {
  const std::size_t m = td.node_count();
  std::vector<std::vector<std::uint32_t>> children(m);
  for (std::size_t x = 1; x < m; ++x)
    children[static_cast<std::size_t>(td.parent[x])].push_back(static_cast<std::uint32_t>(x));
  std::vector<std::uint32_t> out;
  out.reserve(m);
  if (m == 0) return out;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0u, 0}};
  while (!stack.empty()) {
    auto& [x, next] = stack.back();
    if (next < children[x].size()) {
      auto c = children[x][next++];
      stack.emplace_back(c, 0);
    } else {
      out.push_back(x);
      stack.pop_back();
    }
  }
  return out;
}

}  // namespace detail

/// Eliminates vertices in post-order of the (normalized) decomposition, each
/// at the topmost bag containing it, ties by vertex index. `g` may be null,
/// in which case every arc is flagged as a graph edge.
inline ChordalOrientation orient_decomposition(std::size_t n, const TreeDecomposition& td,
                                               const Graph* g) {
  ChordalOrientation o;
  o.bound = std::max(td.width(), 0);
  std::vector<std::uint32_t> top(n, static_cast<std::uint32_t>(-1));
  for (std::size_t x = 0; x < td.node_count(); ++x)
    for (Vertex v : td.bags[x]) {
      if (v >= n) throw std::invalid_argument("bag entry out of range");
      if (top[v] == static_cast<std::uint32_t>(-1)) top[v] = static_cast<std::uint32_t>(x);
    }
  std::vector<std::vector<Vertex>> eliminated_at(td.node_count());
  for (Vertex v = 0; v < n; ++v) {
    if (top[v] == static_cast<std::uint32_t>(-1))
      throw std::invalid_argument("vertex " + std::to_string(v) + " is in no bag");
    eliminated_at[top[v]].push_back(v);
  }
  o.order.reserve(n);
  for (auto x : detail::post_order(td))
    for (Vertex v : eliminated_at[x]) o.order.push_back(v);
  o.rank.assign(n, 0);
  for (std::uint32_t i = 0; i < o.order.size(); ++i) o.rank[o.order[i]] = i;
  o.out.assign(n, {});
  for (Vertex v = 0; v < n; ++v) {
    for (Vertex w : td.bags[top[v]])
      if (o.rank[w] > o.rank[v]) o.out[v].push_back({w, g ? g->adjacent(v, w) : true});
  }
  return o;
}

/// Expects `td` valid for `g` (normalized internally).
inline ChordalOrientation chordal_orientation(const Graph& g, const TreeDecomposition& td) {
  return orient_decomposition(g.size(), normalize(td), &g);
}

/// The chordal completion as an explicit graph (all arcs, undirected).
inline Graph completion_graph(const ChordalOrientation& o) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < o.size(); ++u)
    for (const auto& a : o.out[u]) edges.emplace_back(u, a.to);
  return Graph(o.size(), edges);
}

/// Elimination forest of an orientation: one node per vertex with bag K_v,
/// parent = elimination parent. Supports restriction to vertex subsets in
/// time proportional to the subset.
class EliminationForest {
 public:
  EliminationForest() = default;

  explicit EliminationForest(const ChordalOrientation& o) : n_(o.size()) {
    parent_.assign(n_, no_vertex);
    bag_offsets_.assign(n_ + 1, 0);
    for (Vertex v = 0; v < n_; ++v) {
      parent_[v] = o.elimination_parent(v);
      bag_offsets_[v + 1] = bag_offsets_[v] + o.out[v].size();
    }
    bag_targets_.reserve(bag_offsets_[n_]);
    for (Vertex v = 0; v < n_; ++v)
      for (const auto& a : o.out[v]) bag_targets_.push_back(a.to);
    std::vector<std::vector<Vertex>> children(n_);
    std::vector<Vertex> roots;
    for (Vertex v = 0; v < n_; ++v) {
      if (parent_[v] == no_vertex) roots.push_back(v);
      else children[parent_[v]].push_back(v);
    }
    tin_.assign(n_, 0);
    tout_.assign(n_, 0);
    std::uint32_t clock = 0;
    std::vector<std::pair<Vertex, std::size_t>> stack;
    for (Vertex r : roots) {
      stack.emplace_back(r, 0);
      tin_[r] = clock++;
      while (!stack.empty()) {
        auto& [x, next] = stack.back();
        if (next < children[x].size()) {
          Vertex c = children[x][next++];
          tin_[c] = clock++;
          stack.emplace_back(c, 0);
        } else {
          tout_[x] = clock;
          stack.pop_back();
        }
      }
    }
  }

  std::size_t size() const { return n_; }
  std::uint32_t preorder(Vertex v) const { return tin_[v]; }

  /// Out-neighbors of v (K_v without v).
  std::span<const Vertex> upper(Vertex v) const {
    return {bag_targets_.data() + bag_offsets_[v], bag_offsets_[v + 1] - bag_offsets_[v]};
  }

  bool is_ancestor(Vertex a, Vertex b) const { return tin_[a] <= tin_[b] && tout_[b] <= tout_[a]; }

  void sort_by_preorder(std::vector<Vertex>& vs) const {
    std::sort(vs.begin(), vs.end(), [&](Vertex a, Vertex b) { return tin_[a] < tin_[b]; });
  }

  /// Tree of the restriction to `subset` (sorted by preorder): parent of
  /// node i is the nearest proper ancestor in the subset; roots are chained.
  std::vector<std::int32_t> restricted_parents(std::span<const Vertex> subset) const {
    std::vector<std::int32_t> parent(subset.size(), -1);
    std::vector<std::uint32_t> stack;
    std::int32_t last_root = -1;
    for (std::uint32_t i = 0; i < subset.size(); ++i) {
      Vertex v = subset[i];
      while (!stack.empty() && !is_ancestor(subset[stack.back()], v)) stack.pop_back();
      if (!stack.empty()) {
        parent[i] = static_cast<std::int32_t>(stack.back());
      } else {
        parent[i] = last_root;
        last_root = static_cast<std::int32_t>(i);
      }
      stack.push_back(i);
    }
    return parent;
  }

  /// Decomposition of the completion restricted to `subset` (sorted by
  /// preorder). Node i corresponds to subset[i]; bags hold vertex ids mapped
  /// through `rename` (identity when empty). `member` must be true exactly on
  /// subset vertices. Roots of the induced forest are chained.
  template <typename Member>
  TreeDecomposition restrict(std::span<const Vertex> subset, const Member& member,
                             const std::vector<Vertex>& rename = {}) const {
    TreeDecomposition td;
    const std::size_t m = subset.size();
    td.parent = restricted_parents(subset);
    td.bags.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) {
      Vertex v = subset[i];
      auto& bag = td.bags[i];
      bag.push_back(rename.empty() ? v : rename[v]);
      for (Vertex w : upper(v))
        if (member(w)) bag.push_back(rename.empty() ? w : rename[w]);
      std::sort(bag.begin(), bag.end());
    }
    return td;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Vertex> parent_;
  std::vector<std::size_t> bag_offsets_;
  std::vector<Vertex> bag_targets_;
  std::vector<std::uint32_t> tin_, tout_;
};

/// Decomposition of the subgraph induced by `keep`, in local indices (rank in
/// keep). Width never exceeds the input width.
inline TreeDecomposition restrict_decomposition(std::size_t n, const TreeDecomposition& td,
                                                const VertexSet& keep) {
  keep.check_bounds(n);
  EliminationForest forest(orient_decomposition(n, normalize(td), nullptr));
  std::vector<Vertex> local(n, no_vertex);
  for (Vertex i = 0; i < keep.size(); ++i) local[keep.members()[i]] = i;
  std::vector<Vertex> subset = keep.members();
  forest.sort_by_preorder(subset);
  TreeDecomposition out =
      forest.restrict(subset, [&](Vertex w) { return local[w] != no_vertex; }, local);
  if (out.node_count() == 0) return out;
  return normalize(out);
}

/// Bags from an elimination order: node per vertex holding the vertex and
/// its later neighbors in the filled graph.
inline TreeDecomposition decomposition_from_order(const Graph& g, const std::vector<Vertex>& order) {
  const std::size_t n = g.size();
  TreeDecomposition td;
  if (n == 0) {
    td.parent = {-1};
    td.bags = {{}};
    return td;
  }
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t i = 0; i < n; ++i) rank[order[i]] = i;
  std::vector<std::set<Vertex>> adj(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u)) adj[u].insert(v);
  td.parent.assign(n, -1);
  td.bags.resize(n);
  // Node i belongs to order[i].
  for (std::uint32_t i = 0; i < n; ++i) {
    Vertex v = order[i];
    std::vector<Vertex> later(adj[v].begin(), adj[v].end());
    for (Vertex a : later) {
      adj[a].erase(v);
      for (Vertex b : later)
        if (a != b) adj[a].insert(b);
    }
    td.bags[i] = later;
    td.bags[i].push_back(v);
    Vertex first = no_vertex;
    for (Vertex a : later)
      if (first == no_vertex || rank[a] < rank[first]) first = a;
    if (first != no_vertex) td.parent[i] = static_cast<std::int32_t>(rank[first]);
  }
  // Chain the roots of the elimination forest under the last root.
  std::int32_t top = -1;
  for (std::int32_t i = static_cast<std::int32_t>(n) - 1; i >= 0; --i) {
    if (td.parent[static_cast<std::size_t>(i)] != -1) continue;
    if (top == -1) top = i;
    else td.parent[static_cast<std::size_t>(i)] = top;
  }
  return normalize(td);
}

namespace detail {

inline std::vector<Vertex> min_fill_order(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::set<Vertex>> adj(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u)) adj[u].insert(v);
  auto fill_of = [&](Vertex v) {
    std::size_t missing = 0;
    for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
      for (auto b = std::next(a); b != adj[v].end(); ++b)
        if (!adj[*a].count(*b)) ++missing;
    return missing;
  };
  using Key = std::tuple<std::size_t, std::size_t, Vertex>;
  std::set<Key> queue;
  std::vector<Key> key(n);
  for (Vertex v = 0; v < n; ++v) {
    key[v] = {fill_of(v), adj[v].size(), v};
    queue.insert(key[v]);
  }
  std::vector<bool> gone(n, false);
  std::vector<Vertex> order;
  order.reserve(n);
  while (!queue.empty()) {
    Vertex v = std::get<2>(*queue.begin());
    queue.erase(queue.begin());
    gone[v] = true;
    order.push_back(v);
    std::vector<Vertex> nb(adj[v].begin(), adj[v].end());
    for (Vertex a : nb) {
      adj[a].erase(v);
      for (Vertex b : nb)
        if (a != b) adj[a].insert(b);
    }
    std::set<Vertex> touched(nb.begin(), nb.end());
    for (Vertex a : nb)
      for (Vertex b : adj[a]) touched.insert(b);
    for (Vertex t : touched) {
      if (gone[t]) continue;
      queue.erase(key[t]);
      key[t] = {fill_of(t), adj[t].size(), t};
      queue.insert(key[t]);
    }
  }
  return order;
}

// Elimination-order search for width <= k on graphs with at most 64 vertices.
class ExactSearch {
 public:
  ExactSearch(const Graph& g, int k) : n_(g.size()), k_(k), adj_(g.size(), 0) {
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : g.neighbors(u)) adj_[u] |= std::uint64_t{1} << v;
  }

  std::optional<std::vector<Vertex>> run() {
    std::vector<Vertex> order;
    if (search(0, order)) return order;
    return std::nullopt;
  }

 private:
  // Neighbors of v in the graph where `gone` vertices were eliminated.
  std::uint64_t reach(Vertex v, std::uint64_t gone) const {
    std::uint64_t seen = std::uint64_t{1} << v, frontier = seen, result = 0;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::uint64_t f = frontier; f; f &= f - 1) {
        auto x = static_cast<Vertex>(std::countr_zero(f));
        std::uint64_t nb = adj_[x] & ~seen;
        seen |= nb;
        result |= nb & ~gone;
        next |= nb & gone;
      }
      frontier = next;
    }
    return result;
  }

  bool search(std::uint64_t gone, std::vector<Vertex>& order) {
    std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
    std::uint64_t left = all & ~gone;
    if (std::popcount(left) <= k_ + 1) {
      for (std::uint64_t f = left; f; f &= f - 1) order.push_back(static_cast<Vertex>(std::countr_zero(f)));
      return true;
    }
    if (failed_.count(gone)) return false;
    std::vector<std::pair<int, Vertex>> candidates;
    for (std::uint64_t f = left; f; f &= f - 1) {
      auto v = static_cast<Vertex>(std::countr_zero(f));
      std::uint64_t nb = reach(v, gone);
      int deg = std::popcount(nb);
      if (deg > k_) continue;
      bool simplicial = true;
      for (std::uint64_t h = nb; h && simplicial; h &= h - 1) {
        auto x = static_cast<Vertex>(std::countr_zero(h));
        std::uint64_t need = nb & ~(std::uint64_t{1} << x);
        if ((reach(x, gone) & need) != need) simplicial = false;
      }
      if (simplicial) {
        candidates.assign(1, {deg, v});
        break;
      }
      candidates.emplace_back(deg, v);
    }
    std::sort(candidates.begin(), candidates.end());
    for (auto [deg, v] : candidates) {
      order.push_back(v);
      if (search(gone | (std::uint64_t{1} << v), order)) return true;
      order.pop_back();
    }
    failed_.insert(gone);
    return false;
  }

  std::size_t n_;
  int k_;
  std::vector<std::uint64_t> adj_;
  std::unordered_set<std::uint64_t> failed_;
};

}  // namespace detail

inline constexpr std::size_t exact_decompose_limit = 32;

/// Min-fill heuristic decomposition. With a width hint and n <= 32, falls
/// back to exact search and throws ExceedsWidthHint if treewidth > hint.
inline TreeDecomposition decompose(const Graph& g, std::optional<int> width_hint = std::nullopt) {
  TreeDecomposition td = decomposition_from_order(g, detail::min_fill_order(g));
  if (!width_hint || td.width() <= *width_hint || g.size() > exact_decompose_limit) return td;
  detail::ExactSearch search(g, *width_hint);
  auto order = search.run();
  if (!order)
    throw ExceedsWidthHint("treewidth exceeds hint " + std::to_string(*width_hint));
  return decomposition_from_order(g, *order);
}

/// Decomposition of H x K2 where (v, s) is vertex 2v + s.
inline TreeDecomposition product_with_edge_decomposition(const TreeDecomposition& td) {
  TreeDecomposition out;
  out.parent = td.parent;
  out.bags.reserve(td.bags.size());
  for (const auto& bag : td.bags) {
    std::vector<Vertex> doubled;
    doubled.reserve(2 * bag.size());
    for (Vertex v : bag) {
      doubled.push_back(2 * v);
      doubled.push_back(2 * v + 1);
    }
    std::sort(doubled.begin(), doubled.end());
    out.bags.push_back(std::move(doubled));
  }
  return out;
}

/// H x K2 as an explicit graph, vertex (v, s) = 2v + s.
inline Graph product_with_edge(const Graph& h) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v < h.size(); ++v) {
    edges.emplace_back(2 * v, 2 * v + 1);
    for (Vertex w : h.neighbors(v)) {
      if (v > w) continue;
      for (Vertex s = 0; s < 2; ++s)
        for (Vertex t = 0; t < 2; ++t) edges.emplace_back(2 * v + s, 2 * w + t);
    }
  }
  return Graph(2 * h.size(), edges);
}

}  // namespace flatlabel
