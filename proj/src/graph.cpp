#include "mp/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <string>

namespace mp {

UnionFind::UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n)) {
  reset();
}

void UnionFind::reset() {
  std::iota(parent_.begin(), parent_.end(), 0);
  std::fill(size_.begin(), size_.end(), 1);
  components_ = static_cast<int>(parent_.size());
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(int x, int y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  --components_;
  return true;
}

bool Graph::is_simple() const {
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u == v) return false;
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) return false;
  }
  return true;
}

void Graph::validate() const {
  if (vertices < 0) throw InputError("graph: negative vertex count");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (u < 0 || v < 0 || u >= vertices || v >= vertices)
      throw InputError("graph: edge " + std::to_string(i) + " has an endpoint outside [0, " +
                       std::to_string(vertices) + ")");
  }
}

int count_components(const Graph& g, const ItemSet& keep) {
  UnionFind uf(g.vertices);
  for (Item e : keep) uf.unite(g.edges[e].first, g.edges[e].second);
  return uf.components();
}

int count_components(const Graph& g) { return count_components(g, all_items(g.edge_count())); }

int forest_rank(const Graph& g, const ItemSet& edges) {
  UnionFind uf(g.vertices);
  int r = 0;
  for (Item e : edges)
    if (uf.unite(g.edges[e].first, g.edges[e].second)) ++r;
  return r;
}

ItemSet spanning_forest(const Graph& g, const ItemSet& edges) {
  UnionFind uf(g.vertices);
  ItemSet out;
  for (Item e : edges)
    if (uf.unite(g.edges[e].first, g.edges[e].second)) out.push_back(e);
  return normalized(out);
}

namespace {

// Tarjan low-link over an edge mask; multi-edges are distinguished by edge id.
ItemSet bridges_excluding(const Graph& g, int skipped) {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(g.vertices));
  for (int e = 0; e < g.edge_count(); ++e) {
    if (e == skipped || g.is_loop(e)) continue;
    adj[g.edges[e].first].push_back({g.edges[e].second, e});
    adj[g.edges[e].second].push_back({g.edges[e].first, e});
  }
  std::vector<int> disc(static_cast<std::size_t>(g.vertices), -1);
  std::vector<int> low(static_cast<std::size_t>(g.vertices), 0);
  ItemSet out;
  int timer = 0;
  // Iterative DFS: (vertex, parent edge, next adjacency index).
  struct Frame {
    int v;
    int parent_edge;
    std::size_t next;
  };
  for (int root = 0; root < g.vertices; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        auto [w, e] = adj[f.v][f.next++];
        if (e == f.parent_edge) continue;
        if (disc[w] < 0) {
          disc[w] = low[w] = timer++;
          stack.push_back({w, e, 0});
        } else {
          low[f.v] = std::min(low[f.v], disc[w]);
        }
      } else {
        const int v = f.v;
        const int pe = f.parent_edge;
        stack.pop_back();
        if (!stack.empty()) {
          const int u = stack.back().v;
          low[u] = std::min(low[u], low[v]);
          if (low[v] > disc[u]) out.push_back(pe);
        }
      }
    }
  }
  return normalized(out);
}

}  // namespace

ItemSet bridges(const Graph& g) { return bridges_excluding(g, -1); }

ItemSet small_cut(const Graph& g) {
  ItemSet b = bridges(g);
  if (!b.empty()) return {b.front()};
  for (int e = 0; e < g.edge_count(); ++e) {
    if (g.is_loop(e)) continue;
    ItemSet inner = bridges_excluding(g, e);
    if (!inner.empty()) return normalized({e, inner.front()});
  }
  return {};
}

bool is_three_edge_connected(const Graph& g) { return small_cut(g).empty(); }

Graph contract_edges(const Graph& g, const ItemSet& contracted) {
  UnionFind uf(g.vertices);
  for (Item e : contracted) uf.unite(g.edges[e].first, g.edges[e].second);
  std::vector<int> label(static_cast<std::size_t>(g.vertices), -1);
  int next = 0;
  for (int v = 0; v < g.vertices; ++v) {
    const int r = uf.find(v);
    if (label[r] < 0) label[r] = next++;
  }
  Graph out;
  out.vertices = next;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (contains(contracted, e)) continue;
    out.edges.push_back({label[uf.find(g.edges[e].first)], label[uf.find(g.edges[e].second)]});
  }
  return out;
}

Graph keep_edges(const Graph& g, const ItemSet& kept) {
  Graph out;
  out.vertices = g.vertices;
  for (Item e : kept) out.edges.push_back(g.edges[e]);
  return out;
}

}  // namespace mp
