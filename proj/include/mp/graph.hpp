#pragma once

#include <utility>
#include <vector>

#include "mp/types.hpp"

namespace mp {

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n = 0);
  int find(int x);
  /// Returns false when x and y were already joined.
  bool unite(int x, int y);
  int components() const { return components_; }
  void reset();

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_ = 0;
};

/// Undirected multigraph; edge i is the ground-set item i of its graphic/cographic matroid.
struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;

  int edge_count() const { return static_cast<int>(edges.size()); }
  bool is_loop(int e) const { return edges[e].first == edges[e].second; }
  /// No self-loops and no parallel edges.
  bool is_simple() const;
  void validate() const;
};

/// Components of (V, edges in `keep`), isolated vertices included.
int count_components(const Graph& g, const ItemSet& keep);
int count_components(const Graph& g);

/// Size of a spanning forest of the edge subset (graphic rank).
int forest_rank(const Graph& g, const ItemSet& edges);

/// Greedy spanning forest of the subgraph on `edges`, scanning in the given order.
ItemSet spanning_forest(const Graph& g, const ItemSet& edges);

/// Edges whose removal increases the component count.
ItemSet bridges(const Graph& g);

/// Every connected component is 3-edge-connected (no bridge and no 2-edge cut).
/// Self-loops never lie in a cut and are ignored.
bool is_three_edge_connected(const Graph& g);

/// A cut of at most two edges witnessing failure of 3-edge-connectivity, if any.
ItemSet small_cut(const Graph& g);

/// Graph after contracting `contracted` and dropping it from the edge list; the
/// remaining edges keep their relative order. Vertices are relabeled densely.
Graph contract_edges(const Graph& g, const ItemSet& contracted);

/// Graph restricted to `kept` edges (in order) on the same vertex set.
Graph keep_edges(const Graph& g, const ItemSet& kept);

}  // namespace mp
