#pragma once

#include <cstdint>
#include <vector>

#include "mp/ex_ante.hpp"
#include "mp/graph.hpp"
#include "mp/mechanism.hpp"

namespace mp {

/// Median of max(X_1..X_n): inf{x : Π F_i(x) >= 1/2}. Ties at the median are
/// accepted when Σ E[(X_i − T)^+] <= T and rejected otherwise, which keeps the
/// rule 2-competitive when the laws have atoms.
Threshold single_item_threshold(const std::vector<Distribution>& dists);
/// The shared threshold on every item.
ThresholdVector single_item_thresholds(const std::vector<Distribution>& dists);
MechanismPtr single_item_mechanism(const std::vector<Distribution>& dists);

/// head[e] is the designated head vertex of edge (or hyperedge) e; -1 for edges
/// with no vertices.
struct Orientation {
  std::vector<int> head;
};

/// Incoming fractional load Σ_{e: head(e)=v} p_e per vertex.
std::vector<double> orientation_loads(int vertices, const Orientation& o, const std::vector<double>& p);

/// Peels a vertex of minimum fractional degree, orients its remaining edges into
/// it, and repeats. Throws PreconditionError when every remaining vertex has
/// degree above `bound` (p is then outside the polytope).
Orientation orient_hypergraph(int vertices, const std::vector<std::vector<int>>& hyperedges,
                              const std::vector<double>& p, double bound);
Orientation orient_graph(const Graph& g, const std::vector<double>& p);

/// Nonzero coordinates of each column; zero columns give empty hyperedges.
std::vector<std::vector<int>> build_hypergraph(const MatroidInstance& m);

/// Keeps each item with probability `keep`, draws a uniform vertex cut S, and
/// lets item t survive iff it is kept, all its tails lie in S and its head lies
/// outside S. Survivors get their tail threshold (tau, theta).
class OrientedCutMechanism : public Mechanism {
 public:
  OrientedCutMechanism(int vertices, std::vector<std::vector<int>> hyperedges, Orientation orientation,
                       ExAnteRelaxation relax, double keep, double ratio, std::string name);
  std::string name() const override { return name_; }
  int size() const override { return static_cast<int>(hyperedges_.size()); }
  double ratio() const override { return ratio_; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;
  const ExAnteRelaxation* relaxation() const override { return &relax_; }

  const Orientation& orientation() const { return orientation_; }
  /// Closed-form survival probability of item t.
  double survival_probability(Item t) const;

 private:
  Threshold tail_threshold(Item t) const;

  int vertices_;
  std::vector<std::vector<int>> hyperedges_;
  Orientation orientation_;
  ExAnteRelaxation relax_;
  double keep_;
  double ratio_;
  std::string name_;
};

/// Simple graphs, 16-competitive.
std::shared_ptr<const OrientedCutMechanism> graphic_mechanism(const Graph& g, const ExAnteRelaxation& relax);
/// Graphs with parallel edges or loops through the k = 2 sparse construction (32-competitive).
std::shared_ptr<const OrientedCutMechanism> multigraph_mechanism(const Graph& g, const ExAnteRelaxation& relax);
/// k-column sparse vector matroids, (2^{k+2} k)-competitive.
std::shared_ptr<const OrientedCutMechanism> k_sparse_mechanism(const MatroidInstance& m, int k,
                                                               const ExAnteRelaxation& relax);

/// Three-forest rule: cover the cographic matroid of a 3-edge-connected graph by three
/// independent sets P_1..P_3, let H_i be a spanning forest of G − P_i, and accept
/// everything outside a uniformly chosen H_i (threshold 0).
class Cographic3ECMechanism : public Mechanism {
 public:
  /// `check_connectivity` runs the small-cut test when the graph has at most 64 vertices.
  explicit Cographic3ECMechanism(const Graph& g, bool check_connectivity = true);
  std::string name() const override { return "cographic-3ec"; }
  int size() const override { return edges_; }
  double ratio() const override { return 3.0; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;

  const std::vector<ItemSet>& parts() const { return parts_; }
  const std::vector<ItemSet>& forests() const { return forests_; }
  /// Complement of forests()[j].
  const std::vector<ItemSet>& accepted() const { return accepted_; }

 private:
  int edges_;
  std::vector<ItemSet> parts_;
  std::vector<ItemSet> forests_;
  std::vector<ItemSet> accepted_;
};

/// 6-competitive: bridges are never accepted, parallel classes of the cographic
/// matroid are collapsed to representatives, the three-forest rule runs on the
/// resulting 3-edge-connected graph, and each selected class runs the single-item rule.
class CographicMechanism : public Mechanism {
 public:
  CographicMechanism(const Graph& g, const std::vector<Distribution>& dists);
  std::string name() const override { return "cographic"; }
  int size() const override { return edges_; }
  double ratio() const override { return 6.0; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;

  const std::vector<ItemSet>& classes() const { return classes_; }
  const ItemSet& bridge_items() const { return bridges_; }

 private:
  ThresholdVector thresholds_for(std::size_t part) const;

  int edges_;
  ItemSet bridges_;
  std::vector<ItemSet> classes_;
  std::vector<Threshold> class_threshold_;
  /// accepted_classes_[j] = classes whose representative lies outside forest j.
  std::vector<std::vector<std::size_t>> accepted_classes_;
};

/// Covers a γ-sparse matroid with ⌈γ⌉ independent sets and accepts (threshold 0)
/// one of them chosen uniformly; ⌈γ⌉-competitive.
class GammaSparseMechanism : public Mechanism {
 public:
  GammaSparseMechanism(const MatroidInstance& m, double gamma);
  std::string name() const override { return "gamma"; }
  int size() const override { return n_; }
  double ratio() const override { return static_cast<double>(parts_.size()); }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;
  const std::vector<ItemSet>& parts() const { return parts_; }

 private:
  int n_;
  std::vector<ItemSet> parts_;
};

/// Picks one parallel class uniformly and runs the single-item rule on it;
/// 2·(number of classes)-competitive, so 20 on a parallel extension of R10.
class ParallelClassMechanism : public Mechanism {
 public:
  ParallelClassMechanism(const MatroidInstance& m, const std::vector<Distribution>& dists,
                         std::string name = "class-pick");
  std::string name() const override { return name_; }
  int size() const override { return n_; }
  double ratio() const override;
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;

 private:
  ThresholdVector thresholds_for(std::size_t cls) const;

  int n_;
  std::vector<ItemSet> classes_;
  std::vector<Threshold> class_threshold_;
  std::string name_;
};

}  // namespace mp
