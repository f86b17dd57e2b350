#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mp/distribution.hpp"
#include "mp/gf.hpp"
#include "mp/graph.hpp"
#include "mp/matroid.hpp"
#include "mp/mechanism.hpp"

namespace mp {

/// A mechanism family for a matroid class together with the ratio it promises
/// on every member of the class.
struct GuaranteedMechanism {
  using Factory =
      std::function<MechanismPtr(const MatroidInstance&, const std::vector<Distribution>&, std::uint64_t seed)>;
  std::string name;
  double ratio = 1.0;
  Factory build;
};

struct GuaranteeOptions {
  /// Monte Carlo trials for the ex-ante relaxation when it cannot be enumerated.
  std::uint64_t ex_ante_trials = 20'000;
};

/// Oriented-cut mechanism on simple graphs (16).
GuaranteedMechanism graphic_guarantee(const GuaranteeOptions& options = {});
/// Graphic matroids with parallel edges or loops, or F_2 columns with at most two
/// nonzeros (32).
GuaranteedMechanism multigraph_guarantee(const GuaranteeOptions& options = {});
/// Oriented-cut mechanism for k-column sparse vector matroids.
GuaranteedMechanism k_sparse_guarantee(int k, const GuaranteeOptions& options = {});
/// CographicMechanism (6); needs a cographic instance with its graph.
GuaranteedMechanism cographic_guarantee();
/// One parallel class picked uniformly, single-item rule inside (20 for at most ten classes).
GuaranteedMechanism r10x_guarantee();
GuaranteedMechanism gamma_guarantee(double gamma);

/// Copy of tv with +inf outside `kept`.
ThresholdVector restrict_thresholds(const ThresholdVector& tv, const ItemSet& kept);

/// Wraps a mechanism and pins every item outside `kept` to +inf.
class RestrictedMechanism : public Mechanism {
 public:
  RestrictedMechanism(MechanismPtr base, ItemSet kept, std::string name = {});
  std::string name() const override { return name_; }
  int size() const override { return base_->size(); }
  double ratio() const override { return base_->ratio(); }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;
  const ExAnteRelaxation* relaxation() const override { return base_->relaxation(); }

 private:
  MechanismPtr base_;
  ItemSet kept_;
  std::string name_;
};

struct ProphetEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  bool exact = false;
};

/// eproph of minors of a fixed instance. `origin[i]` is the index in `dists` of
/// item i of the minor. Exact when the minor's joint outcome space has at most
/// `max_outcomes` atoms; otherwise Monte Carlo on realizations shared by every call.
struct ProphetEvaluator {
  std::vector<Distribution> dists;
  std::uint64_t max_outcomes = 1'000'000;
  std::uint64_t trials = 4'000;
  std::uint64_t seed = 1;

  ProphetEstimate operator()(const MatroidInstance& minor, const std::vector<Item>& origin) const;
};

struct ContractionResult {
  ItemSet s;
  int dim_l = 0;
  int dim_c = 0;
  /// Coordinates of a* in the basis of L and of c* in the basis of C.
  gf::Vec a_star;
  gf::Vec c_star;
  ProphetEstimate value_s;
  ProphetEstimate value_a_star;
  /// eproph(M/T̄).
  ProphetEstimate value_contracted;
  std::size_t candidates_a = 0;
  std::size_t candidates_c = 0;
  /// Whether the independence transfer was checked exhaustively.
  bool transfer_checked = false;
};

/// Picks S ⊆ T such that independent sets of M|S stay independent in M/T̄ and
/// eproph(M|S) >= eproph(M/T̄)/p^{k+1}. `evaluator.dists` covers all items of m.
ContractionResult contraction_subset(const MatroidInstance& m, const ItemSet& t, int k,
                                     const ProphetEvaluator& evaluator, std::uint64_t seed = 1);

/// Bag of a decomposition. `graph` (edge i is bag[i]) or `columns` (column i is
/// bag[i]) describe M restricted to the bag.
struct TreeNode {
  int id = 0;
  std::string cls;
  std::vector<Item> bag;
  std::optional<Graph> graph;
  std::optional<std::vector<gf::Vec>> columns;
  double gamma = 0.0;
};

struct TreeEdge {
  int u = 0;
  int v = 0;
  /// 1, 2 or 3 for a Seymour tree; 0 when unlabeled.
  int sum = 0;
};

struct DecompositionTree {
  std::vector<TreeNode> nodes;
  std::vector<TreeEdge> edges;

  std::size_t index_of(int id) const;
};

/// Known class tags.
bool is_known_class(const std::string& cls);

/// Partition, tree shape, class tags and representations (rank functions are
/// compared exhaustively for bags of at most 12 items). Throws InputError.
void validate_tree(const MatroidInstance& m, const DecompositionTree& td);

struct EdgeThickness {
  TreeEdge edge;
  ItemSet side;
  int lambda = 0;
};

std::vector<EdgeThickness> thickness(const MatroidInstance& m, const DecompositionTree& td);
/// Throws PreconditionError naming the first edge with λ > k.
void audit_thickness(const MatroidInstance& m, const DecompositionTree& td, int k);
/// Seymour trees: classes graphic/cographic/r10x, thickness <= 2, and each
/// labeled edge has λ < sum.
void validate_seymour_tree(const MatroidInstance& m, const DecompositionTree& td);

struct ComposeOptions {
  int k = 1;
  std::uint64_t seed = 1;
  std::uint64_t max_outcomes = 1'000'000;
  std::uint64_t evaluator_trials = 4'000;
  /// Overrides the largest bag ratio in the recorded claim.
  std::optional<double> alpha;
};

struct ComposeStage {
  int node = 0;
  ItemSet bag;
  ItemSet s;
  int lambda = 0;
  std::string mechanism;
  double bag_ratio = 0.0;
  std::optional<ContractionResult> contraction;
};

struct ComposeResult {
  MechanismPtr mechanism;
  std::vector<ComposeStage> stages;
  std::vector<EdgeThickness> thickness;
  double ratio = 0.0;
};

/// Peels leaves in increasing id order: each leaf keeps only the subset chosen by
/// contraction_subset and runs its class mechanism there; the last bag runs on
/// its full restriction. Recorded ratio α·p^{k+1} (α alone for a single bag).
ComposeResult tree_compose(const MatroidInstance& m, const DecompositionTree& td,
                           const std::map<std::string, GuaranteedMechanism>& bag_mechanisms,
                           const std::vector<Distribution>& dists, const ComposeOptions& options);

/// tree_compose over F_2 with k = 2 and α = 32: graphic bags use the 32 mechanism,
/// cographic bags CographicMechanism and r10x bags the class pick.
ComposeResult regular_mechanism(const MatroidInstance& m, const DecompositionTree& st,
                                const std::vector<Distribution>& dists, std::uint64_t seed,
                                const GuaranteeOptions& options = {});

/// Mechanism for N = L∖x from one for M = L/x; ratio 2α+2.
GuaranteedMechanism lift_guarantee(const MatroidInstance& l, Item x, GuaranteedMechanism inner);
/// Mechanism for N = P/x from one for M = P∖x; ratio 3α.
GuaranteedMechanism projection_guarantee(const MatroidInstance& p, Item x, GuaranteedMechanism inner);

/// `dists` are indexed by the items of L∖x (resp. P/x) in increasing order.
MechanismPtr lift_transfer(const MatroidInstance& l, Item x, const GuaranteedMechanism& inner,
                           const std::vector<Distribution>& dists, std::uint64_t seed);
MechanismPtr projection_transfer(const MatroidInstance& p, Item x, const GuaranteedMechanism& inner,
                                 const std::vector<Distribution>& dists, std::uint64_t seed);

struct TransferStep {
  enum class Kind { lift, projection };
  Kind kind = Kind::lift;
  /// L for a lift, P for a projection.
  MatroidInstance parent;
  Item x = 0;

  /// Matroid the step starts from (L/x or P∖x) and the one it produces (L∖x or P/x).
  MatroidInstance source() const;
  MatroidInstance target() const;
};

/// Folds the steps in order; ratio 3^t·α. Requires α >= 2.
GuaranteedMechanism distance_transfer(const std::vector<TransferStep>& chain, GuaranteedMechanism inner);

}  // namespace mp
