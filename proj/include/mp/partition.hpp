#pragma once

#include <optional>
#include <vector>

#include "mp/matroid.hpp"

namespace mp {

struct PartitionResult {
  bool feasible = false;
  /// k disjoint independent sets covering every non-loop (when feasible).
  std::vector<ItemSet> parts;
  /// Loops cannot be covered by any independent set and are reported separately.
  ItemSet loops;
  /// When infeasible: a set S with |S| > k·r(S).
  ItemSet violating_set;
};

/// Covers E∖loops with k independent sets using shortest augmenting paths in the
/// exchange graph (matroid union). On failure the items reachable from the
/// uncovered element form the returned certificate.
PartitionResult partition_into_independent_sets(const MatroidInstance& m, int k);

/// max over nonempty S of |S| / r(S) <= k, checked over all subsets (n <= 16).
/// Returns a violating set when one exists.
std::optional<ItemSet> exhaustive_density_violation(const MatroidInstance& m, int k);

}  // namespace mp
