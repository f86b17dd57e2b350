#pragma once

#include <utility>
#include <vector>

#include "mp/matroid.hpp"

namespace mp {

enum class SumKind { one_sum = 1, two_sum = 2, three_sum = 3 };

/// Result of M1 △ M2. Items of the sum are the non-shared items of M1 (in order)
/// followed by the non-shared items of M2 (in order).
struct DeltaSum {
  SumKind kind = SumKind::one_sum;
  MatroidInstance matroid;
  /// origin[i] = {side (1 or 2), item id on that side}.
  std::vector<std::pair<int, Item>> origin;
};

/// Δ-sum of two binary matroids glued along `shared` = pairs (item of m1, item of m2).
/// The cycle space of the result is {C1 △ C2 : Ci a cycle of Mi, C1 △ C2 ⊆ E1 △ E2}.
/// Throws InputError naming the failed side condition (size bound, overlap
/// alignment, loop/coloop, circuit, cocircuit).
DeltaSum delta_sum(const MatroidInstance& m1, const MatroidInstance& m2,
                   const std::vector<std::pair<Item, Item>>& shared);

/// Binary matroid whose cycle space is spanned by `cycles` (vectors of length n).
MatroidInstance binary_matroid_from_cycles(const std::vector<gf::Vec>& cycles, int n);

}  // namespace mp
