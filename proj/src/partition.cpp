#include "mp/partition.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace mp {

namespace {

bool independent_with(const MatroidInstance& m, ItemSet set, Item add, Item drop) {
  if (drop >= 0) set.erase(std::find(set.begin(), set.end(), drop));
  set.push_back(add);
  return m.rank(set) == static_cast<int>(set.size());
}

}  // namespace

PartitionResult partition_into_independent_sets(const MatroidInstance& m, int k) {
  if (k < 1) throw InputError("partition: k must be at least 1");
  PartitionResult res;
  res.loops = m.loops();
  res.parts.assign(static_cast<std::size_t>(k), {});
  std::vector<int> owner(static_cast<std::size_t>(m.size()), -1);

  for (Item s = 0; s < m.size(); ++s) {
    if (contains(res.loops, s)) continue;
    // BFS over items; prev[y] = item that replaces y in y's current part.
    std::vector<Item> prev(static_cast<std::size_t>(m.size()), -2);
    std::deque<Item> queue{s};
    prev[s] = -1;
    Item terminal = -1;
    int terminal_part = -1;
    while (!queue.empty() && terminal < 0) {
      const Item x = queue.front();
      queue.pop_front();
      for (int j = 0; j < k && terminal < 0; ++j) {
        if (owner[x] == j) continue;
        if (independent_with(m, res.parts[j], x, -1)) {
          terminal = x;
          terminal_part = j;
          break;
        }
        for (Item y : res.parts[j]) {
          if (prev[y] != -2) continue;
          if (independent_with(m, res.parts[j], x, y)) {
            prev[y] = x;
            queue.push_back(y);
          }
        }
      }
    }
    if (terminal < 0) {
      res.feasible = false;
      ItemSet reached;
      for (Item y = 0; y < m.size(); ++y)
        if (prev[y] != -2) reached.push_back(y);
      // The reachable set spans each part inside it, so |S| = k·r(S) + 1.
      if (static_cast<int>(reached.size()) > k * m.rank(reached)) {
        res.violating_set = reached;
      } else if (m.size() <= 16) {
        res.violating_set = exhaustive_density_violation(m, k).value_or(ItemSet{});
      }
      return res;
    }
    // Shift along the path: terminal joins terminal_part, each predecessor takes
    // the slot vacated by its successor.
    std::vector<std::pair<Item, int>> moves{{terminal, terminal_part}};
    for (Item y = terminal; prev[y] >= 0; y = prev[y]) moves.push_back({prev[y], owner[y]});
    for (auto [item, part] : moves) {
      if (owner[item] >= 0) {
        auto& old = res.parts[owner[item]];
        old.erase(std::find(old.begin(), old.end(), item));
      }
    }
    for (auto [item, part] : moves) {
      res.parts[part].push_back(item);
      owner[item] = part;
    }
  }
  for (auto& p : res.parts) p = normalized(p);
  res.feasible = true;
  return res;
}

std::optional<ItemSet> exhaustive_density_violation(const MatroidInstance& m, int k) {
  if (m.size() > 16) throw InputError("exhaustive density check limited to 16 items");
  const std::uint64_t full = std::uint64_t{1} << m.size();
  for (std::uint64_t s = 1; s < full; ++s) {
    const int size = __builtin_popcountll(s);
    if (size > k * m.rank_mask(s)) return from_mask(s, m.size());
  }
  return std::nullopt;
}

}  // namespace mp
