#include "mp/types.hpp"

#include <algorithm>
#include <numeric>

namespace mp {

ItemSet all_items(int n) {
  ItemSet s(static_cast<std::size_t>(n));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

ItemSet complement(int n, const ItemSet& s) {
  ItemSet out;
  out.reserve(static_cast<std::size_t>(n) - std::min<std::size_t>(s.size(), n));
  std::size_t j = 0;
  for (Item i = 0; i < n; ++i) {
    while (j < s.size() && s[j] < i) ++j;
    if (j < s.size() && s[j] == i) continue;
    out.push_back(i);
  }
  return out;
}

ItemSet set_union(const ItemSet& a, const ItemSet& b) {
  ItemSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ItemSet set_difference(const ItemSet& a, const ItemSet& b) {
  ItemSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ItemSet set_intersection(const ItemSet& a, const ItemSet& b) {
  ItemSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains(const ItemSet& s, Item x) { return std::binary_search(s.begin(), s.end(), x); }

ItemSet normalized(ItemSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

ItemSet from_mask(std::uint64_t mask, int n) {
  ItemSet s;
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1U) s.push_back(i);
  return s;
}

std::uint64_t to_mask(const ItemSet& s) {
  std::uint64_t m = 0;
  for (Item i : s) m |= std::uint64_t{1} << i;
  return m;
}

}  // namespace mp
