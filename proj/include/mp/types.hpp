#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mp {

/// Item identifiers are contiguous from zero.
using Item = int;

/// Sorted, duplicate-free list of item identifiers.
using ItemSet = std::vector<Item>;

/// Malformed or out-of-range caller input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an algorithm does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No solution exists; `witness` carries a certificate when one was found.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, ItemSet witness = {})
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const ItemSet& witness() const { return witness_; }

 private:
  ItemSet witness_;
};

ItemSet all_items(int n);
ItemSet complement(int n, const ItemSet& s);
ItemSet set_union(const ItemSet& a, const ItemSet& b);
ItemSet set_difference(const ItemSet& a, const ItemSet& b);
ItemSet set_intersection(const ItemSet& a, const ItemSet& b);
bool contains(const ItemSet& s, Item x);
/// Sorts and removes duplicates.
ItemSet normalized(ItemSet s);

/// Subset of {0..n-1} encoded by the bits of `mask` (n <= 63).
ItemSet from_mask(std::uint64_t mask, int n);
std::uint64_t to_mask(const ItemSet& s);

}  // namespace mp
