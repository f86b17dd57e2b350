#pragma once

#include <optional>
#include <vector>

namespace mp::gf {

/// A vector over F_p, entries in [0, p).
using Vec = std::vector<int>;

bool is_prime(int p);
int inverse(int a, int p);
inline int add(int a, int b, int p) { return (a + b) % p; }
inline int sub(int a, int b, int p) { return (a - b + p) % p; }
inline int mul(int a, int b, int p) { return static_cast<int>(static_cast<long long>(a) * b % p); }

bool is_zero(const Vec& v);
/// Dot product over F_p.
int dot(const Vec& a, const Vec& b, int p);

/// Row-echelon basis that grows one vector at a time.
class EchelonBasis {
 public:
  EchelonBasis(int p, int dim) : p_(p), dim_(dim) {}

  /// Adds v when it is outside the current span; returns whether it was added.
  bool insert(const Vec& v);
  bool in_span(const Vec& v) const;
  int rank() const { return static_cast<int>(rows_.size()); }
  int dim() const { return dim_; }
  int prime() const { return p_; }

 private:
  Vec reduce(Vec v) const;

  int p_;
  int dim_;
  std::vector<Vec> rows_;  // normalized so rows_[i][pivots_[i]] == 1
  std::vector<int> pivots_;
};

/// Rank of the column family.
int rank(const std::vector<Vec>& columns, int p, int dim);

/// A maximal independent subfamily, as indices into `columns` (greedy, in order).
std::vector<int> basis_indices(const std::vector<Vec>& columns, int p, int dim);

/// Basis of {x : sum_j x_j columns[j] = 0}; each returned vector has length columns.size().
std::vector<Vec> null_space(const std::vector<Vec>& columns, int p, int dim);

/// Basis of span(a) ∩ span(b).
std::vector<Vec> span_intersection(const std::vector<Vec>& a, const std::vector<Vec>& b, int p,
                                   int dim);

/// Coefficients x with sum_j x_j basis[j] = v, or nullopt if v is outside the span.
/// `basis` must be linearly independent.
std::optional<Vec> solve(const std::vector<Vec>& basis, const Vec& v, int p, int dim);

/// Extends an independent family `base` with vectors from `candidates` (in order)
/// until it spans span(base ∪ candidates); returns only the added vectors.
std::vector<Vec> extend_basis(const std::vector<Vec>& base, const std::vector<Vec>& candidates,
                              int p, int dim);

/// Enumerates all p^dim coefficient vectors in lexicographic order (dim small).
std::vector<Vec> all_vectors(int p, int dim);

}  // namespace mp::gf
