#include "mp/gf.hpp"

#include <cassert>
#include <stdexcept>

namespace mp::gf {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int inverse(int a, int p) {
  // Fermat: a^(p-2).
  long long result = 1;
  long long base = a % p;
  int e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<int>(result);
}

bool is_zero(const Vec& v) {
  for (int x : v)
    if (x != 0) return false;
  return true;
}

int dot(const Vec& a, const Vec& b, int p) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i] % p;
  return static_cast<int>(s % p);
}

Vec EchelonBasis::reduce(Vec v) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const int c = v[pivots_[r]];
    if (c == 0) continue;
    const Vec& row = rows_[r];
    for (int j = 0; j < dim_; ++j)
      if (row[j] != 0) v[j] = sub(v[j], mul(c, row[j], p_), p_);
  }
  return v;
}

bool EchelonBasis::insert(const Vec& v) {
  Vec w = reduce(v);
  int pivot = -1;
  for (int j = 0; j < dim_; ++j)
    if (w[j] != 0) {
      pivot = j;
      break;
    }
  if (pivot < 0) return false;
  const int scale = inverse(w[pivot], p_);
  for (int& x : w) x = mul(x, scale, p_);
  // Keep earlier rows reduced at the new pivot so reduce() stays a single pass.
  for (auto& row : rows_) {
    const int c = row[pivot];
    if (c == 0) continue;
    for (int j = 0; j < dim_; ++j) row[j] = sub(row[j], mul(c, w[j], p_), p_);
  }
  rows_.push_back(std::move(w));
  pivots_.push_back(pivot);
  return true;
}

bool EchelonBasis::in_span(const Vec& v) const { return is_zero(reduce(v)); }

int rank(const std::vector<Vec>& columns, int p, int dim) {
  EchelonBasis b(p, dim);
  for (const auto& c : columns) {
    b.insert(c);
    if (b.rank() == dim) break;
  }
  return b.rank();
}

std::vector<int> basis_indices(const std::vector<Vec>& columns, int p, int dim) {
  EchelonBasis b(p, dim);
  std::vector<int> out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (b.insert(columns[i])) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<Vec> null_space(const std::vector<Vec>& columns, int p, int dim) {
  const int n = static_cast<int>(columns.size());
  // Row-major copy of the dim x n matrix, reduced to RREF.
  std::vector<Vec> a(static_cast<std::size_t>(dim), Vec(static_cast<std::size_t>(n), 0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < dim; ++i) a[i][j] = columns[j][i] % p;
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < dim; ++col) {
    int sel = -1;
    for (int i = row; i < dim; ++i)
      if (a[i][col] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[row], a[sel]);
    const int scale = inverse(a[row][col], p);
    for (int& x : a[row]) x = mul(x, scale, p);
    for (int i = 0; i < dim; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const int c = a[i][col];
      for (int j = 0; j < n; ++j) a[i][j] = sub(a[i][j], mul(c, a[row][j], p), p);
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<Vec> out;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    Vec x(static_cast<std::size_t>(n), 0);
    x[f] = 1;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = sub(0, a[r][f], p);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vec> span_intersection(const std::vector<Vec>& a, const std::vector<Vec>& b, int p,
                                   int dim) {
  // Pairs (x, y) with A x = B y, i.e. the null space of [A | -B].
  std::vector<Vec> joined = a;
  for (const auto& v : b) {
    Vec neg(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) neg[i] = sub(0, v[i], p);
    joined.push_back(std::move(neg));
  }
  EchelonBasis basis(p, dim);
  std::vector<Vec> out;
  for (const auto& z : null_space(joined, p, dim)) {
    Vec v(static_cast<std::size_t>(dim), 0);
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (z[j] == 0) continue;
      for (int i = 0; i < dim; ++i) v[i] = add(v[i], mul(z[j], a[j][i], p), p);
    }
    if (basis.insert(v)) out.push_back(std::move(v));
  }
  return out;
}

std::optional<Vec> solve(const std::vector<Vec>& basis, const Vec& v, int p, int dim) {
  std::vector<Vec> cols = basis;
  cols.push_back(v);
  // A null vector with last coordinate nonzero expresses v in the basis.
  for (const auto& z : null_space(cols, p, dim)) {
    const int last = z.back();
    if (last == 0) continue;
    const int scale = sub(0, inverse(last, p), p);
    Vec x(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) x[j] = mul(z[j], scale, p);
    return x;
  }
  if (is_zero(v)) return Vec(basis.size(), 0);
  return std::nullopt;
}

std::vector<Vec> extend_basis(const std::vector<Vec>& base, const std::vector<Vec>& candidates,
                              int p, int dim) {
  EchelonBasis b(p, dim);
  for (const auto& v : base)
    if (!b.insert(v)) throw std::invalid_argument("extend_basis: base is not independent");
  std::vector<Vec> added;
  for (const auto& v : candidates)
    if (b.insert(v)) added.push_back(v);
  return added;
}

std::vector<Vec> all_vectors(int p, int dim) {
  std::vector<Vec> out;
  Vec cur(static_cast<std::size_t>(dim), 0);
  while (true) {
    out.push_back(cur);
    int i = dim - 1;
    while (i >= 0 && cur[i] == p - 1) cur[i--] = 0;
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

}  // namespace mp::gf
