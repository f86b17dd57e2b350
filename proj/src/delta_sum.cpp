#include "mp/delta_sum.hpp"

#include <string>

namespace mp {

MatroidInstance binary_matroid_from_cycles(const std::vector<gf::Vec>& cycles, int n) {
  // Rows of the representation span the orthogonal complement of the cycle space.
  // null_space() treats its input as columns, so pass each cycle as a column of the
  // transpose: we need y with <y, z> = 0 for every cycle z.
  std::vector<gf::Vec> transpose(static_cast<std::size_t>(n), gf::Vec(cycles.size(), 0));
  for (std::size_t c = 0; c < cycles.size(); ++c)
    for (int i = 0; i < n; ++i) transpose[i][c] = cycles[c][i];
  const auto rows = gf::null_space(transpose, 2, static_cast<int>(cycles.size()));
  const int dim = static_cast<int>(rows.size());
  std::vector<gf::Vec> cols(static_cast<std::size_t>(n), gf::Vec(static_cast<std::size_t>(dim), 0));
  for (int r = 0; r < dim; ++r)
    for (int i = 0; i < n; ++i) cols[i][r] = rows[r][i];
  return MatroidInstance::vector(2, std::move(cols), dim);
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw InputError("delta_sum: " + what); }

void require_binary(const MatroidInstance& m, const char* side) {
  if (m.kind() != MatroidKind::vector || m.vectors()->p != 2)
    fail(std::string(side) + " is not a binary vector matroid");
}

}  // namespace

DeltaSum delta_sum(const MatroidInstance& m1, const MatroidInstance& m2,
                   const std::vector<std::pair<Item, Item>>& shared) {
  require_binary(m1, "first operand");
  require_binary(m2, "second operand");
  ItemSet s1, s2;
  for (auto [a, b] : shared) {
    if (a < 0 || a >= m1.size() || b < 0 || b >= m2.size()) fail("shared pair out of range");
    s1.push_back(a);
    s2.push_back(b);
  }
  s1 = normalized(s1);
  s2 = normalized(s2);
  if (s1.size() != shared.size() || s2.size() != shared.size()) fail("shared items repeat");

  const int n1 = m1.size();
  const int n2 = m2.size();
  const auto& v1 = *m1.vectors();
  const auto& v2 = *m2.vectors();
  for (auto [a, b] : shared)
    if (v1.columns[a] != v2.columns[b]) fail("overlap alignment: shared columns differ");

  const MatroidInstance d1 = dual(m1);
  const MatroidInstance d2 = dual(m2);
  SumKind kind;
  switch (shared.size()) {
    case 0:
      if (n1 == 0 || n2 == 0) fail("size bound: 1-sum needs nonempty ground sets");
      kind = SumKind::one_sum;
      break;
    case 1: {
      if (n1 < 3 || n2 < 3) fail("size bound: 2-sum needs |E1|, |E2| >= 3");
      const auto [a, b] = shared.front();
      if (is_loop(m1, a) || is_loop(m2, b)) fail("loop: shared element is a loop");
      if (is_loop(d1, a) || is_loop(d2, b)) fail("coloop: shared element is a coloop");
      kind = SumKind::two_sum;
      break;
    }
    case 3: {
      if (n1 < 7 || n2 < 7) fail("size bound: 3-sum needs |E1|, |E2| >= 7");
      auto is_circuit = [](const MatroidInstance& m, const ItemSet& z) {
        if (m.rank(z) != static_cast<int>(z.size()) - 1) return false;
        for (Item x : z)
          if (!m.is_independent(set_difference(z, {x}))) return false;
        return true;
      };
      if (!is_circuit(m1, s1) || !is_circuit(m2, s2)) fail("circuit: overlap is not a circuit of both");
      if (!d1.is_independent(s1) || !d2.is_independent(s2))
        fail("cocircuit: overlap contains a circuit of a dual");
      kind = SumKind::three_sum;
      break;
    }
    default: fail("overlap size must be 0, 1 or 3");
  }

  // Cycle spaces are the null spaces of the representations.
  const auto z1 = gf::null_space(v1.columns, 2, v1.dim);
  const auto z2 = gf::null_space(v2.columns, 2, v2.dim);
  // Combinations agreeing on the overlap: solve sum λ z1|S + sum μ z2|S = 0.
  const int k = static_cast<int>(shared.size());
  std::vector<gf::Vec> gens;
  for (const auto& z : z1) {
    gf::Vec g(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) g[i] = z[shared[i].first];
    gens.push_back(std::move(g));
  }
  for (const auto& z : z2) {
    gf::Vec g(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) g[i] = z[shared[i].second];
    gens.push_back(std::move(g));
  }
  DeltaSum out{kind, MatroidInstance::uniform(0, 0), {}};
  std::vector<int> pos1(static_cast<std::size_t>(n1), -1), pos2(static_cast<std::size_t>(n2), -1);
  for (Item i = 0; i < n1; ++i)
    if (!contains(s1, i)) {
      pos1[i] = static_cast<int>(out.origin.size());
      out.origin.push_back({1, i});
    }
  for (Item i = 0; i < n2; ++i)
    if (!contains(s2, i)) {
      pos2[i] = static_cast<int>(out.origin.size());
      out.origin.push_back({2, i});
    }
  const int n = static_cast<int>(out.origin.size());
  std::vector<gf::Vec> cycles;
  for (const auto& comb : gf::null_space(gens, 2, k)) {
    gf::Vec c(static_cast<std::size_t>(n), 0);
    for (std::size_t j = 0; j < z1.size(); ++j)
      if (comb[j])
        for (Item i = 0; i < n1; ++i)
          if (pos1[i] >= 0) c[pos1[i]] ^= z1[j][i];
    for (std::size_t j = 0; j < z2.size(); ++j)
      if (comb[z1.size() + j])
        for (Item i = 0; i < n2; ++i)
          if (pos2[i] >= 0) c[pos2[i]] ^= z2[j][i];
    cycles.push_back(std::move(c));
  }
  out.matroid = binary_matroid_from_cycles(cycles, n);
  return out;
}

}  // namespace mp
