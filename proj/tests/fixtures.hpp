#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "mp/composition.hpp"
#include "mp/delta_sum.hpp"
#include "mp/harness.hpp"
#include "mp/mechanisms.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace mp;

/// F_2 incidence columns of a loopless graph.
inline MatroidInstance incidence(const Graph& g) {
  std::vector<gf::Vec> cols;
  for (auto [u, v] : g.edges) {
    gf::Vec c(static_cast<std::size_t>(g.vertices), 0);
    c[u] ^= 1;
    c[v] ^= 1;
    cols.push_back(c);
  }
  return MatroidInstance::vector(2, cols, g.vertices);
}

inline std::vector<Distribution> random_laws(std::mt19937_64& rng, int n, int atoms) {
  std::vector<Distribution> d;
  for (int i = 0; i < n; ++i) d.push_back(oracle::random_discrete(rng, atoms));
  return d;
}

inline std::vector<Distribution> pick(const std::vector<Distribution>& d, const ItemSet& s) {
  std::vector<Distribution> out;
  for (Item i : s) out.push_back(d[i]);
  return out;
}

/// Single-item rule on one uniformly chosen parallel class; ratio depends on the instance.
inline GuaranteedMechanism class_pick(const MatroidInstance& m) {
  const double ratio = 2.0 * std::max<std::size_t>(1, m.parallel_classes().size());
  return {"class-pick", ratio, [](const MatroidInstance& mm, const std::vector<Distribution>& d, std::uint64_t) {
            return MechanismPtr(std::make_shared<ParallelClassMechanism>(mm, d));
          }};
}

inline bool subset_of(const ItemSet& a, const ItemSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

/// Worst order for every atom of the support, by brute force over permutations.
inline double oracle_gambler(const MatroidInstance& m, const std::vector<Distribution>& d, const Mechanism& mech) {
  const auto atoms = mech.support(100000);
  if (!atoms) throw std::logic_error("mechanism support too large");
  double total = 0.0;
  for (const auto& a : *atoms) {
    std::vector<int> order = all_items(m.size());
    double worst = std::numeric_limits<double>::infinity();
    do {
      worst = std::min(worst, oracle::enumerated_gambler(m, d, a.thresholds, order));
    } while (std::next_permutation(order.begin(), order.end()));
    total += a.weight * worst;
  }
  return total;
}

/// Oracle rank: span dimension by explicit enumeration.
inline int oracle_rank(const MatroidInstance& m, const ItemSet& s) {
  std::vector<gf::Vec> cols;
  for (Item i : s) cols.push_back(m.vectors()->columns[i]);
  return oracle::span_rank(cols, m.vectors()->p, m.vectors()->dim);
}

/// 2-sum of a graphic K4-minus-an-edge and a cographic K4-minus-an-edge along one element.
struct RegularInstance {
  MatroidInstance m;
  DecompositionTree tree;
};

/// Every element of the span of `basis` over F_2.
inline std::vector<gf::Vec> span_of(const std::vector<gf::Vec>& basis, int len) {
  std::vector<gf::Vec> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << basis.size()); ++mask) {
    gf::Vec v(static_cast<std::size_t>(len), 0);
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (mask >> j & 1U)
        for (int i = 0; i < len; ++i) v[i] ^= basis[j][i];
    out.push_back(v);
  }
  return out;
}

inline RegularInstance graphic_cographic_two_sum() {
  // Edge 0 of each graph is the glued element. The sum's cycles are C1 △ C2 over
  // pairs of cycles that agree on the glued element.
  Graph g1{4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}}};
  Graph g2{4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}}};
  const auto m1 = incidence(g1);
  std::vector<gf::Vec> stars;
  for (int v = 0; v < g2.vertices; ++v) {
    gf::Vec c(5, 0);
    for (int e = 0; e < 5; ++e)
      if (g2.edges[e].first == v || g2.edges[e].second == v) c[e] ^= 1;
    stars.push_back(c);
  }
  if (!same_rank_function(binary_matroid_from_cycles(stars, 5), MatroidInstance::cographic(g2)))
    throw std::logic_error("cographic cycle space mismatch");
  std::vector<gf::Vec> cycles;
  for (const auto& z1 : span_of(gf::null_space(m1.vectors()->columns, 2, 4), 5))
    for (const auto& z2 : span_of(stars, 5)) {
      if (z1[0] != z2[0]) continue;
      gf::Vec z(z1.begin() + 1, z1.end());
      z.insert(z.end(), z2.begin() + 1, z2.end());
      cycles.push_back(z);
    }
  RegularInstance out{binary_matroid_from_cycles(cycles, 8), {}};
  out.tree.nodes.push_back({0, "graphic", {0, 1, 2, 3}, keep_edges(g1, {1, 2, 3, 4}), std::nullopt, 0});
  out.tree.nodes.push_back({1, "cographic", {4, 5, 6, 7}, contract_edges(g2, {0}), std::nullopt, 0});
  out.tree.edges.push_back({0, 1, 2});
  return out;
}

}  // namespace fixture
