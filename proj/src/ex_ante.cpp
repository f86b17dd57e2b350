#include "mp/ex_ante.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mp {

namespace {

constexpr std::uint64_t kMaxTieOrders = 720;

void check_sizes(const MatroidInstance& m, const std::vector<Distribution>& dists) {
  if (static_cast<int>(dists.size()) != m.size())
    throw InputError("distribution count does not match the ground set");
}

/// Scan order: decreasing value, ties in the order given by `rank_key`.
std::vector<Item> value_order(const std::vector<double>& x, const std::vector<std::uint64_t>& key) {
  std::vector<Item> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Item a, Item b) {
    if (x[a] != x[b]) return x[a] > x[b];
    return key[a] < key[b];
  });
  return order;
}

}  // namespace

double ExAnteRelaxation::bound() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) sum += p[i] * t[i];
  return sum;
}

ExAnteRelaxation relaxation_from_p(const std::vector<Distribution>& dists, std::vector<double> p) {
  if (p.size() != dists.size()) throw InputError("p and distributions differ in length");
  ExAnteRelaxation r;
  r.p = std::move(p);
  const std::size_t n = r.p.size();
  r.tau.assign(n, std::numeric_limits<double>::infinity());
  r.theta.assign(n, 0.0);
  r.t.assign(n, 0.0);
  r.p_stderr.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    r.p[i] = std::clamp(r.p[i], 0.0, 1.0);
    if (r.p[i] <= 0) {
      const double top = dists[i].ess_sup();
      r.t[i] = std::isfinite(top) ? top : 0.0;
      continue;
    }
    const Tail tail = dists[i].tail(r.p[i]);
    r.tau[i] = tail.tau;
    r.theta[i] = tail.theta;
    r.t[i] = tail.t;
  }
  return r;
}

ExAnteRelaxation estimate_ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                                  std::uint64_t trials, std::uint64_t seed) {
  check_sizes(m, dists);
  if (trials < 1) throw InputError("trials must be at least 1");
  const std::size_t n = dists.size();
  std::vector<std::uint64_t> hits(n, 0);
  std::vector<double> x(n);
  std::vector<std::uint64_t> key(n);
  auto tracker = m.tracker();
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Rng values(seed, "ex-ante/values", trial);
    Rng ties(seed, "ex-ante/ties", trial);
    for (std::size_t i = 0; i < n; ++i) x[i] = dists[i].sample(values);
    for (std::size_t i = 0; i < n; ++i) key[i] = ties.next();
    tracker->clear();
    for (Item i : value_order(x, key)) {
      if (x[static_cast<std::size_t>(i)] <= 0) break;
      if (tracker->try_add(i)) ++hits[static_cast<std::size_t>(i)];
    }
  }
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(hits[i]) / static_cast<double>(trials);
  ExAnteRelaxation r = relaxation_from_p(dists, p);
  for (std::size_t i = 0; i < n; ++i)
    r.p_stderr[i] = std::sqrt(r.p[i] * (1.0 - r.p[i]) / static_cast<double>(trials));
  r.sample_count = trials;
  return r;
}

std::uint64_t joint_outcome_count(const std::vector<Distribution>& dists) {
  std::uint64_t count = 1;
  for (const auto& d : dists) {
    if (!d.finite_support()) return 0;
    const std::uint64_t s = d.support().size();
    if (count > std::numeric_limits<std::uint64_t>::max() / s) return std::numeric_limits<std::uint64_t>::max();
    count *= s;
  }
  return count;
}

ExAnteRelaxation exact_ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                               std::uint64_t max_outcomes) {
  check_sizes(m, dists);
  const std::uint64_t outcomes = joint_outcome_count(dists);
  if (outcomes == 0) throw PreconditionError("exact relaxation needs finite-support laws");
  if (outcomes > max_outcomes)
    throw PreconditionError("joint outcome space has " + std::to_string(outcomes) + " outcomes, limit " +
                            std::to_string(max_outcomes));
  const std::size_t n = dists.size();
  std::vector<double> p(n, 0.0);
  std::vector<std::uint64_t> key(n);
  auto tracker = m.tracker();
  for_each_outcome(dists, [&](const std::vector<double>& x, double prob) {
    // Positive items sorted by value; every tied block is permuted exhaustively
    // (or by a fixed sample when the blocks are large).
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Item a, Item b) { return x[a] > x[b]; });
    while (!order.empty() && x[static_cast<std::size_t>(order.back())] <= 0) order.pop_back();
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::uint64_t combos = 1;
    for (std::size_t s = 0; s < order.size();) {
      std::size_t e = s + 1;
      while (e < order.size() && x[order[e]] == x[order[s]]) ++e;
      if (e - s > 1) {
        blocks.push_back({s, e});
        for (std::size_t f = 2; f <= e - s && combos <= kMaxTieOrders; ++f) combos *= f;
      }
      s = e;
    }
    auto run = [&](const std::vector<Item>& scan, double weight) {
      tracker->clear();
      for (Item i : scan)
        if (tracker->try_add(i)) p[static_cast<std::size_t>(i)] += weight;
    };
    if (blocks.empty()) {
      run(order, prob);
      return;
    }
    if (combos <= kMaxTieOrders) {
      // Odometer over the permutations of each tied block.
      std::vector<Item> scan = order;
      for (auto [s, e] : blocks) std::sort(scan.begin() + static_cast<long>(s), scan.begin() + static_cast<long>(e));
      const double w = prob / static_cast<double>(combos);
      while (true) {
        run(scan, w);
        std::size_t b = 0;
        for (; b < blocks.size(); ++b) {
          auto [s, e] = blocks[b];
          if (std::next_permutation(scan.begin() + static_cast<long>(s), scan.begin() + static_cast<long>(e))) break;
        }
        if (b == blocks.size()) break;
      }
      return;
    }
    Rng rng(0, "ex-ante/exact-ties", 0);
    const double w = prob / static_cast<double>(kMaxTieOrders);
    for (std::uint64_t r = 0; r < kMaxTieOrders; ++r) {
      std::vector<Item> scan = order;
      for (auto [s, e] : blocks) {
        std::vector<Item> block(scan.begin() + static_cast<long>(s), scan.begin() + static_cast<long>(e));
        rng.shuffle(block);
        std::copy(block.begin(), block.end(), scan.begin() + static_cast<long>(s));
      }
      run(scan, w);
    }
  });
  ExAnteRelaxation r = relaxation_from_p(dists, p);
  r.exact = true;
  return r;
}

ExAnteRelaxation ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                         std::uint64_t trials, std::uint64_t seed) {
  const std::uint64_t outcomes = joint_outcome_count(dists);
  if (outcomes != 0 && outcomes <= 100'000) return exact_ex_ante(m, dists, outcomes);
  return estimate_ex_ante(m, dists, trials, seed);
}

bool BernoulliInstance::active(int i, double x, double u) const {
  const Tail& tail = items[static_cast<std::size_t>(i)];
  if (tail.p <= 0) return false;
  return x > tail.tau || (x == tail.tau && u < tail.theta);
}

BernoulliInstance reduce_to_bernoulli(const ExAnteRelaxation& relax) {
  BernoulliInstance b;
  for (int i = 0; i < relax.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    b.items.push_back(Tail{relax.p[k], relax.tau[k], relax.theta[k], relax.t[k]});
  }
  return b;
}

}  // namespace mp
