#pragma once

#include <cstdint>
#include <vector>

#include "mp/distribution.hpp"
#include "mp/matroid.hpp"

namespace mp {

/// A point p of the matroid polytope together with the per-item tails it induces.
struct ExAnteRelaxation {
  std::vector<double> p;
  std::vector<double> tau;
  std::vector<double> theta;
  std::vector<double> t;
  /// Standard error of each p_i (zero when computed exactly).
  std::vector<double> p_stderr;
  /// Trials used; zero for exact enumeration.
  std::uint64_t sample_count = 0;
  bool exact = false;

  int size() const { return static_cast<int>(p.size()); }
  /// Σ p_i t_i, an upper bound on the prophet's expectation.
  double bound() const;
};

/// Fills tau, theta and t from p.
ExAnteRelaxation relaxation_from_p(const std::vector<Distribution>& dists, std::vector<double> p);

/// p_i = P[i in the greedy optimum], the optimum computed per realization with
/// uniformly random tie-breaking and zero-valued items left out.
ExAnteRelaxation estimate_ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                                  std::uint64_t trials, std::uint64_t seed);

/// Joint outcomes of finite laws; 0 if any law is continuous, saturates at UINT64_MAX.
std::uint64_t joint_outcome_count(const std::vector<Distribution>& dists);

/// Same quantity computed by enumerating every joint outcome (finite laws,
/// at most `max_outcomes` outcomes). Ties are averaged over all orders of the
/// tied items.
ExAnteRelaxation exact_ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                               std::uint64_t max_outcomes = 1'000'000);

/// Exact when the joint outcome space is small, Monte Carlo otherwise.
ExAnteRelaxation ex_ante(const MatroidInstance& m, const std::vector<Distribution>& dists,
                         std::uint64_t trials, std::uint64_t seed);

/// X'_i = t_i with probability p_i, coupled to X_i through the tail rule.
struct BernoulliInstance {
  std::vector<Tail> items;

  int size() const { return static_cast<int>(items.size()); }
  /// Coupling predicate: realization x of item i with auxiliary uniform u.
  bool active(int i, double x, double u) const;
  double value(int i) const { return items[static_cast<std::size_t>(i)].t; }
  double probability(int i) const { return items[static_cast<std::size_t>(i)].p; }
};

BernoulliInstance reduce_to_bernoulli(const ExAnteRelaxation& relax);

/// Calls f(values, probability) for every joint outcome of finite laws.
template <class F>
void for_each_outcome(const std::vector<Distribution>& dists, F&& f) {
  const std::size_t n = dists.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = dists[i].support()[0];
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) prob *= dists[i].probabilities()[idx[i]];
    f(values, prob);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < dists[i].support().size()) {
        values[i] = dists[i].support()[idx[i]];
        break;
      }
      idx[i] = 0;
      values[i] = dists[i].support()[0];
    }
    if (i == n) return;
  }
}

}  // namespace mp
