#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mp/distribution.hpp"
#include "mp/matroid.hpp"
#include "mp/mechanism.hpp"

namespace mp {

struct GamblerResult {
  ItemSet accepted;
  double value = 0.0;
};

/// Scans `order`, accepting item i iff its threshold passes x[i] (with auxiliary
/// uniform aux[i], or 0 when aux is empty) and the accepted set stays independent.
GamblerResult run_gambler(const MatroidInstance& m, const ThresholdVector& tv, const std::vector<Item>& order,
                          const std::vector<double>& x, const std::vector<double>& aux = {});

/// Value of the maximum-weight independent set.
double prophet_value(const MatroidInstance& m, const std::vector<double>& x);

enum class OrderKind { fixed, random, adversarial, exhaustive };

struct OrderStrategy {
  OrderKind kind = OrderKind::adversarial;
  /// Used by OrderKind::fixed.
  std::vector<Item> permutation;

  static OrderStrategy fixed(std::vector<Item> perm) { return {OrderKind::fixed, std::move(perm)}; }
  static OrderStrategy random() { return {OrderKind::random, {}}; }
  static OrderStrategy adversarial() { return {OrderKind::adversarial, {}}; }
  static OrderStrategy exhaustive() { return {OrderKind::exhaustive, {}}; }
  /// "adversarial", "random", "exhaustive", or "fixed:3,1,0,2".
  static OrderStrategy parse(const std::string& text);
  std::string name() const;
};

/// A rule that fixes the arrival order from the thresholds and the distributions
/// only; realized values never enter.
struct OrderPolicy {
  enum class Rule { identity, reverse, threshold_ascending, threshold_descending, mean_ascending,
                    mean_descending, p_descending, permutation };
  Rule rule = Rule::identity;
  std::vector<Item> permutation;
  std::string name;

  std::vector<Item> order(const ThresholdVector& tv, const std::vector<double>& means,
                          const std::vector<double>* p) const;
};

/// Candidate pool of the heuristic adversary: structural rules plus 32 random
/// permutations derived from `seed`.
std::vector<OrderPolicy> adversary_pool(int n, std::uint64_t seed, bool has_relaxation);
/// Every permutation of 0..n-1 in lexicographic order.
std::vector<OrderPolicy> all_orders(int n);

struct PolicyStats {
  std::string name;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SimulationReport {
  std::string instance;
  std::string mechanism;
  std::string order_strategy;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double claimed_ratio = 0.0;
  double gambler_mean = 0.0;
  double gambler_stderr = 0.0;
  double prophet_mean = 0.0;
  double prophet_stderr = 0.0;
  /// Σ p_i t_i when the mechanism carries a relaxation, NaN otherwise.
  double relaxation_bound = 0.0;
  std::vector<double> relaxation_p;
  /// Per-item acceptance frequency under the worst order policy.
  std::vector<double> acceptance;
  /// Per-item frequency of a finite threshold.
  std::vector<double> survival;
  std::string worst_order;
  std::vector<PolicyStats> policies;
  /// Trials where the gambler beat the prophet (must be zero).
  std::uint64_t dominance_violations = 0;
  bool exact = false;

  double empirical_ratio() const;
  /// Allowed shortfall: 3·sqrt(se_g^2 + (se_p/α)^2).
  double slack() const;
  bool pass() const;
  std::string verdict() const;
};

struct SimulateOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  OrderStrategy order = OrderStrategy::adversarial();
  /// 0 means MP_THREADS or the hardware concurrency.
  unsigned threads = 0;
  std::string instance = "instance";
};

/// Monte Carlo run. Every policy sees the same draws, realizations and auxiliary
/// uniforms; the adversary is charged the policy with the lowest mean, which
/// keeps its choice independent of any single realization.
SimulationReport simulate(const MatroidInstance& m, const std::vector<Distribution>& dists, const Mechanism& mech,
                          const SimulateOptions& options);

struct ExactOptions {
  OrderStrategy order = OrderStrategy::exhaustive();
  std::uint64_t max_states = 100'000'000;
  std::uint64_t max_outcomes = 1'000'000;
  std::size_t max_draws = 1'000'000;
  std::uint64_t seed = 1;
};

struct ExactResult {
  /// Gambler expectation charged against an adversary that also sees the
  /// mechanism's draw (never larger than gambler_fixed_order).
  double gambler = 0.0;
  /// min over orders of the expectation over draws: the adversary fixes the order
  /// without seeing the draw.
  double gambler_fixed_order = 0.0;
  double prophet = 0.0;
  std::string worst_order;
  std::uint64_t states = 0;
  std::size_t draws = 0;
  std::size_t orders = 0;
};

/// Exact gambler expectation of every (draw, order) pair via the pass
/// probability and pass expectation of each threshold; prophet by enumerating
/// every joint outcome of the finite laws.
ExactResult exact_evaluate(const MatroidInstance& m, const std::vector<Distribution>& dists, const Mechanism& mech,
                           const ExactOptions& options = {});

/// Exact gambler expectation for one threshold vector and one order.
double exact_gambler(const MatroidInstance& m, const std::vector<Distribution>& dists, const ThresholdVector& tv,
                     const std::vector<Item>& order);

/// E[max-weight independent set] over all joint outcomes of finite laws.
double exact_prophet(const MatroidInstance& m, const std::vector<Distribution>& dists,
                     std::uint64_t max_outcomes = 1'000'000);

/// Worker count from MP_THREADS, else hardware concurrency.
unsigned default_threads();

}  // namespace mp
