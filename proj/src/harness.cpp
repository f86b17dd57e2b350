#include "mp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "mp/ex_ante.hpp"
#include "mp/rng.hpp"

namespace mp {

namespace {

constexpr std::uint64_t kChunk = 1024;
constexpr int kRandomOrders = 32;
constexpr int kMaxExhaustive = 8;

void check_instance(const MatroidInstance& m, const std::vector<Distribution>& dists, const Mechanism& mech) {
  if (static_cast<int>(dists.size()) != m.size()) throw InputError("distribution count does not match the ground set");
  if (mech.size() != m.size()) throw InputError("mechanism size does not match the ground set");
}

std::vector<double> means_of(const std::vector<Distribution>& dists) {
  std::vector<double> out;
  for (const auto& d : dists) out.push_back(d.mean());
  return out;
}

/// Lazily filled independence table over bitmasks.
class IndependenceCache {
 public:
  explicit IndependenceCache(const MatroidInstance& m) : m_(m) {
    if (m.size() > 24) throw PreconditionError("exact evaluation supports at most 24 items");
    table_.assign(std::size_t{1} << m.size(), -1);
  }
  bool operator()(std::uint64_t mask) {
    auto& v = table_[mask];
    if (v < 0) v = m_.rank_mask(mask) == __builtin_popcountll(mask) ? 1 : 0;
    return v == 1;
  }

 private:
  const MatroidInstance& m_;
  std::vector<signed char> table_;
};

/// Probability distribution over the accepted set, kept sorted by mask.
using StateDist = std::vector<std::pair<std::uint64_t, double>>;

struct PassLaw {
  std::vector<double> pi;
  std::vector<double> mu;
};

PassLaw pass_law(const std::vector<Distribution>& dists, const ThresholdVector& tv) {
  PassLaw law;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    law.pi.push_back(tv.values[i].pass_probability(dists[i]));
    law.mu.push_back(tv.values[i].pass_expectation(dists[i]));
  }
  return law;
}

/// Advances the state distribution by presenting item i; returns the expected value gained.
double present(StateDist& dist, Item i, const PassLaw& law, IndependenceCache& indep, std::uint64_t& states) {
  const auto k = static_cast<std::size_t>(i);
  const double pi = law.pi[k];
  if (pi <= 0) return 0.0;
  const std::uint64_t bit = std::uint64_t{1} << i;
  double gained = 0.0;
  StateDist next;
  next.reserve(dist.size() * 2);
  bool changed = false;
  for (auto [mask, q] : dist) {
    ++states;
    if (!indep(mask | bit)) {
      next.push_back({mask, q});
      continue;
    }
    changed = true;
    gained += q * law.mu[k];
    next.push_back({mask | bit, q * pi});
    if (pi < 1) next.push_back({mask, q * (1 - pi)});
  }
  if (changed) {
    std::sort(next.begin(), next.end());
    StateDist merged;
    for (auto& e : next) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(e);
    }
    dist = std::move(merged);
  }
  return gained;
}

double gambler_for_order(const PassLaw& law, const std::vector<Item>& order, IndependenceCache& indep,
                         std::uint64_t& states) {
  StateDist dist{{0, 1.0}};
  double value = 0.0;
  for (Item i : order) value += present(dist, i, law, indep, states);
  return value;
}

/// Depth-first walk over all permutations sharing prefixes; calls leaf(index, value)
/// in lexicographic order.
template <class Leaf>
void all_order_values(int n, const PassLaw& law, IndependenceCache& indep, std::uint64_t& states,
                      std::uint64_t max_states, Leaf&& leaf) {
  std::size_t index = 0;
  std::vector<Item> prefix;
  auto dfs = [&](auto&& self, std::uint64_t used, const StateDist& dist, double value) -> void {
    if (static_cast<int>(prefix.size()) == n) {
      leaf(index++, value);
      return;
    }
    for (Item i = 0; i < n; ++i) {
      if (used >> i & 1U) continue;
      StateDist next = dist;
      const double gained = present(next, i, law, indep, states);
      if (states > max_states)
        throw PreconditionError("exact evaluation exceeds " + std::to_string(max_states) + " states (" +
                                std::to_string(states) + " visited)");
      prefix.push_back(i);
      self(self, used | (std::uint64_t{1} << i), next, value + gained);
      prefix.pop_back();
    }
  };
  dfs(dfs, 0, StateDist{{0, 1.0}}, 0.0);
}

std::string join_order(const std::vector<Item>& order) {
  std::ostringstream out;
  for (std::size_t i = 0; i < order.size(); ++i) out << (i ? "," : "") << order[i];
  return out.str();
}

struct ChunkStats {
  double prophet_sum = 0.0;
  double prophet_sq = 0.0;
  std::vector<double> policy_sum;
  std::vector<double> policy_sq;
  std::vector<std::uint64_t> accept;  // policy-major
  std::vector<std::uint64_t> survive;
  std::uint64_t violations = 0;
};

}  // namespace

unsigned default_threads() {
  if (const char* env = std::getenv("MP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

GamblerResult run_gambler(const MatroidInstance& m, const ThresholdVector& tv, const std::vector<Item>& order,
                          const std::vector<double>& x, const std::vector<double>& aux) {
  const int n = m.size();
  if (tv.size() != n || static_cast<int>(x.size()) != n) throw InputError("run_gambler size mismatch");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Item i : order) {
    if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)]) throw InputError("order is not a permutation");
    seen[static_cast<std::size_t>(i)] = 1;
  }
  if (static_cast<int>(order.size()) != n) throw InputError("order is not a permutation");
  GamblerResult r;
  auto tracker = m.tracker();
  for (Item i : order) {
    const auto k = static_cast<std::size_t>(i);
    const double u = aux.empty() ? 0.0 : aux[k];
    if (!tv[i].passes(x[k], u)) continue;
    if (!tracker->try_add(i)) continue;
    r.accepted.push_back(i);
    r.value += x[k];
  }
  std::sort(r.accepted.begin(), r.accepted.end());
  return r;
}

double prophet_value(const MatroidInstance& m, const std::vector<double>& x) {
  return total_weight(greedy_max_weight(m, x), x);
}

OrderStrategy OrderStrategy::parse(const std::string& text) {
  if (text == "adversarial") return adversarial();
  if (text == "random") return random();
  if (text == "exhaustive") return exhaustive();
  if (text.rfind("fixed:", 0) == 0) {
    std::vector<Item> perm;
    std::stringstream in(text.substr(6));
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        perm.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw InputError("bad item in order: '" + tok + "'");
      }
    }
    return fixed(perm);
  }
  throw InputError("unknown order strategy '" + text + "' (adversarial, random, exhaustive, fixed:i,j,...)");
}

std::string OrderStrategy::name() const {
  switch (kind) {
    case OrderKind::fixed: return "fixed:" + join_order(permutation);
    case OrderKind::random: return "random";
    case OrderKind::adversarial: return "adversarial";
    case OrderKind::exhaustive: return "exhaustive";
  }
  return "";
}

std::vector<Item> OrderPolicy::order(const ThresholdVector& tv, const std::vector<double>& means,
                                     const std::vector<double>* p) const {
  if (rule == Rule::permutation) return permutation;
  std::vector<Item> out(static_cast<std::size_t>(tv.size()));
  std::iota(out.begin(), out.end(), 0);
  auto by = [&](auto key) {
    std::stable_sort(out.begin(), out.end(), [&](Item a, Item b) { return key(a) < key(b); });
  };
  switch (rule) {
    case Rule::identity: break;
    case Rule::reverse: std::reverse(out.begin(), out.end()); break;
    case Rule::threshold_ascending: by([&](Item i) { return tv[i].value; }); break;
    case Rule::threshold_descending: by([&](Item i) { return -tv[i].value; }); break;
    case Rule::mean_ascending: by([&](Item i) { return means[static_cast<std::size_t>(i)]; }); break;
    case Rule::mean_descending: by([&](Item i) { return -means[static_cast<std::size_t>(i)]; }); break;
    case Rule::p_descending:
      if (p != nullptr) by([&](Item i) { return -(*p)[static_cast<std::size_t>(i)]; });
      break;
    case Rule::permutation: break;
  }
  return out;
}

std::vector<OrderPolicy> adversary_pool(int n, std::uint64_t seed, bool has_relaxation) {
  using R = OrderPolicy::Rule;
  std::vector<OrderPolicy> pool{{R::identity, {}, "identity"},
                                {R::reverse, {}, "reverse"},
                                {R::threshold_ascending, {}, "threshold-ascending"},
                                {R::threshold_descending, {}, "threshold-descending"},
                                {R::mean_ascending, {}, "mean-ascending"},
                                {R::mean_descending, {}, "mean-descending"}};
  if (has_relaxation) pool.push_back({R::p_descending, {}, "p-descending"});
  for (int j = 0; j < kRandomOrders; ++j) {
    std::vector<Item> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed, "adversary/order", static_cast<std::uint64_t>(j));
    rng.shuffle(perm);
    pool.push_back({R::permutation, perm, "random-" + std::to_string(j) + ":" + join_order(perm)});
  }
  return pool;
}

std::vector<OrderPolicy> all_orders(int n) {
  std::vector<Item> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<OrderPolicy> out;
  do {
    out.push_back({OrderPolicy::Rule::permutation, perm, join_order(perm)});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

double SimulationReport::empirical_ratio() const {
  return prophet_mean > 0 ? gambler_mean / prophet_mean : 1.0;
}

double SimulationReport::slack() const {
  if (!std::isfinite(claimed_ratio)) return 0.0;
  const double sp = prophet_stderr / claimed_ratio;
  return 3.0 * std::sqrt(gambler_stderr * gambler_stderr + sp * sp);
}

bool SimulationReport::pass() const {
  if (dominance_violations > 0) return false;
  if (!std::isfinite(claimed_ratio)) return true;
  return gambler_mean >= prophet_mean / claimed_ratio - slack() - 1e-12 * std::max(1.0, prophet_mean);
}

std::string SimulationReport::verdict() const {
  if (!std::isfinite(claimed_ratio) && dominance_violations == 0) return "no-claim";
  return pass() ? "pass" : "fail";
}

SimulationReport simulate(const MatroidInstance& m, const std::vector<Distribution>& dists, const Mechanism& mech,
                          const SimulateOptions& options) {
  check_instance(m, dists, mech);
  if (options.trials < 1) throw InputError("trials must be at least 1");
  const int n = m.size();
  const auto un = static_cast<std::size_t>(n);
  const ExAnteRelaxation* relax = mech.relaxation();
  const std::vector<double> means = means_of(dists);

  std::vector<OrderPolicy> policies;
  const bool random_order = options.order.kind == OrderKind::random;
  switch (options.order.kind) {
    case OrderKind::fixed: {
      auto perm = options.order.permutation;
      std::vector<Item> sorted = perm;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != all_items(n)) throw InputError("fixed order is not a permutation of the items");
      policies.push_back({OrderPolicy::Rule::permutation, perm, options.order.name()});
      break;
    }
    case OrderKind::random: policies.push_back({OrderPolicy::Rule::identity, {}, "random"}); break;
    case OrderKind::adversarial: policies = adversary_pool(n, options.seed, relax != nullptr); break;
    case OrderKind::exhaustive:
      if (n > 7) throw InputError("exhaustive orders are limited to 7 items in simulation");
      policies = all_orders(n);
      break;
  }
  const std::size_t np = policies.size();
  const std::uint64_t chunks = (options.trials + kChunk - 1) / kChunk;
  std::vector<ChunkStats> results(chunks);

  auto work = [&](std::uint64_t c) {
    ChunkStats s;
    s.policy_sum.assign(np, 0.0);
    s.policy_sq.assign(np, 0.0);
    s.accept.assign(np * un, 0);
    s.survive.assign(un, 0);
    auto tracker = m.tracker();
    std::vector<double> x(un), aux(un);
    const std::uint64_t end = std::min(options.trials, (c + 1) * kChunk);
    for (std::uint64_t t = c * kChunk; t < end; ++t) {
      const ThresholdVector tv = mech.draw(derive_seed(options.seed, "draw", t)).thresholds;
      Rng values(options.seed, "values", t);
      for (std::size_t i = 0; i < un; ++i) x[i] = dists[i].sample(values);
      for (std::size_t i = 0; i < un; ++i) aux[i] = values.uniform01();
      for (int i = 0; i < n; ++i)
        if (!tv[i].is_never()) ++s.survive[static_cast<std::size_t>(i)];
      const double prophet = prophet_value(m, x);
      s.prophet_sum += prophet;
      s.prophet_sq += prophet * prophet;
      for (std::size_t k = 0; k < np; ++k) {
        std::vector<Item> order;
        if (random_order) {
          order = all_items(n);
          Rng rng(options.seed, "order", t);
          rng.shuffle(order);
        } else {
          order = policies[k].order(tv, means, relax ? &relax->p : nullptr);
        }
        tracker->clear();
        double g = 0.0;
        for (Item i : order) {
          const auto j = static_cast<std::size_t>(i);
          if (!tv[i].passes(x[j], aux[j]) || !tracker->try_add(i)) continue;
          g += x[j];
          ++s.accept[k * un + j];
        }
        s.policy_sum[k] += g;
        s.policy_sq[k] += g * g;
        if (g > prophet + 1e-9 * std::max(1.0, prophet)) ++s.violations;
      }
    }
    results[c] = std::move(s);
  };

  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(chunks, options.threads ? options.threads : default_threads()));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) work(c);
      });
    for (auto& th : pool) th.join();
  }

  // Merge in chunk order so the sums do not depend on scheduling.
  ChunkStats total;
  total.policy_sum.assign(np, 0.0);
  total.policy_sq.assign(np, 0.0);
  total.accept.assign(np * un, 0);
  total.survive.assign(un, 0);
  for (const auto& s : results) {
    total.prophet_sum += s.prophet_sum;
    total.prophet_sq += s.prophet_sq;
    for (std::size_t k = 0; k < np; ++k) {
      total.policy_sum[k] += s.policy_sum[k];
      total.policy_sq[k] += s.policy_sq[k];
    }
    for (std::size_t j = 0; j < np * un; ++j) total.accept[j] += s.accept[j];
    for (std::size_t j = 0; j < un; ++j) total.survive[j] += s.survive[j];
    total.violations += s.violations;
  }

  const auto trials = static_cast<double>(options.trials);
  auto stats = [&](double sum, double sq) {
    const double mean = sum / trials;
    const double var = trials > 1 ? std::max(0.0, (sq - trials * mean * mean) / (trials - 1)) : 0.0;
    return std::pair{mean, std::sqrt(var / trials)};
  };

  SimulationReport r;
  r.instance = options.instance;
  r.mechanism = mech.name();
  r.order_strategy = options.order.name();
  r.trials = options.trials;
  r.seed = options.seed;
  r.claimed_ratio = mech.ratio();
  std::tie(r.prophet_mean, r.prophet_stderr) = stats(total.prophet_sum, total.prophet_sq);
  r.relaxation_bound = relax ? relax->bound() : std::numeric_limits<double>::quiet_NaN();
  if (relax) r.relaxation_p = relax->p;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < np; ++k) {
    auto [mean, se] = stats(total.policy_sum[k], total.policy_sq[k]);
    r.policies.push_back({policies[k].name, mean, se});
    if (mean < r.policies[worst].mean) worst = k;
  }
  r.gambler_mean = r.policies[worst].mean;
  r.gambler_stderr = r.policies[worst].stderr_;
  r.worst_order = r.policies[worst].name;
  for (std::size_t j = 0; j < un; ++j) {
    r.acceptance.push_back(static_cast<double>(total.accept[worst * un + j]) / trials);
    r.survival.push_back(static_cast<double>(total.survive[j]) / trials);
  }
  r.dominance_violations = total.violations;
  return r;
}

double exact_gambler(const MatroidInstance& m, const std::vector<Distribution>& dists, const ThresholdVector& tv,
                     const std::vector<Item>& order) {
  IndependenceCache indep(m);
  std::uint64_t states = 0;
  return gambler_for_order(pass_law(dists, tv), order, indep, states);
}

double exact_prophet(const MatroidInstance& m, const std::vector<Distribution>& dists, std::uint64_t max_outcomes) {
  const std::uint64_t outcomes = joint_outcome_count(dists);
  if (outcomes == 0) throw PreconditionError("exact prophet needs finite-support laws");
  if (outcomes > max_outcomes)
    throw PreconditionError("joint outcome space has " + std::to_string(outcomes) + " outcomes, limit " +
                            std::to_string(max_outcomes));
  double total = 0.0;
  auto tracker = m.tracker();
  std::vector<Item> order(dists.size());
  for_each_outcome(dists, [&](const std::vector<double>& x, double prob) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Item a, Item b) { return x[a] > x[b]; });
    tracker->clear();
    double v = 0.0;
    for (Item i : order) {
      if (x[static_cast<std::size_t>(i)] <= 0) break;
      if (tracker->try_add(i)) v += x[static_cast<std::size_t>(i)];
    }
    total += prob * v;
  });
  return total;
}

ExactResult exact_evaluate(const MatroidInstance& m, const std::vector<Distribution>& dists, const Mechanism& mech,
                           const ExactOptions& options) {
  check_instance(m, dists, mech);
  const int n = m.size();
  auto atoms = mech.support(options.max_draws);
  if (!atoms) throw PreconditionError("mechanism draw space exceeds " + std::to_string(options.max_draws) + " atoms");
  ExactResult r;
  r.prophet = exact_prophet(m, dists, options.max_outcomes);
  r.draws = atoms->size();
  IndependenceCache indep(m);
  const std::vector<double> means = means_of(dists);
  const ExAnteRelaxation* relax = mech.relaxation();
  std::uint64_t states = 0;
  auto check_states = [&] {
    if (states > options.max_states)
      throw PreconditionError("exact evaluation exceeds " + std::to_string(options.max_states) + " states (" +
                              std::to_string(states) + " visited)");
  };

  switch (options.order.kind) {
    case OrderKind::fixed: {
      r.orders = 1;
      for (const auto& a : *atoms) {
        r.gambler += a.weight * gambler_for_order(pass_law(dists, a.thresholds), options.order.permutation, indep, states);
        check_states();
      }
      r.gambler_fixed_order = r.gambler;
      r.worst_order = options.order.name();
      break;
    }
    case OrderKind::adversarial: {
      auto pool = adversary_pool(n, options.seed, relax != nullptr);
      r.orders = pool.size();
      std::vector<double> per_policy(pool.size(), 0.0);
      for (const auto& a : *atoms) {
        const PassLaw law = pass_law(dists, a.thresholds);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pool.size(); ++k) {
          const double v =
              gambler_for_order(law, pool[k].order(a.thresholds, means, relax ? &relax->p : nullptr), indep, states);
          per_policy[k] += a.weight * v;
          best = std::min(best, v);
        }
        check_states();
        r.gambler += a.weight * best;
      }
      const auto worst = static_cast<std::size_t>(std::min_element(per_policy.begin(), per_policy.end()) - per_policy.begin());
      r.gambler_fixed_order = per_policy[worst];
      r.worst_order = pool[worst].name;
      break;
    }
    case OrderKind::random:
    case OrderKind::exhaustive: {
      if (n > kMaxExhaustive)
        throw PreconditionError("enumerating all orders is limited to " + std::to_string(kMaxExhaustive) + " items");
      std::size_t count = 1;
      for (int i = 2; i <= n; ++i) count *= static_cast<std::size_t>(i);
      r.orders = count;
      std::vector<double> per_order(count, 0.0);
      for (const auto& a : *atoms) {
        const PassLaw law = pass_law(dists, a.thresholds);
        double best = std::numeric_limits<double>::infinity();
        double sum = 0.0;
        all_order_values(n, law, indep, states, options.max_states, [&](std::size_t idx, double v) {
          per_order[idx] += a.weight * v;
          best = std::min(best, v);
          sum += v;
        });
        r.gambler += a.weight * (options.order.kind == OrderKind::random ? sum / static_cast<double>(count) : best);
      }
      if (options.order.kind == OrderKind::random) {
        r.gambler_fixed_order = r.gambler;
        r.worst_order = "uniform-average";
      } else {
        const auto worst =
            static_cast<std::size_t>(std::min_element(per_order.begin(), per_order.end()) - per_order.begin());
        r.gambler_fixed_order = per_order[worst];
        r.worst_order = all_orders(n)[worst].name;
      }
      break;
    }
  }
  r.states = states;
  return r;
}

}  // namespace mp
