#include <cmath>

#include "doctest.h"
#include "mp/distribution.hpp"
#include "mp/ex_ante.hpp"
#include "mp/rng.hpp"
#include "oracles.hpp"

using namespace mp;

namespace {

// Composite Simpson rule on [a, b].
template <class F>
double integrate(F f, double a, double b, int steps = 200000) {
  const double h = (b - a) / steps;
  double sum = f(a) + f(b);
  for (int i = 1; i < steps; ++i) sum += f(a + i * h) * (i % 2 ? 4 : 2);
  return sum * h / 3;
}

template <class F>
double invert(F cdf, double q, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) >= q ? hi : lo) = mid;
  }
  return hi;
}

std::vector<Distribution> corpus() {
  return {Distribution::point(2.5),
          Distribution::discrete({0, 1, 3}, {0.2, 0.5, 0.3}),
          Distribution::uniform(1, 4),
          Distribution::exponential(2.0),
          Distribution::pareto(1.5, 20.0),
          Distribution::pareto(1.0, 8.0)};
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(7, "x", 3), b(7, "x", 3), c(7, "x", 4), d(7, "y", 3);
  const auto va = a.next();
  CHECK(va == b.next());
  CHECK(va != c.next());
  CHECK(va != d.next());
  Rng u(1, "u");
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = u.uniform01();
    REQUIRE(x >= 0);
    REQUIRE(x < 1);
    sum += x;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  std::vector<int> hist(3, 0);
  for (int i = 0; i < 30000; ++i) ++hist[u.below(3)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 400);
}

TEST_CASE("quantile examples") {
  CHECK(Distribution::uniform(0, 1).quantile(0.75) == doctest::Approx(0.75));
  CHECK(Distribution::point(5).quantile(0.3) == 5);
  CHECK(Distribution::point(5).quantile(1.0) == 5);
  const double oracle = invert([](double x) { return 1 - std::exp(-x); }, 0.5, 0, 50);
  CHECK(Distribution::exponential(1).quantile(0.5) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(0.693147).epsilon(1e-6));
  auto d = Distribution::discrete({1, 2}, {0.5, 0.5});
  CHECK(d.quantile(0.5) == 1);
  CHECK(d.quantile(0.5000001) == 2);
}

TEST_CASE("tail expectation examples") {
  CHECK(Distribution::uniform(0, 1).tail_expectation(0.5) == doctest::Approx(0.75));
  const double oracle = integrate([](double x) { return x * std::exp(-x); }, std::log(2.0), 60.0) / 0.5;
  CHECK(Distribution::exponential(1).tail_expectation(0.5) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(oracle == doctest::Approx(1 + std::log(2.0)).epsilon(1e-9));
  for (const auto& d : corpus()) {
    CAPTURE(d.describe());
    CHECK(d.tail_expectation(1.0) == doctest::Approx(d.mean()).epsilon(1e-9));
  }
  CHECK(Distribution::uniform(0, 3).tail_expectation(0) == 3);
  CHECK_THROWS_AS(Distribution::exponential(1).tail_expectation(0), InputError);
}

TEST_CASE("pareto moments match numeric integration") {
  for (double shape : {0.5, 1.0, 2.5}) {
    const double cap = 12.0;
    const double z = 1 - std::pow(cap, -shape);
    auto density = [&](double x) { return shape * std::pow(x, -shape - 1) / z; };
    auto d = Distribution::pareto(shape, cap);
    CHECK(d.mean() == doctest::Approx(integrate([&](double x) { return x * density(x); }, 1, cap)).epsilon(1e-8));
    CHECK(d.upper_expectation(3.0) ==
          doctest::Approx(integrate([&](double x) { return x * density(x); }, 3, cap)).epsilon(1e-8));
    CHECK(d.cdf(4.0) == doctest::Approx(integrate(density, 1, 4)).epsilon(1e-8));
  }
}

TEST_CASE("cdf and quantile are consistent on grids") {
  for (const auto& d : corpus()) {
    CAPTURE(d.describe());
    for (int k = 0; k <= 1000; ++k) {
      const double q = k / 1000.0;
      CHECK(d.cdf(d.quantile(q)) >= q - 1e-12);
    }
    const double top = std::isfinite(d.ess_sup()) ? d.ess_sup() : 10.0;
    const double bottom = d.ess_inf();
    for (int k = 0; k <= 1000; ++k) {
      const double x = bottom + (top - bottom) * k / 1000.0;
      CHECK(d.quantile(d.cdf(x)) <= x + 1e-6 * std::max(1.0, x));  // 1 - F loses digits far in the tail
    }
  }
}

TEST_CASE("tail expectation is nonincreasing in p and at least tau") {
  for (const auto& d : corpus()) {
    CAPTURE(d.describe());
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 200; ++k) {
      const Tail t = d.tail(k / 200.0);
      CHECK(t.t <= prev + 1e-9);
      CHECK(t.t >= t.tau - 1e-12);
      prev = t.t;
    }
  }
}

TEST_CASE("sampling matches the law") {
  Rng rng(3, "sampling");
  for (const auto& d : corpus()) {
    CAPTURE(d.describe());
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = d.sample(rng);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - d.mean()) <= 4 * se + 1e-12);
  }
}

TEST_CASE("ex-ante estimation examples") {
  auto u11 = MatroidInstance::uniform(1, 1);
  auto r1 = estimate_ex_ante(u11, {Distribution::uniform(0, 1)}, 1000, 1);
  CHECK(r1.p[0] == 1.0);

  auto u12 = MatroidInstance::uniform(2, 1);
  const std::uint64_t trials = 100000;
  auto r2 = estimate_ex_ante(u12, {Distribution::exponential(1), Distribution::exponential(1)}, trials, 2);
  const double sigma = std::sqrt(0.25 / trials);
  CHECK(std::abs(r2.p[0] - 0.5) <= 3 * sigma);
  CHECK(std::abs(r2.p[1] - 0.5) <= 3 * sigma);

  auto r3 = estimate_ex_ante(u12, {Distribution::point(5), Distribution::point(3)}, 1000, 3);
  CHECK(r3.p == std::vector<double>{1.0, 0.0});
  CHECK(std::isinf(r3.tau[1]));

  // Random tie-breaking splits identical point masses evenly.
  auto r4 = exact_ex_ante(u12, {Distribution::point(1), Distribution::point(1)});
  CHECK(r4.p[0] == doctest::Approx(0.5));
  CHECK(r4.p[1] == doctest::Approx(0.5));
}

TEST_CASE("exact and sampled relaxations agree and lie in the polytope") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 4;
    Graph g = oracle::random_graph(gen, 3 + trial % 2, n, false);
    auto m = trial % 2 ? MatroidInstance::graphic(g) : MatroidInstance::uniform(n, 2);
    std::vector<Distribution> dists;
    for (int i = 0; i < n; ++i)
      dists.push_back(Distribution::discrete({0, 1.0 + i % 2, 3}, {0.3, 0.4, 0.3}));
    auto ex = exact_ex_ante(m, dists);
    const std::uint64_t trials = 40000;
    auto mc = estimate_ex_ante(m, dists, trials, 100 + trial);
    for (int i = 0; i < n; ++i) {
      const double sigma = std::sqrt(std::max(ex.p[i] * (1 - ex.p[i]), 1e-12) / trials);
      CHECK(std::abs(ex.p[i] - mc.p[i]) <= 4 * sigma + 1e-12);
    }
    // Polytope membership over all subsets.
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
      double sum = 0;
      for (int i = 0; i < n; ++i)
        if (s >> i & 1U) sum += ex.p[i];
      CHECK(sum <= m.rank_mask(s) + 1e-9);
    }
    // Relaxation bound dominates the prophet.
    double prophet = 0;
    for_each_outcome(dists, [&](const std::vector<double>& x, double prob) {
      prophet += prob * oracle::brute_max_weight(m, x);
    });
    CHECK(ex.bound() >= prophet - 1e-9);
  }
}

TEST_CASE("bernoulli reduction and coupling") {
  auto u = Distribution::uniform(0, 1);
  auto relax = relaxation_from_p({u}, {0.25});
  auto b = reduce_to_bernoulli(relax);
  CHECK(b.value(0) == doctest::Approx(0.875));
  CHECK(b.active(0, 0.76, 0.9));
  CHECK_FALSE(b.active(0, 0.74, 0.0));

  auto zero = reduce_to_bernoulli(relaxation_from_p({u}, {0.0}));
  CHECK_FALSE(zero.active(0, 1.0, 0.0));

  auto d = Distribution::discrete({1, 2}, {0.5, 0.5});
  auto bd = reduce_to_bernoulli(relaxation_from_p({d}, {0.25}));
  CHECK(bd.items[0].tau == 2);
  CHECK(bd.items[0].theta == doctest::Approx(0.5));
  CHECK(bd.value(0) == doctest::Approx(2.0));

  // Activation rate and conditional mean for several laws and levels.
  Rng rng(5, "coupling");
  for (const auto& law : corpus()) {
    for (double p : {0.1, 0.25, 0.6}) {
      auto bi = reduce_to_bernoulli(relaxation_from_p({law}, {p}));
      const int n = 100000;
      int active = 0;
      double sum = 0, sq = 0;
      for (int i = 0; i < n; ++i) {
        const double x = law.sample(rng);
        if (bi.active(0, x, rng.uniform01())) {
          ++active;
          sum += x;
          sq += x * x;
        }
      }
      CAPTURE(law.describe());
      CAPTURE(p);
      const double sigma = std::sqrt(p * (1 - p) / n);
      CHECK(std::abs(static_cast<double>(active) / n - p) <= 3.5 * sigma);
      const double mean = sum / active;
      const double se = std::sqrt(std::max(sq / active - mean * mean, 0.0) / active);
      CHECK(std::abs(mean - bi.value(0)) <= 3.5 * se + 1e-9);
    }
  }
}
