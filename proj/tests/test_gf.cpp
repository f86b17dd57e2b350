#include <random>

#include "doctest.h"
#include "mp/gf.hpp"
#include "oracles.hpp"

using mp::gf::Vec;

TEST_CASE("rank over F_2 of (1,0),(0,1),(1,1) is 2") {
  CHECK(mp::gf::rank({{1, 0}, {0, 1}, {1, 1}}, 2, 2) == 2);
  CHECK(oracle::span_rank({{1, 0}, {0, 1}, {1, 1}}, 2, 2) == 2);
}

TEST_CASE("inverse and primality") {
  CHECK(mp::gf::is_prime(2));
  CHECK(mp::gf::is_prime(7));
  CHECK_FALSE(mp::gf::is_prime(9));
  for (int p : {2, 3, 5, 7, 11})
    for (int a = 1; a < p; ++a) CHECK(mp::gf::mul(a, mp::gf::inverse(a, p), p) == 1);
}

TEST_CASE("echelon rank matches span enumeration on random families") {
  std::mt19937_64 rng(7);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 40; ++trial) {
      const int dim = 1 + static_cast<int>(rng() % 4);
      const int n = static_cast<int>(rng() % 6);
      auto cols = oracle::random_columns(rng, p, dim, n);
      CHECK(mp::gf::rank(cols, p, dim) == oracle::span_rank(cols, p, dim));
    }
  }
}

TEST_CASE("null space vectors annihilate and have complementary dimension") {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 7}) {
    for (int trial = 0; trial < 30; ++trial) {
      const int dim = 1 + static_cast<int>(rng() % 5);
      const int n = 1 + static_cast<int>(rng() % 6);
      auto cols = oracle::random_columns(rng, p, dim, n);
      auto ns = mp::gf::null_space(cols, p, dim);
      CHECK(static_cast<int>(ns.size()) == n - mp::gf::rank(cols, p, dim));
      for (const auto& x : ns) {
        Vec acc(static_cast<std::size_t>(dim), 0);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < dim; ++i) acc[i] = (acc[i] + x[j] * cols[j][i]) % p;
        CHECK(mp::gf::is_zero(acc));
      }
    }
  }
}

TEST_CASE("span intersection dimension obeys the modular law") {
  std::mt19937_64 rng(13);
  for (int p : {2, 3}) {
    for (int trial = 0; trial < 40; ++trial) {
      const int dim = 2 + static_cast<int>(rng() % 4);
      auto a = oracle::random_columns(rng, p, dim, 1 + static_cast<int>(rng() % 4));
      auto b = oracle::random_columns(rng, p, dim, 1 + static_cast<int>(rng() % 4));
      auto both = a;
      both.insert(both.end(), b.begin(), b.end());
      const int expect = oracle::span_rank(a, p, dim) + oracle::span_rank(b, p, dim) - oracle::span_rank(both, p, dim);
      auto inter = mp::gf::span_intersection(a, b, p, dim);
      CHECK(static_cast<int>(inter.size()) == expect);
      mp::gf::EchelonBasis sa(p, dim), sb(p, dim);
      for (auto& v : a) sa.insert(v);
      for (auto& v : b) sb.insert(v);
      for (auto& v : inter) {
        CHECK(sa.in_span(v));
        CHECK(sb.in_span(v));
      }
    }
  }
}

TEST_CASE("solve reproduces the target vector") {
  const int p = 5;
  std::vector<Vec> basis{{1, 2, 0}, {0, 1, 3}};
  const Vec target{2, 3, 2};  // 2*(1,2,0) + 4*(0,1,3) mod 5
  auto x = mp::gf::solve(basis, target, p, 3);
  REQUIRE(x.has_value());
  CHECK((*x)[0] == 2);
  CHECK((*x)[1] == 4);
  CHECK_FALSE(mp::gf::solve(basis, Vec{0, 0, 1}, p, 3).has_value());
}

TEST_CASE("all_vectors enumerates p^dim vectors") {
  CHECK(mp::gf::all_vectors(3, 2).size() == 9);
  CHECK(mp::gf::all_vectors(2, 0).size() == 1);
}
