#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mp/harness.hpp"
#include "oracles.hpp"

using namespace mp;
using namespace fixture;

TEST_CASE("restrict_thresholds") {
  ThresholdVector tv;
  tv.values = {Threshold::at_least(1), Threshold::at_least(2), Threshold::at_least(3)};
  CHECK(restrict_thresholds(tv, all_items(3)).values == tv.values);
  const auto none = restrict_thresholds(tv, {});
  for (const auto& t : none.values) CHECK(t.is_never());
  const auto m = MatroidInstance::uniform(3, 2);
  std::vector<Distribution> d(3, Distribution::discrete({0, 4}, {0.5, 0.5}));
  CHECK(exact_gambler(m, d, none, {0, 1, 2}) == 0.0);
  CHECK_THROWS_AS(restrict_thresholds(tv, {3}), InputError);
}

TEST_CASE("a mechanism for M|kept embedded with +inf keeps its ratio") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const Graph g = oracle::complete_graph(4);
    const auto m = MatroidInstance::graphic(g);
    const auto d = random_laws(rng, 6, 2);
    ItemSet kept;
    for (int e = 0; e < 6; ++e)
      if (rng() % 3 != 0) kept.push_back(e);
    const auto mk = restrict_to(m, kept);
    const auto dk = pick(d, kept);
    auto inner = graphic_mechanism(*mk.graph(), exact_ex_ante(mk, dk));
    auto embedded = std::make_shared<ProductMechanism>(6, std::vector<MechanismPtr>{inner},
                                                       std::vector<std::vector<Item>>{kept}, 16.0, "embedded");
    const double g_value = oracle_gambler(m, d, *embedded);
    CHECK(g_value >= oracle::enumerated_prophet(mk, dk) / 16 - 1e-9);
  }
}

TEST_CASE("prophet additivity across a split") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = MatroidInstance::vector(2, oracle::random_columns(rng, 2, 3, 6));
    const auto d = random_laws(rng, 6, 2);
    ItemSet x;
    for (int i = 0; i < 6; ++i)
      if (rng() & 1U) x.push_back(i);
    const ItemSet rest = complement(6, x);
    const double whole = oracle::enumerated_prophet(m, d);
    const double parts = oracle::enumerated_prophet(restrict_to(m, x), pick(d, x)) +
                         oracle::enumerated_prophet(restrict_to(m, rest), pick(d, rest));
    CHECK(parts >= whole - 1e-9);
  }
}

TEST_CASE("contraction_subset with T = E loses at most a factor p") {
  std::mt19937_64 rng(5);
  for (int p : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const auto m = MatroidInstance::vector(p, oracle::random_columns(rng, p, 3, 6));
      const auto d = random_laws(rng, 6, 2);
      ProphetEvaluator ev{d};
      const auto r = contraction_subset(m, all_items(6), 0, ev);
      CHECK(r.dim_l == 0);
      const double full = oracle::enumerated_prophet(m, d);
      CHECK(r.value_contracted.mean == doctest::Approx(full));
      CHECK(oracle::enumerated_prophet(restrict_to(m, r.s), pick(d, r.s)) >= full / p - 1e-9);
    }
  }
}

TEST_CASE("contraction_subset meets the p^{k+1} bound and transfers independence") {
  std::mt19937_64 rng(17);
  int tested = 0;
  for (int trial = 0; tested < 40 && trial < 400; ++trial) {
    const int p = trial % 3 == 0 ? 3 : 2;
    const int n = 6 + static_cast<int>(rng() % 3);
    const auto m = MatroidInstance::vector(p, oracle::random_columns(rng, p, 4, n));
    ItemSet t;
    for (int i = 0; i < n; ++i)
      if (rng() & 1U) t.push_back(i);
    const ItemSet tbar = complement(n, t);
    const int lambda = oracle_rank(m, t) + oracle_rank(m, tbar) - oracle_rank(m, all_items(n));
    if (lambda > 2) continue;
    ++tested;
    const auto d = random_laws(rng, n, 2);
    const auto r = contraction_subset(m, t, lambda, ProphetEvaluator{d});
    CHECK(subset_of(r.s, t));
    CHECK(r.transfer_checked);
    CHECK(r.dim_l == lambda);
    // Independence transfer with oracle ranks.
    const int r_tbar = oracle_rank(m, tbar);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r.s.size()); ++mask) {
      ItemSet sub;
      for (std::size_t j = 0; j < r.s.size(); ++j)
        if (mask >> j & 1U) sub.push_back(r.s[j]);
      if (oracle_rank(m, sub) != static_cast<int>(sub.size())) continue;
      CHECK(oracle_rank(m, set_union(sub, tbar)) == static_cast<int>(sub.size()) + r_tbar);
    }
    const double contracted = oracle::enumerated_prophet(contract(m, tbar), pick(d, t));
    const double got = oracle::enumerated_prophet(restrict_to(m, r.s), pick(d, r.s));
    CHECK(got >= contracted / std::pow(p, lambda + 1) - 1e-9);
    CHECK(r.value_s.mean == doctest::Approx(got));
  }
  CHECK(tested >= 20);
}

TEST_CASE("contraction_subset on a lambda = 1 split matches a brute-force search") {
  // Six-cycle split into two paths: λ = 1 over F_2.
  const auto m = incidence(oracle::cycle_graph(6));
  const ItemSet t{0, 1, 2};
  CHECK(connectivity(m, t) == 1);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_laws(rng, 6, 3);
    const auto r = contraction_subset(m, t, 1, ProphetEvaluator{d});
    const double contracted = oracle::enumerated_prophet(contract(m, {3, 4, 5}), pick(d, t));
    // Best subset of T with the transfer property, found by brute force.
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
      ItemSet s;
      for (int j = 0; j < 3; ++j)
        if (mask >> j & 1U) s.push_back(t[j]);
      bool ok = true;
      for (std::uint64_t sub = mask;; sub = (sub - 1) & mask) {
        ItemSet is;
        for (int j = 0; j < 3; ++j)
          if (sub >> j & 1U) is.push_back(t[j]);
        if (oracle_rank(m, is) == static_cast<int>(is.size()) &&
            oracle_rank(m, set_union(is, {3, 4, 5})) != static_cast<int>(is.size()) + oracle_rank(m, {3, 4, 5}))
          ok = false;
        if (sub == 0) break;
      }
      if (ok) best = std::max(best, oracle::enumerated_prophet(restrict_to(m, s), pick(d, s)));
    }
    CHECK(best >= contracted / 4 - 1e-9);
    CHECK(r.value_s.mean >= contracted / 4 - 1e-9);
    CHECK(r.value_s.mean <= best + 1e-9);
  }
}

TEST_CASE("contraction_subset rejects lambda above k") {
  const auto m = incidence(oracle::cycle_graph(6));
  std::vector<Distribution> d(6, Distribution::point(1));
  CHECK_THROWS_AS(contraction_subset(m, {0, 1, 2}, 0, ProphetEvaluator{d}), PreconditionError);
  CHECK_THROWS_AS(contraction_subset(MatroidInstance::uniform(3, 1), {0}, 1, ProphetEvaluator{{d[0], d[0], d[0]}}),
                  InputError);
}

TEST_CASE("Monte Carlo evaluator agrees with enumeration") {
  std::mt19937_64 rng(2);
  const auto m = MatroidInstance::vector(2, oracle::random_columns(rng, 2, 3, 5));
  const auto d = random_laws(rng, 5, 3);
  ProphetEvaluator mc{d, 0, 20000, 4};
  const auto est = mc(m, all_items(5));
  CHECK_FALSE(est.exact);
  CHECK(std::abs(est.mean - oracle::enumerated_prophet(m, d)) <= 4 * est.stderr_ + 1e-9);
}

namespace {

DecompositionTree two_path_tree(const Graph& g) {
  DecompositionTree td;
  td.nodes.push_back({0, "graphic", {0, 1, 2}, keep_edges(g, {0, 1, 2}), std::nullopt, 0});
  td.nodes.push_back({1, "graphic", {3, 4, 5}, keep_edges(g, {3, 4, 5}), std::nullopt, 0});
  td.edges.push_back({0, 1, 2});
  return td;
}

}  // namespace

TEST_CASE("tree validation") {
  const Graph g = oracle::cycle_graph(6);
  const auto m = incidence(g);
  auto td = two_path_tree(g);
  CHECK_NOTHROW(validate_tree(m, td));

  auto overlap = td;
  overlap.nodes[1].bag = {2, 4, 5};
  CHECK_THROWS_AS(validate_tree(m, overlap), InputError);
  auto missing = td;
  missing.nodes[1].bag = {3, 4};
  missing.nodes[1].graph = keep_edges(g, {3, 4});
  CHECK_THROWS_AS(validate_tree(m, missing), InputError);
  auto cls = td;
  cls.nodes[0].cls = "laminar";
  CHECK_THROWS_AS(validate_tree(m, cls), InputError);
  auto cyc = td;
  cyc.edges.push_back({1, 0, 2});
  CHECK_THROWS_AS(validate_tree(m, cyc), InputError);
  auto wrong_rep = td;
  wrong_rep.nodes[0].graph = oracle::cycle_graph(3);
  CHECK_THROWS_AS(validate_tree(m, wrong_rep), InputError);
  auto unordered = td;
  unordered.nodes[0].bag = {2, 0, 1};
  unordered.nodes[0].graph = keep_edges(g, {0, 1, 2});
  std::swap(unordered.nodes[0].graph->edges[0], unordered.nodes[0].graph->edges[2]);
  std::swap(unordered.nodes[0].graph->edges[1], unordered.nodes[0].graph->edges[2]);
  CHECK_NOTHROW(validate_tree(m, unordered));
}

TEST_CASE("thickness audit") {
  const Graph g = oracle::cycle_graph(6);
  const auto m = incidence(g);
  auto td = two_path_tree(g);
  const auto th = thickness(m, td);
  REQUIRE(th.size() == 1);
  CHECK(th[0].lambda == oracle_rank(m, {0, 1, 2}) + oracle_rank(m, {3, 4, 5}) - oracle_rank(m, all_items(6)));
  CHECK(th[0].lambda == 1);
  CHECK_NOTHROW(audit_thickness(m, td, 1));
  try {
    audit_thickness(m, td, 0);
    FAIL("expected a thickness error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("tree edge 0-1") != std::string::npos);
    CHECK(std::string(e.what()).find("thickness 1") != std::string::npos);
  }

  // Three nodes in a path: the middle edges see the union of one side.
  const Graph k4 = oracle::complete_graph(4);
  const auto m4 = incidence(k4);
  DecompositionTree t3;
  t3.nodes.push_back({0, "graphic", {0, 1}, keep_edges(k4, {0, 1}), std::nullopt, 0});
  t3.nodes.push_back({1, "graphic", {2, 3}, keep_edges(k4, {2, 3}), std::nullopt, 0});
  t3.nodes.push_back({2, "graphic", {4, 5}, keep_edges(k4, {4, 5}), std::nullopt, 0});
  t3.edges = {{0, 1, 0}, {1, 2, 0}};
  const auto th3 = thickness(m4, t3);
  CHECK(th3[0].lambda == connectivity(m4, {0, 1}));
  CHECK(th3[1].lambda == connectivity(m4, {0, 1, 2, 3}));
}

TEST_CASE("single-node tree is exactly the bag mechanism") {
  const Graph g = oracle::complete_graph(4);
  const auto m = MatroidInstance::graphic(g);
  std::mt19937_64 rng(1);
  const auto d = random_laws(rng, 6, 2);
  DecompositionTree td;
  td.nodes.push_back({7, "graphic", all_items(6), g, std::nullopt, 0});
  const auto r = tree_compose(m, td, {{"graphic", graphic_guarantee()}}, d, {});
  CHECK(r.ratio == 16);
  const auto direct = graphic_guarantee().build(m, d, derive_seed(1, "tree/bag", 7));
  const auto a = *r.mechanism->support(1 << 20), b = *direct->support(1 << 20);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].weight == b[i].weight);
    CHECK(a[i].thresholds.values == b[i].thresholds.values);
  }
}

TEST_CASE("two-node graphic tree over F_2 with k = 1 is 64-competitive") {
  std::mt19937_64 rng(23);
  const Graph g = oracle::cycle_graph(6);
  const auto m = incidence(g);
  for (int trial = 0; trial < 4; ++trial) {
    const auto d = random_laws(rng, 6, 2);
    ComposeOptions opt;
    opt.k = 1;
    opt.seed = static_cast<std::uint64_t>(trial);
    const auto r = tree_compose(m, two_path_tree(g), {{"graphic", graphic_guarantee()}}, d, opt);
    CHECK(r.ratio == 64);
    REQUIRE(r.stages.size() == 2);
    CHECK(r.stages[0].node == 0);
    CHECK(r.stages[1].s == ItemSet{3, 4, 5});
    const auto ex = exact_evaluate(m, d, *r.mechanism);
    CHECK(ex.prophet == doctest::Approx(oracle::enumerated_prophet(m, d)));
    CHECK(ex.gambler >= ex.prophet / 64 - 1e-9);
  }
}

TEST_CASE("tree composition can miss its claim when the peeled leaf carries the value") {
  // U_{1,2} as two parallel F_2 columns split into singleton bags: λ = 1, but
  // the first leaf's subset is empty because its column lies in the span of the
  // rest, so all of the prophet's value in that bag is lost.
  const auto m = MatroidInstance::vector(2, {{1}, {1}});
  Graph edge{2, {{0, 1}}};
  DecompositionTree td;
  td.nodes.push_back({0, "graphic", {0}, edge, std::nullopt, 0});
  td.nodes.push_back({1, "graphic", {1}, edge, std::nullopt, 0});
  td.edges.push_back({0, 1, 2});
  const std::vector<Distribution> d{Distribution::point(100), Distribution::point(1)};
  ComposeOptions opt;
  opt.k = 1;
  const auto r = tree_compose(m, td, {{"graphic", graphic_guarantee()}}, d, opt);
  CHECK(r.stages[0].s.empty());
  const auto ex = exact_evaluate(m, d, *r.mechanism);
  CHECK(ex.prophet == 100);
  CHECK(ex.gambler <= 1.0);
  CHECK(ex.gambler < ex.prophet / r.ratio);
}

TEST_CASE("lift transfer") {
  const auto l = MatroidInstance::uniform(4, 2);
  const Item x = 0;
  const auto inner = class_pick(contract(l, {x}));
  CHECK(inner.ratio == 2);
  const auto g = lift_guarantee(l, x, inner);
  CHECK(g.ratio == 6);

  std::mt19937_64 rng(31);
  const auto n = delete_items(l, {x});
  for (int trial = 0; trial < 6; ++trial) {
    const auto d = random_laws(rng, 3, 3);
    const auto mech = lift_transfer(l, x, inner, d, 5);
    CHECK(mech->ratio() == 6);
    CHECK(oracle_gambler(n, d, *mech) >= oracle::enumerated_prophet(n, d) / 6 - 1e-9);
  }

  CHECK_THROWS_AS(lift_guarantee(MatroidInstance::uniform(3, 3), 0, inner), PreconditionError);
  CHECK_THROWS_AS(lift_guarantee(MatroidInstance::vector(2, {{0}, {1}}), 0, inner), PreconditionError);
}

TEST_CASE("lift transfer on random binary matroids") {
  std::mt19937_64 rng(37);
  int tested = 0;
  for (int trial = 0; tested < 8 && trial < 200; ++trial) {
    const auto l = MatroidInstance::vector(2, oracle::random_columns(rng, 2, 3, 6));
    const Item x = static_cast<Item>(rng() % 6);
    if (is_loop(l, x) || is_free(l, x)) continue;
    ++tested;
    const auto inner = class_pick(contract(l, {x}));
    const auto n = delete_items(l, {x});
    const auto d = random_laws(rng, 5, 2);
    const auto mech = lift_transfer(l, x, inner, d, 9);
    const double alpha = 2 * inner.ratio + 2;
    CHECK(oracle_gambler(n, d, *mech) >= oracle::enumerated_prophet(n, d) / alpha - 1e-9);
  }
  CHECK(tested == 8);
}

TEST_CASE("lift mixture weights match alpha/(alpha+1) over draws") {
  const auto l = MatroidInstance::uniform(5, 2);
  const auto inner = class_pick(contract(l, {0}));
  const std::vector<Distribution> d(4, Distribution::uniform(0, 1));
  const auto mech = lift_transfer(l, 0, inner, d, 1);
  const int draws = 20000;
  int first = 0;
  for (int i = 0; i < draws; ++i) first += mech->draw(static_cast<std::uint64_t>(i)).draw.choices.at("component")[0] == 0;
  const double q = inner.ratio / (inner.ratio + 1);
  CHECK(std::abs(first / double(draws) - q) <= 4 * std::sqrt(q * (1 - q) / draws));
  const auto atoms = mech->support(1000);
  REQUIRE(atoms);
  double total = 0;
  for (const auto& a : *atoms) total += a.weight;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("lift: the gambler on N accepts everything the gambler on M accepts") {
  std::mt19937_64 rng(41);
  int runs = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto l = MatroidInstance::vector(2, oracle::random_columns(rng, 2, 3, 6));
    const Item x = static_cast<Item>(rng() % 6);
    if (is_loop(l, x) || is_free(l, x)) continue;
    const auto m = contract(l, {x});
    const auto n = delete_items(l, {x});
    const auto d = random_laws(rng, 5, 3);
    const auto inner = class_pick(m).build(m, d, 3);
    for (int rep = 0; rep < 10; ++rep) {
      const auto tv = inner->draw(rng()).thresholds;
      std::vector<double> vals, aux;
      Rng r(rng(), "pair");
      for (int i = 0; i < 5; ++i) {
        vals.push_back(d[i].sample(r));
        aux.push_back(r.uniform01());
      }
      std::vector<int> order = all_items(5);
      r.shuffle(order);
      const auto on_m = run_gambler(m, tv, order, vals, aux);
      const auto on_n = run_gambler(n, tv, order, vals, aux);
      CHECK(subset_of(normalized(on_m.accepted), normalized(on_n.accepted)));
      ++runs;
    }
  }
  CHECK(runs >= 500);
}

TEST_CASE("projection transfer") {
  std::mt19937_64 rng(43);
  int tested = 0;
  for (int trial = 0; tested < 8 && trial < 200; ++trial) {
    const auto p = MatroidInstance::vector(2, oracle::random_columns(rng, 2, 3, 6));
    const Item x = static_cast<Item>(rng() % 6);
    if (is_loop(p, x) || is_free(p, x)) continue;
    ++tested;
    const auto inner = class_pick(delete_items(p, {x}));
    const auto n = contract(p, {x});
    const auto d = random_laws(rng, 5, 2);
    const auto mech = projection_transfer(p, x, inner, d, 4);
    CHECK(mech->ratio() == 3 * inner.ratio);
    CHECK(oracle_gambler(n, d, *mech) >= oracle::enumerated_prophet(n, d) / (3 * inner.ratio) - 1e-9);
    // Loops of N are never accepted.
    const auto atoms = mech->support(100000);
    REQUIRE(atoms);
    for (const auto& a : *atoms)
      for (Item i : n.loops()) CHECK(a.thresholds[i].is_never());
  }
  CHECK(tested == 8);
  CHECK_THROWS_AS(projection_guarantee(MatroidInstance::uniform(3, 3), 1, class_pick(MatroidInstance::uniform(2, 2))),
                  PreconditionError);
}

TEST_CASE("distance transfer ratios") {
  const auto l = MatroidInstance::uniform(4, 2);
  auto inner = class_pick(contract(l, {0}));
  REQUIRE(inner.ratio == 2);
  CHECK(distance_transfer({}, inner).ratio == 2);

  // Lift from L/x to L∖x, then project back to L/x through the same parent.
  std::vector<TransferStep> chain{{TransferStep::Kind::lift, l, 0}, {TransferStep::Kind::projection, l, 0}};
  const auto g = distance_transfer(chain, inner);
  CHECK(g.ratio == 18);
  const auto target = chain.back().target();
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 4; ++trial) {
    const auto d = random_laws(rng, 3, 3);
    const auto mech = g.build(target, d, 2);
    CHECK(mech->ratio() == 18);
    CHECK(oracle_gambler(target, d, *mech) >= oracle::enumerated_prophet(target, d) / 18 - 1e-9);
  }

  std::vector<TransferStep> two{{TransferStep::Kind::projection, l, 0}, {TransferStep::Kind::lift, l, 0}};
  CHECK(distance_transfer(two, inner).ratio == 18);
  // U_{3,5}/0 = U_{2,4} but U_{3,5}∖4 = U_{3,4}: the second step does not start where the first ends.
  std::vector<TransferStep> broken{{TransferStep::Kind::projection, MatroidInstance::uniform(5, 3), 0},
                                   {TransferStep::Kind::projection, MatroidInstance::uniform(5, 3), 4}};
  CHECK_THROWS_AS(distance_transfer(broken, inner), InputError);
  std::vector<TransferStep> proj2{{TransferStep::Kind::projection, MatroidInstance::uniform(5, 3), 0},
                                  {TransferStep::Kind::projection, MatroidInstance::uniform(5, 2), 0}};
  CHECK(distance_transfer(proj2, inner).ratio == 18);

  auto weak = inner;
  weak.ratio = 1.5;
  CHECK_THROWS_AS(distance_transfer(chain, weak), PreconditionError);
}

TEST_CASE("regular mechanism") {
  const Graph k4 = oracle::complete_graph(4);
  const auto single = incidence(k4);
  DecompositionTree one;
  one.nodes.push_back({0, "graphic", all_items(6), k4, std::nullopt, 0});
  std::mt19937_64 rng(53);
  const auto d6 = random_laws(rng, 6, 2);
  const auto r1 = regular_mechanism(single, one, d6, 1);
  CHECK(r1.ratio == 32);
  CHECK(r1.mechanism->ratio() == 32);

  const auto inst = graphic_cographic_two_sum();
  CHECK(inst.m.size() == 8);
  CHECK_NOTHROW(validate_seymour_tree(inst.m, inst.tree));
  for (int trial = 0; trial < 3; ++trial) {
    const auto d = random_laws(rng, 8, 2);
    const auto r = regular_mechanism(inst.m, inst.tree, d, static_cast<std::uint64_t>(trial));
    CHECK(r.ratio == 256);
    const auto ex = exact_evaluate(inst.m, d, *r.mechanism);
    CHECK(ex.gambler >= ex.prophet / 256 - 1e-9);
  }

  auto untagged = inst.tree;
  untagged.nodes[1].cls = "gamma-sparse";
  CHECK_THROWS_AS(regular_mechanism(inst.m, untagged, random_laws(rng, 8, 2), 1), InputError);
  auto mislabeled = inst.tree;
  mislabeled.edges[0].sum = 1;
  CHECK_THROWS_AS(validate_seymour_tree(inst.m, mislabeled), InputError);
}

TEST_CASE("r10x bag accepts each class with probability 1/classes") {
  // Parallel extension of a 10-element binary matroid with one doubled element.
  std::vector<gf::Vec> cols{{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1},
                            {1, 1, 0, 0, 1}, {1, 1, 1, 0, 0}, {0, 1, 1, 1, 0}, {0, 0, 1, 1, 1}, {1, 0, 0, 1, 1},
                            {1, 0, 0, 0, 0}};
  const auto m = MatroidInstance::vector(2, cols);
  CHECK(m.parallel_classes().size() == 10);
  std::vector<Distribution> d(11, Distribution::discrete({0, 1}, {0.5, 0.5}));
  const auto mech = r10x_guarantee().build(m, d, 1);
  const auto atoms = mech->support(100);
  REQUIRE(atoms);
  CHECK(atoms->size() == 10);
  for (const auto& a : *atoms) CHECK(a.weight == doctest::Approx(0.1));
  // Item 0 and its parallel copy 10 share a class: accepted value at least E[max]/2 w.p. 1/10.
  double g = 0;
  for (const auto& a : *atoms) g += a.weight * exact_gambler(m, d, a.thresholds, all_items(11));
  CHECK(g >= oracle::enumerated_prophet(m, d) / 20 - 1e-9);
}
