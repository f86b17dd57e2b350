#include "mp/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mp/partition.hpp"
#include "mp/rng.hpp"

namespace mp {

namespace {

constexpr double kLoadTolerance = 1e-9;

double product_cdf(const std::vector<Distribution>& dists, double x) {
  double prod = 1.0;
  for (const auto& d : dists) prod *= d.cdf(x);
  return prod;
}

void check_relaxation(int n, const ExAnteRelaxation& relax) {
  if (relax.size() != n) throw InputError("relaxation size does not match the ground set");
}

std::vector<std::vector<int>> graph_hyperedges(const Graph& g) {
  std::vector<std::vector<int>> out;
  for (auto [u, v] : g.edges) out.push_back(u == v ? std::vector<int>{} : std::vector<int>{u, v});
  return out;
}

}  // namespace

Threshold single_item_threshold(const std::vector<Distribution>& dists) {
  if (dists.empty()) throw InputError("single-item rule needs at least one item");
  double t;
  if (product_cdf(dists, 0.0) >= 0.5) {
    t = 0.0;
  } else {
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& d : dists) hi = std::max(hi, d.ess_sup());
    if (!std::isfinite(hi)) {
      hi = 1.0;
      while (product_cdf(dists, hi) < 0.5) hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (product_cdf(dists, mid) >= 0.5 ? hi : lo) = mid;
    }
    t = hi;
    // The median of a law with atoms sits exactly on an atom.
    for (const auto& d : dists) {
      if (!d.finite_support()) continue;
      for (double a : d.support())
        if (a >= lo && a <= hi && a < t && product_cdf(dists, a) >= 0.5) t = a;
    }
  }
  double excess = 0.0;
  for (const auto& d : dists) excess += d.upper_expectation(t) - t * (1.0 - d.cdf(t));
  return Threshold{t, excess <= t ? 1.0 : 0.0};
}

ThresholdVector single_item_thresholds(const std::vector<Distribution>& dists) {
  ThresholdVector tv;
  tv.values.assign(dists.size(), single_item_threshold(dists));
  tv.provenance = "single";
  return tv;
}

MechanismPtr single_item_mechanism(const std::vector<Distribution>& dists) {
  return std::make_shared<FixedMechanism>(single_item_thresholds(dists), 2.0, "single");
}

std::vector<double> orientation_loads(int vertices, const Orientation& o, const std::vector<double>& p) {
  std::vector<double> load(static_cast<std::size_t>(vertices), 0.0);
  for (std::size_t e = 0; e < o.head.size(); ++e)
    if (o.head[e] >= 0) load[static_cast<std::size_t>(o.head[e])] += p[e];
  return load;
}

Orientation orient_hypergraph(int vertices, const std::vector<std::vector<int>>& hyperedges,
                              const std::vector<double>& p, double bound) {
  if (p.size() != hyperedges.size()) throw InputError("one weight per edge is required");
  std::vector<std::vector<int>> edges = hyperedges;
  std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(vertices));
  std::vector<double> degree(static_cast<std::size_t>(vertices), 0.0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!(p[e] >= 0 && p[e] <= 1)) throw InputError("edge weights must lie in [0,1]");
    auto& verts = edges[e];
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    for (int v : verts) {
      if (v < 0 || v >= vertices) throw InputError("edge endpoint out of range");
      incident[static_cast<std::size_t>(v)].push_back(e);
      degree[static_cast<std::size_t>(v)] += p[e];
    }
  }
  Orientation o;
  o.head.assign(edges.size(), -1);
  std::vector<char> done(edges.size(), 0);
  std::vector<char> removed(static_cast<std::size_t>(vertices), 0);
  for (int step = 0; step < vertices; ++step) {
    int best = -1;
    for (int v = 0; v < vertices; ++v)
      if (!removed[static_cast<std::size_t>(v)] &&
          (best < 0 || degree[static_cast<std::size_t>(v)] < degree[static_cast<std::size_t>(best)]))
        best = v;
    const double d = degree[static_cast<std::size_t>(best)];
    if (d > bound + kLoadTolerance)
      throw PreconditionError("every remaining vertex has fractional degree above " + std::to_string(bound) +
                              " (minimum " + std::to_string(d) + " at vertex " + std::to_string(best) +
                              "); the weights lie outside the matroid polytope");
    removed[static_cast<std::size_t>(best)] = 1;
    for (std::size_t e : incident[static_cast<std::size_t>(best)]) {
      if (done[e]) continue;
      done[e] = 1;
      o.head[e] = best;
      for (int u : edges[e]) degree[static_cast<std::size_t>(u)] -= p[e];
    }
  }
  return o;
}

Orientation orient_graph(const Graph& g, const std::vector<double>& p) {
  g.validate();
  return orient_hypergraph(g.vertices, graph_hyperedges(g), p, 2.0);
}

std::vector<std::vector<int>> build_hypergraph(const MatroidInstance& m) {
  const VectorPayload* v = m.vectors();
  if (v == nullptr) throw InputError("hypergraph construction needs a vector matroid");
  std::vector<std::vector<int>> out;
  for (const auto& col : v->columns) {
    std::vector<int> support;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (col[i] != 0) support.push_back(static_cast<int>(i));
    out.push_back(std::move(support));
  }
  return out;
}

OrientedCutMechanism::OrientedCutMechanism(int vertices, std::vector<std::vector<int>> hyperedges,
                                           Orientation orientation, ExAnteRelaxation relax, double keep,
                                           double ratio, std::string name)
    : vertices_(vertices),
      hyperedges_(std::move(hyperedges)),
      orientation_(std::move(orientation)),
      relax_(std::move(relax)),
      keep_(keep),
      ratio_(ratio),
      name_(std::move(name)) {
  check_relaxation(static_cast<int>(hyperedges_.size()), relax_);
  for (auto& e : hyperedges_) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
}

Threshold OrientedCutMechanism::tail_threshold(Item t) const {
  const auto i = static_cast<std::size_t>(t);
  if (relax_.p[i] <= 0 || hyperedges_[i].empty()) return Threshold::never();
  return Threshold{relax_.tau[i], relax_.theta[i]};
}

double OrientedCutMechanism::survival_probability(Item t) const {
  if (tail_threshold(t).is_never()) return 0.0;
  return keep_ * std::ldexp(1.0, -static_cast<int>(hyperedges_[static_cast<std::size_t>(t)].size()));
}

DrawResult OrientedCutMechanism::draw(std::uint64_t seed) const {
  Rng rng(seed, name_);
  const int n = size();
  std::vector<char> kept(static_cast<std::size_t>(n));
  for (auto& k : kept) k = rng.coin(keep_);
  std::vector<char> cut(static_cast<std::size_t>(vertices_));
  for (auto& c : cut) c = static_cast<char>(rng.next() >> 63);
  DrawResult r;
  r.thresholds = ThresholdVector::never(n, name_);
  r.draw.seed = seed;
  r.draw.mechanism = name_;
  auto& kept_list = r.draw.choices["kept"];
  auto& cut_list = r.draw.choices["cut"];
  for (int v = 0; v < vertices_; ++v)
    if (cut[static_cast<std::size_t>(v)]) cut_list.push_back(v);
  for (int t = 0; t < n; ++t) {
    const auto i = static_cast<std::size_t>(t);
    if (!kept[i]) continue;
    kept_list.push_back(t);
    const int head = orientation_.head[i];
    if (head < 0 || cut[static_cast<std::size_t>(head)]) continue;
    bool tails_in = true;
    for (int v : hyperedges_[i])
      if (v != head && !cut[static_cast<std::size_t>(v)]) tails_in = false;
    if (tails_in) r.thresholds[t] = tail_threshold(t);
  }
  return r;
}

std::optional<std::vector<WeightedThresholds>> OrientedCutMechanism::support(std::size_t limit) const {
  const int n = size();
  if (vertices_ > 24 || n > 30) return std::nullopt;
  std::map<std::uint64_t, double> survivors;
  const double cut_weight = std::ldexp(1.0, -vertices_);
  for (std::uint64_t cut = 0; cut < (std::uint64_t{1} << vertices_); ++cut) {
    std::vector<Item> eligible;
    for (int t = 0; t < n; ++t) {
      const auto i = static_cast<std::size_t>(t);
      if (tail_threshold(t).is_never()) continue;
      const int head = orientation_.head[i];
      if (cut >> head & 1U) continue;
      bool ok = true;
      for (int v : hyperedges_[i])
        if (v != head && !(cut >> v & 1U)) ok = false;
      if (ok) eligible.push_back(t);
    }
    const std::size_t m = eligible.size();
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << m); ++sub) {
      const int kept = __builtin_popcountll(sub);
      double w = cut_weight * std::pow(keep_, kept) * std::pow(1.0 - keep_, static_cast<double>(m) - kept);
      std::uint64_t mask = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (sub >> j & 1U) mask |= std::uint64_t{1} << eligible[j];
      survivors[mask] += w;
      if (survivors.size() > limit) return std::nullopt;
    }
  }
  std::vector<WeightedThresholds> atoms;
  for (auto [mask, w] : survivors) {
    WeightedThresholds a{w, ThresholdVector::never(n, name_)};
    for (int t = 0; t < n; ++t)
      if (mask >> t & 1U) a.thresholds[t] = tail_threshold(t);
    atoms.push_back(std::move(a));
  }
  return canonical_support(std::move(atoms));
}

std::shared_ptr<const OrientedCutMechanism> graphic_mechanism(const Graph& g, const ExAnteRelaxation& relax) {
  g.validate();
  if (!g.is_simple())
    throw InputError("graphic mechanism needs a simple graph; use the k-sparse mechanism with k = 2");
  check_relaxation(g.edge_count(), relax);
  Orientation o = orient_graph(g, relax.p);
  return std::make_shared<OrientedCutMechanism>(g.vertices, graph_hyperedges(g), std::move(o), relax, 0.5, 16.0,
                                                "graphic");
}

std::shared_ptr<const OrientedCutMechanism> multigraph_mechanism(const Graph& g, const ExAnteRelaxation& relax) {
  g.validate();
  check_relaxation(g.edge_count(), relax);
  auto edges = graph_hyperedges(g);
  Orientation o = orient_hypergraph(g.vertices, edges, relax.p, 2.0);
  return std::make_shared<OrientedCutMechanism>(g.vertices, std::move(edges), std::move(o), relax, 0.25, 32.0,
                                                "graphic-ksparse");
}

std::shared_ptr<const OrientedCutMechanism> k_sparse_mechanism(const MatroidInstance& m, int k,
                                                               const ExAnteRelaxation& relax) {
  if (k < 1) throw InputError("k must be positive");
  auto edges = build_hypergraph(m);
  for (std::size_t t = 0; t < edges.size(); ++t)
    if (static_cast<int>(edges[t].size()) > k)
      throw InputError("column " + std::to_string(t) + " has " + std::to_string(edges[t].size()) +
                       " nonzero entries, more than k = " + std::to_string(k));
  check_relaxation(m.size(), relax);
  Orientation o = orient_hypergraph(m.vectors()->dim, edges, relax.p, k);
  const double ratio = std::ldexp(1.0, k + 2) * k;
  return std::make_shared<OrientedCutMechanism>(m.vectors()->dim, std::move(edges), std::move(o), relax,
                                                1.0 / (2.0 * k), ratio, "ksparse");
}

Cographic3ECMechanism::Cographic3ECMechanism(const Graph& g, bool check_connectivity) : edges_(g.edge_count()) {
  g.validate();
  if (check_connectivity && g.vertices <= 64 && !is_three_edge_connected(g))
    throw InfeasibleError("graph is not 3-edge-connected", small_cut(g));
  const MatroidInstance mc = MatroidInstance::cographic(g);
  if (!mc.loops().empty()) throw InfeasibleError("graph has a bridge", mc.loops());
  PartitionResult res = partition_into_independent_sets(mc, 3);
  if (!res.feasible)
    throw InfeasibleError("cographic matroid cannot be covered by three independent sets", res.violating_set);
  parts_ = res.parts;
  for (const auto& part : parts_) {
    forests_.push_back(spanning_forest(g, complement(edges_, part)));
    accepted_.push_back(complement(edges_, forests_.back()));
  }
}

DrawResult Cographic3ECMechanism::draw(std::uint64_t seed) const {
  Rng rng(seed, "cographic-3ec");
  const auto j = static_cast<std::size_t>(rng.below(3));
  DrawResult r{ThresholdVector::never(edges_, name()), {seed, name(), {}}};
  for (Item e : accepted_[j]) r.thresholds[e] = Threshold::at_least(0.0);
  r.draw.choices["forest"] = {static_cast<int>(j)};
  return r;
}

std::optional<std::vector<WeightedThresholds>> Cographic3ECMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms;
  for (const auto& acc : accepted_) {
    WeightedThresholds a{1.0 / 3.0, ThresholdVector::never(edges_, name())};
    for (Item e : acc) a.thresholds[e] = Threshold::at_least(0.0);
    atoms.push_back(std::move(a));
  }
  atoms = canonical_support(std::move(atoms));
  if (atoms.size() > limit) return std::nullopt;
  return atoms;
}

CographicMechanism::CographicMechanism(const Graph& g, const std::vector<Distribution>& dists)
    : edges_(g.edge_count()) {
  g.validate();
  if (static_cast<int>(dists.size()) != edges_) throw InputError("distribution count does not match the edges");
  const MatroidInstance mc = MatroidInstance::cographic(g);
  bridges_ = mc.loops();
  classes_ = mc.parallel_classes();
  accepted_classes_.assign(3, {});
  if (classes_.empty()) return;
  ItemSet reps;
  for (const auto& c : classes_) reps.push_back(c.front());
  // Restricting the cographic matroid to the representatives is the cographic
  // matroid of the graph with every other edge contracted.
  const Graph quotient = contract_edges(g, complement(edges_, reps));
  const Cographic3ECMechanism inner(quotient, false);
  for (std::size_t j = 0; j < 3; ++j)
    for (Item local : inner.accepted()[j]) accepted_classes_[j].push_back(static_cast<std::size_t>(local));
  for (const auto& c : classes_) {
    std::vector<Distribution> sub;
    for (Item e : c) sub.push_back(dists[static_cast<std::size_t>(e)]);
    class_threshold_.push_back(single_item_threshold(sub));
  }
}

ThresholdVector CographicMechanism::thresholds_for(std::size_t part) const {
  ThresholdVector tv = ThresholdVector::never(edges_, name());
  for (std::size_t c : accepted_classes_[part])
    for (Item e : classes_[c]) tv[e] = class_threshold_[c];
  return tv;
}

DrawResult CographicMechanism::draw(std::uint64_t seed) const {
  Rng rng(seed, "cographic");
  const auto j = static_cast<std::size_t>(rng.below(3));
  DrawResult r{thresholds_for(j), {seed, name(), {}}};
  r.draw.choices["forest"] = {static_cast<int>(j)};
  return r;
}

std::optional<std::vector<WeightedThresholds>> CographicMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms;
  for (std::size_t j = 0; j < 3; ++j) atoms.push_back({1.0 / 3.0, thresholds_for(j)});
  atoms = canonical_support(std::move(atoms));
  if (atoms.size() > limit) return std::nullopt;
  return atoms;
}

GammaSparseMechanism::GammaSparseMechanism(const MatroidInstance& m, double gamma) : n_(m.size()) {
  if (!(std::isfinite(gamma) && gamma >= 1)) throw InputError("gamma must be a finite number >= 1");
  const int k = static_cast<int>(std::ceil(gamma - 1e-12));
  if (!m.loops().empty())
    throw InfeasibleError("matroid is not gamma-sparse: loop " + std::to_string(m.loops().front()), {m.loops().front()});
  PartitionResult res = partition_into_independent_sets(m, k);
  if (!res.feasible)
    throw InfeasibleError("matroid is not " + std::to_string(k) + "-sparse", res.violating_set);
  parts_ = res.parts;
}

DrawResult GammaSparseMechanism::draw(std::uint64_t seed) const {
  Rng rng(seed, "gamma");
  const auto j = static_cast<std::size_t>(rng.below(parts_.size()));
  DrawResult r{ThresholdVector::never(n_, name()), {seed, name(), {}}};
  for (Item e : parts_[j]) r.thresholds[e] = Threshold::at_least(0.0);
  r.draw.choices["part"] = {static_cast<int>(j)};
  return r;
}

std::optional<std::vector<WeightedThresholds>> GammaSparseMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms;
  for (const auto& part : parts_) {
    WeightedThresholds a{1.0 / static_cast<double>(parts_.size()), ThresholdVector::never(n_, name())};
    for (Item e : part) a.thresholds[e] = Threshold::at_least(0.0);
    atoms.push_back(std::move(a));
  }
  atoms = canonical_support(std::move(atoms));
  if (atoms.size() > limit) return std::nullopt;
  return atoms;
}

ParallelClassMechanism::ParallelClassMechanism(const MatroidInstance& m, const std::vector<Distribution>& dists,
                                               std::string name)
    : n_(m.size()), classes_(m.parallel_classes()), name_(std::move(name)) {
  if (static_cast<int>(dists.size()) != n_) throw InputError("distribution count does not match the ground set");
  for (const auto& c : classes_) {
    std::vector<Distribution> sub;
    for (Item e : c) sub.push_back(dists[static_cast<std::size_t>(e)]);
    class_threshold_.push_back(single_item_threshold(sub));
  }
}

double ParallelClassMechanism::ratio() const {
  return 2.0 * static_cast<double>(std::max<std::size_t>(1, classes_.size()));
}

ThresholdVector ParallelClassMechanism::thresholds_for(std::size_t cls) const {
  ThresholdVector tv = ThresholdVector::never(n_, name_);
  for (Item e : classes_[cls]) tv[e] = class_threshold_[cls];
  return tv;
}

DrawResult ParallelClassMechanism::draw(std::uint64_t seed) const {
  DrawResult r{ThresholdVector::never(n_, name_), {seed, name_, {}}};
  if (classes_.empty()) return r;
  Rng rng(seed, name_);
  const auto c = static_cast<std::size_t>(rng.below(classes_.size()));
  r.thresholds = thresholds_for(c);
  r.draw.choices["class"] = {static_cast<int>(c)};
  return r;
}

std::optional<std::vector<WeightedThresholds>> ParallelClassMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms;
  if (classes_.empty()) atoms.push_back({1.0, ThresholdVector::never(n_, name_)});
  for (std::size_t c = 0; c < classes_.size(); ++c)
    atoms.push_back({1.0 / static_cast<double>(classes_.size()), thresholds_for(c)});
  atoms = canonical_support(std::move(atoms));
  if (atoms.size() > limit) return std::nullopt;
  return atoms;
}

}  // namespace mp
