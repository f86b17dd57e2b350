#include "mp/composition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "mp/ex_ante.hpp"
#include "mp/harness.hpp"
#include "mp/mechanisms.hpp"
#include "mp/rng.hpp"

namespace mp {

namespace {

std::vector<Distribution> pick(const std::vector<Distribution>& dists, const std::vector<Item>& items) {
  std::vector<Distribution> out;
  out.reserve(items.size());
  for (Item i : items) out.push_back(dists.at(static_cast<std::size_t>(i)));
  return out;
}

void check_dists(const MatroidInstance& m, const std::vector<Distribution>& dists) {
  if (static_cast<int>(dists.size()) != m.size())
    throw InputError("distribution count does not match the ground set");
}

MechanismPtr with_ratio(MechanismPtr inner, double ratio, std::string name) {
  return std::make_shared<MixtureMechanism>(std::vector<MixtureMechanism::Component>{{1.0, std::move(inner)}}, ratio,
                                            std::move(name));
}

/// Fixed mechanism running the single-item rule on `items`.
MechanismPtr single_on(int n, const ItemSet& items, const std::vector<Distribution>& dists, std::string name) {
  ThresholdVector tv = ThresholdVector::never(n, name);
  if (!items.empty()) {
    const Threshold t = single_item_threshold(pick(dists, items));
    for (Item i : items) tv[i] = t;
  }
  return std::make_shared<FixedMechanism>(std::move(tv), 2.0, std::move(name));
}

}  // namespace

GuaranteedMechanism graphic_guarantee(const GuaranteeOptions& options) {
  return {"graphic", 16.0, [options](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t seed) {
            check_dists(m, d);
            if (m.kind() != MatroidKind::graphic) throw InputError("graphic mechanism needs a graphic instance");
            if (!m.graph()->is_simple()) throw InputError("graphic mechanism needs a simple graph");
            return MechanismPtr(graphic_mechanism(*m.graph(), ex_ante(m, d, options.ex_ante_trials, seed)));
          }};
}

GuaranteedMechanism multigraph_guarantee(const GuaranteeOptions& options) {
  return {"multigraph", 32.0,
          [options](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t seed) {
            check_dists(m, d);
            const auto relax = ex_ante(m, d, options.ex_ante_trials, seed);
            if (m.kind() == MatroidKind::graphic) return MechanismPtr(multigraph_mechanism(*m.graph(), relax));
            if (m.kind() == MatroidKind::vector && m.vectors()->p == 2 && m.vectors()->max_support() <= 2)
              return MechanismPtr(k_sparse_mechanism(m, 2, relax));
            throw InputError("multigraph mechanism needs a graph or F_2 columns with at most two nonzeros");
          }};
}

GuaranteedMechanism k_sparse_guarantee(int k, const GuaranteeOptions& options) {
  if (k < 1) throw InputError("k must be positive");
  return {"k-sparse", std::ldexp(1.0, k + 2) * k,
          [k, options](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t seed) {
            check_dists(m, d);
            return MechanismPtr(k_sparse_mechanism(m, k, ex_ante(m, d, options.ex_ante_trials, seed)));
          }};
}

GuaranteedMechanism cographic_guarantee() {
  return {"cographic", 6.0, [](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t) {
            check_dists(m, d);
            if (m.kind() != MatroidKind::cographic) throw InputError("cographic mechanism needs a cographic instance");
            return MechanismPtr(std::make_shared<CographicMechanism>(*m.graph(), d));
          }};
}

GuaranteedMechanism r10x_guarantee() {
  return {"r10x", 20.0, [](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t) {
            check_dists(m, d);
            if (m.parallel_classes().size() > 10)
              throw PreconditionError("r10x bag has " + std::to_string(m.parallel_classes().size()) +
                                      " parallel classes, at most 10 allowed");
            return MechanismPtr(std::make_shared<ParallelClassMechanism>(m, d, "r10x"));
          }};
}

GuaranteedMechanism gamma_guarantee(double gamma) {
  if (!(gamma > 0)) throw InputError("gamma must be positive");
  return {"gamma", std::ceil(gamma), [gamma](const MatroidInstance& m, const std::vector<Distribution>& d, std::uint64_t) {
            check_dists(m, d);
            return MechanismPtr(std::make_shared<GammaSparseMechanism>(m, gamma));
          }};
}

ThresholdVector restrict_thresholds(const ThresholdVector& tv, const ItemSet& kept) {
  ThresholdVector out = ThresholdVector::never(tv.size(), tv.provenance);
  for (Item i : kept) {
    if (i < 0 || i >= tv.size()) throw InputError("kept item out of range: " + std::to_string(i));
    out[i] = tv[i];
  }
  return out;
}

RestrictedMechanism::RestrictedMechanism(MechanismPtr base, ItemSet kept, std::string name)
    : base_(std::move(base)), kept_(normalized(std::move(kept))), name_(std::move(name)) {
  if (name_.empty()) name_ = base_->name();
  for (Item i : kept_)
    if (i < 0 || i >= base_->size()) throw InputError("kept item out of range: " + std::to_string(i));
}

DrawResult RestrictedMechanism::draw(std::uint64_t seed) const {
  DrawResult r = base_->draw(seed);
  r.thresholds = restrict_thresholds(r.thresholds, kept_);
  return r;
}

std::optional<std::vector<WeightedThresholds>> RestrictedMechanism::support(std::size_t limit) const {
  auto atoms = base_->support(limit);
  if (!atoms) return std::nullopt;
  for (auto& a : *atoms) a.thresholds = restrict_thresholds(a.thresholds, kept_);
  return canonical_support(std::move(*atoms));
}

ProphetEstimate ProphetEvaluator::operator()(const MatroidInstance& minor, const std::vector<Item>& origin) const {
  if (static_cast<int>(origin.size()) != minor.size()) throw InputError("origin does not match the minor");
  if (origin.empty()) return {0.0, 0.0, true};
  const auto sub = pick(dists, origin);
  const std::uint64_t outcomes = joint_outcome_count(sub);
  if (outcomes > 0 && outcomes <= max_outcomes) return {exact_prophet(minor, sub, max_outcomes), 0.0, true};

  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> all(dists.size()), x(origin.size());
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed, "evaluator", trial);
    for (std::size_t i = 0; i < dists.size(); ++i) all[i] = dists[i].sample(rng);
    for (std::size_t i = 0; i < origin.size(); ++i) x[i] = all[static_cast<std::size_t>(origin[i])];
    const double v = total_weight(greedy_max_weight(minor, x), x);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n), false};
}

ContractionResult contraction_subset(const MatroidInstance& m, const ItemSet& t_in, int k,
                                     const ProphetEvaluator& evaluator, std::uint64_t seed) {
  const VectorPayload* v = m.vectors();
  if (v == nullptr) throw InputError("contraction_subset needs a vector matroid");
  if (static_cast<int>(evaluator.dists.size()) != m.size())
    throw InputError("evaluator distributions do not match the ground set");
  const ItemSet t = normalized(t_in);
  for (Item i : t)
    if (i < 0 || i >= m.size()) throw InputError("item out of range: " + std::to_string(i));
  const ItemSet tbar = complement(m.size(), t);
  const int lambda = connectivity(m, t);
  if (lambda > k)
    throw PreconditionError("connectivity " + std::to_string(lambda) + " exceeds k = " + std::to_string(k));

  const int p = v->p;
  std::vector<gf::Vec> phi_t, phi_tbar;
  for (Item i : t) phi_t.push_back(v->columns[i]);
  for (Item i : tbar) phi_tbar.push_back(v->columns[i]);
  const auto l_basis = gf::span_intersection(phi_t, phi_tbar, p, v->dim);
  const auto c_basis = gf::extend_basis(l_basis, phi_t, p, v->dim);
  std::vector<gf::Vec> full = l_basis;
  full.insert(full.end(), c_basis.begin(), c_basis.end());

  ContractionResult r;
  r.dim_l = static_cast<int>(l_basis.size());
  r.dim_c = static_cast<int>(c_basis.size());

  std::vector<gf::Vec> l_part, c_part;
  for (const auto& col : phi_t) {
    const auto coeff = gf::solve(full, col, p, v->dim);
    if (!coeff) throw std::logic_error("column outside the span of its own family");
    l_part.emplace_back(coeff->begin(), coeff->begin() + r.dim_l);
    c_part.emplace_back(coeff->begin() + r.dim_l, coeff->end());
  }

  auto value_of = [&](const ItemSet& s) { return evaluator(restrict_to(m, s), s); };

  ItemSet best_a_set;
  r.a_star = gf::Vec(static_cast<std::size_t>(r.dim_l), 0);
  r.value_a_star = {-1.0, 0.0, true};
  for (const auto& a : gf::all_vectors(p, r.dim_l)) {
    ItemSet ta;
    for (std::size_t j = 0; j < t.size(); ++j)
      if (l_part[j] == a && !gf::is_zero(c_part[j])) ta.push_back(t[j]);
    ++r.candidates_a;
    const auto val = value_of(ta);
    if (val.mean > r.value_a_star.mean) {
      r.value_a_star = val;
      r.a_star = a;
      best_a_set = ta;
    }
  }

  std::vector<gf::Vec> cs;
  const double space = std::pow(static_cast<double>(p), r.dim_c);
  if (space <= 4096.0) {
    for (auto& c : gf::all_vectors(p, r.dim_c))
      if (!gf::is_zero(c)) cs.push_back(std::move(c));
  } else {
    Rng rng(seed, "contraction/c");
    while (cs.size() < 4096) {
      gf::Vec c(static_cast<std::size_t>(r.dim_c));
      for (auto& e : c) e = static_cast<int>(rng.below(static_cast<std::uint64_t>(p)));
      if (!gf::is_zero(c)) cs.push_back(std::move(c));
    }
  }
  r.c_star = gf::Vec(static_cast<std::size_t>(r.dim_c), 0);
  r.value_s = {0.0, 0.0, true};
  bool first = true;
  for (const auto& c : cs) {
    ItemSet hc;
    for (std::size_t j = 0; j < t.size(); ++j)
      if (l_part[j] == r.a_star && !gf::is_zero(c_part[j]) && gf::dot(c_part[j], c, p) == 1) hc.push_back(t[j]);
    ++r.candidates_c;
    const auto val = value_of(hc);
    if (first || val.mean > r.value_s.mean) {
      r.value_s = val;
      r.c_star = c;
      r.s = hc;
      first = false;
    }
  }

  r.value_contracted = evaluator(contract(m, tbar), t);

  if (r.s.size() <= 12) {
    const int r_tbar = m.rank(tbar);
    const std::uint64_t full_mask = (std::uint64_t{1} << r.s.size()) - 1;
    for (std::uint64_t mask = 1; mask <= full_mask; ++mask) {
      ItemSet sub;
      for (std::size_t j = 0; j < r.s.size(); ++j)
        if (mask >> j & 1U) sub.push_back(r.s[j]);
      if (!m.is_independent(sub)) continue;
      if (m.rank(set_union(sub, tbar)) != static_cast<int>(sub.size()) + r_tbar)
        throw std::logic_error("independence transfer failed for the chosen subset");
    }
    r.transfer_checked = true;
  }
  return r;
}

// ---------------------------------------------------------------- trees

std::size_t DecompositionTree::index_of(int id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  throw InputError("unknown tree node " + std::to_string(id));
}

bool is_known_class(const std::string& cls) {
  static const std::set<std::string> known{"graphic", "cographic", "r10x", "two-column-sparse", "gamma-sparse"};
  return known.count(cls) > 0;
}

namespace {

/// Bags sorted by item, with the representation permuted to match.
DecompositionTree canonical(const DecompositionTree& td) {
  DecompositionTree out = td;
  for (auto& node : out.nodes) {
    std::vector<std::size_t> perm(node.bag.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return node.bag[a] < node.bag[b]; });
    std::vector<Item> bag;
    for (auto i : perm) bag.push_back(node.bag[i]);
    if (node.graph) {
      if (node.graph->edge_count() != static_cast<int>(node.bag.size()))
        throw InputError("node " + std::to_string(node.id) + ": graph has " +
                         std::to_string(node.graph->edge_count()) + " edges for " +
                         std::to_string(node.bag.size()) + " items");
      Graph g;
      g.vertices = node.graph->vertices;
      for (auto i : perm) g.edges.push_back(node.graph->edges[i]);
      node.graph = std::move(g);
    }
    if (node.columns) {
      if (node.columns->size() != node.bag.size())
        throw InputError("node " + std::to_string(node.id) + ": " + std::to_string(node.columns->size()) +
                         " columns for " + std::to_string(node.bag.size()) + " items");
      std::vector<gf::Vec> cols;
      for (auto i : perm) cols.push_back((*node.columns)[i]);
      node.columns = std::move(cols);
    }
    node.bag = std::move(bag);
  }
  return out;
}

int field_of(const MatroidInstance& m) { return m.vectors() ? m.vectors()->p : 2; }

/// Matroid on the bag positions `pos` (sorted) of a canonical node.
MatroidInstance bag_matroid(const MatroidInstance& m, const TreeNode& node, const std::vector<std::size_t>& pos) {
  ItemSet local;
  for (auto i : pos) local.push_back(static_cast<Item>(i));
  if (node.graph) {
    if (node.cls == "cographic") {
      return MatroidInstance::cographic(
          contract_edges(*node.graph, complement(static_cast<int>(node.bag.size()), local)));
    }
    return MatroidInstance::graphic(keep_edges(*node.graph, local));
  }
  if (node.columns) {
    std::vector<gf::Vec> cols;
    for (auto i : pos) cols.push_back((*node.columns)[i]);
    const int dim = node.columns->empty() ? 0 : static_cast<int>(node.columns->front().size());
    return MatroidInstance::vector(field_of(m), std::move(cols), dim);
  }
  ItemSet items;
  for (auto i : pos) items.push_back(node.bag[i]);
  return restrict_to(m, items);
}

std::vector<std::vector<std::size_t>> adjacency(const DecompositionTree& td) {
  std::vector<std::vector<std::size_t>> adj(td.nodes.size());
  for (const auto& e : td.edges) {
    const auto a = td.index_of(e.u), b = td.index_of(e.v);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

std::string edge_name(const TreeEdge& e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

void validate_canonical(const MatroidInstance& m, const DecompositionTree& td) {
  if (td.nodes.empty()) throw InputError("decomposition tree has no nodes");
  std::set<int> ids;
  std::vector<int> owner(static_cast<std::size_t>(m.size()), -1);
  for (const auto& node : td.nodes) {
    if (!ids.insert(node.id).second) throw InputError("duplicate tree node " + std::to_string(node.id));
    if (!is_known_class(node.cls))
      throw InputError("node " + std::to_string(node.id) + ": unknown class '" + node.cls + "'");
    for (Item x : node.bag) {
      if (x < 0 || x >= m.size()) throw InputError("node " + std::to_string(node.id) + ": item out of range");
      if (owner[x] >= 0)
        throw InputError("item " + std::to_string(x) + " lies in bags " + std::to_string(owner[x]) + " and " +
                         std::to_string(node.id));
      owner[x] = node.id;
    }
  }
  for (int x = 0; x < m.size(); ++x)
    if (owner[x] < 0) throw InputError("item " + std::to_string(x) + " lies in no bag");

  if (td.edges.size() + 1 != td.nodes.size())
    throw InputError("a tree on " + std::to_string(td.nodes.size()) + " nodes needs " +
                     std::to_string(td.nodes.size() - 1) + " edges");
  for (const auto& e : td.edges)
    if (e.u == e.v) throw InputError("tree edge " + edge_name(e) + " is a loop");
  const auto adj = adjacency(td);
  std::vector<bool> seen(td.nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto w : adj[u])
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
  }
  if (reached != td.nodes.size()) throw InputError("decomposition tree is not connected");

  for (const auto& node : td.nodes) {
    const std::string where = "node " + std::to_string(node.id) + " (" + node.cls + ")";
    if ((node.cls == "graphic" || node.cls == "cographic") && !node.graph && !(node.cls == "graphic" && node.columns))
      throw InputError(where + ": needs a graph representation");
    if (node.cls == "cographic" && !node.graph) throw InputError(where + ": needs a graph representation");
    if (node.cls == "gamma-sparse" && !(node.gamma > 0)) throw InputError(where + ": needs gamma > 0");
    std::vector<std::size_t> all(node.bag.size());
    std::iota(all.begin(), all.end(), 0);
    const MatroidInstance rep = bag_matroid(m, node, all);
    if (node.cls == "graphic" && !node.graph && rep.vectors()->max_support() > 2)
      throw InputError(where + ": columns with more than two nonzeros");
    if (node.cls == "two-column-sparse" && (rep.kind() != MatroidKind::vector || rep.vectors()->max_support() > 2))
      throw InputError(where + ": needs columns with at most two nonzeros");
    if (node.cls == "r10x" && rep.parallel_classes().size() > 10)
      throw InputError(where + ": more than 10 parallel classes");
    if (node.bag.size() <= 12 && (node.graph || node.columns) &&
        !same_rank_function(rep, restrict_to(m, node.bag)))
      throw InputError(where + ": representation does not match the matroid on the bag");
  }
}

}  // namespace

void validate_tree(const MatroidInstance& m, const DecompositionTree& td) { validate_canonical(m, canonical(td)); }

std::vector<EdgeThickness> thickness(const MatroidInstance& m, const DecompositionTree& td) {
  const auto adj = adjacency(td);
  std::vector<EdgeThickness> out;
  for (const auto& e : td.edges) {
    const auto a = td.index_of(e.u), b = td.index_of(e.v);
    std::vector<bool> seen(td.nodes.size(), false);
    std::vector<std::size_t> stack{a};
    seen[a] = true;
    ItemSet side;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (Item x : td.nodes[u].bag) side.push_back(x);
      for (auto w : adj[u])
        if (!seen[w] && !(u == a && w == b)) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    side = normalized(std::move(side));
    const int lambda = connectivity(m, side);
    out.push_back({e, std::move(side), lambda});
  }
  return out;
}

void audit_thickness(const MatroidInstance& m, const DecompositionTree& td, int k) {
  for (const auto& et : thickness(m, td))
    if (et.lambda > k)
      throw PreconditionError("tree edge " + edge_name(et.edge) + " has thickness " + std::to_string(et.lambda) +
                              " > k = " + std::to_string(k));
}

void validate_seymour_tree(const MatroidInstance& m, const DecompositionTree& td) {
  if (m.vectors() == nullptr || m.vectors()->p != 2) throw InputError("a Seymour tree needs an F_2 vector matroid");
  for (const auto& node : td.nodes)
    if (node.cls != "graphic" && node.cls != "cographic" && node.cls != "r10x")
      throw InputError("node " + std::to_string(node.id) + ": class '" + node.cls +
                       "' is not graphic, cographic or r10x");
  validate_tree(m, td);
  for (const auto& e : td.edges)
    if (e.sum < 1 || e.sum > 3) throw InputError("tree edge " + edge_name(e) + ": sum label must be 1, 2 or 3");
  for (const auto& et : thickness(m, td)) {
    if (et.lambda > 2)
      throw PreconditionError("tree edge " + edge_name(et.edge) + " has thickness " + std::to_string(et.lambda) +
                              " > k = 2");
    if (et.lambda >= et.edge.sum)
      throw InputError("tree edge " + edge_name(et.edge) + " is labeled a " + std::to_string(et.edge.sum) +
                       "-sum but has thickness " + std::to_string(et.lambda));
  }
}

ComposeResult tree_compose(const MatroidInstance& m, const DecompositionTree& td_in,
                           const std::map<std::string, GuaranteedMechanism>& bag_mechanisms,
                           const std::vector<Distribution>& dists, const ComposeOptions& options) {
  check_dists(m, dists);
  const DecompositionTree td = canonical(td_in);
  validate_canonical(m, td);
  ComposeResult result;
  result.thickness = thickness(m, td);
  audit_thickness(m, td, options.k);
  if (td.nodes.size() > 1 && m.vectors() == nullptr)
    throw InputError("tree composition needs a vector matroid");

  double alpha = 0.0;
  for (const auto& node : td.nodes) {
    const auto it = bag_mechanisms.find(node.cls);
    if (it == bag_mechanisms.end()) throw InputError("no mechanism for class '" + node.cls + "'");
    alpha = std::max(alpha, it->second.ratio);
  }
  if (options.alpha) alpha = *options.alpha;

  std::vector<MechanismPtr> parts;
  std::vector<std::vector<Item>> blocks;
  auto install = [&](const TreeNode& node, const ItemSet& s, ComposeStage& stage) {
    const auto& g = bag_mechanisms.at(node.cls);
    stage.mechanism = g.name;
    stage.bag_ratio = g.ratio;
    if (s.empty()) return;
    std::vector<std::size_t> pos;
    for (Item x : s)
      pos.push_back(static_cast<std::size_t>(std::lower_bound(node.bag.begin(), node.bag.end(), x) - node.bag.begin()));
    const MatroidInstance bm = bag_matroid(m, node, pos);
    parts.push_back(g.build(bm, pick(dists, s), derive_seed(options.seed, "tree/bag", static_cast<std::uint64_t>(node.id))));
    blocks.push_back(s);
  };

  auto adj = adjacency(td);
  std::vector<bool> alive(td.nodes.size(), true);
  ItemSet working = all_items(m.size());
  std::size_t remaining = td.nodes.size();
  std::uint64_t stage_index = 0;
  while (remaining > 1) {
    std::size_t leaf = td.nodes.size();
    for (std::size_t i = 0; i < td.nodes.size(); ++i) {
      if (!alive[i]) continue;
      const auto deg = std::count_if(adj[i].begin(), adj[i].end(), [&](std::size_t w) { return alive[w]; });
      if (deg == 1 && (leaf == td.nodes.size() || td.nodes[i].id < td.nodes[leaf].id)) leaf = i;
    }
    const TreeNode& node = td.nodes[leaf];
    const MatroidInstance mw = restrict_to(m, working);
    ItemSet t_local;
    for (Item x : node.bag)
      t_local.push_back(static_cast<Item>(std::lower_bound(working.begin(), working.end(), x) - working.begin()));
    ProphetEvaluator evaluator{pick(dists, working), options.max_outcomes, options.evaluator_trials,
                               derive_seed(options.seed, "tree/evaluator")};
    ComposeStage stage;
    stage.node = node.id;
    stage.bag = node.bag;
    stage.lambda = connectivity(mw, t_local);
    auto cr = contraction_subset(mw, t_local, options.k, evaluator,
                                 derive_seed(options.seed, "tree/contraction", stage_index++));
    for (Item i : cr.s) stage.s.push_back(working[static_cast<std::size_t>(i)]);
    stage.contraction = std::move(cr);
    install(node, stage.s, stage);
    result.stages.push_back(std::move(stage));
    alive[leaf] = false;
    --remaining;
    working = set_difference(working, node.bag);
  }
  for (std::size_t i = 0; i < td.nodes.size(); ++i) {
    if (!alive[i]) continue;
    const TreeNode& node = td.nodes[i];
    ComposeStage stage;
    stage.node = node.id;
    stage.bag = node.bag;
    stage.s = node.bag;
    stage.lambda = 0;
    install(node, stage.s, stage);
    result.stages.push_back(std::move(stage));
  }

  const int p = field_of(m);
  if (td.nodes.size() == 1) {
    result.ratio = bag_mechanisms.at(td.nodes[0].cls).ratio;
    result.mechanism = parts.empty()
                           ? MechanismPtr(std::make_shared<FixedMechanism>(ThresholdVector::never(m.size()),
                                                                           result.ratio, "tree"))
                           : parts[0];
    return result;
  }
  result.ratio = alpha * std::pow(static_cast<double>(p), options.k + 1);
  result.mechanism =
      std::make_shared<ProductMechanism>(m.size(), std::move(parts), std::move(blocks), result.ratio, "tree");
  return result;
}

ComposeResult regular_mechanism(const MatroidInstance& m, const DecompositionTree& st,
                                const std::vector<Distribution>& dists, std::uint64_t seed,
                                const GuaranteeOptions& options) {
  validate_seymour_tree(m, st);
  const std::map<std::string, GuaranteedMechanism> bags{
      {"graphic", multigraph_guarantee(options)}, {"cographic", cographic_guarantee()}, {"r10x", r10x_guarantee()}};
  ComposeOptions co;
  co.k = 2;
  co.seed = seed;
  co.alpha = 32.0;
  return tree_compose(m, st, bags, dists, co);
}

// ---------------------------------------------------------------- lift / projection

namespace {

void check_transfer_element(const MatroidInstance& parent, Item x) {
  if (x < 0 || x >= parent.size()) throw InputError("transfer element out of range: " + std::to_string(x));
  if (is_loop(parent, x) || is_free(parent, x))
    throw PreconditionError("x is not a loop and not a free element is required; item " + std::to_string(x) +
                            " is " + (is_loop(parent, x) ? "a loop" : "a free element"));
}

Item drop_index(Item i, Item x) { return i < x ? i : i - 1; }

void check_target(const MatroidInstance& expected, const MatroidInstance& given) {
  if (given.size() != expected.size()) throw InputError("matroid does not match the transfer target");
  if (given.size() <= 12 && !same_rank_function(expected, given))
    throw InputError("matroid does not match the transfer target");
}

}  // namespace

GuaranteedMechanism lift_guarantee(const MatroidInstance& l, Item x, GuaranteedMechanism inner) {
  check_transfer_element(l, x);
  const double alpha = inner.ratio;
  const double ratio = 2 * alpha + 2;
  return {"lift(" + inner.name + ")", ratio,
          [l, x, inner, alpha, ratio](const MatroidInstance& n, const std::vector<Distribution>& d, std::uint64_t seed) {
            const MatroidInstance target = delete_items(l, {x});
            check_target(target, n);
            check_dists(target, d);
            const MatroidInstance source = contract(l, {x});
            auto inner_mech = inner.build(source, d, derive_seed(seed, "lift/inner"));
            ItemSet cls;
            for (Item i : parallel_class_of(l, x))
              if (i != x) cls.push_back(drop_index(i, x));
            auto single = single_on(target.size(), cls, d, "lift/class");
            return MechanismPtr(std::make_shared<MixtureMechanism>(
                std::vector<MixtureMechanism::Component>{{alpha / (alpha + 1), inner_mech}, {1 / (alpha + 1), single}},
                ratio, "lift"));
          }};
}

GuaranteedMechanism projection_guarantee(const MatroidInstance& p, Item x, GuaranteedMechanism inner) {
  check_transfer_element(p, x);
  const double ratio = 3 * inner.ratio;
  return {"projection(" + inner.name + ")", ratio,
          [p, x, inner, ratio](const MatroidInstance& n, const std::vector<Distribution>& d, std::uint64_t seed) {
            const MatroidInstance target = contract(p, {x});
            check_target(target, n);
            check_dists(target, d);
            const ItemSet loops = target.loops();
            const ItemSet rest = complement(target.size(), loops);
            std::vector<Distribution> zeroed = d;
            for (Item i : loops) zeroed[static_cast<std::size_t>(i)] = Distribution::point(0.0);
            auto inner_mech = inner.build(delete_items(p, {x}), zeroed, derive_seed(seed, "projection/inner"));
            auto pinned = std::make_shared<RestrictedMechanism>(inner_mech, rest);
            auto single = single_on(target.size(), rest, d, "projection/single");
            return MechanismPtr(std::make_shared<MixtureMechanism>(
                std::vector<MixtureMechanism::Component>{{1.0 / 3.0, pinned}, {2.0 / 3.0, single}}, ratio,
                "projection"));
          }};
}

MechanismPtr lift_transfer(const MatroidInstance& l, Item x, const GuaranteedMechanism& inner,
                           const std::vector<Distribution>& dists, std::uint64_t seed) {
  return lift_guarantee(l, x, inner).build(delete_items(l, {x}), dists, seed);
}

MechanismPtr projection_transfer(const MatroidInstance& p, Item x, const GuaranteedMechanism& inner,
                                 const std::vector<Distribution>& dists, std::uint64_t seed) {
  return projection_guarantee(p, x, inner).build(contract(p, {x}), dists, seed);
}

MatroidInstance TransferStep::source() const {
  return kind == Kind::lift ? contract(parent, {x}) : delete_items(parent, {x});
}

MatroidInstance TransferStep::target() const {
  return kind == Kind::lift ? delete_items(parent, {x}) : contract(parent, {x});
}

GuaranteedMechanism distance_transfer(const std::vector<TransferStep>& chain, GuaranteedMechanism inner) {
  if (inner.ratio < 2) throw PreconditionError("distance transfer needs alpha >= 2");
  if (chain.empty()) return inner;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const auto prev = chain[i - 1].target();
    const auto next = chain[i].source();
    if (prev.size() != next.size() || (prev.size() <= 16 && !same_rank_function(prev, next)))
      throw InputError("step " + std::to_string(i) + " does not start where step " + std::to_string(i - 1) + " ends");
  }
  GuaranteedMechanism g = std::move(inner);
  const double alpha = g.ratio;
  double ratio = alpha;
  for (const auto& step : chain) {
    g = step.kind == TransferStep::Kind::lift ? lift_guarantee(step.parent, step.x, std::move(g))
                                              : projection_guarantee(step.parent, step.x, std::move(g));
    ratio *= 3;
    g.ratio = ratio;
  }
  auto build = g.build;
  g.name = "distance(" + std::to_string(chain.size()) + ")";
  g.build = [build, ratio](const MatroidInstance& n, const std::vector<Distribution>& d, std::uint64_t seed) {
    return with_ratio(build(n, d, seed), ratio, "distance");
  };
  return g;
}

}  // namespace mp
