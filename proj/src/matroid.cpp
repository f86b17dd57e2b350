#include "mp/matroid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mp {

const char* to_string(MatroidKind kind) {
  switch (kind) {
    case MatroidKind::graphic: return "graphic";
    case MatroidKind::cographic: return "cographic";
    case MatroidKind::uniform: return "uniform";
    case MatroidKind::vector: return "vector";
    case MatroidKind::explicit_bases: return "explicit";
  }
  return "unknown";
}

int VectorPayload::max_support() const {
  int best = 0;
  for (const auto& c : columns)
    best = std::max(best, static_cast<int>(std::count_if(c.begin(), c.end(), [](int x) { return x != 0; })));
  return best;
}

// ---------------------------------------------------------------------------
// Construction

MatroidInstance MatroidInstance::graphic(Graph g) {
  g.validate();
  MatroidInstance m;
  m.kind_ = MatroidKind::graphic;
  m.n_ = g.edge_count();
  m.payload_ = std::move(g);
  m.finish();
  return m;
}

MatroidInstance MatroidInstance::cographic(Graph g) {
  g.validate();
  MatroidInstance m;
  m.kind_ = MatroidKind::cographic;
  m.n_ = g.edge_count();
  m.base_components_ = count_components(g);
  m.payload_ = std::move(g);
  m.finish();
  return m;
}

MatroidInstance MatroidInstance::uniform(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw InputError("uniform: need 0 <= k <= n");
  MatroidInstance m;
  m.kind_ = MatroidKind::uniform;
  m.n_ = n;
  m.payload_ = UniformPayload{n, k};
  m.finish();
  return m;
}

MatroidInstance MatroidInstance::vector(int p, std::vector<gf::Vec> columns, int dim) {
  if (!gf::is_prime(p)) throw InputError("vector: p = " + std::to_string(p) + " is not prime");
  if (dim < 0) dim = columns.empty() ? 0 : static_cast<int>(columns.front().size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (static_cast<int>(columns[i].size()) != dim)
      throw InputError("vector: column " + std::to_string(i) + " has length " +
                       std::to_string(columns[i].size()) + ", expected " + std::to_string(dim));
    for (int x : columns[i])
      if (x < 0 || x >= p)
        throw InputError("vector: column " + std::to_string(i) + " has entry " + std::to_string(x) +
                         " outside {0.." + std::to_string(p - 1) + "}");
  }
  MatroidInstance m;
  m.kind_ = MatroidKind::vector;
  m.n_ = static_cast<int>(columns.size());
  m.payload_ = VectorPayload{p, dim, std::move(columns)};
  m.finish();
  return m;
}

MatroidInstance MatroidInstance::explicit_bases(int n, std::vector<ItemSet> bases) {
  if (n < 0 || n > kExplicitMaxItems)
    throw InputError("explicit: ground set limited to " + std::to_string(kExplicitMaxItems) + " items");
  if (bases.empty()) throw InputError("explicit: at least one basis is required");
  for (auto& b : bases) {
    b = normalized(std::move(b));
    for (Item x : b)
      if (x < 0 || x >= n) throw InputError("explicit: basis element " + std::to_string(x) + " out of range");
  }
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  MatroidInstance m;
  m.kind_ = MatroidKind::explicit_bases;
  m.n_ = n;
  m.payload_ = ExplicitPayload{n, std::move(bases)};
  m.finish();
  return m;
}

void MatroidInstance::finish() {
  full_rank_ = raw_rank(all_items(n_));
  loops_.clear();
  for (Item i = 0; i < n_; ++i)
    if (raw_rank({i}) == 0) loops_.push_back(i);
  parallel_.clear();
  std::vector<bool> assigned(static_cast<std::size_t>(n_), false);
  for (Item i = 0; i < n_; ++i) {
    if (assigned[i] || contains(loops_, i)) continue;
    ItemSet cls{i};
    assigned[i] = true;
    for (Item j = i + 1; j < n_; ++j) {
      if (assigned[j] || contains(loops_, j)) continue;
      if (raw_rank({i, j}) == 1) {
        cls.push_back(j);
        assigned[j] = true;
      }
    }
    parallel_.push_back(std::move(cls));
  }
}

void MatroidInstance::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && static_cast<int>(labels.size()) != n_)
    throw InputError("labels: expected one label per item");
  labels_ = std::move(labels);
}

// ---------------------------------------------------------------------------
// Rank oracles

int MatroidInstance::raw_rank(const ItemSet& s) const {
  switch (kind_) {
    case MatroidKind::graphic: return forest_rank(std::get<Graph>(payload_), s);
    case MatroidKind::cographic: {
      const auto& g = std::get<Graph>(payload_);
      // Edges outside s, counted once even if s has duplicates.
      std::vector<bool> removed(static_cast<std::size_t>(n_), false);
      int distinct = 0;
      for (Item e : s)
        if (!removed[e]) {
          removed[e] = true;
          ++distinct;
        }
      UnionFind uf(g.vertices);
      for (int e = 0; e < n_; ++e)
        if (!removed[e]) uf.unite(g.edges[e].first, g.edges[e].second);
      return distinct - (uf.components() - base_components_);
    }
    case MatroidKind::uniform: {
      const auto& u = std::get<UniformPayload>(payload_);
      return std::min(static_cast<int>(normalized(s).size()), u.k);
    }
    case MatroidKind::vector: {
      const auto& v = std::get<VectorPayload>(payload_);
      gf::EchelonBasis b(v.p, v.dim);
      for (Item i : s) b.insert(v.columns[i]);
      return b.rank();
    }
    case MatroidKind::explicit_bases: {
      const auto& ex = std::get<ExplicitPayload>(payload_);
      const ItemSet sorted = normalized(s);
      int best = 0;
      for (const auto& b : ex.bases)
        best = std::max(best, static_cast<int>(set_intersection(b, sorted).size()));
      return best;
    }
  }
  return 0;
}

int MatroidInstance::rank(const ItemSet& s) const {
  for (Item x : s)
    if (x < 0 || x >= n_) throw InputError("rank: unknown element " + std::to_string(x));
  return raw_rank(s);
}

bool MatroidInstance::is_independent(const ItemSet& s) const {
  return rank(s) == static_cast<int>(normalized(s).size());
}

int MatroidInstance::rank_mask(std::uint64_t mask) const { return raw_rank(from_mask(mask, n_)); }

const Graph* MatroidInstance::graph() const { return std::get_if<Graph>(&payload_); }
const VectorPayload* MatroidInstance::vectors() const { return std::get_if<VectorPayload>(&payload_); }
const UniformPayload* MatroidInstance::uniform_params() const {
  return std::get_if<UniformPayload>(&payload_);
}
const ExplicitPayload* MatroidInstance::explicit_params() const {
  return std::get_if<ExplicitPayload>(&payload_);
}

namespace {

class ForestTracker final : public IndependenceTracker {
 public:
  explicit ForestTracker(const Graph& g) : g_(g), uf_(g.vertices) {}
  bool try_add(Item x) override { return uf_.unite(g_.edges[x].first, g_.edges[x].second); }
  void clear() override { uf_.reset(); }

 private:
  const Graph& g_;
  UnionFind uf_;
};

class CountTracker final : public IndependenceTracker {
 public:
  explicit CountTracker(int k) : k_(k) {}
  bool try_add(Item) override {
    if (count_ >= k_) return false;
    ++count_;
    return true;
  }
  void clear() override { count_ = 0; }

 private:
  int k_;
  int count_ = 0;
};

class EchelonTracker final : public IndependenceTracker {
 public:
  explicit EchelonTracker(const VectorPayload& v) : v_(v), basis_(v.p, v.dim) {}
  bool try_add(Item x) override { return basis_.insert(v_.columns[x]); }
  void clear() override { basis_ = gf::EchelonBasis(v_.p, v_.dim); }

 private:
  const VectorPayload& v_;
  gf::EchelonBasis basis_;
};

class RankTracker final : public IndependenceTracker {
 public:
  explicit RankTracker(const MatroidInstance& m) : m_(m) {}
  bool try_add(Item x) override {
    current_.push_back(x);
    if (m_.rank(current_) == static_cast<int>(current_.size())) return true;
    current_.pop_back();
    return false;
  }
  void clear() override { current_.clear(); }

 private:
  const MatroidInstance& m_;
  ItemSet current_;
};

}  // namespace

std::unique_ptr<IndependenceTracker> MatroidInstance::tracker() const {
  switch (kind_) {
    case MatroidKind::graphic: return std::make_unique<ForestTracker>(std::get<Graph>(payload_));
    case MatroidKind::uniform: return std::make_unique<CountTracker>(std::get<UniformPayload>(payload_).k);
    case MatroidKind::vector: return std::make_unique<EchelonTracker>(std::get<VectorPayload>(payload_));
    default: return std::make_unique<RankTracker>(*this);
  }
}

// ---------------------------------------------------------------------------
// Minors

namespace {

void check_subset(const MatroidInstance& m, const ItemSet& a, const char* op) {
  for (Item x : a)
    if (x < 0 || x >= m.size()) throw InputError(std::string(op) + ": unknown element " + std::to_string(x));
}

std::vector<std::string> pick_labels(const MatroidInstance& m, const ItemSet& kept) {
  if (m.labels().empty()) return {};
  std::vector<std::string> out;
  for (Item x : kept) out.push_back(m.labels()[x]);
  return out;
}

// Bases of the explicit matroid restricted to `kept` and contracted by `contracted`
// (disjoint), relabeled to positions within `kept`.
std::vector<ItemSet> explicit_minor_bases(const MatroidInstance& m, const ItemSet& kept,
                                          const ItemSet& contracted) {
  const auto& ex = *m.explicit_params();
  const int rc = m.rank(contracted);
  const int target = m.rank(set_union(kept, contracted)) - rc;
  std::vector<int> pos(static_cast<std::size_t>(m.size()), -1);
  for (std::size_t i = 0; i < kept.size(); ++i) pos[kept[i]] = static_cast<int>(i);
  std::set<ItemSet> out;
  for (const auto& b : ex.bases) {
    if (static_cast<int>(set_intersection(b, contracted).size()) != rc) continue;
    ItemSet part;
    for (Item x : set_intersection(b, kept)) part.push_back(pos[x]);
    if (static_cast<int>(part.size()) == target) out.insert(part);
  }
  return {out.begin(), out.end()};
}

}  // namespace

MatroidInstance dual(const MatroidInstance& m) {
  MatroidInstance out = [&]() {
    switch (m.kind()) {
      case MatroidKind::graphic: return MatroidInstance::cographic(*m.graph());
      case MatroidKind::cographic: return MatroidInstance::graphic(*m.graph());
      case MatroidKind::uniform: {
        auto u = *m.uniform_params();
        return MatroidInstance::uniform(u.n, u.n - u.k);
      }
      case MatroidKind::explicit_bases: {
        std::vector<ItemSet> bases;
        for (const auto& b : m.explicit_params()->bases) bases.push_back(complement(m.size(), b));
        return MatroidInstance::explicit_bases(m.size(), std::move(bases));
      }
      case MatroidKind::vector: break;
    }
    // Standard form [I_r | D] relative to a column basis; the dual is [-D^T | I_{n-r}].
    const auto& v = *m.vectors();
    const int n = m.size();
    const std::vector<int> basis = gf::basis_indices(v.columns, v.p, v.dim);
    std::vector<gf::Vec> basis_cols;
    for (int b : basis) basis_cols.push_back(v.columns[b]);
    std::vector<int> nonbasis;
    for (int i = 0; i < n; ++i)
      if (!std::binary_search(basis.begin(), basis.end(), i)) nonbasis.push_back(i);
    const int co = static_cast<int>(nonbasis.size());
    std::vector<gf::Vec> cols(static_cast<std::size_t>(n), gf::Vec(static_cast<std::size_t>(co), 0));
    for (int j = 0; j < co; ++j) {
      const auto coeff = gf::solve(basis_cols, v.columns[nonbasis[j]], v.p, v.dim);
      for (std::size_t i = 0; i < basis.size(); ++i) cols[basis[i]][j] = gf::sub(0, (*coeff)[i], v.p);
      cols[nonbasis[j]][j] = 1;
    }
    return MatroidInstance::vector(v.p, std::move(cols), co);
  }();
  out.set_labels(m.labels());
  return out;
}

MatroidInstance restrict_to(const MatroidInstance& m, const ItemSet& a_in) {
  check_subset(m, a_in, "restrict");
  const ItemSet a = normalized(a_in);
  MatroidInstance out = [&]() {
    switch (m.kind()) {
      case MatroidKind::graphic: return MatroidInstance::graphic(keep_edges(*m.graph(), a));
      case MatroidKind::cographic:
        return MatroidInstance::cographic(contract_edges(*m.graph(), complement(m.size(), a)));
      case MatroidKind::uniform: {
        const int k = std::min(m.uniform_params()->k, static_cast<int>(a.size()));
        return MatroidInstance::uniform(static_cast<int>(a.size()), k);
      }
      case MatroidKind::vector: {
        const auto& v = *m.vectors();
        std::vector<gf::Vec> cols;
        for (Item x : a) cols.push_back(v.columns[x]);
        return MatroidInstance::vector(v.p, std::move(cols), v.dim);
      }
      case MatroidKind::explicit_bases:
        return MatroidInstance::explicit_bases(static_cast<int>(a.size()), explicit_minor_bases(m, a, {}));
    }
    throw InputError("restrict: unsupported kind");
  }();
  out.set_labels(pick_labels(m, a));
  return out;
}

MatroidInstance delete_items(const MatroidInstance& m, const ItemSet& a) {
  check_subset(m, a, "delete");
  return restrict_to(m, complement(m.size(), normalized(a)));
}

MatroidInstance contract(const MatroidInstance& m, const ItemSet& a_in) {
  check_subset(m, a_in, "contract");
  const ItemSet a = normalized(a_in);
  const ItemSet kept = complement(m.size(), a);
  MatroidInstance out = [&]() {
    switch (m.kind()) {
      case MatroidKind::graphic: return MatroidInstance::graphic(contract_edges(*m.graph(), a));
      case MatroidKind::cographic: return MatroidInstance::cographic(keep_edges(*m.graph(), kept));
      case MatroidKind::uniform: {
        const auto u = *m.uniform_params();
        const int ra = std::min(u.k, static_cast<int>(a.size()));
        return MatroidInstance::uniform(static_cast<int>(kept.size()), u.k - ra);
      }
      case MatroidKind::explicit_bases:
        return MatroidInstance::explicit_bases(static_cast<int>(kept.size()), explicit_minor_bases(m, kept, a));
      case MatroidKind::vector: break;
    }
    // Quotient by span φ(a): coordinates in a basis [basis of span φ(a) | unit vectors],
    // keeping only the coordinates outside span φ(a).
    const auto& v = *m.vectors();
    std::vector<gf::Vec> span_a;
    {
      std::vector<gf::Vec> cols;
      for (Item x : a) cols.push_back(v.columns[x]);
      for (int i : gf::basis_indices(cols, v.p, v.dim)) span_a.push_back(cols[i]);
    }
    std::vector<gf::Vec> units;
    for (int i = 0; i < v.dim; ++i) {
      gf::Vec e(static_cast<std::size_t>(v.dim), 0);
      e[i] = 1;
      units.push_back(std::move(e));
    }
    std::vector<gf::Vec> full = span_a;
    for (auto& e : gf::extend_basis(span_a, units, v.p, v.dim)) full.push_back(std::move(e));
    const int r = static_cast<int>(span_a.size());
    const int qdim = v.dim - r;
    std::vector<gf::Vec> cols;
    for (Item x : kept) {
      const auto coeff = gf::solve(full, v.columns[x], v.p, v.dim);
      cols.emplace_back(coeff->begin() + r, coeff->end());
    }
    return MatroidInstance::vector(v.p, std::move(cols), qdim);
  }();
  out.set_labels(pick_labels(m, kept));
  return out;
}

ItemSet simple_representatives(const MatroidInstance& m) {
  ItemSet reps;
  for (const auto& cls : m.parallel_classes()) reps.push_back(cls.front());
  return normalized(reps);
}

MatroidInstance simplify(const MatroidInstance& m) { return restrict_to(m, simple_representatives(m)); }

// ---------------------------------------------------------------------------
// Optimization and structure

double total_weight(const ItemSet& s, const std::vector<double>& weights) {
  double sum = 0.0;
  for (Item x : s) sum += weights[x];
  return sum;
}

ItemSet greedy_in_order(const MatroidInstance& m, const std::vector<Item>& order,
                        const std::vector<double>& weights) {
  auto tr = m.tracker();
  ItemSet chosen;
  for (Item x : order) {
    if (!(weights[x] > 0.0)) continue;
    if (tr->try_add(x)) chosen.push_back(x);
  }
  return normalized(chosen);
}

ItemSet greedy_max_weight(const MatroidInstance& m, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != m.size()) throw InputError("greedy: one weight per item required");
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw InputError("greedy: weight of item " + std::to_string(i) + " must be finite and nonnegative");
  std::vector<Item> order = all_items(m.size());
  std::stable_sort(order.begin(), order.end(), [&](Item a, Item b) { return weights[a] > weights[b]; });
  return greedy_in_order(m, order, weights);
}

int connectivity(const MatroidInstance& m, const ItemSet& s) {
  const ItemSet a = normalized(s);
  return m.rank(a) + m.rank(complement(m.size(), a)) - m.full_rank();
}

int local_connectivity(const MatroidInstance& m, const ItemSet& x, const ItemSet& y) {
  const ItemSet a = normalized(x);
  const ItemSet b = normalized(y);
  if (!set_intersection(a, b).empty()) throw InputError("local_connectivity: sets must be disjoint");
  return m.rank(a) + m.rank(b) - m.rank(set_union(a, b));
}

ItemSet closure(const MatroidInstance& m, const ItemSet& a_in) {
  const ItemSet a = normalized(a_in);
  const int ra = m.rank(a);
  ItemSet out;
  for (Item c = 0; c < m.size(); ++c) {
    if (contains(a, c)) {
      out.push_back(c);
      continue;
    }
    ItemSet ac = a;
    ac.push_back(c);
    if (m.rank(ac) == ra) out.push_back(c);
  }
  return out;
}

bool is_loop(const MatroidInstance& m, Item x) { return contains(m.loops(), x); }

bool is_free(const MatroidInstance& m, Item x) {
  ItemSet rest = complement(m.size(), {x});
  return m.rank(rest) < m.full_rank();
}

ItemSet free_elements(const MatroidInstance& m) {
  ItemSet out;
  for (Item x = 0; x < m.size(); ++x)
    if (is_free(m, x)) out.push_back(x);
  return out;
}

ItemSet parallel_class_of(const MatroidInstance& m, Item x) {
  for (const auto& cls : m.parallel_classes())
    if (contains(cls, x)) return cls;
  return {};
}

std::optional<std::string> check_axioms(const MatroidInstance& m) {
  const int n = m.size();
  if (n > MatroidInstance::kExplicitMaxItems) return std::nullopt;
  if (const auto* ex = m.explicit_params()) {
    const std::size_t rk = ex->bases.front().size();
    for (const auto& b : ex->bases)
      if (b.size() != rk) return "bases have equal cardinality";
    std::set<ItemSet> bases(ex->bases.begin(), ex->bases.end());
    for (const auto& b1 : ex->bases)
      for (const auto& b2 : ex->bases)
        for (Item x : set_difference(b1, b2)) {
          bool ok = false;
          for (Item y : set_difference(b2, b1)) {
            ItemSet c = set_difference(b1, {x});
            c.push_back(y);
            if (bases.count(normalized(c))) {
              ok = true;
              break;
            }
          }
          if (!ok) return "basis exchange (augmentation)";
        }
  }
  const std::uint64_t full = std::uint64_t{1} << n;
  std::vector<int> r(full);
  for (std::uint64_t s = 0; s < full; ++s) r[s] = m.rank_mask(s);
  if (r[0] != 0) return "rank(empty) = 0";
  for (std::uint64_t s = 0; s < full; ++s) {
    const int size = __builtin_popcountll(s);
    if (r[s] < 0 || r[s] > size) return "0 <= rank(A) <= |A|";
    for (int x = 0; x < n; ++x) {
      if (s >> x & 1U) continue;
      const std::uint64_t sx = s | std::uint64_t{1} << x;
      if (r[sx] < r[s] || r[sx] > r[s] + 1) return "unit increase (monotone, bounded)";
      for (int y = x + 1; y < n; ++y) {
        if (s >> y & 1U) continue;
        const std::uint64_t sy = s | std::uint64_t{1} << y;
        if (r[sx] + r[sy] < r[sx | sy] + r[s]) return "submodularity";
      }
    }
  }
  return std::nullopt;
}

bool same_rank_function(const MatroidInstance& a, const MatroidInstance& b) {
  if (a.size() != b.size() || a.size() > 16) return false;
  const std::uint64_t full = std::uint64_t{1} << a.size();
  for (std::uint64_t s = 0; s < full; ++s)
    if (a.rank_mask(s) != b.rank_mask(s)) return false;
  return true;
}

}  // namespace mp
