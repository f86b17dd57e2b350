#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mp/gf.hpp"
#include "mp/graph.hpp"
#include "mp/types.hpp"

namespace mp {

enum class MatroidKind { graphic, cographic, uniform, vector, explicit_bases };

const char* to_string(MatroidKind kind);

struct UniformPayload {
  int n = 0;
  int k = 0;
};

/// Columns of a matrix over F_p; column i represents item i.
struct VectorPayload {
  int p = 2;
  int dim = 0;
  std::vector<gf::Vec> columns;

  /// Largest number of nonzero entries in a column.
  int max_support() const;
};

struct ExplicitPayload {
  int n = 0;
  std::vector<ItemSet> bases;
};

/// Incremental independence test used by online runs and greedy.
class IndependenceTracker {
 public:
  virtual ~IndependenceTracker() = default;
  /// Adds x if the current set plus x stays independent.
  virtual bool try_add(Item x) = 0;
  virtual void clear() = 0;
};

/// A matroid on items 0..n-1 given by a class-specific payload. The rank oracle
/// is the single source of truth; the payload exists for speed and for
/// mechanisms that need the graph or the matrix.
class MatroidInstance {
 public:
  static constexpr int kExplicitMaxItems = 12;

  static MatroidInstance graphic(Graph g);
  static MatroidInstance cographic(Graph g);
  static MatroidInstance uniform(int n, int k);
  /// `dim` defaults to the common column length.
  static MatroidInstance vector(int p, std::vector<gf::Vec> columns, int dim = -1);
  static MatroidInstance explicit_bases(int n, std::vector<ItemSet> bases);

  int size() const { return n_; }
  MatroidKind kind() const { return kind_; }

  /// Throws InputError on unknown identifiers; `s` need not be sorted.
  int rank(const ItemSet& s) const;
  int full_rank() const { return full_rank_; }
  bool is_independent(const ItemSet& s) const;
  int rank_mask(std::uint64_t mask) const;

  const Graph* graph() const;
  const VectorPayload* vectors() const;
  const UniformPayload* uniform_params() const;
  const ExplicitPayload* explicit_params() const;

  const ItemSet& loops() const { return loops_; }
  /// Partition of the non-loops into parallel classes, each sorted, ordered by smallest member.
  const std::vector<ItemSet>& parallel_classes() const { return parallel_; }

  std::unique_ptr<IndependenceTracker> tracker() const;

  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels);

 private:
  MatroidInstance() = default;
  void finish();
  int raw_rank(const ItemSet& s) const;

  MatroidKind kind_ = MatroidKind::uniform;
  int n_ = 0;
  std::variant<Graph, UniformPayload, VectorPayload, ExplicitPayload> payload_;
  int base_components_ = 0;
  int full_rank_ = 0;
  ItemSet loops_;
  std::vector<ItemSet> parallel_;
  std::vector<std::string> labels_;
};

/// Dual matroid on the same ground set.
MatroidInstance dual(const MatroidInstance& m);
/// M|a, items relabeled 0..|a|-1 in increasing order of a.
MatroidInstance restrict_to(const MatroidInstance& m, const ItemSet& a);
/// M∖a, i.e. restriction to the complement.
MatroidInstance delete_items(const MatroidInstance& m, const ItemSet& a);
/// M/a on E∖a, items relabeled in increasing order.
MatroidInstance contract(const MatroidInstance& m, const ItemSet& a);
/// Deletes loops and keeps the lowest identifier of each parallel class.
MatroidInstance simplify(const MatroidInstance& m);
/// Items kept by simplify(), in order.
ItemSet simple_representatives(const MatroidInstance& m);

/// Maximum-weight independent set by the matroid greedy algorithm; ties by identifier.
/// Zero-weight items are never added.
ItemSet greedy_max_weight(const MatroidInstance& m, const std::vector<double>& weights);
/// Greedy over an explicit scan order, skipping items with zero weight.
ItemSet greedy_in_order(const MatroidInstance& m, const std::vector<Item>& order,
                        const std::vector<double>& weights);
double total_weight(const ItemSet& s, const std::vector<double>& weights);

/// λ_M(s) = r(s) + r(E∖s) − r(E).
int connectivity(const MatroidInstance& m, const ItemSet& s);
/// ⊓_M(x, y) = r(x) + r(y) − r(x ∪ y); x and y must be disjoint.
int local_connectivity(const MatroidInstance& m, const ItemSet& x, const ItemSet& y);

ItemSet closure(const MatroidInstance& m, const ItemSet& a);
/// Items that lie in every basis.
ItemSet free_elements(const MatroidInstance& m);
bool is_loop(const MatroidInstance& m, Item x);
bool is_free(const MatroidInstance& m, Item x);
/// Parallel class containing x (including x); empty for a loop.
ItemSet parallel_class_of(const MatroidInstance& m, Item x);

/// Exhaustive axiom check for n <= 12; returns the first violated property.
std::optional<std::string> check_axioms(const MatroidInstance& m);

/// Ranks of all subsets agree (n <= 16).
bool same_rank_function(const MatroidInstance& a, const MatroidInstance& b);

}  // namespace mp
