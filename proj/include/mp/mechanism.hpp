#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mp/distribution.hpp"
#include "mp/ex_ante.hpp"
#include "mp/matroid.hpp"

namespace mp {

/// Accept x iff x > value, or x == value and the item's auxiliary uniform is below `tie`.
/// tie = 1 is the plain "x >= value" rule; value = +inf never accepts.
struct Threshold {
  double value = std::numeric_limits<double>::infinity();
  double tie = 1.0;

  static Threshold never() { return {}; }
  static Threshold at_least(double v) { return {v, 1.0}; }
  bool is_never() const { return value == std::numeric_limits<double>::infinity(); }
  bool passes(double x, double u) const { return x > value || (x == value && u < tie); }
  /// P[X passes] for X ~ d.
  double pass_probability(const Distribution& d) const;
  /// E[X · 1{X passes}].
  double pass_expectation(const Distribution& d) const;

  bool operator==(const Threshold&) const = default;
  auto operator<=>(const Threshold&) const = default;
};

struct ThresholdVector {
  std::vector<Threshold> values;
  std::string provenance;

  static ThresholdVector never(int n, std::string provenance = {});
  int size() const { return static_cast<int>(values.size()); }
  const Threshold& operator[](Item i) const { return values[static_cast<std::size_t>(i)]; }
  Threshold& operator[](Item i) { return values[static_cast<std::size_t>(i)]; }
  /// Items whose threshold is finite.
  ItemSet finite_items() const;
};

/// Random choices made while producing one threshold vector. Replaying the seed
/// reproduces the same choices.
struct MechanismDraw {
  std::uint64_t seed = 0;
  std::string mechanism;
  std::map<std::string, std::vector<int>> choices;
};

struct DrawResult {
  ThresholdVector thresholds;
  MechanismDraw draw;
};

/// Threshold vector together with its probability under the mechanism's randomness.
struct WeightedThresholds {
  double weight = 0.0;
  ThresholdVector thresholds;
};

/// A randomized non-adaptive mechanism over a fixed instance: each draw fixes
/// every threshold before any value is seen.
class Mechanism {
 public:
  virtual ~Mechanism() = default;
  virtual std::string name() const = 0;
  virtual int size() const = 0;
  /// Claimed competitive ratio; +inf when no guarantee is claimed.
  virtual double ratio() const = 0;
  virtual DrawResult draw(std::uint64_t seed) const = 0;
  /// Full distribution over threshold vectors when it has at most `limit` atoms.
  virtual std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const = 0;
  /// Relaxation the thresholds were derived from, if any.
  virtual const ExAnteRelaxation* relaxation() const { return nullptr; }
};

using MechanismPtr = std::shared_ptr<const Mechanism>;

/// Deterministic mechanism.
class FixedMechanism : public Mechanism {
 public:
  FixedMechanism(ThresholdVector tv, double ratio, std::string name = "fixed");
  std::string name() const override { return name_; }
  int size() const override { return tv_.size(); }
  double ratio() const override { return ratio_; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;

 private:
  ThresholdVector tv_;
  double ratio_;
  std::string name_;
};

/// Picks component j with probability weight_j, then draws from it.
class MixtureMechanism : public Mechanism {
 public:
  struct Component {
    double weight;
    MechanismPtr mechanism;
  };
  MixtureMechanism(std::vector<Component> components, double ratio, std::string name);
  std::string name() const override { return name_; }
  int size() const override;
  double ratio() const override { return ratio_; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;
  const std::vector<Component>& components() const { return components_; }

 private:
  std::vector<Component> components_;
  double ratio_;
  std::string name_;
};

/// Runs inner mechanisms on disjoint item blocks of a larger ground set; items in
/// no block get +inf. `blocks[j][i]` is the global item of inner item i.
class ProductMechanism : public Mechanism {
 public:
  ProductMechanism(int n, std::vector<MechanismPtr> parts, std::vector<std::vector<Item>> blocks, double ratio,
                   std::string name);
  std::string name() const override { return name_; }
  int size() const override { return n_; }
  double ratio() const override { return ratio_; }
  DrawResult draw(std::uint64_t seed) const override;
  std::optional<std::vector<WeightedThresholds>> support(std::size_t limit) const override;

 private:
  int n_;
  std::vector<MechanismPtr> parts_;
  std::vector<std::vector<Item>> blocks_;
  double ratio_;
  std::string name_;
};

/// Merges identical threshold vectors and sorts the atoms canonically.
std::vector<WeightedThresholds> canonical_support(std::vector<WeightedThresholds> atoms);

/// Empirical survival: fraction of `draws` draws in which each item's threshold is finite.
std::vector<double> survival_frequency(const Mechanism& mech, std::uint64_t draws, std::uint64_t seed);

}  // namespace mp
