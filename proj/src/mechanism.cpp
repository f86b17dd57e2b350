#include "mp/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "mp/rng.hpp"

namespace mp {

double Threshold::pass_probability(const Distribution& d) const {
  if (is_never()) return 0.0;
  return 1.0 - d.cdf(value) + tie * d.mass(value);
}

double Threshold::pass_expectation(const Distribution& d) const {
  if (is_never()) return 0.0;
  return d.upper_expectation(value) + tie * value * d.mass(value);
}

ThresholdVector ThresholdVector::never(int n, std::string provenance) {
  ThresholdVector tv;
  tv.values.assign(static_cast<std::size_t>(n), Threshold::never());
  tv.provenance = std::move(provenance);
  return tv;
}

ItemSet ThresholdVector::finite_items() const {
  ItemSet out;
  for (int i = 0; i < size(); ++i)
    if (!(*this)[i].is_never()) out.push_back(i);
  return out;
}

std::vector<WeightedThresholds> canonical_support(std::vector<WeightedThresholds> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const WeightedThresholds& a, const WeightedThresholds& b) {
              return a.thresholds.values < b.thresholds.values;
            });
  std::vector<WeightedThresholds> out;
  for (auto& atom : atoms) {
    if (atom.weight <= 0) continue;
    if (!out.empty() && out.back().thresholds.values == atom.thresholds.values)
      out.back().weight += atom.weight;
    else
      out.push_back(std::move(atom));
  }
  return out;
}

std::vector<double> survival_frequency(const Mechanism& mech, std::uint64_t draws, std::uint64_t seed) {
  std::vector<double> freq(static_cast<std::size_t>(mech.size()), 0.0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    const auto tv = mech.draw(derive_seed(seed, "survival", d)).thresholds;
    for (int i = 0; i < tv.size(); ++i)
      if (!tv[i].is_never()) freq[static_cast<std::size_t>(i)] += 1.0;
  }
  for (auto& f : freq) f /= static_cast<double>(draws);
  return freq;
}

FixedMechanism::FixedMechanism(ThresholdVector tv, double ratio, std::string name)
    : tv_(std::move(tv)), ratio_(ratio), name_(std::move(name)) {
  if (tv_.provenance.empty()) tv_.provenance = name_;
}

DrawResult FixedMechanism::draw(std::uint64_t seed) const {
  DrawResult r{tv_, {}};
  r.draw.seed = seed;
  r.draw.mechanism = name_;
  return r;
}

std::optional<std::vector<WeightedThresholds>> FixedMechanism::support(std::size_t limit) const {
  if (limit < 1) return std::nullopt;
  return std::vector<WeightedThresholds>{{1.0, tv_}};
}

MixtureMechanism::MixtureMechanism(std::vector<Component> components, double ratio, std::string name)
    : components_(std::move(components)), ratio_(ratio), name_(std::move(name)) {
  if (components_.empty()) throw InputError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.weight < 0) throw InputError("mixture weights must be nonnegative");
    if (c.mechanism->size() != components_[0].mechanism->size())
      throw InputError("mixture components differ in size");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
}

int MixtureMechanism::size() const { return components_[0].mechanism->size(); }

DrawResult MixtureMechanism::draw(std::uint64_t seed) const {
  Rng rng(seed, "mixture");
  const double u = rng.uniform01();
  std::size_t pick = components_.size() - 1;
  double run = 0.0;
  for (std::size_t j = 0; j < components_.size(); ++j) {
    run += components_[j].weight;
    if (u < run) {
      pick = j;
      break;
    }
  }
  DrawResult inner = components_[pick].mechanism->draw(derive_seed(seed, "mixture/component", pick));
  DrawResult r;
  r.thresholds = std::move(inner.thresholds);
  r.thresholds.provenance = name_ + "/" + r.thresholds.provenance;
  r.draw.seed = seed;
  r.draw.mechanism = name_;
  r.draw.choices["component"] = {static_cast<int>(pick)};
  for (auto& [key, value] : inner.draw.choices) r.draw.choices["inner." + key] = value;
  return r;
}

std::optional<std::vector<WeightedThresholds>> MixtureMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms;
  for (const auto& c : components_) {
    if (c.weight <= 0) continue;
    auto inner = c.mechanism->support(limit);
    if (!inner) return std::nullopt;
    for (auto& a : *inner) atoms.push_back({a.weight * c.weight, std::move(a.thresholds)});
  }
  atoms = canonical_support(std::move(atoms));
  if (atoms.size() > limit) return std::nullopt;
  for (auto& a : atoms) a.thresholds.provenance = name_;
  return atoms;
}

ProductMechanism::ProductMechanism(int n, std::vector<MechanismPtr> parts, std::vector<std::vector<Item>> blocks,
                                   double ratio, std::string name)
    : n_(n), parts_(std::move(parts)), blocks_(std::move(blocks)), ratio_(ratio), name_(std::move(name)) {
  if (parts_.size() != blocks_.size()) throw InputError("product needs one block per part");
  std::vector<char> used(static_cast<std::size_t>(n_), 0);
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    if (parts_[j]->size() != static_cast<int>(blocks_[j].size())) throw InputError("product block size mismatch");
    for (Item x : blocks_[j]) {
      if (x < 0 || x >= n_ || used[static_cast<std::size_t>(x)]) throw InputError("product blocks must be disjoint");
      used[static_cast<std::size_t>(x)] = 1;
    }
  }
}

DrawResult ProductMechanism::draw(std::uint64_t seed) const {
  DrawResult r;
  r.thresholds = ThresholdVector::never(n_, name_);
  r.draw.seed = seed;
  r.draw.mechanism = name_;
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    DrawResult inner = parts_[j]->draw(derive_seed(seed, "product/part", j));
    for (std::size_t i = 0; i < blocks_[j].size(); ++i)
      r.thresholds[blocks_[j][i]] = inner.thresholds[static_cast<Item>(i)];
    for (auto& [key, value] : inner.draw.choices)
      r.draw.choices["part" + std::to_string(j) + "." + key] = value;
  }
  return r;
}

std::optional<std::vector<WeightedThresholds>> ProductMechanism::support(std::size_t limit) const {
  std::vector<WeightedThresholds> atoms{{1.0, ThresholdVector::never(n_, name_)}};
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    auto inner = parts_[j]->support(limit);
    if (!inner) return std::nullopt;
    if (atoms.size() * inner->size() > limit) return std::nullopt;
    std::vector<WeightedThresholds> next;
    for (const auto& a : atoms)
      for (const auto& b : *inner) {
        WeightedThresholds c{a.weight * b.weight, a.thresholds};
        for (std::size_t i = 0; i < blocks_[j].size(); ++i)
          c.thresholds[blocks_[j][i]] = b.thresholds[static_cast<Item>(i)];
        next.push_back(std::move(c));
      }
    atoms = canonical_support(std::move(next));
  }
  return atoms;
}

}  // namespace mp
