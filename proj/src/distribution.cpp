#include "mp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "mp/types.hpp"

namespace mp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTolerance = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

Distribution Distribution::point(double value) {
  require(std::isfinite(value) && value >= 0, "point mass must be finite and nonnegative");
  Distribution d;
  d.kind_ = Kind::point;
  d.a_ = value;
  d.values_ = {value};
  d.probs_ = {1.0};
  d.cumulative_ = {1.0};
  return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs) {
  require(!values.empty() && values.size() == probs.size(),
          "discrete law needs matching nonempty values and probs");
  std::map<double, double> merged;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]) && values[i] >= 0, "discrete values must be finite and nonnegative");
    require(std::isfinite(probs[i]) && probs[i] >= 0, "discrete probabilities must be nonnegative");
    total += probs[i];
    if (probs[i] > 0) merged[values[i]] += probs[i];
  }
  require(std::abs(total - 1.0) <= kMassTolerance, "discrete probabilities must sum to 1");
  Distribution d;
  d.kind_ = Kind::discrete;
  double run = 0.0;
  for (auto [v, q] : merged) {
    d.values_.push_back(v);
    d.probs_.push_back(q / total);
    run += q / total;
    d.cumulative_.push_back(run);
  }
  d.cumulative_.back() = 1.0;
  return d;
}

Distribution Distribution::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0 && hi > lo,
          "uniform law needs 0 <= lo < hi");
  Distribution d;
  d.kind_ = Kind::uniform;
  d.a_ = lo;
  d.b_ = hi;
  return d;
}

Distribution Distribution::exponential(double rate) {
  require(std::isfinite(rate) && rate > 0, "exponential rate must be positive");
  Distribution d;
  d.kind_ = Kind::exponential;
  d.a_ = rate;
  return d;
}

Distribution Distribution::pareto(double shape, double cap) {
  require(std::isfinite(shape) && shape > 0, "pareto shape must be positive");
  require(std::isfinite(cap) && cap > 1, "pareto cap must exceed 1");
  Distribution d;
  d.kind_ = Kind::pareto;
  d.a_ = shape;
  d.b_ = cap;
  return d;
}

std::string Distribution::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::point: out << "point(" << a_ << ")"; break;
    case Kind::discrete: out << "discrete(" << values_.size() << " atoms)"; break;
    case Kind::uniform: out << "uniform(" << a_ << "," << b_ << ")"; break;
    case Kind::exponential: out << "exponential(" << a_ << ")"; break;
    case Kind::pareto: out << "pareto(" << a_ << "," << b_ << ")"; break;
  }
  return out.str();
}

double Distribution::cdf(double x) const {
  switch (kind_) {
    case Kind::point:
    case Kind::discrete: {
      auto it = std::upper_bound(values_.begin(), values_.end(), x);
      if (it == values_.begin()) return 0.0;
      return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
    }
    case Kind::uniform:
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return (x - a_) / (b_ - a_);
    case Kind::exponential:
      return x <= 0 ? 0.0 : -std::expm1(-a_ * x);
    case Kind::pareto:
      if (x <= 1) return 0.0;
      if (x >= b_) return 1.0;
      return -std::expm1(-a_ * std::log(x)) / -std::expm1(-a_ * std::log(b_));
  }
  return 0.0;
}

double Distribution::cdf_below(double x) const {
  if (!finite_support()) return cdf(x);
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double Distribution::quantile(double q) const {
  require(q >= 0 && q <= 1, "quantile level must lie in [0,1]");
  switch (kind_) {
    case Kind::point:
    case Kind::discrete: {
      auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), q - kMassTolerance);
      if (it == cumulative_.end()) return values_.back();
      return values_[static_cast<std::size_t>(it - cumulative_.begin())];
    }
    case Kind::uniform:
      return a_ + q * (b_ - a_);
    case Kind::exponential:
      return q >= 1 ? kInf : -std::log1p(-q) / a_;
    case Kind::pareto: {
      const double z = -std::expm1(-a_ * std::log(b_));
      return std::min(b_, std::pow(1.0 - q * z, -1.0 / a_));
    }
  }
  return 0.0;
}

double Distribution::mean() const { return upper_expectation(-1.0); }

double Distribution::ess_inf() const {
  switch (kind_) {
    case Kind::point:
    case Kind::discrete: return values_.front();
    case Kind::uniform: return a_;
    case Kind::exponential: return 0.0;
    case Kind::pareto: return 1.0;
  }
  return 0.0;
}

double Distribution::ess_sup() const {
  switch (kind_) {
    case Kind::point:
    case Kind::discrete: return values_.back();
    case Kind::uniform: return b_;
    case Kind::exponential: return kInf;
    case Kind::pareto: return b_;
  }
  return 0.0;
}

double Distribution::upper_expectation(double x) const {
  switch (kind_) {
    case Kind::point:
    case Kind::discrete: {
      double sum = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] > x) sum += values_[i] * probs_[i];
      return sum;
    }
    case Kind::uniform: {
      const double lo = std::clamp(x, a_, b_);
      return (b_ * b_ - lo * lo) / (2.0 * (b_ - a_));
    }
    case Kind::exponential: {
      const double lo = std::max(x, 0.0);
      return std::exp(-a_ * lo) * (lo + 1.0 / a_);
    }
    case Kind::pareto: {
      const double lo = std::clamp(x, 1.0, b_);
      const double z = -std::expm1(-a_ * std::log(b_));
      if (std::abs(a_ - 1.0) < 1e-12) return (std::log(b_) - std::log(lo)) / z;
      return a_ / z * (std::pow(b_, 1.0 - a_) - std::pow(lo, 1.0 - a_)) / (1.0 - a_);
    }
  }
  return 0.0;
}

double Distribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  switch (kind_) {
    case Kind::point: return a_;
    case Kind::discrete: {
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) return values_.back();
      return values_[static_cast<std::size_t>(it - cumulative_.begin())];
    }
    case Kind::uniform: return a_ + u * (b_ - a_);
    case Kind::exponential: return -std::log1p(-u) / a_;
    case Kind::pareto: return quantile(u);
  }
  return 0.0;
}

Tail Distribution::tail(double p) const {
  require(p >= 0 && p <= 1, "tail probability must lie in [0,1]");
  Tail out;
  out.p = p;
  if (p <= 0) {
    const double top = ess_sup();
    if (!std::isfinite(top)) throw InputError("unbounded tail");
    out.tau = kInf;
    out.theta = 0.0;
    out.t = top;
    return out;
  }
  out.tau = quantile(1.0 - p);
  const double above = 1.0 - cdf(out.tau);
  const double atom = mass(out.tau);
  out.theta = atom > 0 ? std::clamp((p - above) / atom, 0.0, 1.0) : 1.0;
  out.t = (upper_expectation(out.tau) + out.theta * out.tau * atom) / p;
  return out;
}

}  // namespace mp
