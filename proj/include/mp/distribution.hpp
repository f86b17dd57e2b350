#pragma once

#include <string>
#include <vector>

#include "mp/rng.hpp"

namespace mp {

/// Activation rule derived from a top-p tail: X is active iff X > tau, or
/// X == tau and an independent uniform U < theta. P[active] is then exactly p.
struct Tail {
  double p = 0.0;
  double tau = 0.0;
  double theta = 1.0;
  /// E[X | active]; for p = 0 the essential supremum.
  double t = 0.0;
};

/// Nonnegative value law of a single item.
class Distribution {
 public:
  enum class Kind { point, discrete, uniform, exponential, pareto };

  static Distribution point(double value);
  /// Values may repeat and appear in any order; probabilities must sum to 1 within 1e-12.
  static Distribution discrete(std::vector<double> values, std::vector<double> probs);
  static Distribution uniform(double lo, double hi);
  static Distribution exponential(double rate);
  /// Pareto with scale 1 and the given shape, truncated to [1, cap].
  static Distribution pareto(double shape, double cap);

  Kind kind() const { return kind_; }
  std::string describe() const;

  /// P[X <= x].
  double cdf(double x) const;
  /// P[X < x].
  double cdf_below(double x) const;
  double mass(double x) const { return cdf(x) - cdf_below(x); }
  /// inf{x : F(x) >= q}; q = 0 gives the essential infimum.
  double quantile(double q) const;
  double mean() const;
  double ess_inf() const;
  /// May be +inf.
  double ess_sup() const;
  /// E[X · 1{X > x}].
  double upper_expectation(double x) const;
  double sample(Rng& rng) const;

  bool finite_support() const { return kind_ == Kind::point || kind_ == Kind::discrete; }
  /// Distinct support points in increasing order with their probabilities (finite laws only).
  const std::vector<double>& support() const { return values_; }
  const std::vector<double>& probabilities() const { return probs_; }

  /// Activation rule for the top-p mass; throws InputError("unbounded tail") for
  /// p = 0 when the support is unbounded.
  Tail tail(double p) const;
  /// E[X | X in the top-p mass] with the tie-break of tail().
  double tail_expectation(double p) const { return tail(p).t; }

 private:
  Distribution() = default;

  Kind kind_ = Kind::point;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace mp
