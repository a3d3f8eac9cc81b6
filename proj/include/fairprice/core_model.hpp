#pragma once

// Ground-truth linear demand environment for two buyer groups.

#include "fairprice/common.hpp"

#include <iosfwd>
#include <string>

namespace fairprice {

class KeyValueConfig;

/// Demand coefficients of one group: E[y] = alpha * p + beta' * (1, x).
class DemandParams {
 public:
  DemandParams() = default;
  /// Validates alpha <= -guard, finite entries and a non-empty beta.
  DemandParams(double alpha, Vector beta, double alpha_guard = kAlphaGuard);

  /// Copy of `theta` with alpha clamped to at most -guard.
  static DemandParams clamped(double alpha, Vector beta, double alpha_guard = kAlphaGuard);

  double alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }
  /// Number of features d (beta has d+1 entries).
  Eigen::Index dim() const { return beta_.size() - 1; }

 private:
  double alpha_ = -1.0;
  Vector beta_ = Vector::Ones(1);
};

/// Feature vector with a leading 1 for the intercept.
class AugmentedFeature {
 public:
  const Vector& values() const { return values_; }
  Eigen::Index dim() const { return values_.size() - 1; }
  /// Features without the leading 1.
  Vector raw() const { return values_.tail(values_.size() - 1); }

 private:
  friend AugmentedFeature augment(const Vector& x);
  explicit AugmentedFeature(Vector v) : values_(std::move(v)) {}
  Vector values_;
};

AugmentedFeature augment(const Vector& x);

double expected_demand(const DemandParams& theta, double price, const AugmentedFeature& x);
double expected_revenue(const DemandParams& theta, double price, const AugmentedFeature& x);

enum class DemandKind { LinearGaussian, Bernoulli };
/// Random: group 0 with probability q. Alternating: group = t mod 2.
enum class GroupRule { Random, Alternating };

std::string to_string(DemandKind kind);
DemandKind demand_kind_from_string(const std::string& s);

/// i.i.d. Uniform(low, high) per coordinate.
struct FeatureSampler {
  Eigen::Index dim = 0;
  double low = -2.0;
  double high = 2.0;

  Vector sample(Rng& rng) const;
  /// Smallest eigenvalue of the second-moment matrix E[x x'].
  double min_second_moment_eigenvalue() const;
};

class Environment {
 public:
  Environment(DemandParams theta0, DemandParams theta1, double q, double sigma_eps,
              FeatureSampler sampler, DemandKind kind = DemandKind::LinearGaussian,
              GroupRule group_rule = GroupRule::Random);

  const DemandParams& theta(Group g) const { return g == Group::Zero ? theta0_ : theta1_; }
  const DemandParams& theta0() const { return theta0_; }
  const DemandParams& theta1() const { return theta1_; }
  double q() const { return q_; }
  double sigma_eps() const { return sigma_eps_; }
  const FeatureSampler& sampler() const { return sampler_; }
  DemandKind demand_kind() const { return kind_; }
  GroupRule group_rule() const { return group_rule_; }
  Eigen::Index dim() const { return theta0_.dim(); }

  Vector sample_features(Rng& rng) const { return sampler_.sample(rng); }
  /// Group of the buyer arriving at step t (1-based).
  Group sample_group(std::size_t t, Rng& rng) const;

  Environment with_q(double q) const;

 private:
  DemandParams theta0_;
  DemandParams theta1_;
  double q_;
  double sigma_eps_;
  FeatureSampler sampler_;
  DemandKind kind_;
  GroupRule group_rule_;
};

/// Noisy demand of a buyer of `group`. Always uses the true group's parameters.
double realize_demand(const Environment& env, Group group, double price, const AugmentedFeature& x,
                      Rng& rng);

/// Flat key/value form (alpha0, beta0, alpha1, beta1, q, sigma_eps, feature_low,
/// feature_high, demand_kind) in an `[environment]` section.
void write_environment(std::ostream& out, const Environment& env);
Environment read_environment(std::istream& in);
Environment environment_from_config(const KeyValueConfig& cfg);
KeyValueConfig environment_to_config(const Environment& env);

}  // namespace fairprice
