#include "fairprice/core_model.hpp"

#include "fairprice/config.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace fairprice {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

DemandParams::DemandParams(double alpha, Vector beta, double alpha_guard)
    : alpha_(alpha), beta_(std::move(beta))
{
  if (!std::isfinite(alpha_) || !all_finite(beta_)) throw ConfigError("demand parameters must be finite");
  if (beta_.size() < 1) throw ConfigError("beta needs at least the intercept entry");
  if (alpha_ > -alpha_guard) {
    throw ConfigError("price sensitivity alpha=" + format_double(alpha_) + " must be <= -" +
                      format_double(alpha_guard));
  }
}

DemandParams DemandParams::clamped(double alpha, Vector beta, double alpha_guard)
{
  return DemandParams(std::min(alpha, -alpha_guard), std::move(beta), alpha_guard);
}

AugmentedFeature augment(const Vector& x)
{
  if (!all_finite(x)) throw std::invalid_argument("feature vector has non-finite entries");
  Vector v(x.size() + 1);
  v[0] = 1.0;
  v.tail(x.size()) = x;
  return AugmentedFeature(std::move(v));
}

double expected_demand(const DemandParams& theta, double price, const AugmentedFeature& x)
{
  if (theta.beta().size() != x.values().size()) {
    throw std::invalid_argument("feature dimension does not match demand parameters");
  }
  return theta.alpha() * price + theta.beta().dot(x.values());
}

double expected_revenue(const DemandParams& theta, double price, const AugmentedFeature& x)
{
  return price * expected_demand(theta, price, x);
}

std::string to_string(DemandKind kind)
{
  return kind == DemandKind::LinearGaussian ? "linear-gaussian" : "bernoulli";
}

DemandKind demand_kind_from_string(const std::string& s)
{
  if (s == "linear-gaussian") return DemandKind::LinearGaussian;
  if (s == "bernoulli") return DemandKind::Bernoulli;
  throw ConfigError("unknown demand_kind '" + s + "'");
}

Vector FeatureSampler::sample(Rng& rng) const
{
  std::uniform_real_distribution<double> unif(low, high);
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = unif(rng);
  return x;
}

double FeatureSampler::min_second_moment_eigenvalue() const
{
  if (dim == 0) return 0.0;
  // E[x x'] = var * I + m^2 * 11'; eigenvalues var (d-1 times) and var + d m^2.
  const double mean = 0.5 * (low + high);
  const double var = (high - low) * (high - low) / 12.0;
  if (dim == 1) return var + mean * mean;
  return var;
}

Environment::Environment(DemandParams theta0, DemandParams theta1, double q, double sigma_eps,
                         FeatureSampler sampler, DemandKind kind, GroupRule group_rule)
    : theta0_(std::move(theta0)),
      theta1_(std::move(theta1)),
      q_(q),
      sigma_eps_(sigma_eps),
      sampler_(sampler),
      kind_(kind),
      group_rule_(group_rule)
{
  if (theta0_.dim() != theta1_.dim()) throw ConfigError("theta0 and theta1 have different dimensions");
  if (!(q_ > 0.0 && q_ < 1.0)) throw ConfigError("q must lie strictly inside (0, 1)");
  if (!(sigma_eps_ >= 0.0) || !std::isfinite(sigma_eps_)) throw ConfigError("sigma_eps must be >= 0");
  if (sampler_.dim != theta0_.dim()) throw ConfigError("feature sampler dimension mismatch");
  if (!(sampler_.low < sampler_.high) && sampler_.dim > 0) throw ConfigError("feature_low must be < feature_high");
}

Group Environment::sample_group(std::size_t t, Rng& rng) const
{
  if (group_rule_ == GroupRule::Alternating) return static_cast<Group>(t % 2);
  std::bernoulli_distribution is_zero(q_);
  return is_zero(rng) ? Group::Zero : Group::One;
}

Environment Environment::with_q(double q) const
{
  return Environment(theta0_, theta1_, q, sigma_eps_, sampler_, kind_, group_rule_);
}

double realize_demand(const Environment& env, Group group, double price, const AugmentedFeature& x, Rng& rng)
{
  const double mean = expected_demand(env.theta(group), price, x);
  if (env.demand_kind() == DemandKind::Bernoulli) {
    constexpr double tol = 1e-9;
    if (mean < -tol || mean > 1.0 + tol) {
      throw ConfigError("Bernoulli demand mean " + format_double(mean) + " outside [0, 1] at price " +
                        format_double(price));
    }
    std::bernoulli_distribution draw(std::clamp(mean, 0.0, 1.0));
    return draw(rng) ? 1.0 : 0.0;
  }
  if (env.sigma_eps() == 0.0) return mean;
  std::normal_distribution<double> noise(0.0, env.sigma_eps());
  return mean + noise(rng);
}

KeyValueConfig environment_to_config(const Environment& env)
{
  KeyValueConfig cfg;
  cfg.set("environment.alpha0", env.theta0().alpha());
  cfg.set("environment.beta0", env.theta0().beta());
  cfg.set("environment.alpha1", env.theta1().alpha());
  cfg.set("environment.beta1", env.theta1().beta());
  cfg.set("environment.q", env.q());
  cfg.set("environment.sigma_eps", env.sigma_eps());
  cfg.set("environment.feature_low", env.sampler().low);
  cfg.set("environment.feature_high", env.sampler().high);
  cfg.set("environment.demand_kind", to_string(env.demand_kind()));
  if (env.group_rule() == GroupRule::Alternating) cfg.set("environment.group_rule", std::string("alternating"));
  return cfg;
}

void write_environment(std::ostream& out, const Environment& env) { environment_to_config(env).write(out); }

Environment read_environment(std::istream& in) { return environment_from_config(KeyValueConfig::parse(in)); }

Environment environment_from_config(const KeyValueConfig& cfg)
{
  DemandParams theta0(cfg.require_double("environment.alpha0"), cfg.require_vector("environment.beta0"));
  DemandParams theta1(cfg.require_double("environment.alpha1"), cfg.require_vector("environment.beta1"));
  FeatureSampler sampler{theta0.dim(), cfg.get_double("environment.feature_low").value_or(-2.0),
                         cfg.get_double("environment.feature_high").value_or(2.0)};
  const auto kind = demand_kind_from_string(cfg.get_string("environment.demand_kind").value_or("linear-gaussian"));
  const auto rule_name = cfg.get_string("environment.group_rule").value_or("random");
  if (rule_name != "random" && rule_name != "alternating") throw ConfigError("unknown group_rule '" + rule_name + "'");
  const auto rule = rule_name == "alternating" ? GroupRule::Alternating : GroupRule::Random;
  return Environment(std::move(theta0), std::move(theta1), cfg.require_double("environment.q"),
                     cfg.require_double("environment.sigma_eps"), sampler, kind, rule);
}

}  // namespace fairprice
