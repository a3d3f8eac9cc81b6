#pragma once

// Hard instances with analytically known prices: the linear-regret instance
// for buyers who never learn the gap, and the alternating-group Bernoulli
// instance whose optimal prices are uninformative.

#include "fairprice/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fairprice {

struct FairnessSetting {
  double delta = 0.0;
  double manipulation_cost = 0.0;
};

struct Theorem1Instance {
  Environment env;
  FairnessSetting fairness;
};

/// d = 1, E y0 = 2 + x - p, E y1 = 2 + x - 2p, q = 1/2, x ~ U(-1/2, 1/2),
/// delta = 1/4, C0 = 5/16. Noise N(0, sigma_eps^2).
Theorem1Instance theorem1_instance(double sigma_eps = 1.0);
Environment theorem1_env(double sigma_eps = 1.0);

/// Closed-form fair optimum (x/3 + 5/6, x/3 + 7/12).
PricePair theorem1_prices(double x);

inline constexpr double kTheorem3AlphaLow = -0.5;
inline constexpr double kTheorem3AlphaHigh = -0.2;
inline constexpr double kTheorem3Alpha0 = -0.4;
inline constexpr double kTheorem3Delta = 0.25;
inline constexpr double kTheorem3PriceLow = 0.5;
inline constexpr double kTheorem3PriceHigh = 1.125;

/// Bernoulli demand with mean 1/2 + alpha[(G + 1)p - 1 - G/2], no features,
/// q = 1/2 and G_t = t mod 2. Throws ConfigError outside [-1/2, -1/5].
Environment theorem3_env(double alpha);

/// 1/2 + alpha[(G + 1)p - 1 - G/2].
double theorem3_mean(double alpha, Group group, double price);

/// 7/12 - 1/(6 alpha) - G/4.
double theorem3_optimal_price(double alpha, Group group);

/// R0(p0*) - R0(p0) + R1(p1*) - R1(p1) for (p0, p0 - delta).
double theorem3_regret_gap(double alpha, double p0);

struct PropertyCheck {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t failures = 0;
  double worst_margin = 0.0;  ///< min over the grid of lhs - rhs (scaled as documented per check)
  bool passed() const { return failures == 0; }
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool passed() const;
};

/// Grid of n equally spaced points on [low, high].
std::vector<double> linspace(double low, double high, std::size_t n);

/// Checks the quadratic regret lower bound, the separation of optimal prices
/// across alpha and the Lipschitz bound on demand, over every grid
/// combination. Bounds that hold with equality on the boundary are compared
/// with an absolute tolerance of `tolerance`.
PropertyReport verify_properties(const std::vector<double>& alpha_grid, const std::vector<double>& price_grid,
                                 double tolerance = 1e-12);

void write_report_text(std::ostream& out, const PropertyReport& report);
/// Columns: check, evaluated, failures, worst_margin, passed.
void write_report_csv(std::ostream& out, const PropertyReport& report);

struct GrowthProbe {
  std::size_t horizon = 0;
  std::size_t reps = 0;
  double slope = 0.0;             ///< log-log slope of the mean curve over t >= t_min
  std::size_t t_min = 0;
  double per_step_regret = 0.0;   ///< mean instance regret over the exploitation phase
  double final_regret = 0.0;
};

/// Always-manipulate buyers on the linear-regret instance. The default
/// seller posts the true fair optimum, so all regret comes from misreports.
GrowthProbe theorem1_growth_probe(std::size_t horizon, std::size_t reps, std::uint64_t seed, std::size_t jobs = 1,
                                  SellerKind seller = SellerKind::Clairvoyant);

}  // namespace fairprice
