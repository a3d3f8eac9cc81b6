#pragma once

// Simulation loop: environment, seller and buyers for one replication, plus
// replication statistics over regret curves.

#include "fairprice/buyers.hpp"
#include "fairprice/policies.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fairprice {

enum class SellerKind { ExploreThenCommit, Clairvoyant };

struct EpisodeSpec {
  Environment env;
  SellerConfig seller;
  SellerKind seller_kind = SellerKind::ExploreThenCommit;
  BuyerBehavior buyer;
  double manipulation_cost = 0.8;  ///< C0
  /// Keep full per-step outcomes; regret and report flags are always kept.
  bool record_steps = true;
};

struct StepOutcome {
  std::size_t t = 0;
  Vector x;
  Group true_group = Group::Zero;
  Group reported_group = Group::Zero;
  double offered_price = 0.0;
  double demand = 0.0;
  double p0_offered = 0.0;  ///< price a group-0 buyer at x faces, given its own report
  double p1_offered = 0.0;
  double instance_regret = 0.0;
  std::optional<double> delta_hat;
  double posted_gap = 0.0;  ///< seller's p0 - p1 at x
};

struct Trajectory {
  std::vector<StepOutcome> outcomes;  ///< empty unless recorded
  std::vector<double> instance_regret;
  std::vector<double> cum_regret;
  std::vector<std::uint8_t> true_group;
  std::vector<std::uint8_t> manipulation_flags;  ///< group 0 reporting 1
  std::size_t exploration_length = 0;

  std::size_t size() const { return cum_regret.size(); }
};

Trajectory run_episode(const EpisodeSpec& spec, std::uint64_t seed);

/// Replication r uses seed base_seed + r. Up to `jobs` threads.
std::vector<Trajectory> run_replications(const EpisodeSpec& spec, std::size_t reps, std::uint64_t base_seed,
                                         std::size_t jobs = 1);

struct RegretCurve {
  std::vector<double> mean;
  std::vector<double> se;  ///< sample std / sqrt(reps); 0 for a single rep

  std::size_t size() const { return mean.size(); }
  /// Step t is index t - 1.
  double at(std::size_t t) const { return mean.at(t - 1); }
};

RegretCurve aggregate(std::span<const Trajectory> trajectories);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
  std::size_t excluded = 0;  ///< nonpositive values skipped
};

/// Least-squares slope of log(mean) against log(t) over t >= t_min.
SlopeFit loglog_slope(std::span<const double> curve, std::size_t t_min);
inline SlopeFit loglog_slope(const RegretCurve& curve, std::size_t t_min)
{
  return loglog_slope(curve.mean, t_min);
}

/// Share of group-0 buyers in steps [first, last] who reported group 1.
std::optional<double> manipulation_rate(const Trajectory& trajectory, std::size_t first, std::size_t last);

/// Mean |delta_hat - posted gap| over steps [first, last] where a learned gap exists.
std::optional<double> mean_gap_error(const Trajectory& trajectory, std::size_t first, std::size_t last);

/// Columns: t, true_group, reported_group, offered_price, p0_offered, p1_offered, instance_regret, cum_regret.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace fairprice
