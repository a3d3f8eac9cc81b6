#include "fairprice/harness.hpp"

#include "fairprice/config.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace fairprice {

namespace {

double instance_regret(const Environment& env, const PricePair& best, double p0, double p1, const AugmentedFeature& x)
{
  const double q = env.q();
  return q * (expected_revenue(env.theta0(), best.p0, x) - expected_revenue(env.theta0(), p0, x)) +
         (1.0 - q) * (expected_revenue(env.theta1(), best.p1, x) - expected_revenue(env.theta1(), p1, x));
}

}  // namespace

Trajectory run_episode(const EpisodeSpec& spec, std::uint64_t seed)
{
  const Environment& env = spec.env;
  const std::size_t horizon = spec.seller.horizon;
  const double delta = spec.seller.delta;

  Rng group_rng = make_stream(seed, Stream::Group);
  Rng feature_rng = make_stream(seed, Stream::Feature);
  Rng noise_rng = make_stream(seed, Stream::Noise);
  Rng price_rng = make_stream(seed, Stream::ExplorationPrice);

  std::optional<PolicyState> policy;
  if (spec.seller_kind == SellerKind::ExploreThenCommit) policy.emplace(spec.seller, env.dim(), env.q());
  StrategicBuyers buyers(spec.buyer, spec.manipulation_cost, seed);

  Trajectory traj;
  traj.exploration_length = policy ? policy->exploration_length() : 0;
  traj.instance_regret.reserve(horizon);
  traj.cum_regret.reserve(horizon);
  traj.true_group.reserve(horizon);
  traj.manipulation_flags.reserve(horizon);
  if (spec.record_steps) traj.outcomes.reserve(horizon);

  double cum = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Group group = env.sample_group(t, group_rng);
    const Vector x = env.sample_features(feature_rng);
    const AugmentedFeature xt = augment(x);
    const bool exploitation = !policy || t > traj.exploration_length;

    if (policy && t == traj.exploration_length + 1) policy->end_exploration();
    if (exploitation) buyers.prepare_exploitation_step();

    // The group-0 decision at this x, whether or not the arriving buyer is in group 0.
    const ReportDecision zero_decision = buyers.decide(x, Group::Zero, exploitation);
    const Group reported = group == Group::Zero ? zero_decision.reported : Group::One;

    const PricePair offer = policy ? policy->offer(x, price_rng) : clairvoyant_prices(env, delta, xt);
    const double p0_t = offer.price_for(zero_decision.reported);
    const double p1_t = offer.p1;
    const double price = group == Group::Zero ? p0_t : p1_t;
    const double demand = realize_demand(env, group, price, xt, noise_rng);

    if (policy && !exploitation) policy->record_sale(SaleRecord{x, group, price, demand});
    buyers.release(PublicRecord{x, exploitation ? reported : group, price});

    const PricePair best = clairvoyant_prices(env, delta, xt);
    const double reg = instance_regret(env, best, p0_t, p1_t, xt);
    cum += reg;

    traj.instance_regret.push_back(reg);
    traj.cum_regret.push_back(cum);
    traj.true_group.push_back(static_cast<std::uint8_t>(index_of(group)));
    traj.manipulation_flags.push_back(group == Group::Zero && reported == Group::One);
    if (spec.record_steps) {
      traj.outcomes.push_back(StepOutcome{t, x, group, reported, price, demand, p0_t, p1_t, reg,
                                          zero_decision.delta_hat, offer.gap()});
    }
  }
  return traj;
}

std::vector<Trajectory> run_replications(const EpisodeSpec& spec, std::size_t reps, std::uint64_t base_seed,
                                         std::size_t jobs)
{
  std::vector<Trajectory> out(reps);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, reps));
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r) out[r] = run_episode(spec, base_seed + r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < reps; r = next++) {
        try {
          out[r] = run_episode(spec, base_seed + r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

RegretCurve aggregate(std::span<const Trajectory> trajectories)
{
  if (trajectories.empty()) throw std::invalid_argument("aggregate: no trajectories");
  const std::size_t n = trajectories.front().size();
  for (const auto& tr : trajectories) {
    if (tr.size() != n) throw std::invalid_argument("aggregate: trajectories differ in length");
  }
  const double reps = static_cast<double>(trajectories.size());
  RegretCurve curve;
  curve.mean.assign(n, 0.0);
  curve.se.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (const auto& tr : trajectories) sum += tr.cum_regret[i];
    const double mean = sum / reps;
    curve.mean[i] = mean;
    if (trajectories.size() > 1) {
      double ss = 0.0;
      for (const auto& tr : trajectories) ss += (tr.cum_regret[i] - mean) * (tr.cum_regret[i] - mean);
      curve.se[i] = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
    }
  }
  return curve;
}

SlopeFit loglog_slope(std::span<const double> curve, std::size_t t_min)
{
  if (t_min == 0) t_min = 1;
  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t t = t_min; t <= curve.size(); ++t) {
    const double v = curve[t - 1];
    if (!(v > 0.0)) {
      ++fit.excluded;
      continue;
    }
    const double lx = std::log(static_cast<double>(t));
    const double ly = std::log(v);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.points;
  }
  if (fit.points < 2) throw std::invalid_argument("loglog_slope: fewer than two positive points");
  const double n = static_cast<double>(fit.points);
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::optional<double> manipulation_rate(const Trajectory& trajectory, std::size_t first, std::size_t last)
{
  if (first == 0 || last > trajectory.size() || first > last) throw std::out_of_range("manipulation_rate: bad window");
  std::size_t zeros = 0;
  std::size_t flagged = 0;
  for (std::size_t t = first; t <= last; ++t) {
    if (trajectory.true_group[t - 1] != 0) continue;
    ++zeros;
    flagged += trajectory.manipulation_flags[t - 1];
  }
  if (zeros == 0) return std::nullopt;
  return static_cast<double>(flagged) / static_cast<double>(zeros);
}

std::optional<double> mean_gap_error(const Trajectory& trajectory, std::size_t first, std::size_t last)
{
  if (trajectory.outcomes.empty()) return std::nullopt;
  if (first == 0 || last > trajectory.outcomes.size() || first > last) {
    throw std::out_of_range("mean_gap_error: bad window");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = first; t <= last; ++t) {
    const auto& o = trajectory.outcomes[t - 1];
    if (!o.delta_hat) continue;
    sum += std::abs(*o.delta_hat - o.posted_gap);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory)
{
  if (trajectory.outcomes.size() != trajectory.size()) {
    throw std::logic_error("trajectory was run without per-step records");
  }
  out << "t,true_group,reported_group,offered_price,p0_offered,p1_offered,instance_regret,cum_regret\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& o = trajectory.outcomes[i];
    out << o.t << ',' << index_of(o.true_group) << ',' << index_of(o.reported_group) << ','
        << format_double(o.offered_price) << ',' << format_double(o.p0_offered) << ','
        << format_double(o.p1_offered) << ',' << format_double(o.instance_regret) << ','
        << format_double(trajectory.cum_regret[i]) << '\n';
  }
}

}  // namespace fairprice
