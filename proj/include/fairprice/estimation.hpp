#pragma once

#include "fairprice/core_model.hpp"

#include <span>
#include <vector>

namespace fairprice {

/// One exploration sale as seen by the seller.
struct SaleRecord {
  Vector x;
  Group true_group = Group::Zero;
  double price = 0.0;
  double demand = 0.0;
};

struct EstimatedTheta {
  DemandParams theta;        ///< alpha clamped to <= -kAlphaGuard
  double raw_alpha = 0.0;    ///< alpha before clamping
  std::size_t n_samples = 0;
  double min_eigenvalue = 0.0;  ///< of the unnormalized Gram matrix Z'Z
  double condition_number = 0.0;
  double residual_variance = 0.0;
  Vector std_errors;  ///< (alpha, beta...) order
};

struct OlsOptions {
  double max_condition_number = 1e10;
  double alpha_guard = kAlphaGuard;
};

/// Least squares of demand on (price, 1, x) over the records of `group`.
/// Throws SingularFitError on fewer than d+2 records or an ill-conditioned design.
EstimatedTheta fit_ols(std::span<const SaleRecord> records, Group group, OlsOptions options = {});

/// Lower bound on the smallest eigenvalue of E[z z'] with z = (1, p, x), p ~ U(0, B).
double lambda0(double price_cap, double lambda_min_sigma_x);

struct ErrorScalingRow {
  std::size_t exploration_length = 0;
  double mean_sq_error0 = 0.0;
  double mean_sq_error1 = 0.0;
};

/// Runs only the uniform-price exploration phase for each length and averages
/// ||theta_hat - theta||^2 per group over `reps` replications.
std::vector<ErrorScalingRow> error_scaling_probe(const Environment& env, std::span<const std::size_t> lengths,
                                                 std::size_t reps, std::uint64_t seed, double price_cap);

}  // namespace fairprice
