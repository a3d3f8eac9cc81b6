#include "fairprice/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairprice {

EstimatedTheta fit_ols(std::span<const SaleRecord> records, Group group, OlsOptions options)
{
  Eigen::Index dim = -1;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (dim < 0) dim = r.x.size();
    if (r.x.size() != dim) throw std::invalid_argument("records have inconsistent feature dimensions");
    if (r.true_group == group) ++n;
  }
  const std::string tag = "group " + std::to_string(index_of(group));
  if (dim < 0) throw SingularFitError(tag + ": no records");
  const auto p = static_cast<std::size_t>(dim) + 2;
  if (n < p) {
    throw SingularFitError(tag + ": " + std::to_string(n) + " records, need at least " + std::to_string(p));
  }

  Matrix design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Vector y(static_cast<Eigen::Index>(n));
  Eigen::Index row = 0;
  for (const auto& r : records) {
    if (r.true_group != group) continue;
    design(row, 0) = r.price;
    design(row, 1) = 1.0;
    design.row(row).tail(dim) = r.x.transpose();
    y[row] = r.demand;
    ++row;
  }
  if (!design.allFinite() || !y.allFinite()) throw std::invalid_argument(tag + ": non-finite sale record");

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  const Matrix r_factor = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(r_factor);
  const Vector sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (qr.rank() < static_cast<Eigen::Index>(p) || !(cond <= options.max_condition_number)) {
    throw SingularFitError(tag + ": singular design (condition number " + std::to_string(cond) + ")");
  }

  const Vector coef = qr.solve(y);
  const Vector residual = y - design * coef;
  const double dof = static_cast<double>(n) - static_cast<double>(p);
  const double resid_var = dof > 0 ? residual.squaredNorm() / dof : 0.0;

  // (Z'Z)^{-1} = P R^{-1} R^{-T} P'.
  const Matrix r_inv = r_factor.template triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  const Matrix cov_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Matrix gram_inv = perm * cov_perm * perm.transpose();

  EstimatedTheta est;
  est.raw_alpha = coef[0];
  est.theta = DemandParams::clamped(coef[0], coef.tail(p - 1), options.alpha_guard);
  est.n_samples = n;
  est.min_eigenvalue = smin * smin;
  est.condition_number = cond;
  est.residual_variance = resid_var;
  est.std_errors = (resid_var * gram_inv.diagonal()).cwiseSqrt();
  return est;
}

double lambda0(double price_cap, double lambda_min_sigma_x)
{
  if (!(price_cap > 0.0)) throw std::invalid_argument("price cap must be positive");
  if (!(lambda_min_sigma_x >= 0.0)) throw std::invalid_argument("eigenvalue must be non-negative");
  const double b2 = price_cap * price_cap;
  const double first = (b2 + 3.0 - std::sqrt(b2 * b2 + 3.0 * b2 + 9.0)) / 6.0;
  return std::min(first, lambda_min_sigma_x);
}

std::vector<ErrorScalingRow> error_scaling_probe(const Environment& env, std::span<const std::size_t> lengths,
                                                 std::size_t reps, std::uint64_t seed, double price_cap)
{
  if (!std::is_sorted(lengths.begin(), lengths.end())) throw std::invalid_argument("lengths must be ascending");
  if (reps == 0) throw std::invalid_argument("reps must be positive");
  std::vector<ErrorScalingRow> rows;
  for (const auto length : lengths) {
    ErrorScalingRow row{length, 0.0, 0.0};
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::uint64_t s = seed + rep;
      auto group_rng = make_stream(s, Stream::Group);
      auto feature_rng = make_stream(s, Stream::Feature);
      auto noise_rng = make_stream(s, Stream::Noise);
      auto price_rng = make_stream(s, Stream::ExplorationPrice);
      std::uniform_real_distribution<double> price_dist(0.0, price_cap);
      std::vector<SaleRecord> records;
      records.reserve(length);
      for (std::size_t t = 1; t <= length; ++t) {
        SaleRecord r;
        r.x = env.sample_features(feature_rng);
        r.true_group = env.sample_group(t, group_rng);
        r.price = price_dist(price_rng);
        r.demand = realize_demand(env, r.true_group, r.price, augment(r.x), noise_rng);
        records.push_back(std::move(r));
      }
      for (const Group g : {Group::Zero, Group::One}) {
        const auto est = fit_ols(records, g);
        const auto& truth = env.theta(g);
        const double err = std::pow(est.raw_alpha - truth.alpha(), 2) + (est.theta.beta() - truth.beta()).squaredNorm();
        (g == Group::Zero ? row.mean_sq_error0 : row.mean_sq_error1) += err / static_cast<double>(reps);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fairprice
