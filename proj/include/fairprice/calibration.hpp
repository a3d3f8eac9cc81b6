#pragma once

// Loan-level data ingestion, cleaning and calibration of the two-group demand
// model. Price is the interest rate, demand the loan amount.

#include "fairprice/config.hpp"
#include "fairprice/estimation.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fairprice {

inline constexpr std::size_t kLoanFeatures = 6;
using LoanFeatures = std::array<double, kLoanFeatures>;

/// Feature order: income, age, property_value, dti, cltv, loan_term.
inline constexpr std::array<const char*, kLoanFeatures> kLoanFeatureNames = {
    "income", "age", "property_value", "dti", "cltv", "loan_term"};

struct LoanRecord {
  Group group = Group::Zero;  ///< 0 = non-majority, 1 = majority
  double price = 0.0;         ///< interest rate, percent
  double demand = 0.0;        ///< loan amount
  LoanFeatures features{};

  bool operator==(const LoanRecord&) const = default;
};

/// Logical field name to CSV header. Logical names: group, price, demand and
/// the six feature names.
struct ColumnMap {
  std::map<std::string, std::string> columns;
  std::string majority_label = "White";

  /// Public loan-level register headers.
  static ColumnMap defaults();
  /// Overrides from `[columns]` and `calibration.majority_label`.
  static ColumnMap from_config(const KeyValueConfig& cfg);
};

struct LoadResult {
  std::vector<LoanRecord> records;
  std::size_t rows = 0;
  std::size_t skipped = 0;  ///< malformed rows
};

/// Throws ConfigError for an unreadable or empty file or a missing mapped column.
LoadResult load_csv(const std::filesystem::path& path, const ColumnMap& columns = ColumnMap::defaults());
LoadResult load_csv(std::istream& in, const ColumnMap& columns = ColumnMap::defaults());

/// "25-34" -> 29.5, "20%-<30%" -> 25, "<25" -> 24.5, ">74" -> 74.5, "41" -> 41.
/// Throws std::invalid_argument on anything else.
double parse_interval_value(const std::string& text);

/// Fields trimmed at their 5th and 95th percentiles.
enum class TrimField { Demand, Price, Income, PropertyValue, Cltv, LoanTerm };
inline constexpr std::size_t kTrimFields = 6;
inline constexpr std::array<const char*, kTrimFields> kTrimFieldNames = {
    "demand", "price", "income", "property_value", "cltv", "loan_term"};

struct Fence {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const Fence&) const = default;
};

struct PreparedSample {
  std::vector<LoanRecord> records;  ///< raw units, uncentered
  std::array<Fence, kTrimFields> fences{};
  LoanFeatures feature_means{};
  std::size_t input = 0;
  std::size_t dropped_by_filter = 0;
  std::size_t dropped_by_trim = 0;
  std::array<std::size_t, kTrimFields> outside_fence{};  ///< per field, among filtered rows

  bool operator==(const PreparedSample&) const = default;
};

/// Age in [25, 74] and dti in [20, 60], then 5%/95% trimming of demand,
/// price, income, property value, cltv and loan term using fences computed on
/// the filtered rows. Throws ConfigError when nothing survives.
PreparedSample preprocess(std::span<const LoanRecord> records);
/// Reapplies the filters and the recorded fences; a no-op on its own output.
PreparedSample preprocess(const PreparedSample& sample);

double percentile(std::vector<double> values, double p);

struct CalibrationUnits {
  double price_divisor = 10.0;      ///< model price = rate / divisor
  double demand_divisor = 1.0e5;    ///< model demand = amount / divisor
};

struct CalibratedModel {
  DemandParams theta0;
  DemandParams theta1;
  EstimatedTheta fit0;
  EstimatedTheta fit1;
  double sigma_eps = 0.0;  ///< pooled residual standard deviation
  LoanFeatures feature_means{};
  LoanFeatures feature_scales{};
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double q = 0.0;  ///< share of group 0
  CalibrationUnits units;
};

/// Per-group least squares of model demand on (model price, 1, standardized
/// features). Standardization uses the pooled mean and standard deviation.
CalibratedModel calibrate_demand(std::span<const LoanRecord> records, CalibrationUnits units = {});

/// Fitted mean demand (model units) at a raw-unit feature vector.
double predicted_demand(const CalibratedModel& model, Group group, double model_price, const LoanFeatures& raw);

/// Simulation environment: calibrated thetas, standardized features drawn
/// from U(-sqrt 3, sqrt 3), group-0 share q.
Environment calibrated_environment(const CalibratedModel& model, double sigma_eps);

struct GapReport {
  double mean_gap = 0.0;  ///< mean price of group 0 minus group 1
  double t_stat = 0.0;
  double df = 0.0;
  double one_sided_p = 0.0;  ///< H1: group 1 pays less
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

/// Unadjusted Welch two-sample t-test; no matching on covariates.
GapReport raw_gap_report(std::span<const LoanRecord> records);

/// Model file: `[environment]` for simulation plus `[calibration]` and `[report]`.
KeyValueConfig model_to_config(const CalibratedModel& model, const GapReport& gap, double simulation_sigma_eps);

struct SyntheticLoanSpec {
  std::size_t rows = 8000;
  double majority_share = 0.82;
  double rate_mean = 5.5;          ///< percent
  double rate_sd = 1.2;
  double rate_gap = 0.5;           ///< extra rate charged to group 0, percent
  double noise_sd = 0.5;           ///< model demand units
  double alpha0 = -5.0;            ///< per model price unit
  double alpha1 = -5.0;
  /// Intercept then slopes per raw feature unit, model demand units.
  std::array<double, kLoanFeatures + 1> beta0 = {2.88, 0.0, -0.01, 3e-6, 0.01, 0.035, 0.002};
  std::array<double, kLoanFeatures + 1> beta1 = {2.56, 0.008, -0.01, 3e-6, 0.01, 0.015, 0.002};
  CalibrationUnits units;
};

/// Loan records with demand exactly linear in the written (rounded) values.
std::vector<LoanRecord> generate_synthetic_loans(const SyntheticLoanSpec& spec, std::uint64_t seed,
                                                 bool noiseless = false);

/// Writes with the default headers; age as its interval label.
void write_loans_csv(std::ostream& out, std::span<const LoanRecord> records);

}  // namespace fairprice
