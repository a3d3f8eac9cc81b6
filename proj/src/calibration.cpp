#include "fairprice/calibration.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace fairprice {

ColumnMap ColumnMap::defaults()
{
  ColumnMap m;
  m.columns = {
      {"group", "derived_race"},
      {"price", "interest_rate"},
      {"demand", "loan_amount"},
      {"income", "income"},
      {"age", "applicant_age"},
      {"property_value", "property_value"},
      {"dti", "debt_to_income_ratio"},
      {"cltv", "combined_loan_to_value_ratio"},
      {"loan_term", "loan_term"},
  };
  return m;
}

ColumnMap ColumnMap::from_config(const KeyValueConfig& cfg)
{
  ColumnMap m = defaults();
  for (auto& [logical, header] : m.columns) {
    if (auto v = cfg.get_string("columns." + logical)) header = *v;
  }
  if (auto label = cfg.get_string("calibration.majority_label")) m.majority_label = *label;
  return m;
}

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool parse_number(const std::string& s, double& out)
{
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string strip(std::string s, std::string_view chars)
{
  std::erase_if(s, [&](char c) { return chars.find(c) != std::string_view::npos; });
  return s;
}

Group parse_group(const std::string& text, const std::string& majority_label)
{
  double v = 0.0;
  if (parse_number(text, v)) {
    if (v == 0.0) return Group::Zero;
    if (v == 1.0) return Group::One;
    throw std::invalid_argument("numeric group must be 0 or 1");
  }
  if (text.empty() || text == "NA" || text == "Exempt") throw std::invalid_argument("missing group");
  return text == majority_label ? Group::One : Group::Zero;
}

double field_value(const LoanRecord& r, TrimField f)
{
  switch (f) {
    case TrimField::Demand: return r.demand;
    case TrimField::Price: return r.price;
    case TrimField::Income: return r.features[0];
    case TrimField::PropertyValue: return r.features[2];
    case TrimField::Cltv: return r.features[4];
    case TrimField::LoanTerm: return r.features[5];
  }
  return 0.0;
}

bool passes_filters(const LoanRecord& r)
{
  const double age = r.features[1];
  const double dti = r.features[3];
  return age >= 25.0 && age <= 74.0 && dti >= 20.0 && dti <= 60.0;
}

bool inside(const LoanRecord& r, const std::array<Fence, kTrimFields>& fences)
{
  for (std::size_t f = 0; f < kTrimFields; ++f) {
    const double v = field_value(r, static_cast<TrimField>(f));
    if (v < fences[f].low || v > fences[f].high) return false;
  }
  return true;
}

LoanFeatures feature_means(std::span<const LoanRecord> records)
{
  LoanFeatures means{};
  for (const auto& r : records) {
    for (std::size_t k = 0; k < kLoanFeatures; ++k) means[k] += r.features[k];
  }
  for (auto& m : means) m /= static_cast<double>(records.size());
  return means;
}

PreparedSample apply_fences(std::span<const LoanRecord> filtered, std::size_t input,
                            const std::array<Fence, kTrimFields>& fences)
{
  PreparedSample out;
  out.input = input;
  out.fences = fences;
  out.dropped_by_filter = input - filtered.size();
  for (const auto& r : filtered) {
    for (std::size_t f = 0; f < kTrimFields; ++f) {
      const double v = field_value(r, static_cast<TrimField>(f));
      out.outside_fence[f] += v < fences[f].low || v > fences[f].high;
    }
    if (inside(r, fences)) out.records.push_back(r);
  }
  out.dropped_by_trim = filtered.size() - out.records.size();
  if (out.records.empty()) throw ConfigError("preprocessing removed every record");
  out.feature_means = feature_means(out.records);
  return out;
}

std::vector<LoanRecord> filtered(std::span<const LoanRecord> records)
{
  std::vector<LoanRecord> out;
  out.reserve(records.size());
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), passes_filters);
  return out;
}

}  // namespace

double parse_interval_value(const std::string& text)
{
  const std::string s = strip(trim(text), "% ");
  double v = 0.0;
  if (parse_number(s, v)) return v;
  if (!s.empty() && (s[0] == '<' || s[0] == '>')) {
    if (parse_number(s.substr(1), v)) return s[0] == '<' ? v - 0.5 : v + 0.5;
    throw std::invalid_argument("cannot parse '" + text + "'");
  }
  // Interval "a-b", possibly with an en dash and a "<" on the upper end.
  std::string normalized = s;
  for (const std::string dash : {"–", "—"}) {
    for (auto pos = normalized.find(dash); pos != std::string::npos; pos = normalized.find(dash)) {
      normalized.replace(pos, dash.size(), "-");
    }
  }
  const auto sep = normalized.find('-', 1);
  if (sep == std::string::npos) throw std::invalid_argument("cannot parse '" + text + "'");
  double lo = 0.0;
  double hi = 0.0;
  if (!parse_number(strip(normalized.substr(0, sep), "<>"), lo) ||
      !parse_number(strip(normalized.substr(sep + 1), "<>"), hi)) {
    throw std::invalid_argument("cannot parse '" + text + "'");
  }
  return (lo + hi) / 2.0;
}

LoadResult load_csv(std::istream& in, const ColumnMap& columns)
{
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw ConfigError("CSV input is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> index;
  for (const auto& [logical, name] : columns.columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("CSV is missing column '" + name + "' (" + logical + ")");
    index[logical] = static_cast<std::size_t>(it - header.begin());
  }
  for (const char* required : {"group", "price", "demand"}) {
    if (!index.count(required)) throw ConfigError(std::string("column map lacks '") + required + "'");
  }
  for (const char* name : kLoanFeatureNames) {
    if (!index.count(name)) throw ConfigError(std::string("column map lacks '") + name + "'");
  }

  LoadResult result;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++result.rows;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      ++result.skipped;
      continue;
    }
    try {
      LoanRecord r;
      r.group = parse_group(fields[index["group"]], columns.majority_label);
      if (!parse_number(fields[index["price"]], r.price)) throw std::invalid_argument("price");
      if (!parse_number(fields[index["demand"]], r.demand)) throw std::invalid_argument("demand");
      for (std::size_t k = 0; k < kLoanFeatures; ++k) {
        r.features[k] = parse_interval_value(fields[index[kLoanFeatureNames[k]]]);
      }
      result.records.push_back(r);
    } catch (const std::invalid_argument&) {
      ++result.skipped;
    }
  }
  if (result.rows == 0) throw ConfigError("CSV input has a header but no rows");
  return result;
}

LoadResult load_csv(const std::filesystem::path& path, const ColumnMap& columns)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return load_csv(in, columns);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double percentile(std::vector<double> values, double p)
{
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PreparedSample preprocess(std::span<const LoanRecord> records)
{
  if (records.empty()) throw ConfigError("no records to preprocess");
  const auto kept = filtered(records);
  if (kept.empty()) throw ConfigError("age and dti filters removed every record");
  std::array<Fence, kTrimFields> fences{};
  std::vector<double> column(kept.size());
  for (std::size_t f = 0; f < kTrimFields; ++f) {
    for (std::size_t i = 0; i < kept.size(); ++i) column[i] = field_value(kept[i], static_cast<TrimField>(f));
    fences[f] = {percentile(column, 0.05), percentile(column, 0.95)};
  }
  return apply_fences(kept, records.size(), fences);
}

PreparedSample preprocess(const PreparedSample& sample)
{
  const auto kept = filtered(sample.records);
  PreparedSample again = apply_fences(kept, sample.records.size(), sample.fences);
  // Counters describe the original raw input.
  again.input = sample.input;
  again.dropped_by_filter = sample.dropped_by_filter + (sample.records.size() - kept.size());
  again.dropped_by_trim = sample.dropped_by_trim + (kept.size() - again.records.size());
  again.outside_fence = sample.outside_fence;
  return again;
}

CalibratedModel calibrate_demand(std::span<const LoanRecord> records, CalibrationUnits units)
{
  if (!(units.price_divisor > 0.0) || !(units.demand_divisor > 0.0)) {
    throw ConfigError("calibration divisors must be positive");
  }
  if (records.empty()) throw ConfigError("no records to calibrate");
  CalibratedModel model;
  model.units = units;
  model.feature_means = feature_means(records);
  for (std::size_t k = 0; k < kLoanFeatures; ++k) {
    double ss = 0.0;
    for (const auto& r : records) ss += (r.features[k] - model.feature_means[k]) * (r.features[k] - model.feature_means[k]);
    const double sd = std::sqrt(ss / static_cast<double>(records.size()));
    model.feature_scales[k] = sd > 0.0 ? sd : 1.0;
  }

  std::vector<SaleRecord> sales;
  sales.reserve(records.size());
  for (const auto& r : records) {
    Vector x(static_cast<Eigen::Index>(kLoanFeatures));
    for (std::size_t k = 0; k < kLoanFeatures; ++k) {
      x[static_cast<Eigen::Index>(k)] = (r.features[k] - model.feature_means[k]) / model.feature_scales[k];
    }
    sales.push_back(SaleRecord{std::move(x), r.group, r.price / units.price_divisor, r.demand / units.demand_divisor});
    (r.group == Group::Zero ? model.n0 : model.n1)++;
  }
  const std::size_t need = kLoanFeatures + 2;
  for (Group g : {Group::Zero, Group::One}) {
    const std::size_t n = g == Group::Zero ? model.n0 : model.n1;
    if (n <= need) {
      throw ConfigError("group " + std::to_string(index_of(g)) + " has " + std::to_string(n) +
                        " records; calibration needs more than " + std::to_string(need));
    }
  }
  model.fit0 = fit_ols(sales, Group::Zero);
  model.fit1 = fit_ols(sales, Group::One);
  model.theta0 = model.fit0.theta;
  model.theta1 = model.fit1.theta;
  const double p = static_cast<double>(need);
  const double rss = model.fit0.residual_variance * (static_cast<double>(model.n0) - p) +
                     model.fit1.residual_variance * (static_cast<double>(model.n1) - p);
  model.sigma_eps = std::sqrt(rss / (static_cast<double>(model.n0 + model.n1) - 2.0 * p));
  model.q = static_cast<double>(model.n0) / static_cast<double>(model.n0 + model.n1);
  return model;
}

double predicted_demand(const CalibratedModel& model, Group group, double model_price, const LoanFeatures& raw)
{
  Vector x(static_cast<Eigen::Index>(kLoanFeatures));
  for (std::size_t k = 0; k < kLoanFeatures; ++k) {
    x[static_cast<Eigen::Index>(k)] = (raw[k] - model.feature_means[k]) / model.feature_scales[k];
  }
  return expected_demand(group == Group::Zero ? model.theta0 : model.theta1, model_price, augment(x));
}

Environment calibrated_environment(const CalibratedModel& model, double sigma_eps)
{
  const double half_width = std::sqrt(3.0);
  return Environment(model.theta0, model.theta1, model.q, sigma_eps,
                     FeatureSampler{static_cast<Eigen::Index>(kLoanFeatures), -half_width, half_width});
}

GapReport raw_gap_report(std::span<const LoanRecord> records)
{
  GapReport rep;
  double sum0 = 0, sum1 = 0;
  for (const auto& r : records) {
    if (r.group == Group::Zero) {
      ++rep.n0;
      sum0 += r.price;
    } else {
      ++rep.n1;
      sum1 += r.price;
    }
  }
  if (rep.n0 < 2 || rep.n1 < 2) throw ConfigError("gap test needs at least two records in each group");
  const double n0 = static_cast<double>(rep.n0);
  const double n1 = static_cast<double>(rep.n1);
  const double m0 = sum0 / n0;
  const double m1 = sum1 / n1;
  double ss0 = 0, ss1 = 0;
  for (const auto& r : records) {
    if (r.group == Group::Zero) ss0 += (r.price - m0) * (r.price - m0);
    else ss1 += (r.price - m1) * (r.price - m1);
  }
  const double v0 = ss0 / (n0 - 1.0) / n0;
  const double v1 = ss1 / (n1 - 1.0) / n1;
  rep.mean_gap = m0 - m1;
  const double se = std::sqrt(v0 + v1);
  if (se == 0.0) {
    rep.t_stat = rep.mean_gap > 0 ? INFINITY : (rep.mean_gap < 0 ? -INFINITY : 0.0);
    rep.df = n0 + n1 - 2.0;
    rep.one_sided_p = rep.mean_gap > 0 ? 0.0 : (rep.mean_gap < 0 ? 1.0 : 0.5);
    return rep;
  }
  rep.t_stat = rep.mean_gap / se;
  rep.df = (v0 + v1) * (v0 + v1) / (v0 * v0 / (n0 - 1.0) + v1 * v1 / (n1 - 1.0));
  const boost::math::students_t dist(rep.df);
  rep.one_sided_p = boost::math::cdf(boost::math::complement(dist, rep.t_stat));
  return rep;
}

KeyValueConfig model_to_config(const CalibratedModel& model, const GapReport& gap, double simulation_sigma_eps)
{
  KeyValueConfig cfg = environment_to_config(calibrated_environment(model, simulation_sigma_eps));
  auto to_vector = [](const LoanFeatures& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) v[static_cast<Eigen::Index>(k)] = a[k];
    return v;
  };
  std::string names;
  for (const char* n : kLoanFeatureNames) names += (names.empty() ? "" : ", ") + std::string(n);
  cfg.set("calibration.features", names);
  cfg.set("calibration.feature_means", to_vector(model.feature_means));
  cfg.set("calibration.feature_scales", to_vector(model.feature_scales));
  cfg.set("calibration.price_divisor", model.units.price_divisor);
  cfg.set("calibration.demand_divisor", model.units.demand_divisor);
  cfg.set("calibration.n0", static_cast<long long>(model.n0));
  cfg.set("calibration.n1", static_cast<long long>(model.n1));
  cfg.set("calibration.q", model.q);
  cfg.set("calibration.residual_sigma", model.sigma_eps);
  cfg.set("calibration.raw_alpha0", model.fit0.raw_alpha);
  cfg.set("calibration.raw_alpha1", model.fit1.raw_alpha);
  cfg.set("calibration.std_errors0", model.fit0.std_errors);
  cfg.set("calibration.std_errors1", model.fit1.std_errors);
  cfg.set("report.test", std::string("unadjusted one-sided Welch t-test, no covariate matching"));
  cfg.set("report.mean_gap", gap.mean_gap);
  cfg.set("report.t_stat", gap.t_stat);
  cfg.set("report.df", gap.df);
  cfg.set("report.one_sided_p", gap.one_sided_p);
  cfg.set("report.n0", static_cast<long long>(gap.n0));
  cfg.set("report.n1", static_cast<long long>(gap.n1));
  return cfg;
}

namespace {

struct AgeBand {
  const char* label;
  double weight;
};

constexpr std::array<AgeBand, 7> kAgeBands = {{{"<25", 0.03},
                                               {"25-34", 0.22},
                                               {"35-44", 0.24},
                                               {"45-54", 0.20},
                                               {"55-64", 0.16},
                                               {"65-74", 0.12},
                                               {">74", 0.03}}};

double round_to(double v, double unit) { return std::round(v / unit) * unit; }

}  // namespace

std::vector<LoanRecord> generate_synthetic_loans(const SyntheticLoanSpec& spec, std::uint64_t seed, bool noiseless)
{
  Rng rng = make_stream(seed, Stream::Misc);
  std::bernoulli_distribution majority(spec.majority_share);
  std::lognormal_distribution<double> income(4.4, 0.45);
  std::uniform_real_distribution<double> value_ratio(2.5, 5.5);
  std::uniform_real_distribution<double> dti(12.0, 66.0);
  std::uniform_real_distribution<double> cltv(40.0, 100.0);
  std::discrete_distribution<int> term({0.80, 0.05, 0.15});
  std::discrete_distribution<std::size_t> age({0.03, 0.22, 0.24, 0.20, 0.16, 0.12, 0.03});
  std::normal_distribution<double> rate_noise(0.0, spec.rate_sd);
  std::normal_distribution<double> noise(0.0, spec.noise_sd);
  constexpr std::array<double, 3> terms = {360.0, 240.0, 180.0};

  std::vector<LoanRecord> out;
  out.reserve(spec.rows);
  for (std::size_t i = 0; i < spec.rows; ++i) {
    LoanRecord r;
    r.group = majority(rng) ? Group::One : Group::Zero;
    const double inc = round_to(income(rng), 1.0);
    r.features[0] = inc;
    r.features[1] = parse_interval_value(kAgeBands[age(rng)].label);
    r.features[2] = round_to(inc * 1000.0 * value_ratio(rng), 5000.0);
    r.features[3] = round_to(dti(rng), 1.0);
    r.features[4] = round_to(cltv(rng), 0.01);
    r.features[5] = terms[static_cast<std::size_t>(term(rng))];
    const double gap = r.group == Group::Zero ? spec.rate_gap : 0.0;
    r.price = round_to(std::max(0.5, spec.rate_mean + gap + rate_noise(rng)), 0.001);

    const auto& beta = r.group == Group::Zero ? spec.beta0 : spec.beta1;
    const double alpha = r.group == Group::Zero ? spec.alpha0 : spec.alpha1;
    double y = alpha * r.price / spec.units.price_divisor + beta[0];
    for (std::size_t k = 0; k < kLoanFeatures; ++k) y += beta[k + 1] * r.features[k];
    const double eps = noise(rng);
    if (!noiseless) y += eps;
    r.demand = y * spec.units.demand_divisor;
    if (!noiseless) r.demand = round_to(r.demand, 1.0);
    out.push_back(r);
  }
  return out;
}

void write_loans_csv(std::ostream& out, std::span<const LoanRecord> records)
{
  const ColumnMap m = ColumnMap::defaults();
  const auto& c = m.columns;
  out << c.at("group") << ',' << c.at("price") << ',' << c.at("demand");
  for (const char* name : kLoanFeatureNames) out << ',' << c.at(name);
  out << '\n';
  for (const auto& r : records) {
    out << (r.group == Group::One ? m.majority_label : "Non-White") << ',' << format_double(r.price) << ','
        << format_double(r.demand);
    for (std::size_t k = 0; k < kLoanFeatures; ++k) {
      out << ',';
      if (k == 1) {
        const auto band = std::find_if(kAgeBands.begin(), kAgeBands.end(),
                                       [&](const AgeBand& b) { return parse_interval_value(b.label) == r.features[1]; });
        if (band != kAgeBands.end()) {
          out << band->label;
          continue;
        }
      }
      out << format_double(r.features[k]);
    }
    out << '\n';
  }
}

}  // namespace fairprice
