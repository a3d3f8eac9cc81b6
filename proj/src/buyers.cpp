#include "fairprice/buyers.hpp"

#include <cmath>

namespace fairprice {

std::string to_string(OracleKind kind)
{
  switch (kind) {
    case OracleKind::Linear: return "linear";
    case OracleKind::Tree: return "tree";
    case OracleKind::Mlp: return "mlp";
  }
  return "?";
}

OracleKind oracle_kind_from_string(const std::string& s)
{
  if (s == "linear") return OracleKind::Linear;
  if (s == "tree") return OracleKind::Tree;
  if (s == "mlp") return OracleKind::Mlp;
  throw ConfigError("unknown oracle kind '" + s + "' (expected linear, tree or mlp)");
}

std::string to_string(BuyerMode mode)
{
  switch (mode) {
    case BuyerMode::Truthful: return "truthful";
    case BuyerMode::AlwaysManipulate: return "always-manipulate";
    case BuyerMode::OracleLearner: return "oracle-learner";
  }
  return "?";
}

BuyerMode buyer_mode_from_string(const std::string& s)
{
  if (s == "truthful") return BuyerMode::Truthful;
  if (s == "always-manipulate") return BuyerMode::AlwaysManipulate;
  if (s == "oracle-learner") return BuyerMode::OracleLearner;
  throw ConfigError("unknown buyer mode '" + s + "'");
}

namespace {

Eigen::Index feature_dim(std::span<const PublicRecord> history)
{
  if (history.empty()) throw std::invalid_argument("oracle training history is empty");
  const Eigen::Index d = history.front().x.size();
  for (const auto& r : history) {
    if (r.x.size() != d) throw std::invalid_argument("oracle history has inconsistent dimensions");
    if (!r.x.allFinite() || !std::isfinite(r.price)) throw std::invalid_argument("oracle history has non-finite values");
  }
  return d;
}

Vector least_squares(const Matrix& design, const Vector& y)
{
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(design).solve(y);
}

LinearPriceModel fit_linear(std::span<const PublicRecord> history, Eigen::Index d)
{
  auto fit = [&](std::optional<Group> group) -> std::optional<Vector> {
    std::size_t n = 0;
    for (const auto& r : history) n += !group || r.reported_group == *group;
    if (n == 0) return std::nullopt;
    Matrix design(static_cast<Eigen::Index>(n), d + 1);
    Vector y(static_cast<Eigen::Index>(n));
    Eigen::Index row = 0;
    for (const auto& r : history) {
      if (group && r.reported_group != *group) continue;
      design(row, 0) = 1.0;
      design.row(row).tail(d) = r.x.transpose();
      y[row++] = r.price;
    }
    return least_squares(design, y);
  };
  auto c0 = fit(Group::Zero);
  auto c1 = fit(Group::One);
  if (!c0 || !c1) {
    const Vector pooled = *fit(std::nullopt);
    if (!c0) c0 = pooled;
    if (!c1) c1 = pooled;
  }
  return {*c0, *c1};
}

void to_training_matrix(std::span<const PublicRecord> history, Eigen::Index d, Matrix& features, Vector& targets)
{
  features.resize(static_cast<Eigen::Index>(history.size()), d + 1);
  targets.resize(static_cast<Eigen::Index>(history.size()));
  Eigen::Index row = 0;
  for (const auto& r : history) {
    features.row(row).head(d) = r.x.transpose();
    features(row, d) = static_cast<double>(index_of(r.reported_group));
    targets[row++] = r.price;
  }
}

Vector with_group(const Vector& x, Group g)
{
  Vector row(x.size() + 1);
  row.head(x.size()) = x;
  row[x.size()] = static_cast<double>(index_of(g));
  return row;
}

}  // namespace

double PriceOracle::predict(const Vector& x, Group group) const
{
  return std::visit(
      [&](const auto& model) -> double {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          throw std::logic_error("price oracle is not trained");
        } else if constexpr (std::is_same_v<T, LinearPriceModel>) {
          const Vector& c = group == Group::Zero ? model.coef0 : model.coef1;
          if (c.size() != x.size() + 1) throw std::invalid_argument("feature dimension mismatch");
          return c[0] + c.tail(x.size()).dot(x);
        } else {
          return model.predict(with_group(x, group));
        }
      },
      model_);
}

PriceOracle train_oracle(OracleKind kind, std::span<const PublicRecord> history, const OracleOptions& options)
{
  const Eigen::Index d = feature_dim(history);
  PriceOracle oracle;
  oracle.kind_ = kind;
  oracle.rng_ = make_stream(options.seed, Stream::Oracle);
  switch (kind) {
    case OracleKind::Linear: oracle.model_ = fit_linear(history, d); break;
    case OracleKind::Tree: {
      Matrix features;
      Vector targets;
      to_training_matrix(history, d, features, targets);
      RegressionTree tree;
      tree.fit(features, targets, options.tree);
      oracle.model_ = std::move(tree);
      break;
    }
    case OracleKind::Mlp: {
      Matrix features;
      Vector targets;
      to_training_matrix(history, d, features, targets);
      Mlp net(d + 1, options.mlp, oracle.rng_);
      net.train(features, targets, options.initial_epochs, oracle.rng_);
      oracle.model_ = std::move(net);
      break;
    }
  }
  oracle.trained_on_ = history.size();
  return oracle;
}

void retrain_oracle(PriceOracle& oracle, std::span<const PublicRecord> history, const OracleOptions& options)
{
  auto* net = std::get_if<Mlp>(&oracle.model_);
  if (!net) {
    const auto kind = oracle.trained() ? oracle.kind_ : OracleKind::Linear;
    oracle = train_oracle(kind, history, options);
    return;
  }
  const Eigen::Index d = feature_dim(history);
  if (net->inputs() != d + 1) throw std::invalid_argument("feature dimension changed between retrains");
  Matrix features;
  Vector targets;
  to_training_matrix(history, d, features, targets);
  net->train(features, targets, options.warm_epochs, oracle.rng_);
  oracle.trained_on_ = history.size();
}

double predict_price(const PriceOracle& oracle, const Vector& x, Group group)
{
  const double p = oracle.predict(x, group);
  if (!std::isfinite(p)) throw std::runtime_error("price oracle produced a non-finite prediction");
  return p;
}

double learned_gap(const PriceOracle& oracle, const Vector& x)
{
  return predict_price(oracle, x, Group::Zero) - predict_price(oracle, x, Group::One);
}

Group report_group(Group true_group, double delta_hat, double manipulation_cost)
{
  if (true_group == Group::One) return Group::One;
  return delta_hat <= manipulation_cost ? Group::Zero : Group::One;
}

StrategicBuyers::StrategicBuyers(BuyerBehavior behavior, double manipulation_cost, std::uint64_t seed)
    : behavior_(std::move(behavior)),
      manipulation_cost_(manipulation_cost),
      reservoir_rng_(make_stream(seed, Stream::Misc))
{
  if (behavior_.retrain_every == 0) throw ConfigError("retrain_every must be >= 1");
  behavior_.oracle.seed = seed;
}

std::span<const PublicRecord> StrategicBuyers::training_set() const
{
  const bool capped = behavior_.oracle_kind != OracleKind::Linear && behavior_.training_cap > 0;
  return capped ? std::span<const PublicRecord>(reservoir_) : std::span<const PublicRecord>(history_);
}

void StrategicBuyers::prepare_exploitation_step()
{
  if (behavior_.mode != BuyerMode::OracleLearner || history_.empty()) return;
  if (oracle_.trained() && steps_since_train_ < behavior_.retrain_every) {
    ++steps_since_train_;
    return;
  }
  if (!oracle_.trained()) {
    oracle_ = train_oracle(behavior_.oracle_kind, training_set(), behavior_.oracle);
  } else {
    retrain_oracle(oracle_, training_set(), behavior_.oracle);
  }
  ++retrain_count_;
  steps_since_train_ = 1;
}

std::optional<double> StrategicBuyers::gap_estimate(const Vector& x) const
{
  if (behavior_.mode != BuyerMode::OracleLearner || !oracle_.trained()) return std::nullopt;
  return learned_gap(oracle_, x);
}

ReportDecision StrategicBuyers::decide(const Vector& x, Group group, bool exploitation) const
{
  ReportDecision decision{group, std::nullopt};
  if (!exploitation || group == Group::One) return decision;
  switch (behavior_.mode) {
    case BuyerMode::Truthful: break;
    case BuyerMode::AlwaysManipulate: decision.reported = Group::One; break;
    case BuyerMode::OracleLearner:
      decision.delta_hat = gap_estimate(x);
      if (decision.delta_hat) decision.reported = report_group(group, *decision.delta_hat, manipulation_cost_);
      break;
  }
  return decision;
}

void StrategicBuyers::release(PublicRecord record)
{
  if (behavior_.mode != BuyerMode::OracleLearner) return;
  if (behavior_.training_cap > 0 &&
      behavior_.oracle_kind != OracleKind::Linear) {
    // Reservoir sampling keeps a uniform sample of the whole history.
    const std::size_t seen = history_.size() + 1;
    if (reservoir_.size() < behavior_.training_cap) {
      reservoir_.push_back(record);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, seen - 1);
      const std::size_t slot = pick(reservoir_rng_);
      if (slot < behavior_.training_cap) reservoir_[slot] = record;
    }
  }
  history_.push_back(std::move(record));
}

}  // namespace fairprice
