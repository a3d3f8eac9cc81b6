#pragma once

// Buyer-side learning of the seller's price rule from released records, and
// the group-report decision of disadvantaged (group 0) buyers.

#include "fairprice/common.hpp"
#include "fairprice/mlp.hpp"
#include "fairprice/regression_tree.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fairprice {

/// A released sale: features, the reported group and the price paid. Demand
/// and the true group are never part of it.
struct PublicRecord {
  Vector x;
  Group reported_group = Group::Zero;
  double price = 0.0;
};

enum class OracleKind { Linear, Tree, Mlp };

std::string to_string(OracleKind kind);
OracleKind oracle_kind_from_string(const std::string& s);

struct OracleOptions {
  TreeOptions tree;
  MlpOptions mlp;
  std::size_t initial_epochs = 300;  ///< cold-start training
  std::size_t warm_epochs = 4;       ///< per retrain after warm start
  std::uint64_t seed = 0;
};

/// Per-reported-group least squares of price on (1, x). A group missing from
/// the history falls back to the pooled fit.
struct LinearPriceModel {
  Vector coef0;
  Vector coef1;
};

class PriceOracle {
 public:
  PriceOracle() = default;

  OracleKind kind() const { return kind_; }
  bool trained() const { return !std::holds_alternative<std::monostate>(model_); }
  std::size_t trained_on() const { return trained_on_; }

  double predict(const Vector& x, Group group) const;

 private:
  friend PriceOracle train_oracle(OracleKind, std::span<const PublicRecord>, const OracleOptions&);
  friend void retrain_oracle(PriceOracle&, std::span<const PublicRecord>, const OracleOptions&);

  OracleKind kind_ = OracleKind::Linear;
  std::variant<std::monostate, LinearPriceModel, RegressionTree, Mlp> model_;
  std::size_t trained_on_ = 0;
  Rng rng_;
};

/// Fits a fresh oracle. Throws on an empty history.
PriceOracle train_oracle(OracleKind kind, std::span<const PublicRecord> history, const OracleOptions& options = {});

/// Refits on `history`. The MLP warm-starts from its current weights; the
/// other kinds are refit from scratch.
void retrain_oracle(PriceOracle& oracle, std::span<const PublicRecord> history, const OracleOptions& options = {});

double predict_price(const PriceOracle& oracle, const Vector& x, Group group);

/// Estimated disparity p0_hat(x) - p1_hat(x).
double learned_gap(const PriceOracle& oracle, const Vector& x);

/// Group 1 always reports 1. Group 0 reports 1 iff delta_hat > C0.
Group report_group(Group true_group, double delta_hat, double manipulation_cost);

enum class BuyerMode { Truthful, AlwaysManipulate, OracleLearner };

std::string to_string(BuyerMode mode);
BuyerMode buyer_mode_from_string(const std::string& s);

struct BuyerBehavior {
  BuyerMode mode = BuyerMode::OracleLearner;
  OracleKind oracle_kind = OracleKind::Mlp;
  std::size_t retrain_every = 25;
  /// Tree and MLP oracles train on a uniform reservoir sample of at most this
  /// many records (0 = whole history). The linear oracle always uses the whole history.
  std::size_t training_cap = 2000;
  OracleOptions oracle;
};

struct ReportDecision {
  Group reported = Group::Zero;
  std::optional<double> delta_hat;
};

/// The buyer population of one replication: shares the released history,
/// owns the learned oracle and applies the report rule.
class StrategicBuyers {
 public:
  StrategicBuyers(BuyerBehavior behavior, double manipulation_cost, std::uint64_t seed);

  /// Retrains the oracle if it is due. Call once per exploitation step before decide().
  void prepare_exploitation_step();

  /// Report of a buyer with true group `group`. During exploration every buyer is truthful.
  ReportDecision decide(const Vector& x, Group group, bool exploitation) const;

  /// Learned gap at x, if the behavior learns one and an oracle is available.
  std::optional<double> gap_estimate(const Vector& x) const;

  /// Adds a released record. Only learning buyers keep the history.
  void release(PublicRecord record);

  const BuyerBehavior& behavior() const { return behavior_; }
  const std::vector<PublicRecord>& history() const { return history_; }
  const PriceOracle& oracle() const { return oracle_; }
  std::size_t retrain_count() const { return retrain_count_; }

 private:
  std::span<const PublicRecord> training_set() const;

  BuyerBehavior behavior_;
  double manipulation_cost_;
  std::vector<PublicRecord> history_;
  std::vector<PublicRecord> reservoir_;
  Rng reservoir_rng_;
  PriceOracle oracle_;
  std::size_t steps_since_train_ = 0;
  std::size_t retrain_count_ = 0;
};

}  // namespace fairprice
