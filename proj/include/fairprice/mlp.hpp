#pragma once

#include "fairprice/common.hpp"

#include <vector>

namespace fairprice {

struct MlpOptions {
  int hidden_layers = 5;
  int width = 5;
  double learning_rate = 1e-2;
  std::size_t batch_size = 64;
};

/// Fully connected regressor with tanh hidden units and a linear output,
/// trained on squared loss with Adam. Inputs and target are standardized with
/// the statistics of the most recent training set.
class Mlp {
 public:
  Mlp() = default;
  Mlp(Eigen::Index inputs, MlpOptions options, Rng& rng);

  struct TrainReport {
    double initial_loss = 0.0;  ///< standardized MSE before the first update
    double final_loss = 0.0;
  };

  /// Runs `epochs` shuffled mini-batch passes starting from the current weights.
  TrainReport train(const Matrix& features, const Vector& targets, std::size_t epochs, Rng& rng);

  double predict(const Eigen::Ref<const Vector>& row) const;
  /// Mean squared error in standardized target units.
  double loss(const Matrix& features, const Vector& targets) const;

  bool initialized() const { return !layers_.empty(); }
  Eigen::Index inputs() const { return inputs_; }

 private:
  struct Layer {
    Matrix weights;  // out x in
    Vector bias;
    Matrix m_w, v_w;
    Vector m_b, v_b;
  };

  void set_standardization(const Matrix& features, const Vector& targets);
  Matrix standardize(const Matrix& features) const;
  Matrix forward(const Matrix& input, std::vector<Matrix>* activations) const;

  Eigen::Index inputs_ = 0;
  MlpOptions options_;
  std::vector<Layer> layers_;
  Vector in_mean_, in_scale_;
  double out_mean_ = 0.0;
  double out_scale_ = 1.0;
  long long adam_step_ = 0;
};

}  // namespace fairprice
