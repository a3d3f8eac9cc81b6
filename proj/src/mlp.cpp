#include "fairprice/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairprice {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

}  // namespace

Mlp::Mlp(Eigen::Index inputs, MlpOptions options, Rng& rng) : inputs_(inputs), options_(options)
{
  if (inputs <= 0 || options.width <= 0 || options.hidden_layers < 0) {
    throw std::invalid_argument("mlp: invalid architecture");
  }
  Eigen::Index fan_in = inputs;
  for (int l = 0; l <= options.hidden_layers; ++l) {
    const Eigen::Index fan_out = l == options.hidden_layers ? 1 : options.width;
    // Glorot uniform.
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> unif(-limit, limit);
    Layer layer;
    layer.weights = Matrix(fan_out, fan_in);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = unif(rng);
    layer.bias = Vector::Zero(fan_out);
    layer.m_w = Matrix::Zero(fan_out, fan_in);
    layer.v_w = Matrix::Zero(fan_out, fan_in);
    layer.m_b = Vector::Zero(fan_out);
    layer.v_b = Vector::Zero(fan_out);
    layers_.push_back(std::move(layer));
    fan_in = fan_out;
  }
  in_mean_ = Vector::Zero(inputs);
  in_scale_ = Vector::Ones(inputs);
}

void Mlp::set_standardization(const Matrix& features, const Vector& targets)
{
  const double n = static_cast<double>(features.rows());
  in_mean_ = features.colwise().mean().transpose();
  in_scale_ = ((features.rowwise() - in_mean_.transpose()).array().square().colwise().sum() / n).sqrt().transpose();
  for (Eigen::Index j = 0; j < in_scale_.size(); ++j) {
    if (!(in_scale_[j] > 1e-12)) in_scale_[j] = 1.0;
  }
  out_mean_ = targets.mean();
  out_scale_ = std::sqrt((targets.array() - out_mean_).square().sum() / n);
  if (!(out_scale_ > 1e-12)) out_scale_ = 1.0;
}

Matrix Mlp::standardize(const Matrix& features) const
{
  // Returns inputs as columns (inputs x n).
  return ((features.rowwise() - in_mean_.transpose()).array().rowwise() / in_scale_.transpose().array())
      .matrix()
      .transpose();
}

Matrix Mlp::forward(const Matrix& input, std::vector<Matrix>* activations) const
{
  Matrix a = input;
  if (activations) activations->push_back(a);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weights * a;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    a = std::move(z);
    if (activations) activations->push_back(a);
  }
  return a;
}

Mlp::TrainReport Mlp::train(const Matrix& features, const Vector& targets, std::size_t epochs, Rng& rng)
{
  if (!initialized()) throw std::logic_error("mlp: not initialized");
  if (features.rows() == 0 || features.rows() != targets.size() || features.cols() != inputs_) {
    throw std::invalid_argument("mlp: bad training data shape");
  }
  set_standardization(features, targets);
  const Matrix x_all = standardize(features);
  const Vector y_all = (targets.array() - out_mean_) / out_scale_;
  const auto n_rows = static_cast<double>(features.rows());
  TrainReport report;
  report.initial_loss = (forward(x_all, nullptr).row(0) - y_all.transpose()).squaredNorm() / n_rows;

  const auto n = static_cast<std::size_t>(features.rows());
  const std::size_t batch = std::max<std::size_t>(1, std::min(options_.batch_size, n));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  std::vector<Matrix> acts;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      Matrix xb(inputs_, static_cast<Eigen::Index>(m));
      Eigen::RowVectorXd yb(static_cast<Eigen::Index>(m));
      for (std::size_t k = 0; k < m; ++k) {
        xb.col(static_cast<Eigen::Index>(k)) = x_all.col(order[start + k]);
        yb[static_cast<Eigen::Index>(k)] = y_all[order[start + k]];
      }
      acts.clear();
      const Matrix out = forward(xb, &acts);
      Matrix delta = (out - yb) * (2.0 / static_cast<double>(m));

      ++adam_step_;
      const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_step_));
      const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_step_));
      const double lr = options_.learning_rate;
      for (std::size_t l = layers_.size(); l-- > 0;) {
        auto& layer = layers_[l];
        const Matrix grad_w = delta * acts[l].transpose();
        const Vector grad_b = delta.rowwise().sum();
        if (l > 0) {
          delta = (layer.weights.transpose() * delta).cwiseProduct((1.0 - acts[l].array().square()).matrix());
        }
        layer.m_w = kBeta1 * layer.m_w + (1.0 - kBeta1) * grad_w;
        layer.v_w = kBeta2 * layer.v_w + (1.0 - kBeta2) * grad_w.cwiseProduct(grad_w);
        layer.m_b = kBeta1 * layer.m_b + (1.0 - kBeta1) * grad_b;
        layer.v_b = kBeta2 * layer.v_b + (1.0 - kBeta2) * grad_b.cwiseProduct(grad_b);
        layer.weights.array() -= lr * (layer.m_w.array() / corr1) / ((layer.v_w.array() / corr2).sqrt() + kEps);
        layer.bias.array() -= lr * (layer.m_b.array() / corr1) / ((layer.v_b.array() / corr2).sqrt() + kEps);
      }
    }
  }
  report.final_loss = (forward(x_all, nullptr).row(0) - y_all.transpose()).squaredNorm() / n_rows;
  return report;
}

double Mlp::predict(const Eigen::Ref<const Vector>& row) const
{
  if (!initialized()) throw std::logic_error("mlp: not initialized");
  Vector a = (row - in_mean_).cwiseQuotient(in_scale_);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].weights * a + layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    a = std::move(z);
  }
  return a[0] * out_scale_ + out_mean_;
}

double Mlp::loss(const Matrix& features, const Vector& targets) const
{
  const Matrix out = forward(standardize(features), nullptr);
  const Vector y = (targets.array() - out_mean_) / out_scale_;
  return (out.row(0) - y.transpose()).squaredNorm() / static_cast<double>(features.rows());
}

}  // namespace fairprice
