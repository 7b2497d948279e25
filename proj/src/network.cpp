#include "mdmt/network.hpp"

#include <cmath>

#include "mdmt/errors.hpp"

namespace mdmt {

void NetGrads::add(const NetGrads& other) {
  if (weight.size() != other.weight.size())
    throw ShapeError("NetGrads::add: layer count mismatch");
  for (std::size_t i = 0; i < weight.size(); ++i) {
    weight[i] += other.weight[i];
    bias[i] += other.bias[i];
  }
}

Mat glorot_matrix(int rows, int cols, Rng& rng) {
  double bound = std::sqrt(6.0 / (static_cast<double>(rows) + cols));
  Mat w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
  return w;
}

Network Network::init(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ConfigError("network needs at least input and output sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw ConfigError("layer sizes must be positive");
  Network net;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    DenseLayer layer;
    layer.weight = glorot_matrix(layer_sizes[i + 1], layer_sizes[i], rng);
    layer.bias = Vec::Zero(layer_sizes[i + 1]);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

Mat Network::forward(const Mat& batch) {
  if (batch.cols() != input_dim())
    throw ShapeError("forward: batch width does not match input dimension");
  inputs_.assign(layers_.size(), Mat());
  pre_.assign(layers_.size(), Mat());
  Mat x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    inputs_[i] = x;
    Mat z = (x * layers_[i].weight.transpose()).rowwise() +
            layers_[i].bias.transpose();
    pre_[i] = z;
    x = (i + 1 < layers_.size()) ? z.cwiseMax(0.0) : z;
  }
  cached_ = true;
  return x;
}

Mat Network::features(const Mat& batch) const {
  if (batch.cols() != input_dim())
    throw ShapeError("features: batch width does not match input dimension");
  Mat x = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Mat z = (x * layers_[i].weight.transpose()).rowwise() +
            layers_[i].bias.transpose();
    x = (i + 1 < layers_.size()) ? z.cwiseMax(0.0) : z;
  }
  return x;
}

NetGrads Network::backward(const Mat& feature_grad) {
  if (!cached_) throw StateError("backward called without a preceding forward");
  if (feature_grad.rows() != pre_.back().rows() ||
      feature_grad.cols() != pre_.back().cols())
    throw ShapeError("backward: gradient shape does not match features");
  NetGrads grads;
  grads.weight.resize(layers_.size());
  grads.bias.resize(layers_.size());
  Mat d = feature_grad;
  for (std::size_t ri = layers_.size(); ri-- > 0;) {
    if (ri + 1 < layers_.size())
      d = d.cwiseProduct((pre_[ri].array() > 0.0).cast<double>().matrix());
    grads.weight[ri] = d.transpose() * inputs_[ri];
    grads.bias[ri] = d.colwise().sum().transpose();
    if (ri > 0) d = d * layers_[ri].weight;
  }
  cached_ = false;
  inputs_.clear();
  pre_.clear();
  return grads;
}

void Network::apply(const NetGrads& grads, double lr) {
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (grads.weight.size() != layers_.size())
    throw ShapeError("apply: gradient layer count mismatch");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (grads.weight[i].rows() != layers_[i].weight.rows() ||
        grads.weight[i].cols() != layers_[i].weight.cols())
      throw ShapeError("apply: gradient shape mismatch");
    layers_[i].weight -= lr * grads.weight[i];
    layers_[i].bias -= lr * grads.bias[i];
  }
}

NetGrads Network::zero_grads() const {
  NetGrads grads;
  for (const DenseLayer& layer : layers_) {
    grads.weight.push_back(Mat::Zero(layer.weight.rows(), layer.weight.cols()));
    grads.bias.push_back(Vec::Zero(layer.bias.size()));
  }
  return grads;
}

int Network::input_dim() const {
  if (layers_.empty()) throw StateError("network is uninitialized");
  return static_cast<int>(layers_.front().weight.cols());
}

int Network::feature_dim() const {
  if (layers_.empty()) throw StateError("network is uninitialized");
  return static_cast<int>(layers_.back().weight.rows());
}

bool Network::finite() const {
  for (const DenseLayer& layer : layers_)
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  return true;
}

}  // namespace mdmt
