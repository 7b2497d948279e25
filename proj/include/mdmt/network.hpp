#pragma once

#include <cstdint>
#include <vector>

#include "mdmt/rng.hpp"
#include "mdmt/types.hpp"

namespace mdmt {

struct DenseLayer {
  Mat weight;  // out x in
  Vec bias;    // out
};

// Per-layer parameter gradients, shapes mirroring the owning network.
struct NetGrads {
  std::vector<Mat> weight;
  std::vector<Vec> bias;

  void add(const NetGrads& other);
};

// Uniform Glorot-style draw: entries in +-sqrt(6 / (fan_in + fan_out)),
// filled row by row so the stream layout is fixed.
Mat glorot_matrix(int rows, int cols, Rng& rng);

// Dense feed-forward trunk. Rectified-linear between layers; the final
// layer output (the feature representation) stays linear so features can
// reach the whole sphere after normalization.
class Network {
 public:
  Network() = default;

  // layer_sizes = [input, hidden..., feature]; biases start at zero.
  static Network init(const std::vector<int>& layer_sizes, std::uint64_t seed);

  // Forward pass that caches activations for a following backward().
  Mat forward(const Mat& batch);

  // Cache-free forward pass for evaluation and representation storage.
  Mat features(const Mat& batch) const;

  // Gradients of the upstream scalar w.r.t. every parameter, given the
  // gradient w.r.t. the features of the last forward() batch.
  NetGrads backward(const Mat& feature_grad);

  void apply(const NetGrads& grads, double lr);

  NetGrads zero_grads() const;

  int input_dim() const;
  int feature_dim() const;
  bool finite() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

 private:
  std::vector<DenseLayer> layers_;
  std::vector<Mat> inputs_;  // per-layer cached inputs
  std::vector<Mat> pre_;     // per-layer cached preactivations
  bool cached_ = false;
};

}  // namespace mdmt
