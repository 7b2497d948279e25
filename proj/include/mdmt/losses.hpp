#pragma once

#include <cstdint>
#include <vector>

#include "mdmt/types.hpp"

namespace mdmt {

struct TaskHead {
  int task_id = 0;
  Mat weight;  // feature_dim x classes, one column per class
  Vec bias;    // classes; used by the affine losses, ignored by the angular one
};

struct MarginConfig {
  double m_c = 0.0;  // class-level angular margin, radians
  double m_t = 0.0;  // task-level angular margin, radians
  double s = 1.0;    // logit scale applied after normalization
};

struct LossResult {
  double value = 0.0;
  Mat feature_grad;                    // n x feature_dim
  std::vector<Mat> head_weight_grads;  // one per head passed in
  std::vector<Vec> head_bias_grads;
};

// Single-head affine softmax cross-entropy (the plain sequential baseline).
LossResult softmax_ce_loss(const Mat& features, const std::vector<int>& labels,
                           const TaskHead& head);

// Cross-domain softmax: raw affine logits of every seen task's head share one
// softmax denominator; the loss is the mean negative log-probability of the
// target class under that global normalization. Gradients cover the features
// and every head.
LossResult cds_loss(const Mat& features, const std::vector<int>& labels,
                    const std::vector<TaskHead>& heads, int task);

// Two-level angular margin loss. Features and head columns are L2-normalized
// per call (stored parameters stay unnormalized); logits are s * cos(theta)
// with the target angle offset by m_c + m_t and same-task non-target angles
// by m_t; other tasks' logits carry no margin. Gradients include the
// normalization Jacobian and flow to the features and every seen head.
LossResult tam_loss(const Mat& features, const std::vector<int>& labels,
                    const std::vector<TaskHead>& heads, int task,
                    const MarginConfig& cfg);

// Episodic distillation: mean squared difference between current trunk
// features and their stored anchors, averaged over samples and dimensions.
LossResult ed_loss(const Mat& current, const Mat& stored);

// Fresh classifier head drawn with the same scheme as the trunk.
TaskHead init_head(int task_id, int feature_dim, int classes,
                   std::uint64_t seed);

}  // namespace mdmt
