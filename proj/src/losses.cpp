#include "mdmt/losses.hpp"

#include <cmath>
#include <utility>

#include "mdmt/errors.hpp"
#include "mdmt/network.hpp"

namespace mdmt {

namespace {

constexpr double kCosEps = 1e-7;

void check_labels(const std::vector<int>& labels, int classes) {
  for (int y : labels)
    if (y < 0 || y >= classes) throw InputError("label out of range");
}

// Mean negative log-softmax of the target logit; dZ = (p - onehot) / n.
std::pair<double, Mat> softmax_nll(const Mat& logits,
                                   const std::vector<int>& targets) {
  const auto n = logits.rows();
  Mat p = logits;
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    value -= std::log(p(i, targets[static_cast<std::size_t>(i)]));
  value /= static_cast<double>(n);
  Mat dz = p;
  for (Eigen::Index i = 0; i < n; ++i)
    dz(i, targets[static_cast<std::size_t>(i)]) -= 1.0;
  dz /= static_cast<double>(n);
  return {value, std::move(dz)};
}

// cos(theta + m) from cos(theta), with the derivative w.r.t. the raw cosine.
// m == 0 short-circuits to the identity so margin-free calls stay exact.
std::pair<double, double> margined_cos(double c_raw, double m) {
  if (m == 0.0) return {c_raw, 1.0};
  double c = std::min(std::max(c_raw, -1.0 + kCosEps), 1.0 - kCosEps);
  double sin_theta = std::sqrt(1.0 - c * c);
  double value = c * std::cos(m) - sin_theta * std::sin(m);
  double deriv = 0.0;
  if (c_raw > -1.0 + kCosEps && c_raw < 1.0 - kCosEps)
    deriv = std::cos(m) + c / sin_theta * std::sin(m);
  return {value, deriv};
}

void check_heads(const Mat& features, const std::vector<TaskHead>& heads,
                 int task) {
  if (heads.empty()) throw StateError("no task heads");
  if (task < 0 || task >= static_cast<int>(heads.size()))
    throw StateError("task index outside seen heads");
  for (const TaskHead& head : heads)
    if (head.weight.rows() != features.cols())
      throw ShapeError("head weight rows do not match feature dimension");
}

}  // namespace

LossResult softmax_ce_loss(const Mat& features, const std::vector<int>& labels,
                           const TaskHead& head) {
  if (head.weight.rows() != features.cols())
    throw ShapeError("head weight rows do not match feature dimension");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw ShapeError("label count does not match batch size");
  check_labels(labels, static_cast<int>(head.weight.cols()));
  Mat logits = (features * head.weight).rowwise() + head.bias.transpose();
  auto [value, dz] = softmax_nll(logits, labels);
  LossResult out;
  out.value = value;
  out.feature_grad = dz * head.weight.transpose();
  out.head_weight_grads.push_back(features.transpose() * dz);
  out.head_bias_grads.push_back(dz.colwise().sum().transpose());
  return out;
}

LossResult cds_loss(const Mat& features, const std::vector<int>& labels,
                    const std::vector<TaskHead>& heads, int task) {
  check_heads(features, heads, task);
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw ShapeError("label count does not match batch size");
  check_labels(labels, static_cast<int>(heads[static_cast<std::size_t>(task)]
                                            .weight.cols()));

  std::vector<int> offsets(heads.size() + 1, 0);
  for (std::size_t q = 0; q < heads.size(); ++q)
    offsets[q + 1] = offsets[q] + static_cast<int>(heads[q].weight.cols());
  const int total = offsets.back();
  const auto n = features.rows();

  Mat logits(n, total);
  for (std::size_t q = 0; q < heads.size(); ++q)
    logits.middleCols(offsets[q], heads[q].weight.cols()) =
        (features * heads[q].weight).rowwise() + heads[q].bias.transpose();

  std::vector<int> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    targets[i] = offsets[static_cast<std::size_t>(task)] + labels[i];
  auto [value, dz] = softmax_nll(logits, targets);

  LossResult out;
  out.value = value;
  out.feature_grad = Mat::Zero(n, features.cols());
  for (std::size_t q = 0; q < heads.size(); ++q) {
    Mat dzq = dz.middleCols(offsets[q], heads[q].weight.cols());
    out.feature_grad += dzq * heads[q].weight.transpose();
    out.head_weight_grads.push_back(features.transpose() * dzq);
    out.head_bias_grads.push_back(dzq.colwise().sum().transpose());
  }
  return out;
}

LossResult tam_loss(const Mat& features, const std::vector<int>& labels,
                    const std::vector<TaskHead>& heads, int task,
                    const MarginConfig& cfg) {
  check_heads(features, heads, task);
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw ShapeError("label count does not match batch size");
  check_labels(labels, static_cast<int>(heads[static_cast<std::size_t>(task)]
                                            .weight.cols()));
  if (cfg.m_c < 0.0 || cfg.m_t < 0.0 || cfg.m_c + cfg.m_t >= M_PI)
    throw ConfigError("margins must be non-negative with m_c + m_t < pi");
  if (cfg.s <= 0.0) throw ConfigError("scale must be positive");

  const auto n = features.rows();
  const auto d = features.cols();

  Vec xnorm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xnorm(i) = features.row(i).norm();
    if (xnorm(i) == 0.0) throw NumericError("zero-norm feature");
  }
  Mat u = features.array().colwise() / xnorm.array();

  std::vector<int> offsets(heads.size() + 1, 0);
  for (std::size_t q = 0; q < heads.size(); ++q)
    offsets[q + 1] = offsets[q] + static_cast<int>(heads[q].weight.cols());
  const int total = offsets.back();

  Mat v(d, total);
  Vec wnorm(total);
  for (std::size_t q = 0; q < heads.size(); ++q) {
    for (int c = 0; c < heads[q].weight.cols(); ++c) {
      int j = offsets[q] + c;
      wnorm(j) = heads[q].weight.col(c).norm();
      if (wnorm(j) == 0.0) throw NumericError("zero-norm head column");
      v.col(j) = heads[q].weight.col(c) / wnorm(j);
    }
  }

  Mat cos_raw = u * v;

  Mat psi = cos_raw;
  Mat dpsi = Mat::Ones(n, total);
  const int lo = offsets[static_cast<std::size_t>(task)];
  const int hi = offsets[static_cast<std::size_t>(task) + 1];
  for (Eigen::Index i = 0; i < n; ++i) {
    int target = lo + labels[static_cast<std::size_t>(i)];
    for (int j = lo; j < hi; ++j) {
      double m = (j == target) ? cfg.m_c + cfg.m_t : cfg.m_t;
      auto [val, deriv] = margined_cos(cos_raw(i, j), m);
      psi(i, j) = val;
      dpsi(i, j) = deriv;
    }
  }

  std::vector<int> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) targets[i] = lo + labels[i];
  auto [value, dz] = softmax_nll(cfg.s * psi, targets);

  Mat dcos = cfg.s * dz.cwiseProduct(dpsi);

  LossResult out;
  out.value = value;
  Mat du = dcos * v.transpose();
  Vec rowdot = dcos.cwiseProduct(cos_raw).rowwise().sum();
  out.feature_grad =
      (du - rowdot.asDiagonal() * u).array().colwise() / xnorm.array();
  for (std::size_t q = 0; q < heads.size(); ++q) {
    const int cq = static_cast<int>(heads[q].weight.cols());
    Mat dcq = dcos.middleCols(offsets[q], cq);
    Mat vq = v.middleCols(offsets[q], cq);
    Vec colmix = dcq.cwiseProduct(cos_raw.middleCols(offsets[q], cq))
                     .colwise()
                     .sum()
                     .transpose();
    Mat dw = u.transpose() * dcq - vq * colmix.asDiagonal();
    for (int c = 0; c < cq; ++c) dw.col(c) /= wnorm(offsets[q] + c);
    out.head_weight_grads.push_back(std::move(dw));
    out.head_bias_grads.push_back(Vec::Zero(cq));
  }
  return out;
}

LossResult ed_loss(const Mat& current, const Mat& stored) {
  if (current.rows() != stored.rows() || current.cols() != stored.cols())
    throw ShapeError("ed_loss: shape mismatch");
  const double scale =
      static_cast<double>(current.rows()) * static_cast<double>(current.cols());
  Mat diff = current - stored;
  LossResult out;
  out.value = diff.squaredNorm() / scale;
  out.feature_grad = 2.0 / scale * diff;
  return out;
}

TaskHead init_head(int task_id, int feature_dim, int classes,
                   std::uint64_t seed) {
  if (feature_dim <= 0 || classes <= 0)
    throw ConfigError("head dimensions must be positive");
  TaskHead head;
  head.task_id = task_id;
  Rng rng(seed);
  head.weight = glorot_matrix(feature_dim, classes, rng);
  head.bias = Vec::Zero(classes);
  return head;
}

}  // namespace mdmt
