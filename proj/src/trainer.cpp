#include "mdmt/trainer.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mdmt/errors.hpp"
#include "mdmt/rng.hpp"

namespace mdmt {

namespace {

// Stream purposes for mix_seed; runs that differ in one switch still share
// every unrelated stream.
constexpr std::uint64_t kNetInit = 1;
constexpr std::uint64_t kHeadInit = 2;
constexpr std::uint64_t kBatchOrder = 3;
constexpr std::uint64_t kMemStore = 4;
constexpr std::uint64_t kRefSample = 5;

void check_hparams(const HyperParams& hp) {
  if (hp.lr <= 0.0) throw ConfigError("lr must be positive");
  if (hp.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (hp.ref_batch_size < 0) throw ConfigError("ref_batch_size must be >= 0");
  if (hp.epochs_per_task < 1) throw ConfigError("epochs_per_task must be >= 1");
  if (hp.quota < 1) throw ConfigError("quota must be >= 1");
  if (hp.lca_beta < 0) throw ConfigError("lca_beta must be >= 0");
}

int argmax_lowest(const Eigen::RowVectorXd& row) {
  int best = 0;
  for (int j = 1; j < row.size(); ++j)
    if (row(j) > row(best)) best = j;
  return best;
}

}  // namespace

double task_accuracy(const TrainerState& state, const LabeledDataset& data,
                     int task, LossMode mode) {
  if (task < 0 || task >= static_cast<int>(state.heads.size()))
    throw StateError("task_accuracy: no head for task");
  const TaskHead& head = state.heads[static_cast<std::size_t>(task)];
  Mat features = state.net.features(data.inputs);
  Mat logits;
  if (mode == LossMode::TAM) {
    logits = Mat::Zero(features.rows(), head.weight.cols());
    Mat v = head.weight;
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      double norm = v.col(c).norm();
      if (norm > 0.0) v.col(c) /= norm;
    }
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      double norm = features.row(i).norm();
      if (norm > 0.0) logits.row(i) = features.row(i) / norm * v;
    }
  } else {
    logits = (features * head.weight).rowwise() + head.bias.transpose();
  }
  int correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    if (argmax_lowest(logits.row(i)) ==
        data.labels[static_cast<std::size_t>(i)])
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(logits.rows());
}

std::vector<double> evaluate(const TrainerState& state,
                             const std::vector<LabeledDataset>& test_sets,
                             LossMode mode) {
  std::vector<double> accs;
  accs.reserve(test_sets.size());
  for (std::size_t j = 0; j < test_sets.size(); ++j)
    accs.push_back(
        task_accuracy(state, test_sets[j], static_cast<int>(j), mode));
  return accs;
}

void train_task(TrainerState& state, const TaskData& task,
                const HyperParams& hp, int t, const StepObserver& observer) {
  check_hparams(hp);
  if (t < 0 || t >= static_cast<int>(state.heads.size()))
    throw StateError("train_task: head for task t must exist");
  const int n = static_cast<int>(task.train.inputs.rows());
  const int ref_bs = hp.ref_batch_size > 0 ? hp.ref_batch_size : hp.batch_size;
  const int beta = hp.lca_beta;

  if (state.bshot.rows() < t + 1 || state.bshot.cols() != beta + 1) {
    Mat grown = Mat::Zero(std::max<Eigen::Index>(state.bshot.rows(), t + 1),
                          beta + 1);
    state.bshot = grown;
  }

  Rng order_rng(mix_seed(hp.seed, kBatchOrder, static_cast<std::uint64_t>(t)));
  Rng ref_rng(mix_seed(hp.seed, kRefSample, static_cast<std::uint64_t>(t)));

  auto mode_loss = [&](const Mat& features, const std::vector<int>& labels,
                       int k) -> LossResult {
    switch (hp.loss_mode) {
      case LossMode::TAM:
        return tam_loss(features, labels, state.heads, k, hp.margin);
      case LossMode::CDS_RAW:
        return cds_loss(features, labels, state.heads, k);
      case LossMode::VANILLA:
        return softmax_ce_loss(features, labels,
                               state.heads[static_cast<std::size_t>(k)]);
    }
    throw ConfigError("unknown loss mode");
  };

  state.bshot(t, 0) = task_accuracy(state, task.test, t, hp.loss_mode);
  int updates = 0;

  const bool replay = hp.loss_mode != LossMode::VANILLA && !state.memory.empty();
  const std::size_t num_heads = state.heads.size();

  for (int epoch = 0; epoch < hp.epochs_per_task; ++epoch) {
    std::vector<int> order = order_rng.permutation(n);
    for (int start = 0, step = 0; start < n; start += hp.batch_size, ++step) {
      const int bs = std::min(hp.batch_size, n - start);
      Mat batch(bs, task.train.inputs.cols());
      std::vector<int> labels(static_cast<std::size_t>(bs));
      for (int i = 0; i < bs; ++i) {
        batch.row(i) = task.train.inputs.row(order[static_cast<std::size_t>(
            start + i)]);
        labels[static_cast<std::size_t>(i)] =
            task.train.labels[static_cast<std::size_t>(
                order[static_cast<std::size_t>(start + i)])];
      }

      std::vector<Mat> head_w_grads;
      std::vector<Vec> head_b_grads;
      head_w_grads.reserve(num_heads);
      head_b_grads.reserve(num_heads);
      for (const TaskHead& head : state.heads) {
        head_w_grads.push_back(
            Mat::Zero(head.weight.rows(), head.weight.cols()));
        head_b_grads.push_back(Vec::Zero(head.bias.size()));
      }

      Mat features = state.net.forward(batch);
      LossResult cur = mode_loss(features, labels, t);
      if (!std::isfinite(cur.value))
        throw NumericError("non-finite loss (task " + std::to_string(t) +
                           ", epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(step) + ")");
      NetGrads g = state.net.backward(cur.feature_grad);
      if (hp.loss_mode == LossMode::VANILLA) {
        head_w_grads[static_cast<std::size_t>(t)] += cur.head_weight_grads[0];
        head_b_grads[static_cast<std::size_t>(t)] += cur.head_bias_grads[0];
      } else {
        for (std::size_t q = 0; q < num_heads; ++q) {
          head_w_grads[q] += cur.head_weight_grads[q];
          head_b_grads[q] += cur.head_bias_grads[q];
        }
      }

      NetGrads g_ref;
      double ref_value = 0.0;
      double ed_value = 0.0;
      if (replay) {
        RefBatch ref = state.memory.sample(ref_bs, ref_rng);
        Mat ref_features = state.net.forward(ref.inputs);
        Mat ref_grad = Mat::Zero(ref_features.rows(), ref_features.cols());

        std::map<int, std::vector<int>> groups;
        for (std::size_t i = 0; i < ref.task_ids.size(); ++i)
          groups[ref.task_ids[i]].push_back(static_cast<int>(i));
        const double k_present = static_cast<double>(groups.size());

        for (const auto& [k, rows] : groups) {
          Mat sub(static_cast<Eigen::Index>(rows.size()), ref_features.cols());
          std::vector<int> sub_labels(rows.size());
          for (std::size_t i = 0; i < rows.size(); ++i) {
            sub.row(static_cast<Eigen::Index>(i)) =
                ref_features.row(rows[i]);
            sub_labels[i] = ref.labels[static_cast<std::size_t>(rows[i])];
          }
          LossResult part = mode_loss(sub, sub_labels, k);
          ref_value += part.value / k_present;
          for (std::size_t i = 0; i < rows.size(); ++i)
            ref_grad.row(rows[i]) +=
                part.feature_grad.row(static_cast<Eigen::Index>(i)) /
                k_present;
          for (std::size_t q = 0; q < num_heads; ++q) {
            head_w_grads[q] += part.head_weight_grads[q] / k_present;
            head_b_grads[q] += part.head_bias_grads[q] / k_present;
          }
        }

        if (hp.use_ed) {
          LossResult ed = ed_loss(ref_features, ref.representations);
          ed_value = ed.value;
          ref_grad += ed.feature_grad;
        }
        if (!std::isfinite(ref_value) || !std::isfinite(ed_value))
          throw NumericError("non-finite replay loss (task " +
                             std::to_string(t) + ", epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(step) + ")");
        g_ref = state.net.backward(ref_grad);
      }

      NetGrads applied = g;
      if (replay) applied.add(g_ref);

      if (observer) {
        StepRecord record;
        record.task = t;
        record.epoch = epoch;
        record.step = step;
        record.batch_loss = cur.value;
        record.ref_loss = ref_value;
        record.ed_value = ed_value;
        record.current = &g;
        record.reference = replay ? &g_ref : nullptr;
        record.applied = &applied;
        observer(record);
      }

      state.net.apply(applied, hp.lr);
      for (std::size_t q = 0; q < num_heads; ++q) {
        state.heads[q].weight -= hp.lr * head_w_grads[q];
        state.heads[q].bias -= hp.lr * head_b_grads[q];
      }
      if (!state.net.finite())
        throw NumericError("non-finite parameters after update (task " +
                           std::to_string(t) + ")");

      ++updates;
      if (updates <= beta)
        state.bshot(t, updates) = task_accuracy(state, task.test, t,
                                                hp.loss_mode);
    }
  }

  // Short tasks hold their last measured value on the remaining b points.
  for (int b = updates + 1; b <= beta; ++b)
    state.bshot(t, b) = state.bshot(t, std::max(0, updates));
}

TrainResult train_sequence(const TaskSequence& tasks,
                           const std::vector<int>& trunk_sizes,
                           const HyperParams& hp, const StepObserver& observer,
                           TrainerState* out_state) {
  check_hparams(hp);
  if (tasks.empty()) throw ConfigError("train_sequence: need >= 1 task");
  const int input_dim = static_cast<int>(tasks.front().train.inputs.cols());
  for (const TaskData& task : tasks)
    if (task.train.inputs.cols() != input_dim ||
        task.test.inputs.cols() != input_dim)
      throw ConfigError("train_sequence: tasks disagree on input dimension");
  if (trunk_sizes.empty())
    throw ConfigError("train_sequence: trunk needs at least one layer size");

  const int T = static_cast<int>(tasks.size());
  TrainerState state;
  std::vector<int> layer_sizes;
  layer_sizes.push_back(input_dim);
  layer_sizes.insert(layer_sizes.end(), trunk_sizes.begin(), trunk_sizes.end());
  state.net = Network::init(layer_sizes, mix_seed(hp.seed, kNetInit, 0));
  state.acc_matrix = Mat::Zero(T, T);
  state.bshot = Mat::Zero(T, hp.lca_beta + 1);

  for (int t = 0; t < T; ++t) {
    const TaskData& task = tasks[static_cast<std::size_t>(t)];
    state.heads.push_back(init_head(
        t, state.net.feature_dim(), task.train.num_classes,
        mix_seed(hp.seed, kHeadInit, static_cast<std::uint64_t>(t))));
    train_task(state, task, hp, t, observer);
    state.memory.store(task.train, state.net, hp.quota,
                       mix_seed(hp.seed, kMemStore,
                                static_cast<std::uint64_t>(t)));
    for (int j = 0; j <= t; ++j)
      state.acc_matrix(t, j) = task_accuracy(
          state, tasks[static_cast<std::size_t>(j)].test, j, hp.loss_mode);
    state.tasks_seen = t + 1;
  }

  TrainResult result{state.acc_matrix, state.bshot};
  if (out_state) *out_state = std::move(state);
  return result;
}

}  // namespace mdmt
