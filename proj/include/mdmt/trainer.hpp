#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mdmt/datasets.hpp"
#include "mdmt/losses.hpp"
#include "mdmt/memory.hpp"
#include "mdmt/network.hpp"
#include "mdmt/types.hpp"

namespace mdmt {

enum class LossMode { TAM, CDS_RAW, VANILLA };

struct HyperParams {
  MarginConfig margin{0.1, 0.1, 16.0};
  double lr = 0.1;
  int batch_size = 10;
  int ref_batch_size = 0;  // 0 means "same as batch_size"
  int quota = 25;
  int epochs_per_task = 1;
  bool use_ed = true;
  LossMode loss_mode = LossMode::TAM;
  std::uint64_t seed = 1;
  int lca_beta = 10;
};

// Snapshot handed to a step observer while its pointers are valid (during
// the callback only). reference is null on steps without replay.
struct StepRecord {
  int task = 0;
  int epoch = 0;
  int step = 0;
  double batch_loss = 0.0;
  double ref_loss = 0.0;
  double ed_value = 0.0;
  const NetGrads* current = nullptr;
  const NetGrads* reference = nullptr;
  const NetGrads* applied = nullptr;
};
using StepObserver = std::function<void(const StepRecord&)>;

struct TrainerState {
  Network net;
  std::vector<TaskHead> heads;
  MemoryStore memory;
  Mat acc_matrix;  // T x T, row t written once, after task t finishes
  Mat bshot;       // T x (lca_beta + 1) b-shot accuracies a_{t,b,t}
  int tasks_seen = 0;
};

struct TrainResult {
  Mat matrix;
  Mat bshot;
};

// Accuracy of one task's head on one dataset with margin-free logits:
// cosine logits under TAM, affine logits otherwise. Ties resolve to the
// lowest class index.
double task_accuracy(const TrainerState& state, const LabeledDataset& data,
                     int task, LossMode mode);

// Accuracy over every seen task's test set (task identity given at eval).
std::vector<double> evaluate(const TrainerState& state,
                             const std::vector<LabeledDataset>& test_sets,
                             LossMode mode);

// One task's pass of the sequential loop: minibatch SGD on the selected
// loss; from the second task on (non-VANILLA modes) each step adds the
// replay gradient of a memory reference batch, grouped per source task,
// plus the distillation gradient when use_ed is set. Head t must already
// exist; b-shot accuracies are recorded into state.bshot row t.
void train_task(TrainerState& state, const TaskData& task,
                const HyperParams& hp, int t, const StepObserver& observer = {});

// Full sequence: per task, train, store memory, then record accuracy row t.
TrainResult train_sequence(const TaskSequence& tasks,
                           const std::vector<int>& trunk_sizes,
                           const HyperParams& hp,
                           const StepObserver& observer = {},
                           TrainerState* out_state = nullptr);

}  // namespace mdmt
