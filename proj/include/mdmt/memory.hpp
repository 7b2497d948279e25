#pragma once

#include <cstdint>
#include <vector>

#include "mdmt/datasets.hpp"
#include "mdmt/network.hpp"
#include "mdmt/rng.hpp"
#include "mdmt/types.hpp"

namespace mdmt {

// One trained task's slice of the episodic memory. Representations are the
// trunk features captured at store time; they are the distillation anchors
// and never change after insertion.
struct TaskMemory {
  int task_id = 0;
  Mat inputs;  // m x input_dim
  std::vector<int> labels;
  Mat representations;  // m x feature_dim
};

struct RefBatch {
  Mat inputs;
  std::vector<int> labels;
  std::vector<int> task_ids;
  Mat representations;
};

class MemoryStore {
 public:
  // Draws quota samples uniformly without replacement (the whole dataset,
  // with a warning on stderr, when it is smaller than the quota) and stores
  // them with their current trunk representations. Called once per task,
  // right after that task finishes training.
  void store(const LabeledDataset& train, const Network& net, int quota,
             std::uint64_t seed);

  // Uniform sample with replacement over the union of every stored task.
  RefBatch sample(int batch_size, Rng& rng) const;

  bool empty() const { return tasks_.empty(); }
  std::size_t total_entries() const;
  const std::vector<TaskMemory>& tasks() const { return tasks_; }
  std::vector<TaskMemory>& tasks() { return tasks_; }

 private:
  std::vector<TaskMemory> tasks_;
};

}  // namespace mdmt
