#include "mdmt/memory.hpp"

#include <cstdio>
#include <numeric>

#include "mdmt/errors.hpp"

namespace mdmt {

void MemoryStore::store(const LabeledDataset& train, const Network& net,
                        int quota, std::uint64_t seed) {
  if (quota < 1) throw ConfigError("memory quota must be >= 1");
  const int n = static_cast<int>(train.inputs.rows());
  std::vector<int> picked;
  if (quota >= n) {
    if (quota > n)
      std::fprintf(stderr,
                   "warning: quota %d exceeds dataset size %d; storing all\n",
                   quota, n);
    picked.resize(static_cast<std::size_t>(n));
    std::iota(picked.begin(), picked.end(), 0);
  } else {
    Rng rng(seed);
    picked = rng.sample_without_replacement(n, quota);
  }
  TaskMemory mem;
  mem.task_id = static_cast<int>(tasks_.size());
  mem.inputs = Mat(static_cast<Eigen::Index>(picked.size()),
                   train.inputs.cols());
  mem.labels.reserve(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    mem.inputs.row(static_cast<Eigen::Index>(i)) =
        train.inputs.row(picked[i]);
    mem.labels.push_back(train.labels[static_cast<std::size_t>(picked[i])]);
  }
  mem.representations = net.features(mem.inputs);
  tasks_.push_back(std::move(mem));
}

RefBatch MemoryStore::sample(int batch_size, Rng& rng) const {
  if (tasks_.empty()) throw StateError("cannot sample from an empty memory");
  if (batch_size < 1) throw ConfigError("ref batch size must be >= 1");
  const std::size_t total = total_entries();
  RefBatch batch;
  batch.inputs = Mat(batch_size, tasks_.front().inputs.cols());
  batch.representations = Mat(batch_size, tasks_.front().representations.cols());
  batch.labels.reserve(static_cast<std::size_t>(batch_size));
  batch.task_ids.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < batch_size; ++i) {
    std::uint64_t flat = rng.uniform_index(total);
    for (const TaskMemory& mem : tasks_) {
      const auto m = static_cast<std::uint64_t>(mem.inputs.rows());
      if (flat >= m) {
        flat -= m;
        continue;
      }
      const auto row = static_cast<Eigen::Index>(flat);
      batch.inputs.row(i) = mem.inputs.row(row);
      batch.representations.row(i) = mem.representations.row(row);
      batch.labels.push_back(mem.labels[static_cast<std::size_t>(row)]);
      batch.task_ids.push_back(mem.task_id);
      break;
    }
  }
  return batch;
}

std::size_t MemoryStore::total_entries() const {
  std::size_t total = 0;
  for (const TaskMemory& mem : tasks_)
    total += static_cast<std::size_t>(mem.inputs.rows());
  return total;
}

}  // namespace mdmt
