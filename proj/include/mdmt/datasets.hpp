#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdmt/types.hpp"

namespace mdmt {

struct LabeledDataset {
  Mat inputs;  // n x dim, values in [0, 1]
  std::vector<int> labels;
  int num_classes = 0;
};

struct DatasetPair {
  LabeledDataset train;
  LabeledDataset test;
};

struct TaskData {
  LabeledDataset train;
  LabeledDataset test;
};

using TaskSequence = std::vector<TaskData>;

// Isotropic Gaussian blobs around random unit-norm class centers, clipped to
// [0, 1]. Centers are sparse (about a quarter of the dimensions active) so
// that permuted variants of the same dataset collide and interfere. Train and
// test splits are drawn independently from the same centers.
DatasetPair gen_synthetic(int num_classes, int dim, int train_per_class,
                          int test_per_class, double spread,
                          std::uint64_t seed);

// The per-task pixel permutations behind gen_permuted_tasks; the first is
// the identity.
std::vector<std::vector<int>> task_permutations(int dim, int num_tasks,
                                                std::uint64_t seed);

// Task t applies one fixed pixel permutation to every input; task 1 is the
// identity. Labels are unchanged.
TaskSequence gen_permuted_tasks(const DatasetPair& base, int num_tasks,
                                std::uint64_t seed);

// Partitions classes into disjoint groups of classes_per_task; labels are
// remapped to [0, classes_per_task) preserving the ascending order of the
// source class ids. sequential=false shuffles the class order first.
TaskSequence gen_split_tasks(const DatasetPair& base, int classes_per_task,
                             std::uint64_t seed, bool sequential = false);

// IDX pair loader (big-endian magic 0x00000803 images / 0x00000801 labels);
// pixel bytes are scaled to [0, 1] by /255.
LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path);

// Writes one dataset as CSV rows "label,v1,...,vdim" with full double
// precision; used by the data generation command.
void save_dataset_csv(const LabeledDataset& data, const std::string& path);

}  // namespace mdmt
