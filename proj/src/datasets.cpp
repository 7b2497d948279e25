#include "mdmt/datasets.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mdmt/errors.hpp"
#include "mdmt/rng.hpp"

namespace mdmt {

namespace {

LabeledDataset draw_blobs(const Mat& centers, int per_class, double spread,
                          Rng& rng) {
  const int classes = static_cast<int>(centers.rows());
  const int dim = static_cast<int>(centers.cols());
  LabeledDataset out;
  out.num_classes = classes;
  out.inputs = Mat(static_cast<Eigen::Index>(classes) * per_class, dim);
  out.labels.reserve(static_cast<std::size_t>(classes) * per_class);
  Eigen::Index row = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++row) {
      for (int j = 0; j < dim; ++j) {
        double v = centers(c, j) + spread * rng.gaussian();
        out.inputs(row, j) = std::clamp(v, 0.0, 1.0);
      }
      out.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace

DatasetPair gen_synthetic(int num_classes, int dim, int train_per_class,
                          int test_per_class, double spread,
                          std::uint64_t seed) {
  if (num_classes <= 0 || dim <= 0 || train_per_class <= 0 ||
      test_per_class <= 0 || spread < 0.0)
    throw ConfigError("gen_synthetic: all parameters must be positive");
  Rng rng(seed);
  const int active = std::max(1, dim / 4);
  Mat centers = Mat::Zero(num_classes, dim);
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> dims = rng.sample_without_replacement(dim, active);
    for (int j : dims) centers(c, j) = rng.uniform(0.3, 1.0);
    centers.row(c) /= centers.row(c).norm();
  }
  DatasetPair pair;
  pair.train = draw_blobs(centers, train_per_class, spread, rng);
  pair.test = draw_blobs(centers, test_per_class, spread, rng);
  return pair;
}

std::vector<std::vector<int>> task_permutations(int dim, int num_tasks,
                                                std::uint64_t seed) {
  if (num_tasks < 1) throw ConfigError("task_permutations: need >= 1 task");
  std::vector<std::vector<int>> perms;
  perms.reserve(static_cast<std::size_t>(num_tasks));
  Rng rng(seed);
  for (int t = 0; t < num_tasks; ++t) {
    if (t == 0) {
      std::vector<int> identity(static_cast<std::size_t>(dim));
      std::iota(identity.begin(), identity.end(), 0);
      perms.push_back(std::move(identity));
    } else {
      perms.push_back(rng.permutation(dim));
    }
  }
  return perms;
}

TaskSequence gen_permuted_tasks(const DatasetPair& base, int num_tasks,
                                std::uint64_t seed) {
  const int dim = static_cast<int>(base.train.inputs.cols());
  TaskSequence tasks;
  tasks.reserve(static_cast<std::size_t>(num_tasks));
  for (const std::vector<int>& perm : task_permutations(dim, num_tasks, seed)) {
    TaskData task;
    for (auto [src, dst] : {std::pair{&base.train, &task.train},
                            std::pair{&base.test, &task.test}}) {
      dst->num_classes = src->num_classes;
      dst->labels = src->labels;
      dst->inputs = Mat(src->inputs.rows(), dim);
      for (int j = 0; j < dim; ++j)
        dst->inputs.col(j) = src->inputs.col(perm[static_cast<std::size_t>(j)]);
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}


TaskSequence gen_split_tasks(const DatasetPair& base, int classes_per_task,
                             std::uint64_t seed, bool sequential) {
  const int classes = base.train.num_classes;
  if (classes_per_task <= 0 || classes % classes_per_task != 0)
    throw ConfigError(
        "gen_split_tasks: class count must divide evenly into tasks");
  std::vector<int> order(static_cast<std::size_t>(classes));
  std::iota(order.begin(), order.end(), 0);
  if (!sequential) {
    Rng rng(seed);
    rng.shuffle(order);
  }
  const int num_tasks = classes / classes_per_task;
  TaskSequence tasks(static_cast<std::size_t>(num_tasks));
  for (int t = 0; t < num_tasks; ++t) {
    std::vector<int> group(order.begin() + t * classes_per_task,
                           order.begin() + (t + 1) * classes_per_task);
    std::sort(group.begin(), group.end());
    std::vector<int> remap(static_cast<std::size_t>(classes), -1);
    for (int j = 0; j < classes_per_task; ++j)
      remap[static_cast<std::size_t>(group[static_cast<std::size_t>(j)])] = j;
    for (auto [src, dst] :
         {std::pair{&base.train, &tasks[static_cast<std::size_t>(t)].train},
          std::pair{&base.test, &tasks[static_cast<std::size_t>(t)].test}}) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < src->inputs.rows(); ++i)
        if (remap[static_cast<std::size_t>(src->labels[static_cast<std::size_t>(
                i)])] >= 0)
          rows.push_back(i);
      dst->num_classes = classes_per_task;
      dst->inputs = Mat(static_cast<Eigen::Index>(rows.size()),
                        src->inputs.cols());
      dst->labels.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        dst->inputs.row(static_cast<Eigen::Index>(i)) = src->inputs.row(rows[i]);
        dst->labels.push_back(remap[static_cast<std::size_t>(
            src->labels[static_cast<std::size_t>(rows[i])])]);
      }
    }
  }
  return tasks;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw ParseError(path + ": truncated header");
  return (static_cast<std::uint32_t>(b[0]) << 24) |
         (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) |
         static_cast<std::uint32_t>(b[3]);
}

}  // namespace

LabeledDataset load_idx(const std::string& images_path,
                        const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw IoError("cannot open " + images_path);
  if (read_be32(img, images_path) != 0x00000803u)
    throw ParseError(images_path + ": bad image magic");
  std::uint32_t count = read_be32(img, images_path);
  std::uint64_t pixels = 1;
  std::uint32_t rows = read_be32(img, images_path);
  std::uint32_t cols = read_be32(img, images_path);
  pixels = static_cast<std::uint64_t>(rows) * cols;
  std::vector<unsigned char> raw(static_cast<std::size_t>(count) * pixels);
  img.read(reinterpret_cast<char*>(raw.data()),
           static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(img.gcount()) != raw.size())
    throw ParseError(images_path + ": truncated pixel payload");

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw IoError("cannot open " + labels_path);
  if (read_be32(lab, labels_path) != 0x00000801u)
    throw ParseError(labels_path + ": bad label magic");
  std::uint32_t label_count = read_be32(lab, labels_path);
  if (label_count != count)
    throw ParseError(labels_path + ": label count does not match image count");
  std::vector<unsigned char> raw_labels(label_count);
  lab.read(reinterpret_cast<char*>(raw_labels.data()),
           static_cast<std::streamsize>(raw_labels.size()));
  if (static_cast<std::size_t>(lab.gcount()) != raw_labels.size())
    throw ParseError(labels_path + ": truncated label payload");

  LabeledDataset out;
  out.inputs = Mat(count, static_cast<Eigen::Index>(pixels));
  for (std::uint32_t i = 0; i < count; ++i)
    for (std::uint64_t j = 0; j < pixels; ++j)
      out.inputs(i, static_cast<Eigen::Index>(j)) =
          raw[i * pixels + j] / 255.0;
  int max_label = 0;
  out.labels.reserve(label_count);
  for (unsigned char y : raw_labels) {
    out.labels.push_back(static_cast<int>(y));
    max_label = std::max(max_label, static_cast<int>(y));
  }
  out.num_classes = max_label + 1;
  return out;
}

void save_dataset_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
    out << data.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < data.inputs.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.inputs(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace mdmt
