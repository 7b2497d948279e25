#include <doctest.h>

#include <set>

#include "mdmt/errors.hpp"
#include "mdmt/memory.hpp"

using namespace mdmt;

namespace {

LabeledDataset tiny_dataset(int n, int dim, int num_classes, std::uint64_t seed) {
  LabeledDataset data;
  data.inputs = Mat(n, dim);
  Rng rng(seed);
  for (int i = 0; i < data.inputs.size(); ++i)
    data.inputs.data()[i] = rng.uniform01();
  for (int i = 0; i < n; ++i)
    data.labels.push_back(static_cast<int>(rng.uniform_index(num_classes)));
  data.num_classes = num_classes;
  return data;
}

}  // namespace

TEST_CASE("store keeps at most the quota and tags the task id") {
  Network net = Network::init({4, 3}, 1);
  LabeledDataset data = tiny_dataset(20, 4, 5, 2);
  MemoryStore mem;
  mem.store(data, net, 8, 77);
  mem.store(data, net, 8, 78);
  CHECK(mem.tasks().size() == 2);
  CHECK(mem.tasks()[0].task_id == 0);
  CHECK(mem.tasks()[1].task_id == 1);
  CHECK(mem.tasks()[0].inputs.rows() == 8);
  CHECK(mem.tasks()[0].labels.size() == 8);
  CHECK(mem.total_entries() == 16);
}

TEST_CASE("store is deterministic in the seed") {
  Network net = Network::init({4, 3}, 1);
  LabeledDataset data = tiny_dataset(30, 4, 5, 3);
  MemoryStore a, b, c;
  a.store(data, net, 10, 55);
  b.store(data, net, 10, 55);
  c.store(data, net, 10, 56);
  CHECK((a.tasks()[0].inputs - b.tasks()[0].inputs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.tasks()[0].labels == b.tasks()[0].labels);
  CHECK((a.tasks()[0].inputs - c.tasks()[0].inputs).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("stored rows are distinct dataset rows with aligned labels") {
  Network net = Network::init({3, 2}, 9);
  LabeledDataset data = tiny_dataset(12, 3, 4, 4);
  MemoryStore mem;
  mem.store(data, net, 6, 21);
  const TaskMemory& slot = mem.tasks()[0];
  std::set<int> seen_rows;
  for (int i = 0; i < 6; ++i) {
    bool matched = false;
    for (int r = 0; r < 12; ++r) {
      if ((slot.inputs.row(i) - data.inputs.row(r)).cwiseAbs().maxCoeff() == 0.0 &&
          slot.labels[static_cast<std::size_t>(i)] == data.labels[static_cast<std::size_t>(r)] &&
          seen_rows.insert(r).second) {
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("representations are the trunk features at store time") {
  Network net = Network::init({4, 6, 3}, 13);
  LabeledDataset data = tiny_dataset(10, 4, 2, 5);
  MemoryStore mem;
  mem.store(data, net, 4, 31);
  const TaskMemory& slot = mem.tasks()[0];
  Mat expect = net.features(slot.inputs);
  CHECK((slot.representations - expect).cwiseAbs().maxCoeff() < 1e-12);

  // later trunk updates must not disturb the anchors
  Mat snapshot = slot.representations;
  net.layers()[0].weight.setZero();
  CHECK((mem.tasks()[0].representations - snapshot).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quota above the dataset size stores everything") {
  Network net = Network::init({3, 2}, 2);
  LabeledDataset data = tiny_dataset(5, 3, 2, 6);
  MemoryStore mem;
  mem.store(data, net, 40, 11);
  CHECK(mem.tasks()[0].inputs.rows() == 5);
  CHECK(mem.total_entries() == 5);
}

TEST_CASE("sample draws aligned rows from the stored union") {
  Network net = Network::init({3, 2}, 3);
  MemoryStore mem;
  mem.store(tiny_dataset(10, 3, 4, 7), net, 5, 41);
  mem.store(tiny_dataset(10, 3, 4, 8), net, 5, 42);

  Rng rng(99);
  RefBatch batch = mem.sample(12, rng);
  CHECK(batch.inputs.rows() == 12);
  CHECK(batch.labels.size() == 12);
  CHECK(batch.task_ids.size() == 12);
  CHECK(batch.representations.rows() == 12);
  for (int i = 0; i < 12; ++i) {
    int t = batch.task_ids[static_cast<std::size_t>(i)];
    CHECK(t >= 0);
    CHECK(t <= 1);
    const TaskMemory& slot = mem.tasks()[static_cast<std::size_t>(t)];
    bool matched = false;
    for (int r = 0; r < slot.inputs.rows(); ++r) {
      if ((batch.inputs.row(i) - slot.inputs.row(r)).cwiseAbs().maxCoeff() == 0.0 &&
          (batch.representations.row(i) - slot.representations.row(r)).cwiseAbs().maxCoeff() == 0.0 &&
          batch.labels[static_cast<std::size_t>(i)] == slot.labels[static_cast<std::size_t>(r)]) {
        matched = true;
        break;
      }
    }
    CHECK(matched);
  }
}

TEST_CASE("sampling the union is uniform across tasks") {
  Network net = Network::init({3, 2}, 4);
  MemoryStore mem;
  mem.store(tiny_dataset(20, 3, 4, 9), net, 10, 51);
  mem.store(tiny_dataset(20, 3, 4, 10), net, 10, 52);

  Rng rng(123);
  int from_first = 0;
  const int draws = 10000;
  RefBatch batch = mem.sample(draws, rng);
  for (int t : batch.task_ids)
    if (t == 0) ++from_first;
  double frac = static_cast<double>(from_first) / draws;
  CHECK(frac > 0.48);
  CHECK(frac < 0.52);
}

TEST_CASE("a single stored entry repeats under replacement") {
  Network net = Network::init({3, 2}, 5);
  MemoryStore mem;
  mem.store(tiny_dataset(1, 3, 2, 11), net, 1, 61);
  Rng rng(7);
  RefBatch batch = mem.sample(4, rng);
  CHECK(batch.inputs.rows() == 4);
  for (int i = 1; i < 4; ++i)
    CHECK((batch.inputs.row(i) - batch.inputs.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("memory misuse is rejected") {
  Network net = Network::init({3, 2}, 6);
  MemoryStore mem;
  Rng rng(1);
  CHECK_THROWS_AS(mem.sample(4, rng), StateError);
  LabeledDataset data = tiny_dataset(6, 3, 2, 12);
  CHECK_THROWS_AS(mem.store(data, net, 0, 71), ConfigError);
  mem.store(data, net, 3, 72);
  CHECK_THROWS_AS(mem.sample(0, rng), ConfigError);
}
