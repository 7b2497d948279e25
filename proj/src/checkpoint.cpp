#include "mdmt/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mdmt/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace mdmt {

namespace {

constexpr char kMagic[8] = {'M', 'D', 'M', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_mat(std::ostream& out, const Mat& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

void write_vec(std::ostream& out, const Vec& v) {
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v(i);
    out.write(reinterpret_cast<const char*>(&x), sizeof(x));
  }
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ParseError(path + ": truncated checkpoint");
  return v;
}

std::int32_t read_i32(std::istream& in, const std::string& path) {
  std::int32_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ParseError(path + ": truncated checkpoint");
  return v;
}

Mat read_mat(std::istream& in, const std::string& path) {
  std::uint32_t rows = read_u32(in, path);
  std::uint32_t cols = read_u32(in, path);
  Mat m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw ParseError(path + ": truncated checkpoint");
      m(i, j) = v;
    }
  return m;
}

Vec read_vec(std::istream& in, const std::string& path) {
  std::uint32_t n = read_u32(in, path);
  Vec v(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    double x;
    in.read(reinterpret_cast<char*>(&x), sizeof(x));
    if (!in) throw ParseError(path + ": truncated checkpoint");
    v(i) = x;
  }
  return v;
}

}  // namespace

void save_checkpoint(const TrainerState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);

  write_u32(out, static_cast<std::uint32_t>(state.net.layers().size()));
  for (const DenseLayer& layer : state.net.layers()) {
    write_mat(out, layer.weight);
    write_vec(out, layer.bias);
  }

  write_u32(out, static_cast<std::uint32_t>(state.heads.size()));
  for (const TaskHead& head : state.heads) {
    write_i32(out, head.task_id);
    write_mat(out, head.weight);
    write_vec(out, head.bias);
  }

  write_u32(out, static_cast<std::uint32_t>(state.memory.tasks().size()));
  for (const TaskMemory& mem : state.memory.tasks()) {
    write_i32(out, mem.task_id);
    write_mat(out, mem.inputs);
    write_u32(out, static_cast<std::uint32_t>(mem.labels.size()));
    for (int y : mem.labels) write_i32(out, y);
    write_mat(out, mem.representations);
  }

  write_mat(out, state.acc_matrix);
  write_mat(out, state.bshot);
  write_u32(out, static_cast<std::uint32_t>(state.tasks_seen));
  if (!out) throw IoError("failed writing " + path);
}

TrainerState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError(path + ": not a checkpoint file");
  std::uint32_t version = read_u32(in, path);
  if (version != kVersion)
    throw ParseError(path + ": unsupported checkpoint version " +
                     std::to_string(version));

  TrainerState state;
  std::uint32_t layer_count = read_u32(in, path);
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    DenseLayer layer;
    layer.weight = read_mat(in, path);
    layer.bias = read_vec(in, path);
    state.net.layers().push_back(std::move(layer));
  }

  std::uint32_t head_count = read_u32(in, path);
  for (std::uint32_t i = 0; i < head_count; ++i) {
    TaskHead head;
    head.task_id = read_i32(in, path);
    head.weight = read_mat(in, path);
    head.bias = read_vec(in, path);
    state.heads.push_back(std::move(head));
  }

  std::uint32_t mem_count = read_u32(in, path);
  for (std::uint32_t i = 0; i < mem_count; ++i) {
    TaskMemory mem;
    mem.task_id = read_i32(in, path);
    mem.inputs = read_mat(in, path);
    std::uint32_t label_count = read_u32(in, path);
    mem.labels.reserve(label_count);
    for (std::uint32_t j = 0; j < label_count; ++j)
      mem.labels.push_back(read_i32(in, path));
    mem.representations = read_mat(in, path);
    state.memory.tasks().push_back(std::move(mem));
  }

  state.acc_matrix = read_mat(in, path);
  state.bshot = read_mat(in, path);
  state.tasks_seen = static_cast<int>(read_u32(in, path));
  return state;
}

}  // namespace mdmt
