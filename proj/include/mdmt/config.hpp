#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdmt/trainer.hpp"

namespace mdmt {

struct RunConfig {
  std::string label = "run";
  bool write_checkpoint = false;
};

struct DataConfig {
  std::string kind = "synthetic";  // synthetic | permuted | split | idx
  int tasks = 1;
  int classes = 10;
  int dim = 64;
  int train_per_class = 20;
  int test_per_class = 10;
  double spread = 0.1;
  std::uint64_t seed = 1;
  int classes_per_task = 0;
  bool sequential_split = false;
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

struct ModelConfig {
  // Trunk sizes after the input layer; the input width comes from the data
  // and the last entry is the feature dimension.
  std::vector<int> layers = {64, 64};
};

struct ExperimentConfig {
  RunConfig run;
  DataConfig data;
  ModelConfig model;
  HyperParams train;
};

// Flat "key = value" lines; '#' starts a comment line; unknown keys are
// rejected with their line number. Every key has a default, so an empty
// document is a valid config.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Emits every resolved key in a fixed order; parse(emit(c)) == c. Run
// manifests are emitted through this, so a manifest is itself a config.
std::string emit_config(const ExperimentConfig& config);

const char* loss_mode_name(LossMode mode);
LossMode parse_loss_mode(const std::string& name);

}  // namespace mdmt
