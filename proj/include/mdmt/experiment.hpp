#pragma once

#include <optional>
#include <string>

#include "mdmt/config.hpp"
#include "mdmt/metrics.hpp"
#include "mdmt/trainer.hpp"

namespace mdmt {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> beta;
  std::optional<LossMode> loss_mode;
  bool no_ed = false;
};

struct MetricsReport {
  int tasks = 0;
  double a_final = 0.0;
  std::vector<double> a_trend;  // A_1 .. A_T
  bool has_forgetting = false;
  double forgetting_final = 0.0;
  bool has_ltr = false;
  double ltr_value = 0.0;
  bool has_lca = false;
  double lca_value = 0.0;
  int beta = 0;
};

struct TrainOutcome {
  Mat matrix;  // full precision
  Mat bshot;
  MetricsReport report;  // computed at the emitted 4-decimal precision
  ExperimentConfig resolved;
};

// Materializes the configured task sequence.
TaskSequence build_tasks(const DataConfig& data);

ExperimentConfig apply_overrides(ExperimentConfig config,
                                 const CliOverrides& overrides);

// Trains the configured sequence. The report is computed from the matrix and
// curve quantized to the 4-decimal precision of the emitted files, so a later
// eval-matrix pass over those files reproduces it exactly.
TrainOutcome run_experiment(const ExperimentConfig& config,
                            const StepObserver& observer = {},
                            TrainerState* out_state = nullptr);

MetricsReport matrix_report(const Mat& matrix, const Mat* bshot, int beta);

// JSON document with 4-decimal values; F_T/LTR are null below two tasks.
std::string format_report(const MetricsReport& report);

// curves.csv body: "kind,t,b,value" rows for the A_t trend and b-shot curve.
std::string format_curves(const MetricsReport& report, const Mat& bshot);

// Writes matrix.csv, metrics.json, curves.csv and manifest.txt into out_dir
// (created if missing).
void write_train_outputs(const TrainOutcome& outcome,
                         const std::string& out_dir);

// Command fronts used by the CLI; they print to the standard streams and
// return the process exit code (0 ok, 2 config/parse, 3 numeric).
int cmd_train(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides);
int cmd_eval_matrix(const std::string& matrix_path, int beta,
                    const std::string& curve_path);
int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides);

}  // namespace mdmt
