#include "mdmt/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <tuple>

#include "mdmt/checkpoint.hpp"
#include "mdmt/errors.hpp"
#include "mdmt/rng.hpp"

namespace mdmt {

namespace {

// Data-stream purposes, disjoint use of data.seed.
constexpr std::uint64_t kSynthBase = 101;
constexpr std::uint64_t kSynthTask = 102;
constexpr std::uint64_t kPermute = 103;
constexpr std::uint64_t kSplit = 104;

double quant4(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return std::stod(buf);
}

Mat quant4(const Mat& m) {
  Mat out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = quant4(out(i, j));
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << body;
  if (!out) throw IoError("failed writing " + path);
}

DatasetPair base_pair(const DataConfig& data, std::uint64_t seed) {
  if (!data.train_images.empty()) {
    DatasetPair pair;
    pair.train = load_idx(data.train_images, data.train_labels);
    pair.test = load_idx(data.test_images, data.test_labels);
    return pair;
  }
  return gen_synthetic(data.classes, data.dim, data.train_per_class,
                       data.test_per_class, data.spread, seed);
}

}  // namespace

TaskSequence build_tasks(const DataConfig& data) {
  if (data.kind == "synthetic") {
    TaskSequence tasks;
    for (int t = 0; t < data.tasks; ++t) {
      DatasetPair pair = gen_synthetic(
          data.classes, data.dim, data.train_per_class, data.test_per_class,
          data.spread,
          mix_seed(data.seed, kSynthTask, static_cast<std::uint64_t>(t)));
      tasks.push_back(TaskData{std::move(pair.train), std::move(pair.test)});
    }
    return tasks;
  }
  if (data.kind == "permuted") {
    DatasetPair base = base_pair(data, mix_seed(data.seed, kSynthBase, 0));
    return gen_permuted_tasks(base, data.tasks,
                              mix_seed(data.seed, kPermute, 0));
  }
  if (data.kind == "split") {
    DatasetPair base = base_pair(data, mix_seed(data.seed, kSynthBase, 0));
    return gen_split_tasks(base, data.classes_per_task,
                           mix_seed(data.seed, kSplit, 0),
                           data.sequential_split);
  }
  if (data.kind == "idx") {
    DatasetPair base = base_pair(data, 0);
    return {TaskData{std::move(base.train), std::move(base.test)}};
  }
  throw ConfigError("unknown data.kind '" + data.kind + "'");
}

ExperimentConfig apply_overrides(ExperimentConfig config,
                                 const CliOverrides& overrides) {
  if (overrides.seed) config.train.seed = *overrides.seed;
  if (overrides.beta) config.train.lca_beta = *overrides.beta;
  if (overrides.loss_mode) config.train.loss_mode = *overrides.loss_mode;
  if (overrides.no_ed) config.train.use_ed = false;
  return config;
}

MetricsReport matrix_report(const Mat& matrix, const Mat* bshot, int beta) {
  MetricsReport report;
  report.tasks = static_cast<int>(matrix.rows());
  report.a_final = average_accuracy(matrix, report.tasks);
  for (int t = 1; t <= report.tasks; ++t)
    report.a_trend.push_back(average_accuracy(matrix, t));
  if (report.tasks >= 2) {
    report.has_forgetting = true;
    report.forgetting_final = forgetting(matrix, report.tasks);
    report.has_ltr = true;
    report.ltr_value = ltr(matrix);
  }
  if (bshot && bshot->cols() > 0) {
    report.has_lca = true;
    const int cols = std::min<int>(beta + 1, static_cast<int>(bshot->cols()));
    report.lca_value = lca(bshot->leftCols(cols));
    report.beta = cols - 1;
  } else {
    report.beta = beta;
  }
  return report;
}

std::string format_report(const MetricsReport& report) {
  std::ostringstream out;
  char buf[16];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  out << "{\n";
  out << "  \"T\": " << report.tasks << ",\n";
  out << "  \"A_T\": " << num(report.a_final) << ",\n";
  out << "  \"F_T\": "
      << (report.has_forgetting ? num(report.forgetting_final) : "null")
      << ",\n";
  out << "  \"LTR\": " << (report.has_ltr ? num(report.ltr_value) : "null")
      << ",\n";
  out << "  \"LCA_" << report.beta << "\": "
      << (report.has_lca ? num(report.lca_value) : "null") << ",\n";
  out << "  \"A_t\": [";
  for (std::size_t i = 0; i < report.a_trend.size(); ++i)
    out << (i ? ", " : "") << num(report.a_trend[i]);
  out << "]";
  if (!report.has_ltr)
    out << ",\n  \"note\": \"F_T and LTR need at least two tasks\"";
  out << "\n}\n";
  return out.str();
}

std::string format_curves(const MetricsReport& report, const Mat& bshot) {
  std::ostringstream out;
  char buf[16];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  out << "kind,t,b,value\n";
  for (std::size_t i = 0; i < report.a_trend.size(); ++i)
    out << "avg," << (i + 1) << ",," << num(report.a_trend[i]) << "\n";
  for (Eigen::Index t = 0; t < bshot.rows(); ++t)
    for (Eigen::Index b = 0; b < bshot.cols(); ++b)
      out << "bshot," << (t + 1) << "," << b << "," << num(bshot(t, b))
          << "\n";
  return out.str();
}

TrainOutcome run_experiment(const ExperimentConfig& config,
                            const StepObserver& observer,
                            TrainerState* out_state) {
  TaskSequence tasks = build_tasks(config.data);
  TrainResult result =
      train_sequence(tasks, config.model.layers, config.train, observer,
                     out_state);
  TrainOutcome outcome;
  outcome.matrix = result.matrix;
  outcome.bshot = result.bshot;
  outcome.resolved = config;
  Mat qmatrix = quant4(result.matrix);
  Mat qbshot = quant4(result.bshot);
  outcome.report = matrix_report(qmatrix, &qbshot, config.train.lca_beta);
  return outcome;
}

void write_train_outputs(const TrainOutcome& outcome,
                         const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  write_file(out_dir + "/matrix.csv", emit_matrix(outcome.matrix));
  write_file(out_dir + "/metrics.json", format_report(outcome.report));
  write_file(out_dir + "/curves.csv",
             format_curves(outcome.report, quant4(outcome.bshot)));
  std::string manifest = "# run manifest (a valid config: rerun with --config "
                         "manifest.txt)\n";
  manifest += emit_config(outcome.resolved);
  write_file(out_dir + "/manifest.txt", manifest);
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              const CliOverrides& overrides) {
  try {
    ExperimentConfig config =
        apply_overrides(load_config(config_path), overrides);
    TrainerState state;
    TrainOutcome outcome = run_experiment(config, {}, &state);
    write_train_outputs(outcome, out_dir);
    if (config.run.write_checkpoint)
      save_checkpoint(state, out_dir + "/checkpoint.bin");
    std::cout << format_report(outcome.report);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

// Accepts either the curves.csv written by train (bshot rows) or a plain
// rectangular table of b-shot accuracies.
Mat parse_bshot(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool tagged = false;
  std::vector<std::tuple<int, int, double>> entries;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("kind,", 0) == 0) {
      tagged = true;
      continue;
    }
    if (line.rfind("bshot,", 0) == 0) {
      tagged = true;
      int t = 0, b = 0;
      double v = 0.0;
      if (std::sscanf(line.c_str(), "bshot,%d,%d,%lf", &t, &b, &v) != 3)
        throw ParseError("curve line " + std::to_string(line_no) +
                         ": bad bshot row");
      entries.emplace_back(t - 1, b, v);
      continue;
    }
    if (line.rfind("avg,", 0) == 0) {
      tagged = true;
      continue;
    }
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream tokens(line);
    std::vector<double> row;
    double v;
    while (tokens >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (tagged) {
    int max_t = -1, max_b = -1;
    for (auto& [t, b, v] : entries) {
      max_t = std::max(max_t, t);
      max_b = std::max(max_b, b);
    }
    if (max_t < 0) throw ParseError("curve file has no bshot rows");
    Mat bshot = Mat::Zero(max_t + 1, max_b + 1);
    for (auto& [t, b, v] : entries) bshot(t, b) = v;
    return bshot;
  }
  if (rows.empty()) throw ParseError("curve file is empty");
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw ParseError("curve rows have differing lengths");
  Mat bshot(static_cast<Eigen::Index>(rows.size()),
            static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      bshot(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return bshot;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int cmd_eval_matrix(const std::string& matrix_path, int beta,
                    const std::string& curve_path) {
  try {
    Mat matrix = parse_matrix(read_file(matrix_path));
    Mat bshot;
    bool has_curve = !curve_path.empty();
    if (has_curve) bshot = parse_bshot(read_file(curve_path));
    MetricsReport report =
        matrix_report(matrix, has_curve ? &bshot : nullptr, beta);
    std::cout << format_report(report);
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 const CliOverrides& overrides) {
  try {
    ExperimentConfig config = load_config(config_path);
    if (overrides.seed) config.data.seed = *overrides.seed;
    TaskSequence tasks = build_tasks(config.data);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const std::string stem = out_dir + "/task" + std::to_string(t + 1);
      save_dataset_csv(tasks[t].train, stem + "_train.csv");
      save_dataset_csv(tasks[t].test, stem + "_test.csv");
    }
    std::string manifest =
        "# data manifest (a valid config: regenerate with --config "
        "manifest.txt)\n";
    manifest += emit_config(config);
    if (config.data.kind == "permuted") {
      const int dim = static_cast<int>(tasks.front().train.inputs.cols());
      auto perms = task_permutations(dim, config.data.tasks,
                                     mix_seed(config.data.seed, kPermute, 0));
      for (std::size_t t = 0; t < perms.size(); ++t) {
        manifest += "# perm " + std::to_string(t + 1) + " =";
        for (int j : perms[t]) manifest += " " + std::to_string(j);
        manifest += "\n";
      }
    }
    write_file(out_dir + "/manifest.txt", manifest);
    std::cout << "wrote " << tasks.size() << " task(s) to " << out_dir << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mdmt
