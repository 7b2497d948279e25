#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdmt/config.hpp"
#include "mdmt/errors.hpp"
#include "mdmt/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lifelong-learning trainer and accuracy-matrix analyzer"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string matrix_path;
  std::string curve_path;
  std::string loss_mode;
  std::uint64_t seed = 0;
  int beta = 10;
  bool no_ed = false;

  CLI::App* train = app.add_subcommand("train", "Run a training sequence");
  train->add_option("--config", config_path, "Experiment config file")
      ->required();
  train->add_option("--out", out_dir, "Output directory");
  CLI::Option* train_seed =
      train->add_option("--seed", seed, "Override train.seed");
  CLI::Option* train_beta =
      train->add_option("--beta", beta, "Override train.lca_beta");
  CLI::Option* train_mode = train->add_option(
      "--loss-mode", loss_mode, "Override train.loss_mode (tam|cds_raw|vanilla)");
  train->add_flag("--no-ed", no_ed, "Disable episodic distillation");

  CLI::App* eval = app.add_subcommand("eval-matrix",
                                      "Compute metrics from a matrix file");
  eval->add_option("matrix", matrix_path, "Accuracy matrix file")->required();
  CLI::Option* eval_beta = eval->add_option("--beta", beta, "LCA horizon");
  eval->add_option("--curve", curve_path, "Optional b-shot curve file");

  CLI::App* gen = app.add_subcommand("gen-data", "Materialize a task sequence");
  gen->add_option("--config", config_path, "Experiment config file")
      ->required();
  gen->add_option("--out", out_dir, "Output directory");
  CLI::Option* gen_seed =
      gen->add_option("--seed", seed, "Override data generation seed");

  CLI11_PARSE(app, argc, argv);

  mdmt::CliOverrides overrides;
  overrides.no_ed = no_ed;
  if (train_seed->count() || gen_seed->count()) overrides.seed = seed;
  if (train_beta->count()) overrides.beta = beta;
  if (train_mode->count()) {
    try {
      overrides.loss_mode = mdmt::parse_loss_mode(loss_mode);
    } catch (const mdmt::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
  }

  if (train->parsed()) return mdmt::cmd_train(config_path, out_dir, overrides);
  if (eval->parsed())
    return mdmt::cmd_eval_matrix(matrix_path,
                                 eval_beta->count() ? beta : 10, curve_path);
  if (gen->parsed()) return mdmt::cmd_gen_data(config_path, out_dir, overrides);
  return 1;
}
