#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdmt/config.hpp"
#include "mdmt/errors.hpp"
#include "mdmt/datasets.hpp"
#include "mdmt/experiment.hpp"
#include "mdmt/losses.hpp"
#include "mdmt/metrics.hpp"
#include "mdmt/network.hpp"
#include "mdmt/trainer.hpp"

namespace py = pybind11;
using namespace mdmt;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Task-incremental lifelong-learning engine";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Network>(m, "Network")
      .def(py::init([](const std::vector<int>& sizes, std::uint64_t seed) {
             return Network::init(sizes, seed);
           }),
           py::arg("layer_sizes"), py::arg("seed"))
      .def("forward", &Network::forward, py::arg("batch"))
      .def("features", &Network::features, py::arg("batch"))
      .def("backward",
           [](Network& net, const Mat& feature_grad) {
             NetGrads g = net.backward(feature_grad);
             return py::make_tuple(g.weight, g.bias);
           },
           py::arg("feature_grad"))
      .def_property_readonly("input_dim", &Network::input_dim)
      .def_property_readonly("feature_dim", &Network::feature_dim);

  py::class_<TaskHead>(m, "TaskHead")
      .def(py::init([](int task_id, const Mat& weight, const Vec& bias) {
             TaskHead head;
             head.task_id = task_id;
             head.weight = weight;
             head.bias = bias;
             return head;
           }),
           py::arg("task_id"), py::arg("weight"), py::arg("bias"))
      .def_readwrite("task_id", &TaskHead::task_id)
      .def_readwrite("weight", &TaskHead::weight)
      .def_readwrite("bias", &TaskHead::bias);

  py::class_<MarginConfig>(m, "MarginConfig")
      .def(py::init([](double m_c, double m_t, double s) {
             return MarginConfig{m_c, m_t, s};
           }),
           py::arg("m_c") = 0.0, py::arg("m_t") = 0.0, py::arg("s") = 1.0)
      .def_readwrite("m_c", &MarginConfig::m_c)
      .def_readwrite("m_t", &MarginConfig::m_t)
      .def_readwrite("s", &MarginConfig::s);

  py::class_<LossResult>(m, "LossResult")
      .def_readonly("value", &LossResult::value)
      .def_readonly("feature_grad", &LossResult::feature_grad)
      .def_readonly("head_weight_grads", &LossResult::head_weight_grads)
      .def_readonly("head_bias_grads", &LossResult::head_bias_grads);

  m.def("softmax_ce_loss", &softmax_ce_loss, py::arg("features"),
        py::arg("labels"), py::arg("head"));
  m.def("cds_loss", &cds_loss, py::arg("features"), py::arg("labels"),
        py::arg("heads"), py::arg("task"));
  m.def(
      "tam_loss",
      [](const Mat& features, const std::vector<int>& labels,
         const std::vector<TaskHead>& heads, int task, double m_c, double m_t,
         double s) {
        return tam_loss(features, labels, heads, task, MarginConfig{m_c, m_t, s});
      },
      py::arg("features"), py::arg("labels"), py::arg("heads"), py::arg("task"),
      py::arg("m_c") = 0.0, py::arg("m_t") = 0.0, py::arg("s") = 1.0);
  m.def("ed_loss", &ed_loss, py::arg("current"), py::arg("stored"));
  m.def("init_head", &init_head, py::arg("task_id"), py::arg("feature_dim"),
        py::arg("classes"), py::arg("seed"));

  py::class_<LabeledDataset>(m, "LabeledDataset")
      .def(py::init([](const Mat& inputs, const std::vector<int>& labels,
                       int num_classes) {
             return LabeledDataset{inputs, labels, num_classes};
           }),
           py::arg("inputs"), py::arg("labels"), py::arg("num_classes"))
      .def_readwrite("inputs", &LabeledDataset::inputs)
      .def_readwrite("labels", &LabeledDataset::labels)
      .def_readwrite("num_classes", &LabeledDataset::num_classes);

  py::class_<TaskData>(m, "TaskData")
      .def(py::init([](const LabeledDataset& train, const LabeledDataset& test) {
             return TaskData{train, test};
           }),
           py::arg("train"), py::arg("test"))
      .def_readwrite("train", &TaskData::train)
      .def_readwrite("test", &TaskData::test);

  m.def(
      "gen_synthetic",
      [](int num_classes, int dim, int train_per_class, int test_per_class,
         double spread, std::uint64_t seed) {
        DatasetPair pair = gen_synthetic(num_classes, dim, train_per_class,
                                         test_per_class, spread, seed);
        return py::make_tuple(pair.train, pair.test);
      },
      py::arg("num_classes"), py::arg("dim"), py::arg("train_per_class"),
      py::arg("test_per_class"), py::arg("spread"), py::arg("seed"));
  m.def(
      "gen_permuted_tasks",
      [](const LabeledDataset& train, const LabeledDataset& test, int num_tasks,
         std::uint64_t seed) {
        return gen_permuted_tasks(DatasetPair{train, test}, num_tasks, seed);
      },
      py::arg("train"), py::arg("test"), py::arg("num_tasks"), py::arg("seed"));
  m.def(
      "gen_split_tasks",
      [](const LabeledDataset& train, const LabeledDataset& test,
         int classes_per_task, std::uint64_t seed, bool sequential) {
        return gen_split_tasks(DatasetPair{train, test}, classes_per_task, seed,
                               sequential);
      },
      py::arg("train"), py::arg("test"), py::arg("classes_per_task"),
      py::arg("seed"), py::arg("sequential") = false);
  m.def("load_idx", &load_idx, py::arg("images_path"), py::arg("labels_path"));

  m.def("average_accuracy", &average_accuracy, py::arg("matrix"), py::arg("t"));
  m.def("forgetting", &forgetting, py::arg("matrix"), py::arg("t"));
  m.def("ltr", &ltr, py::arg("matrix"));
  m.def("lca", &lca, py::arg("bshot"));
  m.def("parse_matrix", &parse_matrix, py::arg("text"));
  m.def("emit_matrix", &emit_matrix, py::arg("matrix"));

  py::enum_<LossMode>(m, "LossMode")
      .value("TAM", LossMode::TAM)
      .value("CDS_RAW", LossMode::CDS_RAW)
      .value("VANILLA", LossMode::VANILLA);

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("margin", &HyperParams::margin)
      .def_readwrite("lr", &HyperParams::lr)
      .def_readwrite("batch_size", &HyperParams::batch_size)
      .def_readwrite("ref_batch_size", &HyperParams::ref_batch_size)
      .def_readwrite("quota", &HyperParams::quota)
      .def_readwrite("epochs_per_task", &HyperParams::epochs_per_task)
      .def_readwrite("use_ed", &HyperParams::use_ed)
      .def_readwrite("loss_mode", &HyperParams::loss_mode)
      .def_readwrite("seed", &HyperParams::seed)
      .def_readwrite("lca_beta", &HyperParams::lca_beta);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("matrix", &TrainResult::matrix)
      .def_readonly("bshot", &TrainResult::bshot);

  m.def(
      "train_sequence",
      [](const TaskSequence& tasks, const std::vector<int>& trunk_sizes,
         const HyperParams& hp) { return train_sequence(tasks, trunk_sizes, hp); },
      py::arg("tasks"), py::arg("trunk_sizes"), py::arg("hp"));

  m.def(
      "run_config",
      [](const std::string& config_text) {
        ExperimentConfig config = parse_config_text(config_text);
        TrainOutcome outcome = run_experiment(config);
        return py::make_tuple(outcome.matrix, outcome.bshot,
                              format_report(outcome.report));
      },
      py::arg("config_text"),
      "Parse a flat key=value config, train it, and return (matrix, bshot, "
      "report_json).");
}
