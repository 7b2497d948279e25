#include "mdmt/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mdmt/errors.hpp"

namespace mdmt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& key, int line,
                       const std::string& what) {
  throw ConfigError(key + ": " + what + " (line " + std::to_string(line) + ")");
}

long long to_int(const std::string& key, const std::string& value, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    fail(key, line, "invalid integer '" + value + "'");
  }
  if (used != value.size()) fail(key, line, "invalid integer '" + value + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value,
                     int line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    fail(key, line, "invalid integer '" + value + "'");
  }
  if (used != value.size()) fail(key, line, "invalid integer '" + value + "'");
  return v;
}

double to_double(const std::string& key, const std::string& value, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    fail(key, line, "invalid number '" + value + "'");
  }
  if (used != value.size()) fail(key, line, "invalid number '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(key, line, "expected true or false, got '" + value + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& value,
                             int line) {
  std::vector<int> out;
  std::string item;
  std::istringstream parts(value);
  while (std::getline(parts, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, line, "empty list entry");
    out.push_back(static_cast<int>(to_int(key, item, line)));
  }
  if (out.empty()) fail(key, line, "expected a comma-separated list");
  return out;
}

}  // namespace

const char* loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::TAM:
      return "tam";
    case LossMode::CDS_RAW:
      return "cds_raw";
    case LossMode::VANILLA:
      return "vanilla";
  }
  return "tam";
}

LossMode parse_loss_mode(const std::string& name) {
  if (name == "tam") return LossMode::TAM;
  if (name == "cds_raw") return LossMode::CDS_RAW;
  if (name == "vanilla") return LossMode::VANILLA;
  throw ConfigError("loss_mode: expected tam, cds_raw or vanilla, got '" +
                    name + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  using Setter = std::function<void(const std::string&, int)>;
  const std::map<std::string, Setter> setters = {
      {"run.label",
       [&](const std::string& v, int) { config.run.label = v; }},
      {"run.checkpoint",
       [&](const std::string& v, int line) {
         config.run.write_checkpoint = to_bool("run.checkpoint", v, line);
       }},
      {"data.kind",
       [&](const std::string& v, int line) {
         if (v != "synthetic" && v != "permuted" && v != "split" && v != "idx")
           fail("data.kind", line,
                "expected synthetic, permuted, split or idx, got '" + v + "'");
         config.data.kind = v;
       }},
      {"data.tasks",
       [&](const std::string& v, int line) {
         config.data.tasks = static_cast<int>(to_int("data.tasks", v, line));
         if (config.data.tasks < 1) fail("data.tasks", line, "must be >= 1");
       }},
      {"data.classes",
       [&](const std::string& v, int line) {
         config.data.classes =
             static_cast<int>(to_int("data.classes", v, line));
         if (config.data.classes < 1) fail("data.classes", line, "must be >= 1");
       }},
      {"data.dim",
       [&](const std::string& v, int line) {
         config.data.dim = static_cast<int>(to_int("data.dim", v, line));
         if (config.data.dim < 1) fail("data.dim", line, "must be >= 1");
       }},
      {"data.train_per_class",
       [&](const std::string& v, int line) {
         config.data.train_per_class =
             static_cast<int>(to_int("data.train_per_class", v, line));
         if (config.data.train_per_class < 1)
           fail("data.train_per_class", line, "must be >= 1");
       }},
      {"data.test_per_class",
       [&](const std::string& v, int line) {
         config.data.test_per_class =
             static_cast<int>(to_int("data.test_per_class", v, line));
         if (config.data.test_per_class < 1)
           fail("data.test_per_class", line, "must be >= 1");
       }},
      {"data.spread",
       [&](const std::string& v, int line) {
         config.data.spread = to_double("data.spread", v, line);
         if (config.data.spread < 0.0) fail("data.spread", line, "must be >= 0");
       }},
      {"data.seed",
       [&](const std::string& v, int line) {
         config.data.seed = to_u64("data.seed", v, line);
       }},
      {"data.classes_per_task",
       [&](const std::string& v, int line) {
         config.data.classes_per_task =
             static_cast<int>(to_int("data.classes_per_task", v, line));
         if (config.data.classes_per_task < 1)
           fail("data.classes_per_task", line, "must be >= 1");
       }},
      {"data.sequential_split",
       [&](const std::string& v, int line) {
         config.data.sequential_split =
             to_bool("data.sequential_split", v, line);
       }},
      {"data.train_images",
       [&](const std::string& v, int) { config.data.train_images = v; }},
      {"data.train_labels",
       [&](const std::string& v, int) { config.data.train_labels = v; }},
      {"data.test_images",
       [&](const std::string& v, int) { config.data.test_images = v; }},
      {"data.test_labels",
       [&](const std::string& v, int) { config.data.test_labels = v; }},
      {"model.layers",
       [&](const std::string& v, int line) {
         config.model.layers = to_int_list("model.layers", v, line);
         for (int s : config.model.layers)
           if (s < 1) fail("model.layers", line, "sizes must be >= 1");
       }},
      {"train.loss_mode",
       [&](const std::string& v, int line) {
         try {
           config.train.loss_mode = parse_loss_mode(v);
         } catch (const ConfigError& e) {
           fail("train.loss_mode", line, e.what());
         }
       }},
      {"train.lr",
       [&](const std::string& v, int line) {
         config.train.lr = to_double("train.lr", v, line);
         if (config.train.lr <= 0.0) fail("train.lr", line, "must be > 0");
       }},
      {"train.batch_size",
       [&](const std::string& v, int line) {
         config.train.batch_size =
             static_cast<int>(to_int("train.batch_size", v, line));
         if (config.train.batch_size < 1)
           fail("train.batch_size", line, "must be >= 1");
       }},
      {"train.ref_batch_size",
       [&](const std::string& v, int line) {
         config.train.ref_batch_size =
             static_cast<int>(to_int("train.ref_batch_size", v, line));
         if (config.train.ref_batch_size < 0)
           fail("train.ref_batch_size", line, "must be >= 0");
       }},
      {"train.epochs",
       [&](const std::string& v, int line) {
         config.train.epochs_per_task =
             static_cast<int>(to_int("train.epochs", v, line));
         if (config.train.epochs_per_task < 1)
           fail("train.epochs", line, "must be >= 1");
       }},
      {"train.quota",
       [&](const std::string& v, int line) {
         config.train.quota = static_cast<int>(to_int("train.quota", v, line));
         if (config.train.quota < 1) fail("train.quota", line, "must be >= 1");
       }},
      {"train.m_c",
       [&](const std::string& v, int line) {
         config.train.margin.m_c = to_double("train.m_c", v, line);
         if (config.train.margin.m_c < 0.0)
           fail("train.m_c", line, "must be >= 0");
       }},
      {"train.m_t",
       [&](const std::string& v, int line) {
         config.train.margin.m_t = to_double("train.m_t", v, line);
         if (config.train.margin.m_t < 0.0)
           fail("train.m_t", line, "must be >= 0");
       }},
      {"train.s",
       [&](const std::string& v, int line) {
         config.train.margin.s = to_double("train.s", v, line);
         if (config.train.margin.s <= 0.0) fail("train.s", line, "must be > 0");
       }},
      {"train.use_ed",
       [&](const std::string& v, int line) {
         config.train.use_ed = to_bool("train.use_ed", v, line);
       }},
      {"train.seed",
       [&](const std::string& v, int line) {
         config.train.seed = to_u64("train.seed", v, line);
       }},
      {"train.lca_beta",
       [&](const std::string& v, int line) {
         config.train.lca_beta =
             static_cast<int>(to_int("train.lca_beta", v, line));
         if (config.train.lca_beta < 0)
           fail("train.lca_beta", line, "must be >= 0");
       }},
  };

  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' (line " +
                        std::to_string(line_no) + ")");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("unknown key '" + key + "' (line " +
                        std::to_string(line_no) + ")");
    it->second(value, line_no);
  }

  if (config.train.margin.m_c + config.train.margin.m_t >= M_PI)
    throw ConfigError("train.m_c + train.m_t must be < pi");
  if (config.data.kind == "split" && config.data.classes_per_task < 1)
    throw ConfigError("data.classes_per_task is required for split tasks");
  if (config.data.kind == "idx" &&
      (config.data.train_images.empty() || config.data.train_labels.empty() ||
       config.data.test_images.empty() || config.data.test_labels.empty()))
    throw ConfigError("idx data needs all four image/label paths");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string emit_config(const ExperimentConfig& config) {
  std::ostringstream out;
  char num[32];
  auto emit_double = [&](const char* key, double v) {
    std::snprintf(num, sizeof(num), "%.17g", v);
    out << key << " = " << num << "\n";
  };
  out << "run.label = " << config.run.label << "\n";
  out << "run.checkpoint = " << (config.run.write_checkpoint ? "true" : "false")
      << "\n";
  out << "data.kind = " << config.data.kind << "\n";
  out << "data.tasks = " << config.data.tasks << "\n";
  out << "data.classes = " << config.data.classes << "\n";
  out << "data.dim = " << config.data.dim << "\n";
  out << "data.train_per_class = " << config.data.train_per_class << "\n";
  out << "data.test_per_class = " << config.data.test_per_class << "\n";
  emit_double("data.spread", config.data.spread);
  out << "data.seed = " << config.data.seed << "\n";
  if (config.data.classes_per_task > 0)
    out << "data.classes_per_task = " << config.data.classes_per_task << "\n";
  out << "data.sequential_split = "
      << (config.data.sequential_split ? "true" : "false") << "\n";
  if (!config.data.train_images.empty())
    out << "data.train_images = " << config.data.train_images << "\n";
  if (!config.data.train_labels.empty())
    out << "data.train_labels = " << config.data.train_labels << "\n";
  if (!config.data.test_images.empty())
    out << "data.test_images = " << config.data.test_images << "\n";
  if (!config.data.test_labels.empty())
    out << "data.test_labels = " << config.data.test_labels << "\n";
  out << "model.layers = ";
  for (std::size_t i = 0; i < config.model.layers.size(); ++i)
    out << (i ? "," : "") << config.model.layers[i];
  out << "\n";
  out << "train.loss_mode = " << loss_mode_name(config.train.loss_mode) << "\n";
  emit_double("train.lr", config.train.lr);
  out << "train.batch_size = " << config.train.batch_size << "\n";
  out << "train.ref_batch_size = " << config.train.ref_batch_size << "\n";
  out << "train.epochs = " << config.train.epochs_per_task << "\n";
  out << "train.quota = " << config.train.quota << "\n";
  emit_double("train.m_c", config.train.margin.m_c);
  emit_double("train.m_t", config.train.margin.m_t);
  emit_double("train.s", config.train.margin.s);
  out << "train.use_ed = " << (config.train.use_ed ? "true" : "false") << "\n";
  out << "train.seed = " << config.train.seed << "\n";
  out << "train.lca_beta = " << config.train.lca_beta << "\n";
  return out.str();
}

}  // namespace mdmt
