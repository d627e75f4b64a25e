#include "netgeom/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>

#include "json.hpp"
#include "netgeom/checkpoint.hpp"
#include "netgeom/errors.hpp"
#include "netgeom/geometry.hpp"
#include "netgeom/io.hpp"
#include "netgeom/rng.hpp"
#include "netgeom/serde.hpp"
#include "netgeom/version.hpp"

namespace netgeom {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rows of train.x probed for the per-datum bound chain in bounds.csv.
constexpr int kBoundsRows = 16;

// ---- json access with key-path errors -------------------------------------

[[noreturn]] void bad_key(const std::string& path, const char* what) {
  throw ConfigError("config: " + path + " " + what);
}

const json* find_key(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double num_at(const json& v, const std::string& path) {
  if (!v.is_number()) bad_key(path, "must be a number");
  return v.get<double>();
}

int int_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad_key(path, "must be an integer");
  return v.get<int>();
}

std::string str_at(const json& v, const std::string& path) {
  if (!v.is_string()) bad_key(path, "must be a string");
  return v.get<std::string>();
}

bool bool_at(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad_key(path, "must be a boolean");
  return v.get<bool>();
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) bad_key(path, "must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      bad_key(path + "." + it.key(), "is not a recognized key");
    }
  }
}

// ---- spec <-> json ---------------------------------------------------------

json data_to_json(const DataSpec& d) {
  json j;
  j["kind"] = d.kind;
  j["n"] = d.n;
  j["lo"] = d.lo;
  j["hi"] = d.hi;
  j["sigma"] = d.sigma;
  j["test_n"] = d.test_n;
  j["test_fraction"] = d.test_fraction;
  j["randomized_labels"] = d.randomized_labels;
  if (!d.images.empty()) j["images"] = d.images;
  if (!d.labels.empty()) j["labels"] = d.labels;
  if (!d.train_csv.empty()) j["train_csv"] = d.train_csv;
  if (!d.test_csv.empty()) j["test_csv"] = d.test_csv;
  return j;
}

void overlay_data(DataSpec& d, const json& j, const std::string& path) {
  check_keys(j, path,
             {"kind", "n", "lo", "hi", "sigma", "test_n", "test_fraction",
              "randomized_labels", "images", "labels", "train_csv", "test_csv"});
  if (const json* v = find_key(j, "kind")) d.kind = str_at(*v, path + ".kind");
  if (const json* v = find_key(j, "n")) d.n = int_at(*v, path + ".n");
  if (const json* v = find_key(j, "lo")) d.lo = num_at(*v, path + ".lo");
  if (const json* v = find_key(j, "hi")) d.hi = num_at(*v, path + ".hi");
  if (const json* v = find_key(j, "sigma")) d.sigma = num_at(*v, path + ".sigma");
  if (const json* v = find_key(j, "test_n"))
    d.test_n = int_at(*v, path + ".test_n");
  if (const json* v = find_key(j, "test_fraction"))
    d.test_fraction = num_at(*v, path + ".test_fraction");
  if (const json* v = find_key(j, "randomized_labels"))
    d.randomized_labels = bool_at(*v, path + ".randomized_labels");
  if (const json* v = find_key(j, "images"))
    d.images = str_at(*v, path + ".images");
  if (const json* v = find_key(j, "labels"))
    d.labels = str_at(*v, path + ".labels");
  if (const json* v = find_key(j, "train_csv"))
    d.train_csv = str_at(*v, path + ".train_csv");
  if (const json* v = find_key(j, "test_csv"))
    d.test_csv = str_at(*v, path + ".test_csv");
}

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

json train_to_json(const TrainConfig& t) {
  json j;
  j["epochs"] = t.epochs;
  j["batch_size"] = t.batch_size;
  j["optimizer"] = optimizer_name(t.optimizer);
  j["lr"] = schedule_to_json(t.lr);
  j["nu_schedule"] = schedule_to_json(t.nu_schedule);
  j["gl_lr_multiplier"] = t.gl_lr_multiplier;
  j["gl_lr_warmup_epochs"] = t.gl_lr_warmup_epochs;
  json wd = json::object();
  for (const auto& [g, v] : t.weight_decay) {
    wd[g == ParamGroup::GL ? "gl" : "main"] = v;
  }
  j["weight_decay"] = wd;
  j["beta1"] = t.beta1;
  j["beta2"] = t.beta2;
  j["adam_eps"] = t.adam_eps;
  j["log_every"] = t.log_every;
  j["checkpoint_every"] = t.checkpoint_every;
  j["probe_size"] = t.probe_size;
  j["epoch_offset"] = t.epoch_offset;
  return j;
}

void overlay_train(TrainConfig& t, const json& j, const std::string& path) {
  check_keys(j, path,
             {"epochs", "batch_size", "optimizer", "lr", "nu_schedule",
              "gl_lr_multiplier", "gl_lr_warmup_epochs", "weight_decay", "beta1",
              "beta2", "adam_eps", "log_every", "checkpoint_every", "probe_size",
              "epoch_offset"});
  if (const json* v = find_key(j, "epochs"))
    t.epochs = int_at(*v, path + ".epochs");
  if (const json* v = find_key(j, "batch_size"))
    t.batch_size = int_at(*v, path + ".batch_size");
  if (const json* v = find_key(j, "optimizer")) {
    std::string name = str_at(*v, path + ".optimizer");
    if (name == "sgd") {
      t.optimizer = OptimizerKind::SGD;
    } else if (name == "adam") {
      t.optimizer = OptimizerKind::Adam;
    } else {
      bad_key(path + ".optimizer", "must be \"sgd\" or \"adam\"");
    }
  }
  if (const json* v = find_key(j, "lr")) t.lr = schedule_from_json(*v, path + ".lr");
  if (const json* v = find_key(j, "nu_schedule"))
    t.nu_schedule = schedule_from_json(*v, path + ".nu_schedule");
  if (const json* v = find_key(j, "gl_lr_multiplier"))
    t.gl_lr_multiplier = num_at(*v, path + ".gl_lr_multiplier");
  if (const json* v = find_key(j, "gl_lr_warmup_epochs"))
    t.gl_lr_warmup_epochs = int_at(*v, path + ".gl_lr_warmup_epochs");
  if (const json* v = find_key(j, "weight_decay")) {
    check_keys(*v, path + ".weight_decay", {"main", "gl"});
    if (const json* m = find_key(*v, "main"))
      t.weight_decay[ParamGroup::Main] = num_at(*m, path + ".weight_decay.main");
    if (const json* g = find_key(*v, "gl"))
      t.weight_decay[ParamGroup::GL] = num_at(*g, path + ".weight_decay.gl");
  }
  if (const json* v = find_key(j, "beta1")) t.beta1 = num_at(*v, path + ".beta1");
  if (const json* v = find_key(j, "beta2")) t.beta2 = num_at(*v, path + ".beta2");
  if (const json* v = find_key(j, "adam_eps"))
    t.adam_eps = num_at(*v, path + ".adam_eps");
  if (const json* v = find_key(j, "log_every"))
    t.log_every = int_at(*v, path + ".log_every");
  if (const json* v = find_key(j, "checkpoint_every"))
    t.checkpoint_every = int_at(*v, path + ".checkpoint_every");
  if (const json* v = find_key(j, "probe_size"))
    t.probe_size = int_at(*v, path + ".probe_size");
  if (const json* v = find_key(j, "epoch_offset"))
    t.epoch_offset = int_at(*v, path + ".epoch_offset");
}

void validate_spec(const ExperimentSpec& s) {
  static const std::set<std::string> kinds = {"single",   "overfit",  "gl",
                                              "longskip", "histogram", "gld"};
  if (!kinds.count(s.kind)) bad_key("kind", "must name a known experiment");
  if (s.scale != "desk" && s.scale != "full")
    bad_key("scale", "must be \"desk\" or \"full\"");
  if (s.name.empty()) bad_key("name", "must not be empty");
  if (s.overfit_factor <= 0.0) bad_key("overfit_factor", "must be > 0");
  if (s.hist_bins < 2) bad_key("hist_bins", "must be >= 2");
  if (s.tail_k <= 0.0) bad_key("tail_k", "must be > 0");
  if (s.repeats < 1) bad_key("repeats", "must be >= 1");
  if (s.zero_error_check_every < 1)
    bad_key("zero_error_check_every", "must be >= 1");
  for (double p : s.drop_probs) {
    if (p < 0.0 || p >= 1.0) bad_key("drop_probs", "entries must lie in [0, 1)");
  }
  if (s.kind == "single" && s.layers.empty())
    bad_key("layers", "must list at least one layer for kind \"single\"");
  for (const auto& [run, lr] : s.lr_per_run) {
    if (lr <= 0.0) bad_key("lr_per_run." + run, "must be > 0");
  }
}

}  // namespace

std::string build_id() { return kBuildId; }

std::string experiment_spec_json(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  j["kind"] = s.kind;
  j["scale"] = s.scale;
  j["seed"] = s.seed;
  j["out_dir"] = s.out_dir;
  j["scheme"] = init_scheme_name(s.scheme);
  j["loss"] = s.loss;
  j["data"] = data_to_json(s.data);
  json layers = json::array();
  for (const auto& l : s.layers) layers.push_back(layer_spec_to_json(l));
  j["layers"] = layers;
  j["train"] = train_to_json(s.train);
  json lpr = json::object();
  for (const auto& [run, lr] : s.lr_per_run) lpr[run] = lr;
  j["lr_per_run"] = lpr;
  j["overfit_factor"] = s.overfit_factor;
  j["hist_bins"] = s.hist_bins;
  j["tail_k"] = s.tail_k;
  j["drop_probs"] = s.drop_probs;
  j["repeats"] = s.repeats;
  j["zero_error_check_every"] = s.zero_error_check_every;
  return j.dump(2) + "\n";
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  std::string kind = "single", scale = "desk";
  if (const json* v = find_key(j, "kind")) kind = str_at(*v, "kind");
  if (const json* v = find_key(j, "scale")) scale = str_at(*v, "scale");
  ExperimentSpec s = experiment_preset(kind, scale);

  check_keys(j, "config",
             {"name", "kind", "scale", "seed", "out_dir", "scheme", "loss",
              "data", "layers", "train", "lr_per_run", "overfit_factor",
              "hist_bins", "tail_k", "drop_probs", "repeats",
              "zero_error_check_every"});
  if (const json* v = find_key(j, "name")) s.name = str_at(*v, "name");
  if (const json* v = find_key(j, "seed")) {
    if (!v->is_number_unsigned()) bad_key("seed", "must be a non-negative integer");
    s.seed = v->get<std::uint64_t>();
  }
  if (const json* v = find_key(j, "out_dir")) s.out_dir = str_at(*v, "out_dir");
  if (const json* v = find_key(j, "scheme"))
    s.scheme = init_scheme_from_name(str_at(*v, "scheme"));
  if (const json* v = find_key(j, "loss")) s.loss = str_at(*v, "loss");
  if (const json* v = find_key(j, "data")) overlay_data(s.data, *v, "data");
  if (const json* v = find_key(j, "layers")) {
    if (!v->is_array()) bad_key("layers", "must be an array");
    s.layers.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      s.layers.push_back(layer_spec_from_json(
          (*v)[i], "layers[" + std::to_string(i) + "]"));
    }
  }
  if (const json* v = find_key(j, "train")) overlay_train(s.train, *v, "train");
  if (const json* v = find_key(j, "lr_per_run")) {
    if (!v->is_object()) bad_key("lr_per_run", "must map run names to numbers");
    s.lr_per_run.clear();
    for (const auto& [run, lr] : v->items())
      s.lr_per_run[run] = num_at(lr, "lr_per_run." + run);
  }
  if (const json* v = find_key(j, "overfit_factor"))
    s.overfit_factor = num_at(*v, "overfit_factor");
  if (const json* v = find_key(j, "hist_bins"))
    s.hist_bins = int_at(*v, "hist_bins");
  if (const json* v = find_key(j, "tail_k")) s.tail_k = num_at(*v, "tail_k");
  if (const json* v = find_key(j, "drop_probs")) {
    if (!v->is_array()) bad_key("drop_probs", "must be an array of numbers");
    s.drop_probs.clear();
    for (const auto& p : *v) s.drop_probs.push_back(num_at(p, "drop_probs"));
  }
  if (const json* v = find_key(j, "repeats")) s.repeats = int_at(*v, "repeats");
  if (const json* v = find_key(j, "zero_error_check_every"))
    s.zero_error_check_every = int_at(*v, "zero_error_check_every");

  validate_spec(s);
  return s;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  return parse_experiment_spec(read_text_file(path));
}

// ---- presets ---------------------------------------------------------------

ExperimentSpec experiment_preset(const std::string& kind,
                                 const std::string& scale) {
  if (scale != "desk" && scale != "full")
    bad_key("scale", "must be \"desk\" or \"full\"");
  const bool desk = scale == "desk";

  ExperimentSpec s;
  s.kind = kind;
  s.scale = scale;
  s.name = kind + "_" + scale;

  if (kind == "single") {
    s.train.epochs = desk ? 200 : 2000;
    s.train.lr = Schedule::constant(1e-2);
    s.train.log_every = desk ? 10 : 100;
    return s;
  }
  if (kind == "overfit") {
    s.data.kind = "quadratic";
    s.train.optimizer = OptimizerKind::SGD;
    s.train.epochs = desk ? 200000 : 200000;
    s.train.lr = Schedule::constant(1e-5);
    if (desk) {
      // Plain SGD needs a per-net constant lr here: the three nets sit at
      // the stability edge at very different scales.
      s.lr_per_run = {{"h1", 8e-4}, {"h7", 1.1e-4}, {"d119", 8e-6}};
    }
    s.train.log_every = desk ? 2000 : 1000;
    s.train.probe_size = 8;
    return s;
  }
  if (kind == "gl") {
    s.data.kind = "cubic_mix";
    s.train.optimizer = OptimizerKind::SGD;
    s.train.epochs = 1000;
    s.train.lr = Schedule::step(desk ? 2e-4 : 1e-7, 0.1, 200);
    s.train.nu_schedule = Schedule::linear(1.0, 0.1, 500);
    s.train.gl_lr_multiplier = 0.1;
    s.train.gl_lr_warmup_epochs = 20;
    s.train.log_every = 20;
    s.train.probe_size = 8;
    return s;
  }
  if (kind == "longskip") {
    s.data.kind = "quadratic";
    s.train.epochs = desk ? 3000 : 20000;
    s.train.lr = Schedule::constant(desk ? 1e-4 : 1e-5);
    s.train.log_every = desk ? 25 : 100;
    s.train.probe_size = 8;
    return s;
  }
  if (kind == "histogram") {
    s.loss = "softmax_ce";
    if (desk) {
      s.data.kind = "synth_digits";
      s.data.n = 12500;
    } else {
      s.data.kind = "mnist";
      s.data.images = "data/mnist/train-images-idx3-ubyte";
      s.data.labels = "data/mnist/train-labels-idx1-ubyte";
      s.data.n = 60000;
    }
    s.data.test_fraction = 0.2;
    s.train.optimizer = OptimizerKind::Adam;
    s.train.lr = Schedule::constant(1e-3);
    s.train.batch_size = 100;
    s.train.epochs = desk ? 250 : 500;
    s.train.log_every = 1;
    s.train.probe_size = 0;
    s.zero_error_check_every = 1;
    return s;
  }
  if (kind == "gld") {
    s.loss = "softmax_ce";
    if (desk) {
      s.data.kind = "synth_digits";
      s.data.n = 2500;
    } else {
      s.data.kind = "mnist";
      s.data.images = "data/mnist/train-images-idx3-ubyte";
      s.data.labels = "data/mnist/train-labels-idx1-ubyte";
      s.data.n = 60000;
    }
    s.data.test_fraction = 0.2;
    s.train.optimizer = OptimizerKind::Adam;
    s.train.lr = Schedule::constant(1e-3);
    s.train.batch_size = 50;
    s.train.epochs = desk ? 40 : 100;
    s.train.log_every = desk ? 2 : 5;
    s.train.probe_size = 0;
    return s;
  }
  bad_key("kind", "must name a known experiment");
}

// ---- data loading ----------------------------------------------------------

namespace {

LoadedData split_rows(const Dataset& all, double test_fraction) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    bad_key("data.test_fraction", "must lie in [0, 1)");
  int n_test = int(std::lround(all.size() * test_fraction));
  int n_train = all.size() - n_test;
  if (n_train < 1) bad_key("data.test_fraction", "leaves no training rows");

  LoadedData out;
  out.train.x = Matrix(n_train, all.x.cols);
  out.train.y = Matrix(n_train, all.y.cols);
  out.train.meta = all.meta + ":train";
  for (int i = 0; i < n_train; ++i) {
    for (int j = 0; j < all.x.cols; ++j) out.train.x(i, j) = all.x(i, j);
    for (int j = 0; j < all.y.cols; ++j) out.train.y(i, j) = all.y(i, j);
  }
  if (n_test > 0) {
    out.test.x = Matrix(n_test, all.x.cols);
    out.test.y = Matrix(n_test, all.y.cols);
    out.test.meta = all.meta + ":test";
    for (int i = 0; i < n_test; ++i) {
      for (int j = 0; j < all.x.cols; ++j)
        out.test.x(i, j) = all.x(n_train + i, j);
      for (int j = 0; j < all.y.cols; ++j)
        out.test.y(i, j) = all.y(n_train + i, j);
    }
    out.has_test = true;
  }
  return out;
}

}  // namespace

LoadedData load_data(const DataSpec& d, std::uint64_t seed) {
  LoadedData out;
  if (d.kind == "quadratic" || d.kind == "cubic_mix") {
    out.train = d.kind == "quadratic"
                    ? gen_quadratic(d.n, d.lo, d.hi, d.sigma, seed)
                    : gen_cubic_mix(d.n, d.lo, d.hi, d.sigma, seed);
    if (d.test_n > 0) {
      out.test = test_grid(d.test_n, d.lo, d.hi, d.kind);
      out.has_test = true;
    }
    return out;
  }
  if (d.kind == "synth_digits" || d.kind == "mnist") {
    Dataset all;
    if (d.kind == "synth_digits") {
      namespace fs = std::filesystem;
      fs::path dir = fs::temp_directory_path() /
                     ("netgeom_synth_" + std::to_string(seed) + "_" +
                      std::to_string(d.n));
      fs::create_directories(dir);
      std::string ip = (dir / "images.idx").string();
      std::string lp = (dir / "labels.idx").string();
      write_synth_digits_idx(ip, lp, d.n, seed);
      all = mnist_load(ip, lp);
    } else {
      all = mnist_load(d.images, d.labels);
      if (d.n > 0 && d.n < all.size()) {
        Dataset cut;
        cut.x = Matrix(d.n, all.x.cols);
        cut.y = Matrix(d.n, all.y.cols);
        cut.meta = all.meta + ":take" + std::to_string(d.n);
        for (int i = 0; i < d.n; ++i) {
          for (int j = 0; j < all.x.cols; ++j) cut.x(i, j) = all.x(i, j);
          for (int j = 0; j < all.y.cols; ++j) cut.y(i, j) = all.y(i, j);
        }
        all = std::move(cut);
      }
    }
    if (d.randomized_labels) all = randomize_labels(all, seed);
    return split_rows(all, d.test_fraction);
  }
  if (d.kind == "csv") {
    if (d.train_csv.empty()) bad_key("data.train_csv", "is required for csv data");
    // Column split is recovered from the header (x columns then y columns).
    out.train = read_dataset_csv(d.train_csv);
    if (!d.test_csv.empty()) {
      out.test = read_dataset_csv(d.test_csv);
      out.has_test = true;
    }
    if (d.randomized_labels) out.train = randomize_labels(out.train, seed);
    return out;
  }
  bad_key("data.kind", "must name a known data source");
}

// ---- architectures ---------------------------------------------------------

std::vector<LayerSpec> arch_one_hidden(int width) {
  DenseSpec h;
  h.in = 1;
  h.out = width;
  h.act = ActivationKind::ReLU;
  DenseSpec o;
  o.out = 1;
  o.act = ActivationKind::Identity;
  return {h, o};
}

std::vector<LayerSpec> arch_multi_hidden(const std::vector<int>& widths) {
  std::vector<LayerSpec> layers;
  int cur = 1;
  for (int w : widths) {
    DenseSpec d;
    d.in = layers.empty() ? cur : -1;
    d.out = w;
    d.act = ActivationKind::ReLU;
    layers.push_back(d);
  }
  DenseSpec o;
  o.out = 1;
  o.act = ActivationKind::Identity;
  layers.push_back(o);
  return layers;
}

std::vector<LayerSpec> arch_residual(int width, int blocks, double nu) {
  std::vector<LayerSpec> layers;
  DenseSpec in;
  in.in = 1;
  in.out = width;
  in.act = ActivationKind::ReLU;
  layers.push_back(in);
  for (int b = 0; b < blocks; ++b) {
    GenSkipSpec gs;
    gs.width = width;
    gs.out = width;
    gs.act = ActivationKind::ReLU;
    gs.nu = Schedule::constant(nu);
    gs.bias = true;
    gs.inner_layers = 1;
    gs.gl = false;
    layers.push_back(gs);
  }
  DenseSpec out;
  out.out = 1;
  out.act = ActivationKind::Identity;
  layers.push_back(out);
  return layers;
}

std::vector<LayerSpec> arch_long_skip(int width, int blocks, int inner,
                                      int tail_dense, double nu) {
  std::vector<LayerSpec> layers;
  DenseSpec in;
  in.in = 1;
  in.out = width;
  in.act = ActivationKind::ReLU;
  layers.push_back(in);
  for (int b = 0; b < blocks; ++b) {
    GenSkipSpec gs;
    gs.width = width;
    gs.out = width;
    gs.act = ActivationKind::ReLU;
    gs.nu = Schedule::constant(nu);
    gs.bias = true;
    gs.inner_layers = inner;
    gs.gl = false;
    layers.push_back(gs);
  }
  for (int t = 0; t < tail_dense; ++t) {
    DenseSpec d;
    d.out = width;
    d.act = ActivationKind::ReLU;
    layers.push_back(d);
  }
  DenseSpec out;
  out.out = 1;
  out.act = ActivationKind::Identity;
  layers.push_back(out);
  return layers;
}

std::vector<LayerSpec> arch_gl_stack(int width, int blocks,
                                     const std::vector<int>& gl_positions,
                                     double nu) {
  std::set<int> gl(gl_positions.begin(), gl_positions.end());
  for (int p : gl) {
    if (p < 0 || p >= blocks)
      throw ConfigError("gl position " + std::to_string(p) +
                        " outside block range");
  }
  // The first block lifts the scalar input through a learned skip projection,
  // so the stack is exactly 2 * blocks hidden layers with one skip each.
  std::vector<LayerSpec> layers;
  for (int b = 0; b < blocks; ++b) {
    GenSkipSpec gs;
    gs.in = b == 0 ? 1 : -1;
    gs.width = width;
    gs.out = width;
    gs.act = ActivationKind::ReLU;
    gs.bias = true;
    gs.inner_layers = 1;
    gs.proj = b == 0 ? ProjKind::Learned : ProjKind::Identity;
    gs.gl = gl.count(b) > 0;
    // GL skips start at full carry and follow the run's nu schedule; the
    // plain skips keep the constant carry chosen for the preset.
    gs.nu = Schedule::constant(gs.gl ? 1.0 : nu);
    layers.push_back(gs);
  }
  DenseSpec out;
  out.out = 1;
  out.act = ActivationKind::Identity;
  layers.push_back(out);
  return layers;
}

std::vector<LayerSpec> arch_classifier(int in, const std::vector<int>& hidden,
                                       int out) {
  std::vector<LayerSpec> layers;
  int cur = in;
  for (int w : hidden) {
    DenseSpec d;
    d.in = layers.empty() ? cur : -1;
    d.out = w;
    d.act = ActivationKind::ReLU;
    layers.push_back(d);
  }
  DenseSpec o;
  o.in = layers.empty() ? in : -1;
  o.out = out;
  o.act = ActivationKind::Identity;
  layers.push_back(o);
  return layers;
}

std::vector<LayerSpec> arch_gld_classifier(int in, const std::vector<int>& hidden,
                                           int out, double drop_prob, bool late) {
  if (hidden.size() < 2)
    throw ConfigError("gld classifier needs at least two hidden widths");
  std::vector<LayerSpec> layers;
  // The dropout block spans two consecutive hidden layers, so it swaps in for
  // a dense pair without changing any parameter shape.
  size_t pair = late ? hidden.size() - 2 : 0;
  size_t i = 0;
  while (i < hidden.size()) {
    if (i == pair) {
      GenDropoutSpec gd;
      gd.in = i == 0 ? in : -1;
      gd.width = hidden[i];
      gd.out = hidden[i + 1];
      gd.act = ActivationKind::ReLU;
      gd.drop_prob = drop_prob;
      gd.bias = true;
      layers.push_back(gd);
      i += 2;
    } else {
      DenseSpec d;
      d.in = i == 0 ? in : -1;
      d.out = hidden[i];
      d.act = ActivationKind::ReLU;
      layers.push_back(d);
      ++i;
    }
  }
  DenseSpec o;
  o.out = out;
  o.act = ActivationKind::Identity;
  layers.push_back(o);
  return layers;
}

// ---- weight statistics -----------------------------------------------------

double weight_range(const Network& net) {
  double r = 0.0;
  for (const auto& blk : net.blocks) r = std::max(r, max_abs(blk.w));
  return r;
}

WeightHistogram weight_histogram(const Network& net, int bins, double range) {
  if (bins < 2) throw ConfigError("weight_histogram: bins must be >= 2");
  WeightHistogram h;
  h.range = range > 0.0 ? range : 1.0;
  h.counts.assign(size_t(bins), 0);
  h.edges.resize(size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    h.edges[size_t(i)] = -h.range + 2.0 * h.range * i / bins;
  }
  for (const auto& blk : net.blocks) {
    for (double w : blk.w.a) {
      double t = (w + h.range) / (2.0 * h.range) * bins;
      int idx = std::clamp(int(std::floor(t)), 0, bins - 1);
      ++h.counts[size_t(idx)];
      ++h.total;
    }
  }
  return h;
}

double weight_tail_mass(const Network& net, InitScheme scheme, double k) {
  long tail = 0, total = 0;
  for (const auto& blk : net.blocks) {
    double fan_in = blk.w.cols, fan_out = blk.w.rows;
    // Standard deviation of the block's init draw: He normal or the uniform
    // Xavier draw (half-width over sqrt 3).
    double sd = scheme == InitScheme::He
                    ? std::sqrt(2.0 / fan_in)
                    : std::sqrt(2.0 / (fan_in + fan_out));
    for (double w : blk.w.a) {
      if (std::fabs(w) > k * sd) ++tail;
      ++total;
    }
  }
  return total == 0 ? 0.0 : double(tail) / double(total);
}

// ---- report writing --------------------------------------------------------

void write_bounds_csv(const std::string& path, const Network& net,
                      const BregmanLoss& loss, const Dataset& data,
                      int max_rows) {
  const int rows =
      max_rows <= 0 ? data.size() : std::min(max_rows, data.size());
  std::vector<Vec> xs;
  xs.reserve(size_t(rows));
  for (int i = 0; i < rows; ++i) {
    Vec x(size_t(data.x.cols));
    for (int j = 0; j < data.x.cols; ++j) x[size_t(j)] = data.x(i, j);
    xs.push_back(std::move(x));
  }
  BoundChainReport rep = verify_bound_chain(net, loss, xs);

  std::string out =
      "index,sigma_max,trace_bound,spectral_bound,margin_trace,"
      "margin_spectral,violations\n";
  char line[256];
  for (size_t i = 0; i < rep.per_x.size(); ++i) {
    const BoundChainEntry& e = rep.per_x[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", i,
                  e.sigma_max, e.trace_bound, e.spectral_bound, e.margin_trace,
                  e.margin_spectral, e.holds ? 0 : 1);
    out += line;
  }
  write_text_file(path, out);
}

namespace {

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string checksum_hex(const Dataset& ds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(dataset_checksum(ds)));
  return buf;
}

void write_histograms_csv(const std::string& path, const WeightHistogram& init,
                          const WeightHistogram& fin) {
  std::string out = "bin_lo,bin_hi,init_count,final_count\n";
  char line[160];
  for (size_t i = 0; i < init.counts.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%ld,%ld\n", init.edges[i],
                  init.edges[i + 1], init.counts[i], fin.counts[i]);
    out += line;
  }
  write_text_file(path, out);
}

void put_finite(json& j, const char* key, double v) {
  if (std::isfinite(v)) j[key] = v;
}

// Context shared by every model trained inside one experiment.
struct RunContext {
  const ExperimentSpec* spec = nullptr;
  const LoadedData* data = nullptr;
  BregmanLoss loss{LossKind::Squared, 1};
  bool classification = false;
  bool stop_at_zero_error = false;
};

ModelRun run_model(const RunContext& ctx, const std::string& run_name,
                   const std::vector<LayerSpec>& layers, const TrainConfig& cfg,
                   std::uint64_t seed, const std::string& dir) {
  const ExperimentSpec& spec = *ctx.spec;
  const LoadedData& data = *ctx.data;
  std::filesystem::create_directories(dir);

  ModelRun run;
  run.name = run_name;
  run.seed = seed;
  run.dir = dir;

  Network net = init_network(layers, seed, spec.scheme);
  const Network at_init = net;
  run.params = net.num_params();
  run.sigma_product_init = sigma_squared_product(net);
  run.gl_sigma_product_init = gl_sigma_squared_product(net);
  run.tail_mass_init = weight_tail_mass(net, spec.scheme, spec.tail_k);

  const Dataset* test = data.has_test ? &data.test : nullptr;
  int trained_epochs = 0;
  if (ctx.stop_at_zero_error) {
    run.complete = false;
    while (trained_epochs < cfg.epochs) {
      TrainConfig chunk = cfg;
      chunk.epoch_offset = trained_epochs;
      chunk.epochs = std::min(spec.zero_error_check_every,
                              cfg.epochs - trained_epochs);
      TrainResult part = train(net, data.train, test, ctx.loss, chunk);
      for (auto& row : part.history) run.history.push_back(row);
      trained_epochs += chunk.epochs;
      if (classification_errors(net, data.train) == 0) {
        run.zero_error_epoch = trained_epochs;
        run.complete = true;
        break;
      }
    }
  } else {
    TrainResult res = train(net, data.train, test, ctx.loss, cfg);
    run.history = std::move(res.history);
    trained_epochs = cfg.epochs;
  }

  run.final_train_loss = dataset_loss(net, data.train, ctx.loss);
  run.final_test_loss =
      test ? dataset_loss(net, *test, ctx.loss) : kNaN;
  run.sigma_product_final = sigma_squared_product(net);
  run.gl_sigma_product_final = gl_sigma_squared_product(net);
  run.tail_mass_final = weight_tail_mass(net, spec.scheme, spec.tail_k);

  const bool squared = ctx.loss.kind == LossKind::Squared;
  if (squared) {
    // Squared Bregman value is half the squared error, so MSE = 2 * objective.
    run.final_train_mse = 2.0 * run.final_train_loss;
    run.final_test_mse = test ? 2.0 * run.final_test_loss : kNaN;
    const double floor = spec.overfit_factor * spec.data.sigma * spec.data.sigma;
    if (spec.data.sigma > 0.0) {
      run.overfit = run.final_train_mse < floor;
      for (const auto& row : run.history) {
        if (2.0 * row.train_loss < floor) {
          run.below_floor_epoch = row.epoch;
          break;
        }
      }
    }
  } else {
    run.final_train_mse = kNaN;
    run.final_test_mse = kNaN;
  }
  if (ctx.classification) {
    run.train_errors = classification_errors(net, data.train);
    run.test_errors = test ? classification_errors(net, *test) : -1;
  }

  // config.json: the resolved experiment plus what this run actually used.
  json cfg_j = json::parse(experiment_spec_json(spec));
  json run_j;
  run_j["name"] = run_name;
  run_j["seed"] = seed;
  run_j["loss"] = loss_name(ctx.loss.kind);
  run_j["train"] = train_to_json(cfg);
  json layers_j = json::array();
  for (const auto& l : layers) layers_j.push_back(layer_spec_to_json(l));
  run_j["layers"] = layers_j;
  run_j["train_checksum"] = checksum_hex(data.train);
  if (data.has_test) run_j["test_checksum"] = checksum_hex(data.test);
  json top;
  top["experiment"] = cfg_j;
  top["run"] = run_j;
  top["build_id"] = build_id();
  write_json_file(dir + "/config.json", top);

  write_history_csv(dir + "/history.csv", run.history);

  double range = std::max(weight_range(at_init), weight_range(net));
  WeightHistogram h0 = weight_histogram(at_init, spec.hist_bins, range);
  WeightHistogram h1 = weight_histogram(net, spec.hist_bins, range);
  write_histograms_csv(dir + "/histograms.csv", h0, h1);

  write_bounds_csv(dir + "/bounds.csv", net, ctx.loss, data.train,
                   kBoundsRows);

  save_checkpoint(dir + "/checkpoint.json", net, seed, spec.scheme,
                  cfg.epoch_offset + trained_epochs);

  json sum;
  sum["name"] = run_name;
  sum["seed"] = seed;
  sum["params"] = run.params;
  sum["build_id"] = build_id();
  sum["epochs_trained"] = trained_epochs;
  json fin;
  put_finite(fin, "train_loss", run.final_train_loss);
  put_finite(fin, "test_loss", run.final_test_loss);
  put_finite(fin, "train_mse", run.final_train_mse);
  put_finite(fin, "test_mse", run.final_test_mse);
  put_finite(fin, "sigma_product", run.sigma_product_final);
  put_finite(fin, "gl_sigma_product", run.gl_sigma_product_final);
  fin["tail_mass"] = run.tail_mass_final;
  if (ctx.classification) {
    fin["train_errors"] = run.train_errors;
    if (test) fin["test_errors"] = run.test_errors;
  }
  sum["final"] = fin;
  json ini;
  put_finite(ini, "sigma_product", run.sigma_product_init);
  put_finite(ini, "gl_sigma_product", run.gl_sigma_product_init);
  ini["tail_mass"] = run.tail_mass_init;
  sum["init"] = ini;
  if (squared && spec.data.sigma > 0.0) {
    json ov;
    ov["factor"] = spec.overfit_factor;
    ov["floor_mse"] = spec.overfit_factor * spec.data.sigma * spec.data.sigma;
    ov["flag"] = run.overfit;
    ov["below_floor_epoch"] = run.below_floor_epoch;
    sum["overfit"] = ov;
  }
  if (ctx.stop_at_zero_error) {
    sum["zero_error_epoch"] = run.zero_error_epoch;
    sum["complete"] = run.complete;
  }
  json dsj;
  dsj["train_checksum"] = checksum_hex(data.train);
  dsj["n_train"] = data.train.size();
  if (data.has_test) {
    dsj["test_checksum"] = checksum_hex(data.test);
    dsj["n_test"] = data.test.size();
  }
  sum["data"] = dsj;
  write_json_file(dir + "/summary.json", sum);

  return run;
}

std::string base_dir(const ExperimentSpec& spec) {
  std::string dir = spec.out_dir.empty() ? "runs/" + spec.name : spec.out_dir;
  std::filesystem::create_directories(dir);
  return dir;
}

void write_experiment_summary(const ExperimentResult& res,
                              const ExperimentSpec& spec) {
  json j;
  j["name"] = res.name;
  j["kind"] = res.kind;
  j["build_id"] = build_id();
  json m;
  for (const auto& [k, v] : res.metrics) put_finite(m, k.c_str(), v);
  j["metrics"] = m;
  json runs = json::array();
  for (const auto& r : res.runs) {
    json rj;
    rj["name"] = r.name;
    rj["dir"] = r.dir;
    rj["params"] = r.params;
    rj["seed"] = r.seed;
    put_finite(rj, "final_train_mse", r.final_train_mse);
    put_finite(rj, "final_test_mse", r.final_test_mse);
    put_finite(rj, "final_train_loss", r.final_train_loss);
    put_finite(rj, "final_test_loss", r.final_test_loss);
    if (r.train_errors >= 0) rj["train_errors"] = r.train_errors;
    if (r.test_errors >= 0) rj["test_errors"] = r.test_errors;
    runs.push_back(rj);
  }
  j["runs"] = runs;
  write_text_file(res.out_dir + "/config.json", experiment_spec_json(spec));
  write_json_file(res.out_dir + "/summary.json", j);
}

// Desk presets shrink the paper's synthetic architectures; full presets keep
// the published shapes and are exercised structurally (parameter counts), not
// trained by the test suite.
}  // namespace

std::vector<NamedArch> overfit_architectures(const std::string& scale) {
  if (scale == "full") {
    return {{"h1", arch_one_hidden(11999)},
            {"h7", arch_multi_hidden({79, 79, 79, 79, 79, 68, 73})},
            {"d119", arch_residual(17, 59, 1.0)}};
  }
  // Full carry doubles the signal at every one of the 59 blocks, which is
  // outside double range by layer 119; the desk preset tames the carry.
  return {{"h1", arch_one_hidden(149)},
          {"h7", arch_multi_hidden({40, 40, 40, 40, 40, 34, 37})},
          {"d119", arch_residual(9, 59, 0.35)}};
}

// ---- runners ----------------------------------------------------------------

ExperimentResult run_single(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  LoadedData data = load_data(spec.data, spec.seed);
  RunContext ctx;
  ctx.spec = &spec;
  ctx.data = &data;
  Network probe = init_network(spec.layers, spec.seed, spec.scheme);
  ctx.loss = loss_from_name(spec.loss, probe.output_dim);
  ctx.classification = ctx.loss.kind != LossKind::Squared;

  res.runs.push_back(run_model(ctx, "model", spec.layers, spec.train, spec.seed,
                               res.out_dir + "/model"));
  const ModelRun& r = res.runs[0];
  res.metrics["final_train_loss"] = r.final_train_loss;
  res.metrics["final_test_loss"] = r.final_test_loss;
  res.metrics["overfit"] = r.overfit ? 1.0 : 0.0;
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_overfit_demo(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  LoadedData data = load_data(spec.data, spec.seed);
  RunContext ctx;
  ctx.spec = &spec;
  ctx.data = &data;
  ctx.loss = loss_from_name("squared", 1);

  bool all = true;
  for (const auto& [name, layers] : overfit_architectures(spec.scale)) {
    TrainConfig cfg = spec.train;
    if (auto it = spec.lr_per_run.find(name); it != spec.lr_per_run.end())
      cfg.lr = Schedule::constant(it->second);
    ModelRun run = run_model(ctx, name, layers, cfg, spec.seed,
                             res.out_dir + "/" + name);
    res.metrics["overfit_" + name] = run.overfit ? 1.0 : 0.0;
    res.metrics["final_train_mse_" + name] = run.final_train_mse;
    res.metrics["below_floor_epoch_" + name] = run.below_floor_epoch;
    res.metrics["params_" + name] = double(run.params);
    all = all && run.overfit;
    res.runs.push_back(std::move(run));
  }
  res.metrics["overfit_all"] = all ? 1.0 : 0.0;
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_gl_demo(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  RunContext ctx;
  ctx.spec = &spec;
  ctx.loss = loss_from_name("squared", 1);

  // Width 17 is already desk sized; the desk preset instead tames the plain
  // skips' carry weight, which at full strength doubles the signal per block.
  const int width = 17;
  const double plain_nu = spec.scale == "full" ? 1.0 : 0.35;
  const std::vector<int> gl_positions = {11, 23, 35};
  std::vector<LayerSpec> gl_layers =
      arch_gl_stack(width, 45, gl_positions, plain_nu);
  std::vector<LayerSpec> van_layers = arch_gl_stack(width, 45, {}, plain_nu);
  // The vanilla twin keeps full carry on the three would-be GL skips so that
  // "minus the GL regime" also means no nu decay there.
  for (int p : gl_positions) {
    std::get<GenSkipSpec>(van_layers[size_t(p)]).nu = Schedule::constant(1.0);
  }

  int gl_wins = 0;
  bool products_ok = true;
  for (int r = 0; r < spec.repeats; ++r) {
    std::uint64_t seed = spec.seed + std::uint64_t(r);
    LoadedData data = load_data(spec.data, seed);
    ctx.data = &data;
    std::string tag = "_s" + std::to_string(r);

    TrainConfig gl_cfg = spec.train;
    ModelRun gl_run = run_model(ctx, "gl" + tag, gl_layers, gl_cfg, seed,
                                res.out_dir + "/gl" + tag);

    TrainConfig van_cfg = spec.train;
    van_cfg.nu_schedule = Schedule::constant(1.0);
    ModelRun van_run = run_model(ctx, "vanilla" + tag, van_layers, van_cfg, seed,
                                 res.out_dir + "/vanilla" + tag);

    const double ratio =
        gl_run.gl_sigma_product_final / gl_run.gl_sigma_product_init;
    res.metrics["gl_final_test_mse" + tag] = gl_run.final_test_mse;
    res.metrics["vanilla_final_test_mse" + tag] = van_run.final_test_mse;
    res.metrics["gl_product_ratio" + tag] = ratio;
    if (gl_run.final_test_mse <= van_run.final_test_mse) ++gl_wins;
    products_ok = products_ok && ratio <= 1.5;

    if (r == 0) {
      // nu is logged per history row; the 500-epoch row must sit at 0.1.
      for (const auto& row : gl_run.history) {
        if (row.epoch == 500) res.metrics["nu_at_500"] = row.nu;
        if (row.epoch == spec.train.epochs) res.metrics["nu_at_end"] = row.nu;
      }
    }
    res.runs.push_back(std::move(gl_run));
    res.runs.push_back(std::move(van_run));
  }
  res.metrics["gl_wins"] = gl_wins;
  res.metrics["repeats"] = spec.repeats;
  res.metrics["gl_majority"] = 2 * gl_wins > spec.repeats ? 1.0 : 0.0;
  res.metrics["gl_products_bounded"] = products_ok ? 1.0 : 0.0;
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_longskip_demo(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  LoadedData data = load_data(spec.data, spec.seed);
  RunContext ctx;
  ctx.spec = &spec;
  ctx.data = &data;
  ctx.loss = loss_from_name("squared", 1);

  const bool full = spec.scale == "full";
  std::vector<LayerSpec> layers = full ? arch_long_skip(17, 16, 6, 6, 1.0)
                                       : arch_long_skip(9, 16, 6, 6, 0.5);

  TrainConfig sgd_cfg = spec.train;
  sgd_cfg.optimizer = OptimizerKind::SGD;
  ModelRun sgd_run =
      run_model(ctx, "sgd", layers, sgd_cfg, spec.seed, res.out_dir + "/sgd");

  TrainConfig adam_cfg = spec.train;
  adam_cfg.optimizer = OptimizerKind::Adam;
  // Plain SGD on this depth needs a far smaller step than Adam; the paper
  // trains the pair with each optimizer's own conventional rate.
  adam_cfg.lr = Schedule::constant(full ? 1e-4 : 1e-3);
  ModelRun adam_run =
      run_model(ctx, "adam", layers, adam_cfg, spec.seed, res.out_dir + "/adam");

  res.metrics["sgd_floor_epoch"] = sgd_run.below_floor_epoch;
  res.metrics["adam_floor_epoch"] = adam_run.below_floor_epoch;
  const bool adam_earlier =
      adam_run.below_floor_epoch >= 0 &&
      (sgd_run.below_floor_epoch < 0 ||
       adam_run.below_floor_epoch < sgd_run.below_floor_epoch);
  res.metrics["adam_strictly_earlier"] = adam_earlier ? 1.0 : 0.0;
  res.runs.push_back(std::move(sgd_run));
  res.runs.push_back(std::move(adam_run));
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_weight_histogram(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  LoadedData true_data = load_data(spec.data, spec.seed);
  DataSpec rnd_spec = spec.data;
  rnd_spec.randomized_labels = true;
  LoadedData rnd_data = load_data(rnd_spec, spec.seed);

  RunContext ctx;
  ctx.spec = &spec;
  ctx.loss = loss_from_name(spec.loss, 10);
  ctx.classification = true;
  ctx.stop_at_zero_error = true;

  std::vector<LayerSpec> layers =
      arch_classifier(784, spec.scale == "full" ? std::vector<int>{512}
                                                : std::vector<int>{256},
                      10);

  ctx.data = &true_data;
  ModelRun true_run = run_model(ctx, "true_labels", layers, spec.train,
                                spec.seed, res.out_dir + "/true_labels");
  ctx.data = &rnd_data;
  ModelRun rnd_run = run_model(ctx, "random_labels", layers, spec.train,
                               spec.seed, res.out_dir + "/random_labels");

  res.metrics["true_tail_init"] = true_run.tail_mass_init;
  res.metrics["true_tail_final"] = true_run.tail_mass_final;
  res.metrics["random_tail_final"] = rnd_run.tail_mass_final;
  res.metrics["true_zero_epoch"] = true_run.zero_error_epoch;
  res.metrics["random_zero_epoch"] = rnd_run.zero_error_epoch;
  res.metrics["complete"] =
      true_run.complete && rnd_run.complete ? 1.0 : 0.0;
  res.metrics["random_tail_heavier"] =
      rnd_run.tail_mass_final > true_run.tail_mass_final ? 1.0 : 0.0;
  res.runs.push_back(std::move(true_run));
  res.runs.push_back(std::move(rnd_run));
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_gld_demo(const ExperimentSpec& spec) {
  ExperimentResult res;
  res.kind = spec.kind;
  res.name = spec.name;
  res.out_dir = base_dir(spec);

  LoadedData data = load_data(spec.data, spec.seed);
  RunContext ctx;
  ctx.spec = &spec;
  ctx.data = &data;
  ctx.loss = loss_from_name(spec.loss, 10);
  ctx.classification = true;

  const std::vector<int> hidden =
      spec.scale == "full" ? std::vector<int>{512, 256, 128}
                           : std::vector<int>{256, 128, 64};
  const int n_test = data.has_test ? data.test.size() : 0;
  auto accuracy = [&](const ModelRun& r) {
    return n_test > 0 ? 1.0 - double(r.test_errors) / n_test : kNaN;
  };
  auto prob_tag = [](double p) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%02d", int(std::lround(p * 100)));
    return std::string(buf);
  };

  // Baseline pair: plain stack, and the degenerate dropout block at p = 0,
  // which must reproduce it bit for bit.
  ModelRun plain = run_model(ctx, "plain", arch_classifier(784, hidden, 10),
                             spec.train, spec.seed, res.out_dir + "/plain");
  ModelRun p0 =
      run_model(ctx, "p00", arch_gld_classifier(784, hidden, 10, 0.0, true),
                spec.train, spec.seed, res.out_dir + "/p00");
  res.metrics["acc_plain"] = accuracy(plain);
  res.metrics["acc_p00"] = accuracy(p0);
  bool identical = plain.history.size() == p0.history.size();
  if (identical) {
    for (size_t i = 0; i < plain.history.size(); ++i) {
      identical = identical &&
                  plain.history[i].train_loss == p0.history[i].train_loss &&
                  plain.history[i].test_loss == p0.history[i].test_loss;
    }
  }
  res.metrics["p0_matches_plain"] = identical ? 1.0 : 0.0;
  res.runs.push_back(std::move(plain));
  res.runs.push_back(std::move(p0));

  for (double p : spec.drop_probs) {
    std::string tag = prob_tag(p);
    ModelRun run =
        run_model(ctx, tag, arch_gld_classifier(784, hidden, 10, p, true),
                  spec.train, spec.seed, res.out_dir + "/" + tag);
    res.metrics["acc_" + tag] = accuracy(run);
    res.metrics["sigma_ratio_" + tag] =
        run.sigma_product_final / run.sigma_product_init;
    res.runs.push_back(std::move(run));
  }

  // Placement ablation at the middle drop rate: recorded, not asserted.
  const double p_ab = spec.drop_probs.empty() ? 0.5 : spec.drop_probs[
      spec.drop_probs.size() / 2];
  ModelRun late =
      run_model(ctx, "late", arch_gld_classifier(784, hidden, 10, p_ab, true),
                spec.train, spec.seed, res.out_dir + "/late");
  ModelRun early =
      run_model(ctx, "early", arch_gld_classifier(784, hidden, 10, p_ab, false),
                spec.train, spec.seed, res.out_dir + "/early");
  res.metrics["ablation_drop_prob"] = p_ab;
  res.metrics["acc_late"] = accuracy(late);
  res.metrics["acc_early"] = accuracy(early);
  res.metrics["late_ge_early"] =
      accuracy(late) >= accuracy(early) ? 1.0 : 0.0;
  res.runs.push_back(std::move(late));
  res.runs.push_back(std::move(early));
  write_experiment_summary(res, spec);
  return res;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  if (spec.kind == "overfit") return run_overfit_demo(spec);
  if (spec.kind == "gl") return run_gl_demo(spec);
  if (spec.kind == "longskip") return run_longskip_demo(spec);
  if (spec.kind == "histogram") return run_weight_histogram(spec);
  if (spec.kind == "gld") return run_gld_demo(spec);
  return run_single(spec);
}

}  // namespace netgeom
