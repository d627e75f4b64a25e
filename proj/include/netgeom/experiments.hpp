#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netgeom/dataset.hpp"
#include "netgeom/network.hpp"
#include "netgeom/train.hpp"

namespace netgeom {

// Training data source. kind selects the loader:
//   quadratic | cubic_mix   noisy grid generators, clean test grid alongside
//   synth_digits            bundled 28x28 digit corpus, split train/test
//   mnist                   IDX pair on disk, split train/test
//   csv                     cached dataset CSVs (train required, test optional)
struct DataSpec {
  std::string kind = "quadratic";
  int n = 100;
  double lo = -8.0;
  double hi = 8.0;
  double sigma = 10.0;
  int test_n = 256;             // clean grid size for the generator kinds
  double test_fraction = 0.2;   // holdout share for the classifier kinds
  bool randomized_labels = false;
  std::string images;           // mnist: IDX image / label paths
  std::string labels;
  std::string train_csv;        // csv: cached files
  std::string test_csv;
};

struct LoadedData {
  Dataset train;
  Dataset test;
  bool has_test = false;
};

// Everything a run needs. parse_experiment_spec starts from the preset for
// (kind, scale) and overlays whatever keys the JSON provides, so shipped
// configs stay small while every report echoes the fully resolved form.
struct ExperimentSpec {
  std::string name;
  std::string kind = "single";  // single|overfit|gl|longskip|histogram|gld
  std::string scale = "desk";   // desk|full
  std::uint64_t seed = 1;
  std::string out_dir;          // empty: runs/<name>
  InitScheme scheme = InitScheme::He;
  std::string loss = "squared";
  DataSpec data;
  std::vector<LayerSpec> layers;  // used by kind=single; demos build their own
  TrainConfig train;
  // Overfit demo: constant-lr override keyed by run name (h1/h7/d119). The
  // three nets sit at very different curvature scales, so one lr cannot
  // serve all of them; runs without an entry keep train.lr.
  std::map<std::string, double> lr_per_run;

  // Harness constants, echoed into every report.
  double overfit_factor = 0.5;  // overfit = train MSE < factor * sigma^2
  int hist_bins = 64;
  double tail_k = 2.0;          // tail mass counts |w| > k * init_sd
  std::vector<double> drop_probs = {0.5, 0.6, 0.75};
  int repeats = 3;              // paired seeds for the gl demo
  int zero_error_check_every = 1;  // histogram: epochs between error checks
};

ExperimentSpec experiment_preset(const std::string& kind, const std::string& scale);
ExperimentSpec parse_experiment_spec(const std::string& json_text);
ExperimentSpec load_experiment_spec(const std::string& path);
std::string experiment_spec_json(const ExperimentSpec& spec);

// Identifier baked in at configure time (git describe --always --dirty).
std::string build_id();

LoadedData load_data(const DataSpec& data, std::uint64_t seed);

// One trained model inside an experiment.
struct ModelRun {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t params = 0;
  std::vector<HistoryRow> history;
  double final_train_loss = 0.0;
  double final_test_loss = 0.0;
  double final_train_mse = 0.0;  // 2x squared-Bregman objective
  double final_test_mse = 0.0;
  int train_errors = -1;  // classification kinds only
  int test_errors = -1;
  double sigma_product_init = 0.0;
  double sigma_product_final = 0.0;
  double gl_sigma_product_init = 0.0;
  double gl_sigma_product_final = 0.0;
  double tail_mass_init = 0.0;
  double tail_mass_final = 0.0;
  bool overfit = false;
  int below_floor_epoch = -1;  // first logged epoch under the noise floor
  int zero_error_epoch = -1;   // histogram runs
  bool complete = true;        // histogram: zero error reached in budget
  std::string dir;
};

struct ExperimentResult {
  std::string kind;
  std::string name;
  std::string out_dir;
  std::vector<ModelRun> runs;
  std::map<std::string, double> metrics;
};

// Dispatches on spec.kind. Every runner writes, per trained model, a
// directory with config.json, history.csv, histograms.csv, bounds.csv,
// summary.json and checkpoint.json, plus aggregate config/summary at the top.
ExperimentResult run_experiment(const ExperimentSpec& spec);
ExperimentResult run_single(const ExperimentSpec& spec);
ExperimentResult run_overfit_demo(const ExperimentSpec& spec);
ExperimentResult run_gl_demo(const ExperimentSpec& spec);
ExperimentResult run_longskip_demo(const ExperimentSpec& spec);
ExperimentResult run_weight_histogram(const ExperimentSpec& spec);
ExperimentResult run_gld_demo(const ExperimentSpec& spec);

// Architecture builders, exposed for structural tests.
std::vector<LayerSpec> arch_one_hidden(int width);
std::vector<LayerSpec> arch_multi_hidden(const std::vector<int>& widths);
// in -> Dense(width) -> blocks x GenSkip(width, inner 1) -> Dense(1).
std::vector<LayerSpec> arch_residual(int width, int blocks, double nu);
// The three overfit-demo architectures at the given scale, keyed by run name.
struct NamedArch {
  std::string name;
  std::vector<LayerSpec> layers;
};
std::vector<NamedArch> overfit_architectures(const std::string& scale);
// Long skips: GenSkip(inner) spans inner+1 layers per block.
std::vector<LayerSpec> arch_long_skip(int width, int blocks, int inner,
                                      int tail_dense, double nu);
// GL stack: skips GenSkip blocks, the ones listed in gl_positions carry the
// GL flag (their W_g lands in the GL parameter group).
std::vector<LayerSpec> arch_gl_stack(int width, int blocks,
                                     const std::vector<int>& gl_positions,
                                     double nu);
std::vector<LayerSpec> arch_classifier(int in, const std::vector<int>& hidden,
                                       int out);
// Classifier with one GenDropout block; late places it last-but-one, early
// right after the input layer.
std::vector<LayerSpec> arch_gld_classifier(int in, const std::vector<int>& hidden,
                                           int out, double drop_prob, bool late);

// Histogram over all weight entries (biases excluded), bins symmetric about
// zero: [-range, range) split into bins cells. Also used for reports.
struct WeightHistogram {
  std::vector<double> edges;   // bins + 1 entries
  std::vector<long> counts;    // bins entries
  double range = 0.0;
  long total = 0;
};
WeightHistogram weight_histogram(const Network& net, int bins, double range);
// Largest |w| over weight entries.
double weight_range(const Network& net);
// Share of weight entries with |w| > k * init_sd of their own block, where
// init_sd is the He/Xavier standard deviation for the block's fan.
double weight_tail_mass(const Network& net, InitScheme scheme, double k);

// Bound-chain sweep over the first max_rows rows of data (all rows when
// max_rows <= 0), one CSV line per datum, violations column last.
void write_bounds_csv(const std::string& path, const Network& net,
                      const BregmanLoss& loss, const Dataset& data,
                      int max_rows);

}  // namespace netgeom
