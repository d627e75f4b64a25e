// netgeom command line: data generation, experiment runs, checkpoint
// analysis and the property suite. Library code throws; this file maps
// exceptions to the exit-code contract (0 ok, 1 property/divergence,
// 2 config, 3 data).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netgeom/checkpoint.hpp"
#include "netgeom/dataset.hpp"
#include "netgeom/errors.hpp"
#include "netgeom/experiments.hpp"
#include "netgeom/geometry.hpp"
#include "netgeom/verify.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace netgeom;

namespace {

void ensure_parent_dir(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void echo_config(const json& j) {
  std::printf("%s\n", j.dump(2).c_str());
}

struct GenDataArgs {
  std::string fn = "quadratic";
  int n = 100;
  double lo = -8.0;
  double hi = 8.0;
  double sigma = 10.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a) {
  if (a.fn != "quadratic" && a.fn != "cubic")
    throw ConfigError("gen-data: --fn must be quadratic or cubic, got '" +
                      a.fn + "'");
  if (a.n < 2) throw ConfigError("gen-data: --n must be >= 2");
  if (!(a.lo < a.hi)) throw ConfigError("gen-data: need --lo < --hi");
  if (a.sigma < 0.0) throw ConfigError("gen-data: --sigma must be >= 0");

  Dataset ds = a.fn == "quadratic"
                   ? gen_quadratic(a.n, a.lo, a.hi, a.sigma, a.seed)
                   : gen_cubic_mix(a.n, a.lo, a.hi, a.sigma, a.seed);
  ensure_parent_dir(a.out);
  write_dataset_csv(a.out, ds);

  char checksum[24];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(dataset_checksum(ds)));
  json j;
  j["command"] = "gen-data";
  j["fn"] = a.fn;
  j["n"] = a.n;
  j["lo"] = a.lo;
  j["hi"] = a.hi;
  j["sigma"] = a.sigma;
  j["seed"] = a.seed;
  j["out"] = a.out;
  j["rows"] = ds.size();
  j["checksum"] = checksum;
  echo_config(j);
  return kExitOk;
}

struct TrainArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  if (!fs::exists(a.config))
    throw ConfigError("train: config file not found: " + a.config);
  ExperimentSpec spec = load_experiment_spec(a.config);
  if (a.seed_set) spec.seed = a.seed;
  if (!a.out.empty()) spec.out_dir = a.out;
  std::printf("%s", experiment_spec_json(spec).c_str());

  ExperimentResult res = run_experiment(spec);
  json j;
  j["command"] = "train";
  j["kind"] = res.kind;
  j["out_dir"] = res.out_dir;
  for (const auto& [k, v] : res.metrics) j["metrics"][k] = v;
  echo_config(j);
  return kExitOk;
}

struct AnalyzeArgs {
  std::string checkpoint;
  std::string data;
  std::string loss = "squared";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  LoadedCheckpoint ck = load_checkpoint(a.checkpoint);
  Dataset ds = read_dataset_csv(a.data);
  if (ds.x.cols != ck.net.input_dim)
    throw DataError("analyze: data has " + std::to_string(ds.x.cols) +
                    " feature columns but the checkpoint expects " +
                    std::to_string(ck.net.input_dim));
  BregmanLoss loss = loss_from_name(a.loss, ck.net.output_dim);

  fs::create_directories(a.out);
  write_bounds_csv(a.out + "/bounds.csv", ck.net, loss, ds, 0);

  std::vector<Vec> xs;
  xs.reserve(static_cast<size_t>(ds.size()));
  for (int i = 0; i < ds.size(); ++i) {
    Vec x(static_cast<size_t>(ds.x.cols));
    for (int j = 0; j < ds.x.cols; ++j) x[static_cast<size_t>(j)] = ds.x(i, j);
    xs.push_back(std::move(x));
  }
  BoundChainReport rep = verify_bound_chain(ck.net, loss, xs);

  json j;
  j["command"] = "analyze";
  j["checkpoint"] = a.checkpoint;
  j["checkpoint_epoch"] = ck.epoch;
  j["data"] = a.data;
  j["rows"] = ds.size();
  j["loss"] = a.loss;
  j["out"] = a.out;
  j["sigma_product"] = rep.sigma_product;
  j["violations"] = 0;
  int violations = 0;
  for (const auto& e : rep.per_x) violations += e.holds ? 0 : 1;
  j["violations"] = violations;
  echo_config(j);

  if (!rep.all_hold) {
    std::fprintf(stderr,
                 "analyze: bound chain violated at row %d; the chain is a "
                 "theorem, so this indicates an implementation bug\n",
                 rep.first_violation);
    return kExitPropertyFailure;
  }
  return kExitOk;
}

struct VerifyArgs {
  bool quick = false;
  std::uint64_t seed = 71;
};

int cmd_verify(const VerifyArgs& a) {
  VerifyOptions opts;
  opts.quick = a.quick;
  opts.seed = a.seed;
  std::printf("property suite (%s, seed %llu)\n", a.quick ? "quick" : "full",
              static_cast<unsigned long long>(opts.seed));
  VerifyReport rep = run_property_suite(opts);
  for (const auto& r : rep.results)
    std::printf("%-4s %-42s cases %4d  worst %.3g\n", r.passed ? "ok" : "FAIL",
                r.name.c_str(), r.checked, r.worst);
  if (!rep.all_passed) {
    const PropertyResult* f = rep.first_failure();
    std::fprintf(stderr, "verify: %s failed; counterexample:\n%s\n",
                 f->name.c_str(), f->counterexample.c_str());
    return kExitPropertyFailure;
  }
  std::printf("all properties hold\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulled-back metric toolkit: data, training, bounds, checks"};
  app.require_subcommand(1);

  GenDataArgs ga;
  CLI::App* gen = app.add_subcommand("gen-data", "write a synthetic dataset CSV");
  gen->add_option("--fn", ga.fn, "quadratic or cubic")->capture_default_str();
  gen->add_option("--n", ga.n, "grid points")->capture_default_str();
  gen->add_option("--lo", ga.lo, "interval start")->capture_default_str();
  gen->add_option("--hi", ga.hi, "interval end")->capture_default_str();
  gen->add_option("--sigma", ga.sigma, "noise std")->capture_default_str();
  gen->add_option("--seed", ga.seed, "noise seed")->capture_default_str();
  gen->add_option("--out", ga.out, "output CSV path")->required();

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "run an experiment spec");
  train->add_option("--config", ta.config, "experiment JSON")->required();
  CLI::Option* seed_opt =
      train->add_option("--seed", ta.seed, "override spec seed");
  train->add_option("--out", ta.out, "override output directory");

  AnalyzeArgs aa;
  CLI::App* analyze =
      app.add_subcommand("analyze", "bound-chain report for a checkpoint");
  analyze->add_option("--checkpoint", aa.checkpoint, "checkpoint JSON")
      ->required();
  analyze->add_option("--data", aa.data, "dataset CSV")->required();
  analyze->add_option("--loss", aa.loss, "squared, softmax_ce or bernoulli")
      ->capture_default_str();
  analyze->add_option("--out", aa.out, "output directory")->required();

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand("verify", "run the property suite");
  verify->add_flag("--quick", va.quick, "reduced case counts");
  verify->add_option("--seed", va.seed, "suite seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  ta.seed_set = seed_opt->count() > 0;

  try {
    if (gen->parsed()) return cmd_gen_data(ga);
    if (train->parsed()) return cmd_train(ta);
    if (analyze->parsed()) return cmd_analyze(aa);
    return cmd_verify(va);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitDataError;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitPropertyFailure;
  }
}
