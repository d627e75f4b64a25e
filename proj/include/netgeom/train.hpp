#pragma once

#include <functional>
#include <optional>
#include <string>

#include "netgeom/bregman.hpp"
#include "netgeom/dataset.hpp"
#include "netgeom/network.hpp"
#include "netgeom/optimizer.hpp"
#include "netgeom/schedule.hpp"

namespace netgeom {

enum class OptimizerKind { SGD, Adam };

struct TrainConfig {
  int epochs = 0;
  int batch_size = 0;  // 0 means full batch
  uint64_t seed = 0;   // shuffle + dropout streams derive from this
  OptimizerKind optimizer = OptimizerKind::SGD;
  Schedule lr = Schedule::constant(1e-3);

  // GL regime: nu for gl-flagged skip layers follows nu_schedule; their W_g
  // blocks get gl_lr_multiplier once the warmup is over.
  Schedule nu_schedule = Schedule::constant(1.0);
  double gl_lr_multiplier = 0.1;
  int gl_lr_warmup_epochs = 20;

  std::map<ParamGroup, double> weight_decay;

  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  int log_every = 1;
  int checkpoint_every = 0;  // consumed by the experiment harness via hooks
  int probe_size = 0;        // leading train rows probed for sigma_max(zeta)

  // Schedules, warmup and history epochs run from epoch_offset, so a run can
  // be split into chunks (train, inspect, continue) without perturbing them.
  int epoch_offset = 0;
};

struct HistoryRow {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;  // nan without a test set
  double sigma_product = 0.0;
  double probe_sigma_max_mean = 0.0;  // nan when probe_size == 0
  double probe_sigma_max_max = 0.0;
  double nu = 1.0;
  double lr = 0.0;
};

using TrainHook = std::function<void(int epoch, const Network&, const HistoryRow&)>;

struct TrainResult {
  std::vector<HistoryRow> history;
};

// Mean loss over a dataset in eval mode.
double dataset_loss(const Network& net, const Dataset& data, const BregmanLoss& loss);
// Classification error count (argmax of output vs argmax of target).
int classification_errors(const Network& net, const Dataset& data);

TrainResult train(Network& net, const Dataset& train_data, const Dataset* test_data,
                  const BregmanLoss& loss, const TrainConfig& cfg,
                  const std::vector<TrainHook>& hooks = {});

}  // namespace netgeom
