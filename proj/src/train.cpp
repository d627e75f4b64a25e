#include "netgeom/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "netgeom/errors.hpp"
#include "netgeom/geometry.hpp"
#include "netgeom/rng.hpp"

namespace netgeom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (cfg.batch_size < 0) throw ConfigError("train: batch_size must be >= 0");
  if (cfg.log_every < 1) throw ConfigError("train: log_every must be >= 1");
  if (cfg.probe_size < 0) throw ConfigError("train: probe_size must be >= 0");
  if (cfg.gl_lr_warmup_epochs < 0) {
    throw ConfigError("train: gl_lr_warmup_epochs must be >= 0");
  }
  if (!(cfg.gl_lr_multiplier > 0.0) || cfg.gl_lr_multiplier > 1.0) {
    throw ConfigError("train: gl_lr_multiplier must lie in (0, 1]");
  }
  if (cfg.checkpoint_every < 0) {
    throw ConfigError("train: checkpoint_every must be >= 0");
  }
  if (cfg.epoch_offset < 0) {
    throw ConfigError("train: epoch_offset must be >= 0");
  }
}

void validate_data(const Network& net, const Dataset& data,
                   const BregmanLoss& loss, const char* which) {
  if (data.size() == 0) {
    throw DataError(std::string("train: ") + which + " set is empty");
  }
  if (data.x.cols != net.input_dim) {
    throw DataError(std::string("train: ") + which + " inputs have " +
                    std::to_string(data.x.cols) + " columns, network expects " +
                    std::to_string(net.input_dim));
  }
  if (data.y.cols != net.output_dim) {
    throw DataError(std::string("train: ") + which + " targets have " +
                    std::to_string(data.y.cols) + " columns, network emits " +
                    std::to_string(net.output_dim));
  }
  if (loss.dim != net.output_dim) {
    throw DataError("train: loss dimension " + std::to_string(loss.dim) +
                    " does not match network output " +
                    std::to_string(net.output_dim));
  }
}

std::vector<int> gl_layers(const Network& net) {
  std::vector<int> out;
  for (size_t l = 0; l < net.specs.size(); ++l) {
    if (const auto* gs = std::get_if<GenSkipSpec>(&net.specs[l])) {
      if (gs->gl) out.push_back(int(l));
    }
  }
  return out;
}

[[noreturn]] void abort_divergence(const Network& net, double loss_val,
                                   int epoch, int batch) {
  std::ostringstream os;
  os << "train: non-finite loss " << loss_val << " at epoch " << epoch
     << " batch " << batch << "; layer norms:";
  for (const auto& blk : net.blocks) {
    os << ' ' << blk.name << '=' << fro_norm(blk.w);
  }
  throw DivergenceError(os.str());
}

}  // namespace

double dataset_loss(const Network& net, const Dataset& data,
                    const BregmanLoss& loss) {
  Matrix z = forward(net, data.x, Mode::Eval);
  double total = 0.0;
  Vec zi(size_t(z.cols)), yi(size_t(data.y.cols));
  for (int i = 0; i < z.rows; ++i) {
    for (int j = 0; j < z.cols; ++j) zi[size_t(j)] = z(i, j);
    for (int j = 0; j < data.y.cols; ++j) yi[size_t(j)] = data.y(i, j);
    total += loss.value(zi, yi);
  }
  return total / z.rows;
}

int classification_errors(const Network& net, const Dataset& data) {
  Matrix z = forward(net, data.x, Mode::Eval);
  int errors = 0;
  for (int i = 0; i < z.rows; ++i) {
    int pz = 0, py = 0;
    for (int j = 1; j < z.cols; ++j) {
      if (z(i, j) > z(i, pz)) pz = j;
    }
    for (int j = 1; j < data.y.cols; ++j) {
      if (data.y(i, j) > data.y(i, py)) py = j;
    }
    if (pz != py) ++errors;
  }
  return errors;
}

TrainResult train(Network& net, const Dataset& train_data,
                  const Dataset* test_data, const BregmanLoss& loss,
                  const TrainConfig& cfg, const std::vector<TrainHook>& hooks) {
  validate_config(cfg);
  validate_data(net, train_data, loss, "train");
  if (test_data) validate_data(net, *test_data, loss, "test");

  TrainResult result;
  if (cfg.epochs == 0) return result;

  const int n = train_data.size();
  const int bs = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  const bool minibatch = bs < n;
  const std::vector<int> gl = gl_layers(net);

  SplitMix64 shuffle_rng = named_stream(cfg.seed, "shuffle");
  SplitMix64 dropout_rng = named_stream(cfg.seed, "dropout");
  AdamState adam = cfg.optimizer == OptimizerKind::Adam ? AdamState::like(net)
                                                        : AdamState{};
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  Matrix xb(bs, train_data.x.cols), yb(bs, train_data.y.cols);
  Vec zi(size_t(net.output_dim)), yi(size_t(net.output_dim));

  for (int step = 0; step < cfg.epochs; ++step) {
    const int epoch = cfg.epoch_offset + step;
    net.set_epoch(epoch);
    const double nu_e = cfg.nu_schedule.at(epoch);
    if (!gl.empty()) {
      if (!(nu_e > 0.0) || nu_e > 1.0 || !std::isfinite(nu_e)) {
        throw ConfigError("train: nu_schedule value " + std::to_string(nu_e) +
                          " at epoch " + std::to_string(epoch) +
                          " is outside (0, 1]");
      }
      for (int l : gl) net.nu[size_t(l)] = nu_e;
    }
    const double lr_e = cfg.lr.at(epoch);
    if (!(lr_e > 0.0) || !std::isfinite(lr_e)) {
      throw ConfigError("train: lr must be positive and finite at epoch " +
                        std::to_string(epoch));
    }

    GroupSettings groups;
    groups.weight_decay = cfg.weight_decay;
    groups.lr_multiplier[ParamGroup::GL] =
        epoch >= cfg.gl_lr_warmup_epochs ? cfg.gl_lr_multiplier : 1.0;

    if (minibatch) {
      for (int i = n - 1; i > 0; --i) {
        int j = int(shuffle_rng.next_below(std::uint64_t(i) + 1));
        std::swap(order[size_t(i)], order[size_t(j)]);
      }
    }

    for (int start = 0; start < n; start += bs) {
      const int count = std::min(bs, n - start);
      if (xb.rows != count) {
        xb = Matrix(count, train_data.x.cols);
        yb = Matrix(count, train_data.y.cols);
      }
      for (int r = 0; r < count; ++r) {
        const int src = order[size_t(start + r)];
        for (int j = 0; j < xb.cols; ++j) xb(r, j) = train_data.x(src, j);
        for (int j = 0; j < yb.cols; ++j) yb(r, j) = train_data.y(src, j);
      }

      ForwardTape tape;
      Matrix z = forward(net, xb, Mode::Train, &dropout_rng, &tape);

      double batch_loss = 0.0;
      Matrix lg(count, net.output_dim);
      const double inv = 1.0 / count;
      for (int r = 0; r < count; ++r) {
        for (int j = 0; j < net.output_dim; ++j) {
          zi[size_t(j)] = z(r, j);
          yi[size_t(j)] = yb(r, j);
        }
        batch_loss += loss.value(zi, yi);
        Vec g = loss.grad_z(zi, yi);
        for (int j = 0; j < net.output_dim; ++j) lg(r, j) = g[size_t(j)] * inv;
      }
      batch_loss *= inv;
      if (!std::isfinite(batch_loss)) {
        abort_divergence(net, batch_loss, epoch, start / bs);
      }

      Gradients grads = backward(net, tape, lg);
      if (cfg.optimizer == OptimizerKind::Adam) {
        adam_step(net, grads, adam, lr_e, groups, cfg.beta1, cfg.beta2,
                  cfg.adam_eps);
      } else {
        sgd_step(net, grads, lr_e, groups);
      }
    }

    const int done = epoch + 1;
    if (done % cfg.log_every == 0 || step + 1 == cfg.epochs) {
      HistoryRow row;
      row.epoch = done;
      row.train_loss = dataset_loss(net, train_data, loss);
      row.test_loss = test_data ? dataset_loss(net, *test_data, loss) : kNaN;
      row.sigma_product = sigma_squared_product(net);
      if (cfg.probe_size > 0) {
        const int k = std::min(cfg.probe_size, n);
        double sum = 0.0, mx = 0.0;
        Vec x(size_t(net.input_dim));
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < net.input_dim; ++j) {
            x[size_t(j)] = train_data.x(i, j);
          }
          double s = pulled_back_metric(net, loss, x).sigma_max;
          sum += s;
          mx = std::max(mx, s);
        }
        row.probe_sigma_max_mean = sum / k;
        row.probe_sigma_max_max = mx;
      } else {
        row.probe_sigma_max_mean = kNaN;
        row.probe_sigma_max_max = kNaN;
      }
      row.nu = nu_e;
      row.lr = lr_e;
      result.history.push_back(row);
      for (const auto& hook : hooks) hook(done, net, row);
    }
  }
  return result;
}

}  // namespace netgeom
