#pragma once

#include <map>

#include "netgeom/network.hpp"

namespace netgeom {

// Per-group learning-rate multipliers and weight decay. Groups not present
// fall back to multiplier 1 / decay 0.
struct GroupSettings {
  std::map<ParamGroup, double> lr_multiplier;
  std::map<ParamGroup, double> weight_decay;

  double mult(ParamGroup g) const {
    auto it = lr_multiplier.find(g);
    return it == lr_multiplier.end() ? 1.0 : it->second;
  }
  double decay(ParamGroup g) const {
    auto it = weight_decay.find(g);
    return it == weight_decay.end() ? 0.0 : it->second;
  }
};

// w <- w - lr * mult(group) * (grad + decay(group) * w)
void sgd_step(Network& net, const Gradients& grads, double lr,
              const GroupSettings& groups);

struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<Vec> mb, vb;
  long t = 0;

  static AdamState like(const Network& net);
};

// Bias-corrected Adam. Weight decay enters the gradient (classic L2 coupling),
// group multipliers scale the step size.
void adam_step(Network& net, const Gradients& grads, AdamState& state, double lr,
               const GroupSettings& groups, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

}  // namespace netgeom
