#include "netgeom/optimizer.hpp"

#include <cmath>
#include <string>

#include "netgeom/errors.hpp"

namespace netgeom {

namespace {

void check_shapes(const Network& net, const Gradients& grads) {
  if (grads.gw.size() != net.blocks.size() ||
      grads.gb.size() != net.blocks.size()) {
    throw DataError("optimizer: gradient count " +
                    std::to_string(grads.gw.size()) + " does not match " +
                    std::to_string(net.blocks.size()) + " blocks");
  }
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    const ParamBlock& blk = net.blocks[i];
    if (grads.gw[i].rows != blk.w.rows || grads.gw[i].cols != blk.w.cols ||
        grads.gb[i].size() != blk.b.size()) {
      throw DataError("optimizer: gradient shape mismatch at block " +
                      blk.name);
    }
  }
}

}  // namespace

void sgd_step(Network& net, const Gradients& grads, double lr,
              const GroupSettings& groups) {
  check_shapes(net, grads);
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    ParamBlock& blk = net.blocks[i];
    const double step = lr * groups.mult(blk.group);
    const double wd = groups.decay(blk.group);
    const Matrix& gw = grads.gw[i];
    for (size_t k = 0; k < blk.w.a.size(); ++k) {
      blk.w.a[k] -= step * (gw.a[k] + wd * blk.w.a[k]);
    }
    // Decay applies to weights only; biases follow the raw gradient.
    const Vec& gb = grads.gb[i];
    for (size_t k = 0; k < blk.b.size(); ++k) blk.b[k] -= step * gb[k];
  }
}

AdamState AdamState::like(const Network& net) {
  AdamState st;
  for (const auto& blk : net.blocks) {
    st.mw.emplace_back(blk.w.rows, blk.w.cols);
    st.vw.emplace_back(blk.w.rows, blk.w.cols);
    st.mb.emplace_back(blk.b.size(), 0.0);
    st.vb.emplace_back(blk.b.size(), 0.0);
  }
  return st;
}

void adam_step(Network& net, const Gradients& grads, AdamState& state,
               double lr, const GroupSettings& groups, double beta1,
               double beta2, double eps) {
  check_shapes(net, grads);
  if (state.mw.size() != net.blocks.size()) {
    throw DataError("optimizer: Adam state does not match the network");
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(beta1, double(state.t));
  const double c2 = 1.0 - std::pow(beta2, double(state.t));
  for (size_t i = 0; i < net.blocks.size(); ++i) {
    ParamBlock& blk = net.blocks[i];
    const double step = lr * groups.mult(blk.group);
    const double wd = groups.decay(blk.group);
    Matrix& mw = state.mw[i];
    Matrix& vw = state.vw[i];
    const Matrix& gw = grads.gw[i];
    for (size_t k = 0; k < blk.w.a.size(); ++k) {
      const double g = gw.a[k] + wd * blk.w.a[k];
      mw.a[k] = beta1 * mw.a[k] + (1.0 - beta1) * g;
      vw.a[k] = beta2 * vw.a[k] + (1.0 - beta2) * g * g;
      blk.w.a[k] -= step * (mw.a[k] / c1) / (std::sqrt(vw.a[k] / c2) + eps);
    }
    Vec& mb = state.mb[i];
    Vec& vb = state.vb[i];
    const Vec& gb = grads.gb[i];
    for (size_t k = 0; k < blk.b.size(); ++k) {
      const double g = gb[k];
      mb[k] = beta1 * mb[k] + (1.0 - beta1) * g;
      vb[k] = beta2 * vb[k] + (1.0 - beta2) * g * g;
      blk.b[k] -= step * (mb[k] / c1) / (std::sqrt(vb[k] / c2) + eps);
    }
  }
}

}  // namespace netgeom
