#include "netgeom/network.hpp"

#include <cmath>

#include "netgeom/errors.hpp"

namespace netgeom {

namespace {

// X (B x in) * W^T (in x out) + b
Matrix affine(const Matrix& x, const Matrix& w, const Vec& b) {
  Matrix out = matmul(x, transpose(w));
  if (!b.empty())
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out(i, j) += b[j];
  return out;
}

void activate(ActivationKind act, const Matrix& pre, Matrix* val, Matrix* dval) {
  *val = Matrix(pre.rows, pre.cols);
  if (dval) *dval = Matrix(pre.rows, pre.cols);
  for (size_t i = 0; i < pre.a.size(); ++i) {
    val->a[i] = act_apply(act, pre.a[i]);
    if (dval) dval->a[i] = act_deriv(act, pre.a[i]);
  }
}

// delta (K x d) elementwise times dact (B x d); B == K, or B == 1 broadcast.
Matrix mask_mul(const Matrix& delta, const Matrix& dact) {
  Matrix out = delta;
  if (dact.rows == delta.rows) {
    for (size_t i = 0; i < out.a.size(); ++i) out.a[i] *= dact.a[i];
  } else if (dact.rows == 1) {
    for (int i = 0; i < out.rows; ++i)
      for (int j = 0; j < out.cols; ++j) out(i, j) *= dact(0, j);
  } else {
    throw DataError("backward: tape batch does not match loss_grad batch");
  }
  return out;
}

Vec col_sums(const Matrix& m) {
  Vec s(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) s[j] += m(i, j);
  return s;
}

int spec_in(const LayerSpec& s) {
  return std::visit([](const auto& v) { return v.in; }, s);
}

}  // namespace

void Network::set_epoch(int epoch) {
  for (size_t l = 0; l < specs.size(); ++l)
    if (const auto* gs = std::get_if<GenSkipSpec>(&specs[l]))
      nu[l] = gs->nu.at(epoch);
}

size_t Network::num_params() const {
  size_t n = 0;
  for (const auto& blk : blocks) n += blk.w.a.size() + blk.b.size();
  return n;
}

Network init_network(const std::vector<LayerSpec>& specs, uint64_t seed,
                     InitScheme scheme) {
  if (specs.empty()) throw ConfigError("network needs at least one layer");

  Network net;
  net.specs = specs;
  net.layer_blocks.resize(specs.size());
  net.nu.assign(specs.size(), 1.0);

  int cur = spec_in(specs[0]);
  if (cur <= 0)
    throw ConfigError("first layer must state its input width");
  net.input_dim = cur;

  auto add_block = [&](std::string name, int rows, int cols, bool bias,
                       ParamGroup group, int layer) {
    ParamBlock blk;
    blk.name = std::move(name);
    blk.w = Matrix(rows, cols);
    if (bias) blk.b.assign(rows, 0.0);
    blk.group = group;
    net.layer_blocks[layer].push_back(static_cast<int>(net.blocks.size()));
    net.blocks.push_back(std::move(blk));
  };

  for (size_t l = 0; l < specs.size(); ++l) {
    std::string pfx = "layer" + std::to_string(l) + ".";
    int declared = spec_in(specs[l]);
    if (declared > 0 && declared != cur)
      throw ConfigError("layer " + std::to_string(l) + ": declared input width " +
                        std::to_string(declared) + " but previous layer yields " +
                        std::to_string(cur));

    if (const auto* d = std::get_if<DenseSpec>(&specs[l])) {
      if (d->out <= 0) throw ConfigError("dense layer needs out > 0");
      add_block(pfx + "W", d->out, cur, d->bias, ParamGroup::Main, l);
      cur = d->out;
    } else if (const auto* gs = std::get_if<GenSkipSpec>(&specs[l])) {
      if (gs->width <= 0 || gs->out <= 0)
        throw ConfigError("gen_skip layer needs width > 0 and out > 0");
      if (gs->inner_layers < 1)
        throw ConfigError("gen_skip inner_layers must be >= 1");
      if (gs->proj == ProjKind::Identity && cur != gs->out)
        throw ConfigError("gen_skip identity projection needs in == out");
      ParamGroup grp = gs->gl ? ParamGroup::GL : ParamGroup::Main;
      for (int i = 0; i < gs->inner_layers; ++i)
        add_block(pfx + "Wg" + std::to_string(i + 1), gs->width,
                  i == 0 ? cur : gs->width, gs->bias, grp, l);
      add_block(pfx + "Wout", gs->out, gs->width, gs->bias, ParamGroup::Main, l);
      if (gs->proj == ProjKind::Learned)
        add_block(pfx + "Ws", gs->out, cur, false, ParamGroup::Main, l);
      net.nu[l] = gs->nu.at(0);
      cur = gs->out;
    } else {
      const auto& gd = std::get<GenDropoutSpec>(specs[l]);
      if (gd.width <= 0 || gd.out <= 0)
        throw ConfigError("gen_dropout layer needs width > 0 and out > 0");
      if (gd.drop_prob < 0.0 || gd.drop_prob >= 1.0)
        throw ConfigError("gen_dropout drop_prob must lie in [0, 1)");
      add_block(pfx + "Wg", gd.width, cur, gd.bias, ParamGroup::Main, l);
      add_block(pfx + "Wout", gd.out, gd.width, gd.bias, ParamGroup::Main, l);
      cur = gd.out;
    }
  }
  net.output_dim = cur;

  SplitMix64 rng(seed);
  for (auto& blk : net.blocks) {
    int fan_in = blk.w.cols, fan_out = blk.w.rows;
    if (scheme == InitScheme::He) {
      double sd = std::sqrt(2.0 / fan_in);
      for (auto& v : blk.w.a) v = sd * rng.next_normal();
    } else {
      double lim = std::sqrt(6.0 / (fan_in + fan_out));
      for (auto& v : blk.w.a) v = rng.next_uniform(-lim, lim);
    }
  }
  return net;
}

Matrix forward(const Network& net, const Matrix& x, Mode mode,
               SplitMix64* dropout_rng, ForwardTape* tape) {
  if (x.cols != net.input_dim)
    throw DataError("forward: input has width " + std::to_string(x.cols) +
                    ", network expects " + std::to_string(net.input_dim));
  if (tape) {
    *tape = ForwardTape{};
    tape->mode = mode;
    tape->in = x;
    tape->layers.resize(net.specs.size());
  }

  Matrix cur = x;
  for (size_t l = 0; l < net.specs.size(); ++l) {
    LayerTrace* lt = tape ? &tape->layers[l] : nullptr;
    if (lt) lt->in = cur;
    const auto& bidx = net.layer_blocks[l];

    if (const auto* d = std::get_if<DenseSpec>(&net.specs[l])) {
      const ParamBlock& blk = net.blocks[bidx[0]];
      Matrix pre = affine(cur, blk.w, blk.b);
      Matrix val, dval;
      activate(d->act, pre, &val, lt ? &dval : nullptr);
      if (lt) lt->stages.push_back({std::move(pre), val, std::move(dval)});
      cur = std::move(val);
    } else if (const auto* gs = std::get_if<GenSkipSpec>(&net.specs[l])) {
      double nu = net.nu[l];
      if (lt) lt->nu = nu;
      Matrix h = cur;
      for (int i = 0; i < gs->inner_layers; ++i) {
        const ParamBlock& blk = net.blocks[bidx[i]];
        Matrix pre = affine(h, blk.w, blk.b);
        Matrix val, dval;
        activate(gs->act, pre, &val, lt ? &dval : nullptr);
        if (lt) lt->stages.push_back({std::move(pre), val, std::move(dval)});
        h = std::move(val);
      }
      const ParamBlock& wout = net.blocks[bidx[gs->inner_layers]];
      Matrix pre = affine(h, wout.w, wout.b);
      if (gs->proj == ProjKind::Learned) {
        const ParamBlock& ws = net.blocks[bidx[gs->inner_layers + 1]];
        Matrix skip = matmul(cur, transpose(ws.w));
        for (size_t i = 0; i < pre.a.size(); ++i) pre.a[i] += nu * skip.a[i];
      } else {
        for (size_t i = 0; i < pre.a.size(); ++i) pre.a[i] += nu * cur.a[i];
      }
      Matrix val, dval;
      activate(gs->act, pre, &val, lt ? &dval : nullptr);
      if (lt) lt->stages.push_back({std::move(pre), val, std::move(dval)});
      cur = std::move(val);
    } else {
      const auto& gd = std::get<GenDropoutSpec>(net.specs[l]);
      const ParamBlock& wg = net.blocks[bidx[0]];
      const ParamBlock& wout = net.blocks[bidx[1]];
      Matrix pre_g = affine(cur, wg.w, wg.b);
      Matrix g, dg;
      activate(gd.act, pre_g, &g, lt ? &dg : nullptr);
      if (lt) lt->stages.push_back({std::move(pre_g), g, std::move(dg)});

      if (mode == Mode::Train && gd.drop_prob > 0.0) {
        if (!dropout_rng)
          throw ConfigError("train-mode forward through dropout needs an rng");
        double keep_scale = 1.0 / (1.0 - gd.drop_prob);
        Matrix mask(g.rows, g.cols);
        for (size_t i = 0; i < mask.a.size(); ++i)
          mask.a[i] = dropout_rng->next_unit() < gd.drop_prob ? 0.0 : keep_scale;
        for (size_t i = 0; i < g.a.size(); ++i) g.a[i] *= mask.a[i];
        if (lt) lt->drop_mask = std::move(mask);
      }

      Matrix pre = affine(g, wout.w, wout.b);
      Matrix val, dval;
      activate(gd.act, pre, &val, lt ? &dval : nullptr);
      if (lt) lt->stages.push_back({std::move(pre), val, std::move(dval)});
      cur = std::move(val);
    }
  }
  if (tape) tape->out = cur;
  return cur;
}

Vec forward(const Network& net, const Vec& x) {
  Matrix xb(1, static_cast<int>(x.size()));
  for (size_t j = 0; j < x.size(); ++j) xb(0, j) = x[j];
  Matrix y = forward(net, xb);
  Vec out(y.cols);
  for (int j = 0; j < y.cols; ++j) out[j] = y(0, j);
  return out;
}

Gradients backward(const Network& net, const ForwardTape& tape,
                   const Matrix& loss_grad, Matrix* dLdIn,
                   bool accumulate_weights) {
  if (tape.layers.size() != net.specs.size())
    throw DataError("backward: tape does not match network");
  int tape_batch = tape.in.rows;
  if (loss_grad.rows != tape_batch && tape_batch != 1)
    throw DataError("backward: loss_grad batch does not match tape");
  if (loss_grad.rows != tape_batch && accumulate_weights)
    throw DataError("backward: broadcast tape cannot accumulate weight gradients");
  if (loss_grad.cols != net.output_dim)
    throw DataError("backward: loss_grad width does not match network output");

  Gradients grads;
  if (accumulate_weights) {
    grads.gw.reserve(net.blocks.size());
    grads.gb.reserve(net.blocks.size());
    for (const auto& blk : net.blocks) {
      grads.gw.emplace_back(blk.w.rows, blk.w.cols);
      grads.gb.emplace_back(blk.b.size(), 0.0);
    }
  }

  Matrix delta = loss_grad;
  for (int l = static_cast<int>(net.specs.size()) - 1; l >= 0; --l) {
    const LayerTrace& lt = tape.layers[l];
    const auto& bidx = net.layer_blocks[l];

    if (std::get_if<DenseSpec>(&net.specs[l])) {
      const ParamBlock& blk = net.blocks[bidx[0]];
      Matrix dpre = mask_mul(delta, lt.stages[0].dact);
      if (accumulate_weights) {
        grads.gw[bidx[0]] = matmul(transpose(dpre), lt.in);
        if (!blk.b.empty()) grads.gb[bidx[0]] = col_sums(dpre);
      }
      delta = matmul(dpre, blk.w);
    } else if (const auto* gs = std::get_if<GenSkipSpec>(&net.specs[l])) {
      int k = gs->inner_layers;
      const ParamBlock& wout = net.blocks[bidx[k]];
      Matrix dpre = mask_mul(delta, lt.stages[k].dact);
      if (accumulate_weights) {
        grads.gw[bidx[k]] = matmul(transpose(dpre), lt.stages[k - 1].act);
        if (!wout.b.empty()) grads.gb[bidx[k]] = col_sums(dpre);
      }
      Matrix dskip;
      if (gs->proj == ProjKind::Learned) {
        const ParamBlock& ws = net.blocks[bidx[k + 1]];
        if (accumulate_weights) {
          Matrix gws = matmul(transpose(dpre), lt.in);
          for (auto& v : gws.a) v *= lt.nu;
          grads.gw[bidx[k + 1]] = std::move(gws);
        }
        dskip = matmul(dpre, ws.w);
        for (auto& v : dskip.a) v *= lt.nu;
      } else {
        dskip = dpre;
        for (auto& v : dskip.a) v *= lt.nu;
      }

      Matrix d = matmul(dpre, wout.w);
      for (int i = k - 1; i >= 0; --i) {
        const ParamBlock& wg = net.blocks[bidx[i]];
        Matrix dpre_i = mask_mul(d, lt.stages[i].dact);
        if (accumulate_weights) {
          const Matrix& stage_in = i == 0 ? lt.in : lt.stages[i - 1].act;
          grads.gw[bidx[i]] = matmul(transpose(dpre_i), stage_in);
          if (!wg.b.empty()) grads.gb[bidx[i]] = col_sums(dpre_i);
        }
        d = matmul(dpre_i, wg.w);
      }
      for (size_t i = 0; i < d.a.size(); ++i) d.a[i] += dskip.a[i];
      delta = std::move(d);
    } else {
      const ParamBlock& wg = net.blocks[bidx[0]];
      const ParamBlock& wout = net.blocks[bidx[1]];
      Matrix dpre = mask_mul(delta, lt.stages[1].dact);
      // forward stored the post-mask activation in stages[0].act only up to
      // masking; reconstruct the masked value for the weight gradient
      const StageTrace& g_stage = lt.stages[0];
      Matrix g_masked = g_stage.act;
      bool masked = lt.drop_mask.rows > 0;
      if (masked)
        for (size_t i = 0; i < g_masked.a.size(); ++i)
          g_masked.a[i] *= lt.drop_mask.a[i];
      if (accumulate_weights) {
        grads.gw[bidx[1]] = matmul(transpose(dpre), g_masked);
        if (!wout.b.empty()) grads.gb[bidx[1]] = col_sums(dpre);
      }
      Matrix dg = matmul(dpre, wout.w);
      if (masked) dg = mask_mul(dg, lt.drop_mask);
      Matrix dpre_g = mask_mul(dg, g_stage.dact);
      if (accumulate_weights) {
        grads.gw[bidx[0]] = matmul(transpose(dpre_g), lt.in);
        if (!wg.b.empty()) grads.gb[bidx[0]] = col_sums(dpre_g);
      }
      delta = matmul(dpre_g, wg.w);
    }
  }
  if (dLdIn) *dLdIn = std::move(delta);
  return grads;
}

Matrix input_jacobian(const Network& net, const Vec& x) {
  Matrix xb(1, static_cast<int>(x.size()));
  for (size_t j = 0; j < x.size(); ++j) xb(0, j) = x[j];
  ForwardTape tape;
  forward(net, xb, Mode::Eval, nullptr, &tape);
  Matrix jac;
  backward(net, tape, Matrix::identity(net.output_dim), &jac,
           /*accumulate_weights=*/false);
  return jac;
}

void scale_layer_pair(Network& net, int layer, double beta) {
  if (beta <= 0.0) throw ConfigError("scale_layer_pair: beta must be positive");
  if (layer < 0 || layer + 1 >= static_cast<int>(net.specs.size()))
    throw ConfigError("scale_layer_pair: layer has no successor");
  const auto* a = std::get_if<DenseSpec>(&net.specs[layer]);
  const auto* b = std::get_if<DenseSpec>(&net.specs[layer + 1]);
  if (!a || !b)
    throw ConfigError("scale_layer_pair: both layers must be dense");
  if (a->act != ActivationKind::ReLU)
    throw ConfigError(
        "scale_layer_pair: needs a positively homogeneous (relu) activation "
        "between the pair");

  ParamBlock& lo = net.blocks[net.layer_blocks[layer][0]];
  ParamBlock& hi = net.blocks[net.layer_blocks[layer + 1][0]];
  for (auto& v : lo.w.a) v *= beta;
  for (auto& v : lo.b) v *= beta;
  for (auto& v : hi.w.a) v /= beta;
}

}  // namespace netgeom
