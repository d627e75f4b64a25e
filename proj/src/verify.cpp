#include "netgeom/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "netgeom/bregman.hpp"
#include "netgeom/eig.hpp"
#include "netgeom/geometry.hpp"
#include "netgeom/network.hpp"
#include "netgeom/rng.hpp"

namespace netgeom {

const PropertyResult* VerifyReport::first_failure() const {
  for (const auto& r : results)
    if (!r.passed) return &r;
  return nullptr;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

std::string net_summary(const Network& net) {
  std::string s;
  for (const auto& spec : net.specs) {
    if (!s.empty()) s += " | ";
    if (auto* d = std::get_if<DenseSpec>(&spec)) {
      s += "Dense(" + std::to_string(d->in) + "->" + std::to_string(d->out) +
           ", " + act_name(d->act) + (d->bias ? ", bias)" : ")");
    } else if (auto* g = std::get_if<GenSkipSpec>(&spec)) {
      s += "GenSkip(" + std::to_string(g->in) + "->" + std::to_string(g->out) +
           ", width " + std::to_string(g->width) + ", inner " +
           std::to_string(g->inner_layers) + ")";
    } else if (auto* p = std::get_if<GenDropoutSpec>(&spec)) {
      s += "GenDropout(" + std::to_string(p->in) + "->" +
           std::to_string(p->out) + ", width " + std::to_string(p->width) +
           ")";
    }
  }
  return s;
}

Vec random_vec(int n, SplitMix64& rng, double scale = 1.0) {
  Vec v(n);
  for (auto& x : v) x = scale * rng.next_normal();
  return v;
}

// Central differences, written here rather than shared with the test
// oracles so the shipped checker stays independent of the test tree.
Matrix fd_jacobian(const Network& net, const Vec& x, double h = 1e-5) {
  Vec fx = forward(net, x);
  Matrix j(static_cast<int>(fx.size()), static_cast<int>(x.size()));
  for (size_t k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    Vec fp = forward(net, xp), fm = forward(net, xm);
    for (size_t i = 0; i < fx.size(); ++i)
      j(static_cast<int>(i), static_cast<int>(k)) =
          (fp[i] - fm[i]) / (2.0 * h);
  }
  return j;
}

ActivationKind smooth_act(SplitMix64& rng) {
  return rng.next_below(2) == 0 ? ActivationKind::Tanh
                                : ActivationKind::Softplus;
}

ActivationKind any_act(SplitMix64& rng) {
  switch (rng.next_below(4)) {
    case 0: return ActivationKind::ReLU;
    case 1: return ActivationKind::Tanh;
    case 2: return ActivationKind::Softplus;
    default: return ActivationKind::Identity;
  }
}

Network random_smooth_net(SplitMix64& rng, int max_layers, int max_width) {
  int depth = 1 + static_cast<int>(rng.next_below(max_layers));
  int in = 1 + static_cast<int>(rng.next_below(8));
  std::vector<LayerSpec> specs;
  for (int l = 0; l < depth; ++l) {
    int out = 1 + static_cast<int>(rng.next_below(max_width));
    specs.push_back(
        DenseSpec{l == 0 ? in : -1, out, smooth_act(rng), rng.next_below(2) == 0});
  }
  return init_network(specs, rng.next_u64(), InitScheme::He);
}

Network random_dense_net(SplitMix64& rng, int max_layers, int max_width) {
  int depth = 1 + static_cast<int>(rng.next_below(max_layers));
  int in = 1 + static_cast<int>(rng.next_below(max_width));
  std::vector<LayerSpec> specs;
  for (int l = 0; l < depth; ++l) {
    int out = 1 + static_cast<int>(rng.next_below(max_width));
    specs.push_back(
        DenseSpec{l == 0 ? in : -1, out, any_act(rng), rng.next_below(2) == 0});
  }
  return init_network(specs, rng.next_u64(), InitScheme::He);
}

// Dense/GenSkip/GenDropout mix; dropout layers carry p > 0 but are analyzed
// in eval mode where the mask is off.
Network random_mixed_net(SplitMix64& rng, int max_layers, int max_width) {
  int depth = 1 + static_cast<int>(rng.next_below(max_layers));
  int in = 1 + static_cast<int>(rng.next_below(max_width));
  std::vector<LayerSpec> specs;
  for (int l = 0; l < depth; ++l) {
    int out = 1 + static_cast<int>(rng.next_below(max_width));
    switch (rng.next_below(3)) {
      case 0:
        specs.push_back(DenseSpec{l == 0 ? in : -1, out, any_act(rng),
                                  rng.next_below(2) == 0});
        break;
      case 1: {
        GenSkipSpec g;
        g.in = l == 0 ? in : -1;
        g.width = 1 + static_cast<int>(rng.next_below(max_width));
        g.out = out;
        g.act = any_act(rng);
        g.nu = Schedule::constant(0.25 + rng.next_unit());
        g.proj = ProjKind::Learned;
        g.bias = rng.next_below(2) == 0;
        g.inner_layers = 1 + static_cast<int>(rng.next_below(2));
        specs.push_back(g);
        break;
      }
      default: {
        GenDropoutSpec d;
        d.in = l == 0 ? in : -1;
        d.width = 1 + static_cast<int>(rng.next_below(max_width));
        d.out = out;
        d.act = any_act(rng);
        d.drop_prob = 0.5;
        specs.push_back(d);
        break;
      }
    }
  }
  return init_network(specs, rng.next_u64(), InitScheme::He);
}

// All-ReLU dense chain; every interior index is a valid rescaling site.
Network random_relu_chain(SplitMix64& rng, int max_layers, int max_width) {
  int depth = 3 + static_cast<int>(rng.next_below(max_layers - 2));
  int in = 1 + static_cast<int>(rng.next_below(max_width));
  std::vector<LayerSpec> specs;
  for (int l = 0; l < depth; ++l) {
    int out = 1 + static_cast<int>(rng.next_below(max_width));
    bool last = l == depth - 1;
    specs.push_back(DenseSpec{l == 0 ? in : -1, out,
                              last ? ActivationKind::Identity
                                   : ActivationKind::ReLU,
                              rng.next_below(2) == 0});
  }
  return init_network(specs, rng.next_u64(), InitScheme::He);
}

// A loss whose dimension matches the net's output.
BregmanLoss random_loss(SplitMix64& rng, int dim) {
  if (dim == 1)
    return rng.next_below(2) == 0 ? loss_from_name("squared", 1)
                                  : loss_from_name("bernoulli", 1);
  return rng.next_below(2) == 0 ? loss_from_name("squared", dim)
                                : loss_from_name("softmax_ce", dim);
}

// Literal sum over all node chains of a dense net: every path contributes
// the product of its weight entries times the activation derivative at
// every node it passes through (output nodes included). Exponential in
// depth, usable only at toy widths.
Matrix enumerate_dense_paths(const Network& net, const Vec& x) {
  Matrix xin(1, static_cast<int>(x.size()));
  for (size_t i = 0; i < x.size(); ++i) xin(0, static_cast<int>(i)) = x[i];
  ForwardTape tape;
  forward(net, xin, Mode::Eval, nullptr, &tape);

  int nl = static_cast<int>(net.blocks.size());
  Matrix p(net.input_dim, net.output_dim);
  std::vector<int> node(static_cast<size_t>(nl));
  for (int i0 = 0; i0 < net.input_dim; ++i0) {
    // depth-first over node choices per layer
    std::function<void(int, int, double)> walk = [&](int layer, int from,
                                                     double prod) {
      if (layer == nl) {
        p(i0, from) += prod;
        return;
      }
      const Matrix& w = net.blocks[static_cast<size_t>(layer)].w;
      const Matrix& dact =
          tape.layers[static_cast<size_t>(layer)].stages[0].dact;
      for (int to = 0; to < w.rows; ++to)
        walk(layer + 1, to, prod * w(to, from) * dact(0, to));
    };
    walk(0, i0, 1.0);
  }
  return p;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i)
    m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

struct Ctx {
  const VerifyOptions& opts;
  std::vector<PropertyResult> out;

  void fail(PropertyResult& r, const std::string& dump) {
    r.passed = false;
    r.counterexample = dump;
  }
};

void check_jacobian_fd(Ctx& c) {
  PropertyResult r;
  r.name = "jacobian-matches-finite-differences";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.jacobian");
  int n = c.opts.quick ? 30 : 120;
  for (int t = 0; t < n && r.passed; ++t) {
    Network net = random_smooth_net(rng, 6, 16);
    Vec x = random_vec(net.input_dim, rng, 1.5);
    Matrix j = input_jacobian(net, x);
    Matrix jfd = fd_jacobian(net, x);
    double rel = max_abs_diff(j, jfd) / std::max(max_abs(jfd), 1.0);
    r.worst = std::max(r.worst, rel);
    ++r.checked;
    if (rel > 1e-6) {
      c.fail(r, "net: " + net_summary(net) + "\nx = " + fmt_vec(x) +
                    "\nmax |J - J_fd| / max(|J_fd|, 1) = " + fmt(rel));
    }
  }
  c.out.push_back(std::move(r));
}

void check_backward_fd(Ctx& c) {
  PropertyResult r;
  r.name = "backward-matches-finite-differences";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.backward");
  int n = c.opts.quick ? 10 : 40;
  for (int t = 0; t < n && r.passed; ++t) {
    Network net = random_smooth_net(rng, 4, 8);
    BregmanLoss loss = loss_from_name("squared", net.output_dim);
    Vec x = random_vec(net.input_dim, rng, 1.5);
    Vec y = random_vec(net.output_dim, rng, 2.0);
    Matrix xin(1, net.input_dim);
    for (int i = 0; i < net.input_dim; ++i) xin(0, i) = x[i];

    ForwardTape tape;
    Matrix out = forward(net, xin, Mode::Eval, nullptr, &tape);
    Vec z(out.a);
    Vec gz = loss.grad_z(z, y);
    Matrix gzm(1, net.output_dim);
    for (int i = 0; i < net.output_dim; ++i) gzm(0, i) = gz[i];
    Gradients g = backward(net, tape, gzm);

    auto scalar = [&](Network& m) {
      Vec fz = forward(m, x);
      return m.blocks.empty() ? 0.0 : loss.value(fz, y);
    };
    double rel = 0.0;
    const double h = 1e-6;
    Network probe = net;
    for (size_t bidx = 0; bidx < net.blocks.size() && r.passed; ++bidx) {
      auto& w = probe.blocks[bidx].w;
      for (size_t k = 0; k < w.a.size(); ++k) {
        double keep = w.a[k];
        w.a[k] = keep + h;
        double fp = scalar(probe);
        w.a[k] = keep - h;
        double fm = scalar(probe);
        w.a[k] = keep;
        double want = (fp - fm) / (2.0 * h);
        rel = std::max(rel, std::abs(g.gw[bidx].a[k] - want) /
                                std::max(std::abs(want), 1.0));
      }
      auto& b = probe.blocks[bidx].b;
      for (size_t k = 0; k < b.size(); ++k) {
        double keep = b[k];
        b[k] = keep + h;
        double fp = scalar(probe);
        b[k] = keep - h;
        double fm = scalar(probe);
        b[k] = keep;
        double want = (fp - fm) / (2.0 * h);
        rel = std::max(rel, std::abs(g.gb[bidx][k] - want) /
                                std::max(std::abs(want), 1.0));
      }
    }
    r.worst = std::max(r.worst, rel);
    ++r.checked;
    if (rel > 1e-5) {
      c.fail(r, "net: " + net_summary(net) + "\nx = " + fmt_vec(x) +
                    "\ny = " + fmt_vec(y) +
                    "\nmax weight-gradient rel err = " + fmt(rel));
    }
  }
  c.out.push_back(std::move(r));
}

void check_path_products(Ctx& c) {
  PropertyResult r;
  r.name = "path-product-equals-jacobian";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.paths");
  int n_enum = c.opts.quick ? 15 : 60;
  int n_mixed = c.opts.quick ? 10 : 40;

  for (int t = 0; t < n_enum && r.passed; ++t) {
    Network net = random_dense_net(rng, 4, 5);
    Vec x = random_vec(net.input_dim, rng, 1.5);
    Matrix lit = enumerate_dense_paths(net, x);
    PathProductReport rep = path_product_matrix(net, x);
    Matrix jt = transpose(input_jacobian(net, x));
    double scale = std::max(max_abs(jt), 1.0);
    double d = std::max(max_abs_diff(lit, rep.p_matrix),
                        max_abs_diff(rep.p_matrix, jt)) /
               scale;
    r.worst = std::max(r.worst, d);
    ++r.checked;
    if (d > 1e-10) {
      c.fail(r, "net: " + net_summary(net) + "\nx = " + fmt_vec(x) +
                    "\nenumeration / masked product / jacobian^T disagree, "
                    "max rel diff = " +
                    fmt(d));
    }
  }
  for (int t = 0; t < n_mixed && r.passed; ++t) {
    Network net = random_mixed_net(rng, 4, 5);
    Vec x = random_vec(net.input_dim, rng, 1.5);
    PathProductReport rep = path_product_matrix(net, x);
    Matrix jt = transpose(input_jacobian(net, x));
    double d = max_abs_diff(rep.p_matrix, jt) / std::max(max_abs(jt), 1.0);
    r.worst = std::max(r.worst, d);
    ++r.checked;
    if (d > 1e-10) {
      c.fail(r, "net: " + net_summary(net) + "\nx = " + fmt_vec(x) +
                    "\npath product vs jacobian^T max rel diff = " + fmt(d));
    }
  }
  c.out.push_back(std::move(r));
}

void check_zeta_psd(Ctx& c) {
  PropertyResult r;
  r.name = "zeta-positive-semidefinite";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.psd");
  int n = c.opts.quick ? 240 : 1100;
  for (int t = 0; t < n && r.passed; ++t) {
    Network net = random_mixed_net(rng, 5, 10);
    BregmanLoss loss = random_loss(rng, net.output_dim);
    Vec x = random_vec(net.input_dim, rng, 2.0);

    Matrix zeta;
    if (c.opts.mutate_hessian) {
      Matrix j = input_jacobian(net, x);
      Vec z = forward(net, x);
      Matrix h = loss.hessian_psi(z);
      c.opts.mutate_hessian(h);
      zeta = matmul(transpose(j), matmul(h, j));
    } else {
      zeta = pulled_back_metric(net, loss, x).zeta;
    }
    double mineig = psd_min_eig(zeta);
    r.worst = std::min(r.worst, mineig);
    ++r.checked;
    if (mineig < -1e-9) {
      c.fail(r, "net: " + net_summary(net) + "\nloss: " +
                    loss_name(loss.kind) + "\nx = " + fmt_vec(x) +
                    "\nmin eigenvalue of zeta = " + fmt(mineig));
    }
  }
  c.out.push_back(std::move(r));
}

void check_bound_chain(Ctx& c) {
  PropertyResult r;
  r.name = "bound-chain-holds";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.chain");

  // Hand fixture: 1-2-1 ReLU net at x=1 has zeta=[[4]] and bounds {52, 104}.
  {
    Network net =
        init_network({DenseSpec{1, 2, ActivationKind::ReLU, false},
                      DenseSpec{-1, 1, ActivationKind::Identity, false}},
                     0, InitScheme::He);
    net.blocks[0].w(0, 0) = 2.0;
    net.blocks[0].w(1, 0) = -3.0;
    net.blocks[1].w(0, 0) = 1.0;
    net.blocks[1].w(0, 1) = 1.0;
    PulledBackMetric m =
        pulled_back_metric(net, loss_from_name("squared", 1), {1.0});
    ++r.checked;
    if (std::abs(m.sigma_max - 4.0) > 1e-9 ||
        std::abs(m.trace_bound - 52.0) > 1e-9 ||
        std::abs(m.spectral_bound - 104.0) > 1e-9) {
      c.fail(r, "1-2-1 fixture: expected {4, 52, 104}, got {" +
                    fmt(m.sigma_max) + ", " + fmt(m.trace_bound) + ", " +
                    fmt(m.spectral_bound) + "}");
    }
  }

  int n = c.opts.quick ? 240 : 1100;
  for (int t = 0; t < n && r.passed; ++t) {
    Network net = random_mixed_net(rng, 5, 10);
    BregmanLoss loss = random_loss(rng, net.output_dim);
    std::vector<Vec> xs = {random_vec(net.input_dim, rng, 2.0),
                           random_vec(net.input_dim, rng, 0.5)};
    BoundChainReport rep = verify_bound_chain(net, loss, xs);
    for (const auto& e : rep.per_x) {
      r.worst = std::min({r.worst, e.margin_trace, e.margin_spectral});
    }
    ++r.checked;
    if (!rep.all_hold) {
      const auto& e = rep.per_x[static_cast<size_t>(rep.first_violation)];
      c.fail(r, "net: " + net_summary(net) + "\nloss: " +
                    loss_name(loss.kind) + "\nx = " +
                    fmt_vec(xs[static_cast<size_t>(rep.first_violation)]) +
                    "\nsigma_max = " + fmt(e.sigma_max) + ", trace_bound = " +
                    fmt(e.trace_bound) + ", spectral_bound = " +
                    fmt(e.spectral_bound));
    }
  }
  c.out.push_back(std::move(r));
}

void check_rescaling(Ctx& c) {
  PropertyResult r;
  r.name = "rescaling-invariance";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.rescaling");
  int nets = c.opts.quick ? 4 : 12;
  int nx = c.opts.quick ? 20 : 100;
  const double betas[] = {0.1, 2.0, 10.0};
  for (int t = 0; t < nets && r.passed; ++t) {
    Network net = random_relu_chain(rng, 5, 8);
    int sites = static_cast<int>(net.specs.size()) - 1;
    int l = static_cast<int>(rng.next_below(static_cast<uint64_t>(sites)));
    std::vector<Vec> xs;
    for (int i = 0; i < nx; ++i)
      xs.push_back(random_vec(net.input_dim, rng, 2.0));
    for (double beta : betas) {
      RescalingReport rep = rescaling_invariance_check(net, l, beta, xs);
      double dev = std::max({rep.max_f_dev, rep.max_p_dev,
                             rep.sigma_product_rel_dev,
                             rep.max_spectral_rel_dev});
      r.worst = std::max(r.worst, dev);
      ++r.checked;
      if (!rep.ok) {
        c.fail(r, "net: " + net_summary(net) + "\nscaled pair at layer " +
                      std::to_string(l) + ", beta = " + fmt(beta) +
                      "\nmax deviation = " + fmt(dev));
        break;
      }
    }
  }
  c.out.push_back(std::move(r));
}

// Interior target for the probabilistic losses; any vector for squared.
Vec interior_target(const BregmanLoss& loss, SplitMix64& rng) {
  if (loss.kind == LossKind::Squared) return random_vec(loss.dim, rng, 2.0);
  if (loss.kind == LossKind::Bernoulli)
    return {0.05 + 0.9 * rng.next_unit()};
  Vec y(static_cast<size_t>(loss.dim));
  double sum = 0.0;
  for (auto& v : y) {
    v = 0.05 + rng.next_unit();
    sum += v;
  }
  for (auto& v : y) v /= sum;
  return y;
}

std::vector<BregmanLoss> loss_catalog() {
  return {loss_from_name("squared", 1), loss_from_name("squared", 3),
          loss_from_name("softmax_ce", 2), loss_from_name("softmax_ce", 4),
          loss_from_name("bernoulli", 1)};
}

void check_loss_gradients(Ctx& c) {
  PropertyResult r;
  r.name = "loss-gradient-matches-finite-differences";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.lossgrad");
  int n = c.opts.quick ? 20 : 100;
  for (const BregmanLoss& loss : loss_catalog()) {
    for (int t = 0; t < n && r.passed; ++t) {
      Vec z = random_vec(loss.dim, rng, 1.5);
      Vec y = interior_target(loss, rng);
      Vec g = loss.grad_z(z, y);
      double rel = 0.0;
      const double h = 1e-6;
      for (int k = 0; k < loss.dim; ++k) {
        Vec zp = z, zm = z;
        zp[static_cast<size_t>(k)] += h;
        zm[static_cast<size_t>(k)] -= h;
        double want = (loss.value(zp, y) - loss.value(zm, y)) / (2.0 * h);
        rel = std::max(rel, std::abs(g[static_cast<size_t>(k)] - want) /
                                std::max(std::abs(want), 1.0));
      }
      r.worst = std::max(r.worst, rel);
      ++r.checked;
      if (rel > 1e-6) {
        c.fail(r, "loss: " + loss_name(loss.kind) + " dim " +
                      std::to_string(loss.dim) + "\nz = " + fmt_vec(z) +
                      "\ny = " + fmt_vec(y) + "\nmax grad rel err = " +
                      fmt(rel));
      }
    }
    if (!r.passed) break;
  }
  c.out.push_back(std::move(r));
}

void check_loss_hessians(Ctx& c) {
  PropertyResult r;
  r.name = "loss-hessian-matches-finite-differences";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.losshess");
  int n = c.opts.quick ? 15 : 60;
  for (const BregmanLoss& loss : loss_catalog()) {
    for (int t = 0; t < n && r.passed; ++t) {
      Vec z = random_vec(loss.dim, rng, 1.5);
      Matrix hpsi = loss.hessian_psi(z);
      double rel = 0.0;
      const double h = 1e-4;
      for (int i = 0; i < loss.dim; ++i)
        for (int j = 0; j < loss.dim; ++j) {
          Vec zpp = z, zpm = z, zmp = z, zmm = z;
          zpp[static_cast<size_t>(i)] += h;
          zpp[static_cast<size_t>(j)] += h;
          zpm[static_cast<size_t>(i)] += h;
          zpm[static_cast<size_t>(j)] -= h;
          zmp[static_cast<size_t>(i)] -= h;
          zmp[static_cast<size_t>(j)] += h;
          zmm[static_cast<size_t>(i)] -= h;
          zmm[static_cast<size_t>(j)] -= h;
          double want = (loss.psi(zpp) - loss.psi(zpm) - loss.psi(zmp) +
                         loss.psi(zmm)) /
                        (4.0 * h * h);
          rel = std::max(rel, std::abs(hpsi(i, j) - want) /
                                  std::max(std::abs(want), 1.0));
        }
      r.worst = std::max(r.worst, rel);
      ++r.checked;
      if (rel > 1e-6) {
        c.fail(r, "loss: " + loss_name(loss.kind) + " dim " +
                      std::to_string(loss.dim) + "\nz = " + fmt_vec(z) +
                      "\nmax hessian rel err = " + fmt(rel));
      }
    }
    if (!r.passed) break;
  }
  c.out.push_back(std::move(r));
}

void check_conjugacy(Ctx& c) {
  PropertyResult r;
  r.name = "mean-natural-conjugacy";
  SplitMix64 rng = named_stream(c.opts.seed, "verify.conjugacy");
  int n = c.opts.quick ? 25 : 100;
  for (const BregmanLoss& loss : loss_catalog()) {
    for (int t = 0; t < n && r.passed; ++t) {
      Vec y = interior_target(loss, rng);
      double dev = loss.conjugacy_check(y);
      r.worst = std::max(r.worst, dev);
      ++r.checked;
      if (dev > 1e-10) {
        c.fail(r, "loss: " + loss_name(loss.kind) + " dim " +
                      std::to_string(loss.dim) + "\ny = " + fmt_vec(y) +
                      "\n|grad psi(grad phi(y)) - y|_inf = " + fmt(dev));
      }
    }
    if (!r.passed) break;
  }
  c.out.push_back(std::move(r));
}

}  // namespace

VerifyReport run_property_suite(const VerifyOptions& opts) {
  Ctx c{opts, {}};
  check_jacobian_fd(c);
  check_backward_fd(c);
  check_path_products(c);
  check_zeta_psd(c);
  check_bound_chain(c);
  check_rescaling(c);
  check_loss_gradients(c);
  check_loss_hessians(c);
  check_conjugacy(c);

  VerifyReport rep;
  rep.results = std::move(c.out);
  for (const auto& r : rep.results) rep.all_passed = rep.all_passed && r.passed;
  return rep;
}

}  // namespace netgeom
