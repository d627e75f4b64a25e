// Acceptance gate. Nine checks, one printed line each, nonzero exit when any
// fails. The first five are exact-oracle sweeps and finish in seconds; the
// demo criteria run the desk presets end to end, so a full pass takes
// minutes. Output lands under the system temp directory, never the repo.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "netgeom/bregman.hpp"
#include "netgeom/eig.hpp"
#include "netgeom/errors.hpp"
#include "netgeom/experiments.hpp"
#include "netgeom/geometry.hpp"
#include "netgeom/io.hpp"
#include "netgeom/matrix.hpp"
#include "netgeom/network.hpp"
#include "netgeom/rng.hpp"
#include "support/oracles.hpp"
#include "support/path_enum.hpp"

namespace fs = std::filesystem;
using namespace netgeom;

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Vec random_vec(SplitMix64& rng, int n, double scale = 1.0) {
  Vec v(n);
  for (auto& x : v) x = scale * rng.next_normal();
  return v;
}

// Relative max-norm gap, floored at scale 1 so near-zero references do not
// blow the ratio up.
double rel_gap(const Matrix& a, const Matrix& b) {
  double diff = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j)
      diff = std::max(diff, std::fabs(a(i, j) - b(i, j)));
  return diff / std::max(1.0, std::max(max_abs(a), max_abs(b)));
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

Network random_dense_net(SplitMix64& rng, int max_layers, int max_width,
                         bool smooth_only) {
  int depth = 1 + static_cast<int>(rng.next_below(max_layers));
  int in = 1 + static_cast<int>(rng.next_below(max_width));
  std::vector<LayerSpec> specs;
  for (int l = 0; l < depth; ++l) {
    int out = 1 + static_cast<int>(rng.next_below(max_width));
    specs.push_back(DenseSpec{l == 0 ? in : -1, out,
                              smooth_only ? smooth_act(rng) : any_act(rng),
                              rng.next_below(2) == 0});
  }
  return init_network(specs, rng.next_u64(), InitScheme::He);
}

// Mixed sampler covering all three layer kinds, used for the PSD and bound
// chain sweep.
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

BregmanLoss random_loss_for(SplitMix64& rng, int dim) {
  if (dim == 1)
    return loss_from_name(rng.next_below(2) == 0 ? "squared" : "bernoulli", 1);
  return loss_from_name(rng.next_below(2) == 0 ? "squared" : "softmax_ce", dim);
}

fs::path work_root() {
  return fs::temp_directory_path() / "netgeom_acceptance";
}

// ---- criteria ----------------------------------------------------------------

bool c1_jacobian_fd(std::string& note) {
  const double t0 = now_s();
  SplitMix64 rng(named_stream(401, "acceptance.jacobian"));
  double worst = 0.0;
  const int cases = 110;
  for (int c = 0; c < cases; ++c) {
    Network net = random_dense_net(rng, 6, 16, /*smooth_only=*/true);
    Vec x = random_vec(rng, net.input_dim);
    Matrix j = input_jacobian(net, x);
    Matrix jfd = oracle::fd_jacobian(
        [&](const Vec& v) { return forward(net, v); }, x);
    worst = std::max(worst, rel_gap(j, jfd));
  }
  const double secs = now_s() - t0;
  note = fmt("%d nets, worst rel %.2e, %.1f s", cases, worst, secs);
  return worst < 1e-6 && secs < 60.0;
}

bool c2_path_products(std::string& note) {
  SplitMix64 rng(named_stream(402, "acceptance.paths"));
  double worst = 0.0;
  const int cases = 60;
  for (int c = 0; c < cases; ++c) {
    Network net = random_dense_net(rng, 4, 5, /*smooth_only=*/false);
    Vec x = random_vec(rng, net.input_dim);
    oracle::EnumResult en = oracle::enumerate_paths(net, x);
    PathProductReport rep = path_product_matrix(net, x);
    Matrix jt = transpose(input_jacobian(net, x));
    worst = std::max(worst, rel_gap(en.p, rep.p_matrix));
    worst = std::max(worst, rel_gap(rep.p_matrix, jt));
  }
  note = fmt("%d nets, three-way worst rel %.2e", cases, worst);
  return worst < 1e-10;
}

bool c3_psd_and_chain(std::string& note) {
  SplitMix64 rng(named_stream(403, "acceptance.chain"));
  const int cases = 1050;
  double worst_eig = 0.0;
  int violations = 0;
  for (int c = 0; c < cases; ++c) {
    Network net = random_mixed_net(rng, 5, 6);
    BregmanLoss loss = random_loss_for(rng, net.output_dim);
    Vec x = random_vec(rng, net.input_dim, 1.5);
    PulledBackMetric m = pulled_back_metric(net, loss, x);
    worst_eig = std::min(worst_eig, psd_min_eig(m.zeta));
    BoundChainReport rep = verify_bound_chain(net, loss, {x});
    if (!rep.all_hold) ++violations;
  }

  // Hand fixture: 1-2-1 ReLU net, squared loss, x = 1.
  Network net = init_network({DenseSpec{1, 2, ActivationKind::ReLU, false},
                              DenseSpec{-1, 1, ActivationKind::Identity, false}},
                             0, InitScheme::He);
  net.blocks[0].w(0, 0) = 2.0;
  net.blocks[0].w(1, 0) = -3.0;
  net.blocks[1].w(0, 0) = 1.0;
  net.blocks[1].w(0, 1) = 1.0;
  PulledBackMetric m = pulled_back_metric(net, loss_from_name("squared", 1),
                                          {1.0});
  bool fixture_ok = std::fabs(m.sigma_max - 4.0) < 1e-12 &&
                    std::fabs(m.trace_bound - 52.0) < 1e-10 &&
                    std::fabs(m.spectral_bound - 104.0) < 1e-10;

  note = fmt("%d configs, min eig %.2e, %d violations, fixture {4,52,104} %s",
             cases, worst_eig, violations, fixture_ok ? "exact" : "WRONG");
  return worst_eig >= -1e-9 && violations == 0 && fixture_ok;
}

bool c4_rescaling(std::string& note) {
  SplitMix64 rng(named_stream(404, "acceptance.rescale"));
  double worst = 0.0;
  const int nets = 6, inputs = 100;
  for (int n = 0; n < nets; ++n) {
    int depth = 2 + static_cast<int>(rng.next_below(3));
    int in = 1 + static_cast<int>(rng.next_below(4));
    std::vector<LayerSpec> specs;
    for (int l = 0; l + 1 < depth; ++l) {
      specs.push_back(DenseSpec{l == 0 ? in : -1,
                                2 + static_cast<int>(rng.next_below(4)),
                                ActivationKind::ReLU, true});
    }
    specs.push_back(DenseSpec{depth == 1 ? in : -1, 2,
                              ActivationKind::Identity, true});
    Network base = init_network(specs, rng.next_u64(), InitScheme::He);
    BregmanLoss loss = loss_from_name("squared", base.output_dim);
    int pair = static_cast<int>(rng.next_below(depth - 1));

    for (double beta : {0.1, 2.0, 10.0}) {
      Network scaled = base;
      scale_layer_pair(scaled, pair, beta);
      double sp0 = sigma_squared_product(base);
      double sp1 = sigma_squared_product(scaled);
      worst = std::max(worst, std::fabs(sp0 - sp1) / std::max(1.0, sp0));
      for (int i = 0; i < inputs; ++i) {
        Vec x = random_vec(rng, base.input_dim, 2.0);
        Vec f0 = forward(base, x);
        Vec f1 = forward(scaled, x);
        for (size_t k = 0; k < f0.size(); ++k)
          worst = std::max(worst, std::fabs(f0[k] - f1[k]) /
                                      std::max(1.0, std::fabs(f0[k])));
        worst = std::max(worst, rel_gap(path_product_matrix(base, x).p_matrix,
                                        path_product_matrix(scaled, x).p_matrix));
        PulledBackMetric m0 = pulled_back_metric(base, loss, x);
        PulledBackMetric m1 = pulled_back_metric(scaled, loss, x);
        worst = std::max(worst, std::fabs(m0.spectral_bound - m1.spectral_bound) /
                                    std::max(1.0, m0.spectral_bound));
      }
    }
  }
  note = fmt("%d nets x 3 betas x %d inputs, worst rel drift %.2e", nets,
             inputs, worst);
  return worst < 1e-9;
}

bool c5_loss_catalog(std::string& note) {
  SplitMix64 rng(named_stream(405, "acceptance.losses"));
  const std::vector<std::pair<std::string, int>> catalog = {
      {"squared", 1}, {"squared", 3}, {"softmax_ce", 2},
      {"softmax_ce", 4}, {"bernoulli", 1}};
  double worst_grad = 0.0, worst_hess = 0.0, worst_conj = 0.0;
  for (const auto& [name, dim] : catalog) {
    BregmanLoss loss = loss_from_name(name, dim);
    for (int c = 0; c < 100; ++c) {
      Vec z = random_vec(rng, dim, 1.5);
      // strictly interior targets for the probabilistic families
      Vec y(dim);
      if (loss.kind == LossKind::Squared) {
        y = random_vec(rng, dim, 2.0);
      } else if (loss.kind == LossKind::Bernoulli) {
        y[0] = 0.05 + 0.9 * rng.next_unit();
      } else {
        double total = 0.0;
        for (auto& v : y) total += (v = 0.05 + rng.next_unit());
        for (auto& v : y) v /= total;
      }

      Vec g = loss.grad_z(z, y);
      const double hg = 1e-6;
      for (int k = 0; k < dim; ++k) {
        Vec zp = z, zm = z;
        zp[k] += hg;
        zm[k] -= hg;
        double fd = (loss.value(zp, y) - loss.value(zm, y)) / (2.0 * hg);
        worst_grad = std::max(worst_grad, std::fabs(g[k] - fd) /
                                              std::max(1.0, std::fabs(fd)));
      }

      Matrix h = loss.hessian_psi(z);
      const double hh = 1e-4;
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          Vec zpp = z, zpm = z, zmp = z, zmm = z;
          zpp[a] += hh; zpp[b] += hh;
          zpm[a] += hh; zpm[b] -= hh;
          zmp[a] -= hh; zmp[b] += hh;
          zmm[a] -= hh; zmm[b] -= hh;
          double fd = (loss.psi(zpp) - loss.psi(zpm) - loss.psi(zmp) +
                       loss.psi(zmm)) /
                      (4.0 * hh * hh);
          worst_hess = std::max(worst_hess, std::fabs(h(a, b) - fd) /
                                                std::max(1.0, std::fabs(fd)));
        }
      }

      worst_conj = std::max(worst_conj, loss.conjugacy_check(y));
    }
  }
  note = fmt("5 losses x 100 pts, grad %.2e, hess %.2e, conjugacy %.2e",
             worst_grad, worst_hess, worst_conj);
  return worst_grad < 1e-6 && worst_hess < 1e-6 && worst_conj < 1e-10;
}

bool c6_overfit_demo(std::string& note) {
  const std::vector<std::pair<std::string, std::size_t>> published = {
      {"h1", 35998}, {"h7", 35989}, {"d119", 36160}};
  std::string counts;
  bool counts_ok = true;
  auto full = overfit_architectures("full");
  for (size_t i = 0; i < full.size(); ++i) {
    Network net = init_network(full[i].layers, 1, InitScheme::He);
    counts_ok = counts_ok && full[i].name == published[i].first &&
                net.num_params() == published[i].second;
    counts += fmt("%s%s=%zu", i ? " " : "", full[i].name.c_str(),
                  net.num_params());
  }

  ExperimentSpec spec = experiment_preset("overfit", "desk");
  spec.name = "acceptance_overfit";
  spec.out_dir = (work_root() / "overfit").string();
  const double t0 = now_s();
  ExperimentResult res = run_overfit_demo(spec);
  const double secs = now_s() - t0;

  note = fmt("params %s%s; desk mse h1 %.1f h7 %.1f d119 %.1f, %.0f s", counts.c_str(),
             counts_ok ? "" : " (MISMATCH)",
             res.metrics.at("final_train_mse_h1"),
             res.metrics.at("final_train_mse_h7"),
             res.metrics.at("final_train_mse_d119"), secs);
  return counts_ok && res.metrics.at("overfit_all") == 1.0;
}

bool c7_gl_demo(std::string& note) {
  ExperimentSpec spec = experiment_preset("gl", "desk");
  spec.name = "acceptance_gl";
  spec.out_dir = (work_root() / "gl").string();
  const double t0 = now_s();
  ExperimentResult res = run_gl_demo(spec);
  const double secs = now_s() - t0;
  note = fmt("gl wins %.0f/%.0f, product ratio ok %.0f, %.0f s (< 1800)",
             res.metrics.at("gl_wins"), res.metrics.at("repeats"),
             res.metrics.at("gl_products_bounded"), secs);
  return res.metrics.at("gl_majority") == 1.0 &&
         res.metrics.at("gl_products_bounded") == 1.0 && secs < 1800.0;
}

bool c8_weight_histogram(std::string& note) {
  std::string parts;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    ExperimentSpec spec = experiment_preset("histogram", "desk");
    spec.name = "acceptance_hist_s" + std::to_string(seed);
    spec.seed = seed;
    spec.out_dir = (work_root() / spec.name).string();
    ExperimentResult res = run_weight_histogram(spec);
    bool heavier = res.metrics.at("random_tail_heavier") == 1.0;
    bool complete = res.metrics.at("complete") == 1.0;
    ok = ok && heavier && complete;
    parts += fmt("%ss%llu %.4f>%.4f%s", seed == 1 ? "" : " ",
                 static_cast<unsigned long long>(seed),
                 res.metrics.at("random_tail_final"),
                 res.metrics.at("true_tail_final"),
                 complete ? "" : " (incomplete)");
  }
  note = "tails " + parts;
  return ok;
}

bool c9_determinism(std::string& note) {
  // Tiny-budget spec for every experiment kind, each run twice; every
  // history.csv must come back byte-identical.
  auto make = [](const std::string& kind) {
    ExperimentSpec s = experiment_preset(kind, "desk");
    s.name = "acceptance_det_" + kind;
    s.seed = 11;
    if (kind == "single") {
      s.layers = {DenseSpec{1, 8, ActivationKind::ReLU, true},
                  DenseSpec{-1, 1, ActivationKind::Identity, true}};
      s.train.epochs = 60;
      s.train.log_every = 10;
    } else if (kind == "overfit") {
      s.train.epochs = 400;
      s.train.log_every = 100;
    } else if (kind == "gl") {
      s.repeats = 1;
      s.train.epochs = 60;
      s.train.log_every = 20;
    } else if (kind == "longskip") {
      s.train.epochs = 80;
      s.train.log_every = 20;
    } else if (kind == "histogram") {
      s.data.n = 600;
      s.train.epochs = 4;
      s.zero_error_check_every = 2;
    } else if (kind == "gld") {
      s.data.n = 400;
      s.train.epochs = 3;
      s.drop_probs = {0.5};
    }
    return s;
  };

  int compared = 0;
  std::string failed;
  for (const std::string kind :
       {"single", "overfit", "gl", "longskip", "histogram", "gld"}) {
    ExperimentSpec a = make(kind), b = make(kind);
    a.out_dir = (work_root() / ("det_a_" + kind)).string();
    b.out_dir = (work_root() / ("det_b_" + kind)).string();
    run_experiment(a);
    run_experiment(b);
    for (const auto& entry : fs::recursive_directory_iterator(a.out_dir)) {
      if (entry.path().filename() != "history.csv") continue;
      fs::path twin = b.out_dir / fs::relative(entry.path(), a.out_dir);
      ++compared;
      if (read_text_file(entry.path().string()) !=
          read_text_file(twin.string())) {
        failed += " " + fs::relative(entry.path(), a.out_dir).string();
      }
    }
  }
  note = fmt("6 kinds rerun, %d history files byte-compared%s", compared,
             failed.empty() ? ", all identical" : (";" + failed).c_str());
  return compared > 0 && failed.empty();
}

}  // namespace

int main() {
  std::error_code ec;
  fs::remove_all(work_root(), ec);

  struct Criterion {
    int id;
    const char* label;
    bool (*run)(std::string&);
  };
  const std::vector<Criterion> gate = {
      {1, "input_jacobian matches central differences", c1_jacobian_fd},
      {2, "path enumeration == masked product == jacobian", c2_path_products},
      {3, "zeta PSD and bound chain, hand fixture exact", c3_psd_and_chain},
      {4, "ReLU rescaling leaves outputs and bounds fixed", c4_rescaling},
      {5, "loss catalog: gradients, curvature, conjugacy", c5_loss_catalog},
      {6, "overfit demo: desk nets memorize, counts exact", c6_overfit_demo},
      {7, "GL demo: regularized net holds its vanilla twin", c7_gl_demo},
      {8, "random labels grow heavier weight tails", c8_weight_histogram},
      {9, "identical config and seed reruns byte-identical", c9_determinism},
  };

  int failures = 0;
  for (const auto& c : gate) {
    std::string note;
    bool ok = false;
    try {
      ok = c.run(note);
    } catch (const std::exception& e) {
      note = fmt("exception: %s", e.what());
    }
    if (!ok) ++failures;
    std::printf("%s  %d  %-50s %s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                note.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("acceptance: %d of 9 criteria failed\n", failures);
  else std::printf("acceptance: all 9 criteria hold\n");
  return failures == 0 ? 0 : 1;
}
