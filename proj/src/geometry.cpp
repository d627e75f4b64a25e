#include "netgeom/geometry.hpp"

#include <cmath>

#include "netgeom/eig.hpp"
#include "netgeom/errors.hpp"

namespace netgeom {

namespace {

// Shared stage assembly. When tape is null only the matrices are built
// (masks left empty); nu values come from the network's current state.
std::vector<LinearStage> build_stages(const Network& net, const ForwardTape* tape) {
  std::vector<LinearStage> stages;
  int cur = net.input_dim;
  for (size_t l = 0; l < net.specs.size(); ++l) {
    const auto& bidx = net.layer_blocks[l];
    const LayerTrace* lt = tape ? &tape->layers[l] : nullptr;

    auto mask_of = [&](int stage_idx) -> Vec {
      if (!lt) return {};
      const Matrix& d = lt->stages[stage_idx].dact;
      Vec m(d.cols);
      for (int j = 0; j < d.cols; ++j) m[j] = d(0, j);
      return m;
    };

    if (std::get_if<DenseSpec>(&net.specs[l])) {
      const auto& blk = net.blocks[bidx[0]];
      stages.push_back({blk.w, mask_of(0)});
      cur = blk.w.rows;
    } else if (const auto* gs = std::get_if<GenSkipSpec>(&net.specs[l])) {
      int in = cur, wdt = gs->width;
      double nu = net.nu[l];
      for (int i = 0; i < gs->inner_layers; ++i) {
        const auto& blk = net.blocks[bidx[i]];
        Matrix aug;
        if (i == 0) {
          aug = Matrix(wdt + in, in);
          for (int r = 0; r < wdt; ++r)
            for (int c = 0; c < in; ++c) aug(r, c) = blk.w(r, c);
          for (int c = 0; c < in; ++c) aug(wdt + c, c) = 1.0;
        } else {
          aug = Matrix(wdt + in, wdt + in);
          for (int r = 0; r < wdt; ++r)
            for (int c = 0; c < wdt; ++c) aug(r, c) = blk.w(r, c);
          for (int c = 0; c < in; ++c) aug(wdt + c, wdt + c) = 1.0;
        }
        Vec mask;
        if (lt) {
          const Matrix& d = lt->stages[i].dact;
          mask.resize(wdt + in);
          for (int r = 0; r < wdt; ++r) mask[r] = d(0, r);
          for (int c = 0; c < in; ++c) mask[wdt + c] = 1.0;
        }
        stages.push_back({std::move(aug), std::move(mask)});
      }
      const auto& wout = net.blocks[bidx[gs->inner_layers]];
      Matrix close(gs->out, wdt + in);
      for (int r = 0; r < gs->out; ++r)
        for (int c = 0; c < wdt; ++c) close(r, c) = wout.w(r, c);
      if (gs->proj == ProjKind::Learned) {
        const auto& ws = net.blocks[bidx[gs->inner_layers + 1]];
        for (int r = 0; r < gs->out; ++r)
          for (int c = 0; c < in; ++c) close(r, wdt + c) = nu * ws.w(r, c);
      } else {
        for (int c = 0; c < in; ++c) close(c, wdt + c) = nu;
      }
      stages.push_back({std::move(close), mask_of(gs->inner_layers)});
      cur = gs->out;
    } else {
      const auto& gd = std::get<GenDropoutSpec>(net.specs[l]);
      (void)gd;
      const auto& wg = net.blocks[bidx[0]];
      const auto& wout = net.blocks[bidx[1]];
      stages.push_back({wg.w, mask_of(0)});
      stages.push_back({wout.w, mask_of(1)});
      cur = wout.w.rows;
    }
  }
  return stages;
}

}  // namespace

std::vector<LinearStage> lower_stages(const Network& net, const Vec& x) {
  Matrix xb(1, static_cast<int>(x.size()));
  for (size_t j = 0; j < x.size(); ++j) xb(0, j) = x[j];
  ForwardTape tape;
  forward(net, xb, Mode::Eval, nullptr, &tape);
  return build_stages(net, &tape);
}

std::vector<LinearStage> lower_stages(const Network& net) {
  return build_stages(net, nullptr);
}

PulledBackMetric pulled_back_metric(const Network& net, const BregmanLoss& loss,
                                    const Vec& x) {
  if (loss.dim != net.output_dim)
    throw DataError("pulled_back_metric: loss dimension does not match network");

  PulledBackMetric m;
  Matrix j = input_jacobian(net, x);
  Vec z = forward(net, x);
  Matrix h = loss.hessian_psi(z);
  m.zeta = matmul(transpose(j), matmul(h, j));
  m.sigma_max = sym_eig(m.zeta).values[0];
  m.sigma_psi = sym_eig(h).values[0];

  std::vector<LinearStage> stages = lower_stages(net);
  double dim_f = net.output_dim;
  double log_c = 0.0, log_trace_prod = 0.0, log_sigma_prod = 0.0;
  double c = 1.0, trace_prod = 1.0, sigma_prod = 1.0;
  for (const auto& st : stages) {
    double sig = largest_singular_value(st.w);
    double tr = 0.0;
    for (double v : st.w.a) tr += v * v;  // tr(W^T W) = sum of squares
    int d = st.w.rows;
    m.layer_sigmas.push_back(sig);
    m.layer_traces.push_back(tr);
    m.layer_dims.push_back(d);
    c *= static_cast<double>(d) * d;
    trace_prod *= tr * d;
    sigma_prod *= sig * sig;
    log_c += 2.0 * std::log(static_cast<double>(d));
    log_trace_prod += std::log(tr * d);
    log_sigma_prod += 2.0 * std::log(sig);
  }
  m.c_factor = c;
  m.trace_bound = dim_f * m.sigma_psi * trace_prod;
  m.spectral_bound = dim_f * c * m.sigma_psi * sigma_prod;
  m.log_trace_bound = std::log(dim_f) + std::log(m.sigma_psi) + log_trace_prod;
  m.log_spectral_bound =
      std::log(dim_f) + std::log(m.sigma_psi) + log_c + log_sigma_prod;
  return m;
}

PathProductReport path_product_matrix(const Network& net, const Vec& x) {
  std::vector<LinearStage> stages = lower_stages(net, x);

  PathProductReport rep;
  // p = (W_1^T D_1)(W_2^T D_2)...(W_k^T D_k), built left to right.
  Matrix p = Matrix::identity(net.input_dim);
  for (const auto& st : stages) {
    Matrix m = transpose(st.w);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) m(i, j) *= st.mask[j];
    p = matmul(p, m);
  }
  rep.p_matrix = std::move(p);

  double per_pair = 1.0;
  for (size_t s = 0; s + 1 < stages.size(); ++s) per_pair *= stages[s].w.rows;
  rep.num_paths = per_pair;

  // max-product dynamic program over |W| entries and masks
  Vec cur(net.input_dim, 1.0);
  for (const auto& st : stages) {
    Vec next(st.w.rows, 0.0);
    for (int r = 0; r < st.w.rows; ++r) {
      double best = 0.0;
      for (int c = 0; c < st.w.cols; ++c)
        best = std::max(best, std::fabs(st.w(r, c)) * cur[c]);
      next[r] = best * std::fabs(st.mask[r]);
    }
    cur = std::move(next);
  }
  double mx = 0.0;
  for (double v : cur) mx = std::max(mx, v);
  rep.max_abs_path_product = mx;
  return rep;
}

BoundChainReport verify_bound_chain(const Network& net, const BregmanLoss& loss,
                                    const std::vector<Vec>& xs) {
  if (xs.empty()) throw DataError("verify_bound_chain: xs must be nonempty");

  BoundChainReport rep;
  for (size_t i = 0; i < xs.size(); ++i) {
    PulledBackMetric m = pulled_back_metric(net, loss, xs[i]);
    if (i == 0) {
      rep.layer_sigmas = m.layer_sigmas;
      rep.sigma_product = 1.0;
      for (double s : m.layer_sigmas) rep.sigma_product *= s * s;
    }
    BoundChainEntry e;
    e.sigma_max = m.sigma_max;
    e.trace_bound = m.trace_bound;
    e.spectral_bound = m.spectral_bound;
    e.margin_trace = m.trace_bound - m.sigma_max;
    e.margin_spectral = m.spectral_bound - m.trace_bound;
    double tol = 1e-9 * std::max(1.0, m.spectral_bound);
    e.holds = (m.sigma_max <= m.trace_bound + tol) &&
              (m.trace_bound <= m.spectral_bound + tol);
    if (!e.holds && rep.first_violation < 0)
      rep.first_violation = static_cast<int>(i);
    rep.per_x.push_back(e);
  }
  rep.all_hold = rep.first_violation < 0;
  return rep;
}

double sigma_squared_product(const Network& net) {
  double p = 1.0;
  for (const auto& st : lower_stages(net)) {
    double s = largest_singular_value(st.w);
    p *= s * s;
  }
  return p;
}

double gl_sigma_squared_product(const Network& net) {
  double p = 1.0;
  for (const auto& blk : net.blocks)
    if (blk.group == ParamGroup::GL) {
      double s = largest_singular_value(blk.w);
      p *= s * s;
    }
  return p;
}

RescalingReport rescaling_invariance_check(const Network& net, int layer,
                                           double beta,
                                           const std::vector<Vec>& xs) {
  Network scaled = net;
  scale_layer_pair(scaled, layer, beta);

  RescalingReport rep;
  double sp0 = sigma_squared_product(net);
  double sp1 = sigma_squared_product(scaled);
  rep.sigma_product_rel_dev = std::fabs(sp1 - sp0) / std::max(1e-300, std::fabs(sp0));

  BregmanLoss loss{LossKind::Squared, net.output_dim};
  for (const Vec& x : xs) {
    Vec f0 = forward(net, x);
    Vec f1 = forward(scaled, x);
    for (size_t i = 0; i < f0.size(); ++i)
      rep.max_f_dev = std::max(
          rep.max_f_dev, std::fabs(f0[i] - f1[i]) / std::max(1.0, std::fabs(f0[i])));

    Matrix p0 = path_product_matrix(net, x).p_matrix;
    Matrix p1 = path_product_matrix(scaled, x).p_matrix;
    for (size_t i = 0; i < p0.a.size(); ++i)
      rep.max_p_dev =
          std::max(rep.max_p_dev,
                   std::fabs(p0.a[i] - p1.a[i]) / std::max(1.0, std::fabs(p0.a[i])));

    double b0 = pulled_back_metric(net, loss, x).spectral_bound;
    double b1 = pulled_back_metric(scaled, loss, x).spectral_bound;
    rep.max_spectral_rel_dev =
        std::max(rep.max_spectral_rel_dev,
                 std::fabs(b1 - b0) / std::max(1e-300, std::fabs(b0)));
  }
  rep.ok = rep.max_f_dev < 1e-9 && rep.max_p_dev < 1e-9 &&
           rep.sigma_product_rel_dev < 1e-9 && rep.max_spectral_rel_dev < 1e-9;
  return rep;
}

}  // namespace netgeom
