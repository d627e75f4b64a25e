#pragma once

#include "netgeom/bregman.hpp"
#include "netgeom/matrix.hpp"
#include "netgeom/network.hpp"

namespace netgeom {

// One activation-masked linear stage of the lowered network. Skip blocks
// lower to [W_g; I] stages (the identity rows carry the block input, their
// mask entries are 1) closed by [W_out, nu*W_s]; dropout blocks lower to
// their two dense stages in eval mode. Every stage then reads
// out = mask .* (w @ in), which is what the bound chain is proved against.
struct LinearStage {
  Matrix w;
  Vec mask;  // empty when lowered without a data point
};

// Stages with masks evaluated at x (eval-mode forward underneath).
std::vector<LinearStage> lower_stages(const Network& net, const Vec& x);
// Data-independent stage matrices only (current nu values baked in).
std::vector<LinearStage> lower_stages(const Network& net);

// Pulled-back metric zeta(x) = J^T H J over input directions, with the
// trace and spectral bounds of the chain
//   sigma_max <= dim(F) sigma_psi prod_l tr(W_l^T W_l) d_l
//             <= dim(F) C sigma_psi prod_l sigma_l^2,   C = prod_l d_l^2
// where d_l is the stage output dimension and sigma_l the stage's largest
// singular value. Products run over the lowered stages.
struct PulledBackMetric {
  Matrix zeta;
  double sigma_max = 0.0;
  double sigma_psi = 0.0;
  std::vector<double> layer_sigmas;
  std::vector<double> layer_traces;  // tr(W^T W) per stage
  std::vector<int> layer_dims;       // d_l per stage
  double trace_bound = 0.0;
  double spectral_bound = 0.0;
  double c_factor = 0.0;
  // log-space copies; the direct products overflow past ~1e308 on very deep
  // nets while these stay finite
  double log_trace_bound = 0.0;
  double log_spectral_bound = 0.0;
};

PulledBackMetric pulled_back_metric(const Network& net, const BregmanLoss& loss,
                                    const Vec& x);

struct PathProductReport {
  Matrix p_matrix;  // dim_in x dim_out, equals input_jacobian transposed
  double num_paths = 0.0;          // paths per (input, output) node pair
  double max_abs_path_product = 0.0;  // max |masked path product| over paths
};

PathProductReport path_product_matrix(const Network& net, const Vec& x);

struct BoundChainEntry {
  double sigma_max = 0.0;
  double trace_bound = 0.0;
  double spectral_bound = 0.0;
  double margin_trace = 0.0;     // trace_bound - sigma_max
  double margin_spectral = 0.0;  // spectral_bound - trace_bound
  bool holds = false;
};

struct BoundChainReport {
  std::vector<BoundChainEntry> per_x;
  std::vector<double> layer_sigmas;  // data-independent
  double sigma_product = 0.0;        // prod_l sigma_l^2
  bool all_hold = false;
  int first_violation = -1;
};

BoundChainReport verify_bound_chain(const Network& net, const BregmanLoss& loss,
                                    const std::vector<Vec>& xs);

// Product over the data-independent stage matrices of sigma_l^2.
double sigma_squared_product(const Network& net);
// Same product restricted to blocks in the GL parameter group (raw W_g
// matrices, not the augmented stages). 1.0 when the group is empty.
double gl_sigma_squared_product(const Network& net);

struct RescalingReport {
  double max_f_dev = 0.0;            // max |f(x) - f_scaled(x)| over xs
  double max_p_dev = 0.0;            // same for path-product matrices
  double sigma_product_rel_dev = 0.0;
  double max_spectral_rel_dev = 0.0;  // over xs, squared-loss curvature
  bool ok = false;                    // everything within 1e-9 (relative)
};

// Applies scale_layer_pair(beta) to a copy and measures what moved. The
// reciprocal rescaling cancels along every path, so the function, P(x), the
// sigma product and the spectral bound must all stay put.
RescalingReport rescaling_invariance_check(const Network& net, int layer,
                                           double beta, const std::vector<Vec>& xs);

}  // namespace netgeom
