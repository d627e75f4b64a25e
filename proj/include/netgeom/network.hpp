#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "netgeom/activation.hpp"
#include "netgeom/matrix.hpp"
#include "netgeom/rng.hpp"
#include "netgeom/schedule.hpp"

namespace netgeom {

// Plain dense layer: out = a(W x + b).
struct DenseSpec {
  int in = -1;  // -1: inferred from the previous layer; required at the head
  int out = 0;
  ActivationKind act = ActivationKind::ReLU;
  bool bias = true;
};

enum class ProjKind { Identity, Learned };

// Skip block: g = a(W_g x), out = a(W_out g + nu * W_s x + b).
// inner_layers > 1 chains that many a(W_gi .) stages under one skip, so a
// single block expresses "skip every (k+1)-th layer". The W_g matrices can be
// assigned to the "gl" parameter group (gl flag) so the training regime can
// damp them separately.
struct GenSkipSpec {
  int in = -1;
  int width = 0;
  int out = 0;
  ActivationKind act = ActivationKind::ReLU;
  Schedule nu = Schedule::constant(1.0);
  ProjKind proj = ProjKind::Identity;  // Identity requires in == out
  bool bias = false;
  int inner_layers = 1;
  bool gl = true;
};

// Two dense stages with inverted dropout on the inner activation:
// g = a(W_g x), nodes of g dropped with probability drop_prob in train mode
// (survivors scaled by 1/(1-p)), out = a(W_out g~).
struct GenDropoutSpec {
  int in = -1;
  int width = 0;
  int out = 0;
  ActivationKind act = ActivationKind::ReLU;
  double drop_prob = 0.0;
  bool bias = false;
};

using LayerSpec = std::variant<DenseSpec, GenSkipSpec, GenDropoutSpec>;

enum class ParamGroup { Main, GL };
enum class InitScheme { He, Xavier };
enum class Mode { Train, Eval };

struct ParamBlock {
  std::string name;  // e.g. "layer2.Wg1", "layer2.Wout", "layer2.Ws"
  Matrix w;
  Vec b;  // empty when the block has no bias
  ParamGroup group = ParamGroup::Main;
};

struct Network {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<LayerSpec> specs;
  std::vector<ParamBlock> blocks;
  std::vector<std::vector<int>> layer_blocks;  // block indices per layer
  std::vector<double> nu;                      // current skip weight per layer

  // Refresh every skip layer's nu from its schedule.
  void set_epoch(int epoch);
  size_t num_params() const;
};

struct StageTrace {
  Matrix pre, act, dact;  // batch x dim each
};

struct LayerTrace {
  Matrix in;                      // layer input, batch x in
  std::vector<StageTrace> stages;
  Matrix drop_mask;  // train-mode dropout: 0 or 1/(1-p) per entry; else empty
  double nu = 1.0;
};

struct ForwardTape {
  Mode mode = Mode::Eval;
  Matrix in, out;
  std::vector<LayerTrace> layers;
};

struct Gradients {
  std::vector<Matrix> gw;  // aligned with Network::blocks
  std::vector<Vec> gb;
};

// Build and initialize. He: N(0, sqrt(2/fan_in)); Xavier: U(+-sqrt(6/(fan_in+fan_out))).
// Biases start at zero. Weight entries are drawn row-major, block by block in
// network order, from SplitMix64(seed).
Network init_network(const std::vector<LayerSpec>& specs, uint64_t seed,
                     InitScheme scheme);

// Batched forward; rows of x are samples. Train mode draws dropout masks from
// dropout_rng (row-major per layer) and requires it when a dropout layer is
// present.
Matrix forward(const Network& net, const Matrix& x, Mode mode = Mode::Eval,
               SplitMix64* dropout_rng = nullptr, ForwardTape* tape = nullptr);
Vec forward(const Network& net, const Vec& x);

// Reverse sweep. loss_grad rows must match the tape batch, except that a
// single-sample tape broadcasts against a multi-row loss_grad (used for
// Jacobians). dLdIn, when given, receives the gradient wrt the input.
// accumulate_weights=false skips weight gradients (Jacobian sweeps).
Gradients backward(const Network& net, const ForwardTape& tape,
                   const Matrix& loss_grad, Matrix* dLdIn = nullptr,
                   bool accumulate_weights = true);

// d f / d x at x, one row per output coordinate: reverse accumulation of the
// identity seed through the eval-mode tape.
Matrix input_jacobian(const Network& net, const Vec& x);

// Multiply layer l's weights and bias by beta and divide layer l+1's weights
// by beta. Exact function invariance holds for a Dense ReLU layer followed by
// a Dense layer and beta > 0 (positive homogeneity); anything else throws.
void scale_layer_pair(Network& net, int layer, double beta);

}  // namespace netgeom
