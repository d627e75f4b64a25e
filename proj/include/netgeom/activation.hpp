#pragma once

#include <string>

namespace netgeom {

// All of these have derivative in [0, 1], which the spectral bounds rely on.
enum class ActivationKind { ReLU, Tanh, Softplus, Identity };

double act_apply(ActivationKind k, double u);
// Derivative at the pre-activation. ReLU uses the subgradient 0 at u == 0.
double act_deriv(ActivationKind k, double u);

ActivationKind act_from_name(const std::string& name);
std::string act_name(ActivationKind k);

}  // namespace netgeom
