#include "netgeom/activation.hpp"

#include <cmath>

#include "netgeom/errors.hpp"

namespace netgeom {

double act_apply(ActivationKind k, double u) {
  switch (k) {
    case ActivationKind::ReLU: return u > 0 ? u : 0.0;
    case ActivationKind::Tanh: return std::tanh(u);
    case ActivationKind::Softplus:
      return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
    case ActivationKind::Identity: return u;
  }
  return u;
}

double act_deriv(ActivationKind k, double u) {
  switch (k) {
    case ActivationKind::ReLU: return u > 0 ? 1.0 : 0.0;
    case ActivationKind::Tanh: {
      double t = std::tanh(u);
      return 1.0 - t * t;
    }
    case ActivationKind::Softplus:
      return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    case ActivationKind::Identity: return 1.0;
  }
  return 1.0;
}

ActivationKind act_from_name(const std::string& name) {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "tanh") return ActivationKind::Tanh;
  if (name == "softplus") return ActivationKind::Softplus;
  if (name == "identity") return ActivationKind::Identity;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string act_name(ActivationKind k) {
  switch (k) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::Identity: return "identity";
  }
  return "?";
}

}  // namespace netgeom
