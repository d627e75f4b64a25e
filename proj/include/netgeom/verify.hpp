#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netgeom/matrix.hpp"

namespace netgeom {

struct PropertyResult {
  std::string name;
  bool passed = true;
  int checked = 0;     // cases examined before the property stopped
  double worst = 0.0;  // largest error seen (most negative margin for PSD)
  std::string counterexample;  // empty unless failed
};

struct VerifyOptions {
  bool quick = false;  // reduced case counts, same property list
  std::uint64_t seed = 71;
  // Applied to the output-layer Hessian before the PSD property consumes
  // it. Tests plant a fault here and confirm the suite reports it;
  // production runs leave it empty.
  std::function<void(Matrix&)> mutate_hessian;
};

struct VerifyReport {
  std::vector<PropertyResult> results;
  bool all_passed = true;

  const PropertyResult* first_failure() const;
};

// Randomized property sweep over the numeric core: Jacobians and gradients
// against central finite differences, path products against the Jacobian,
// zeta PSD-ness, the bound chain, reciprocal rescaling invariance, and the
// loss catalog (gradients, Hessians, conjugacy). Deterministic for a given
// options struct.
VerifyReport run_property_suite(const VerifyOptions& opts = {});

}  // namespace netgeom
