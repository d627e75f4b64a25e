#pragma once

#include <string>

#include "netgeom/matrix.hpp"

namespace netgeom {

enum class LossKind { Squared, SoftmaxCE, Bernoulli };

// Bregman loss in dual (natural-parameter) form:
//   value(z, y) = psi(z) - <z, y> + phi(y)
// where psi is the cumulant of the predicting family and phi its convex
// conjugate. grad_z is the induced mean minus the target; hessian_psi is the
// curvature the pulled-back metric sandwiches.
struct BregmanLoss {
  LossKind kind;
  int dim;

  double value(const Vec& z, const Vec& y) const;
  Vec grad_z(const Vec& z, const Vec& y) const;
  Matrix hessian_psi(const Vec& z) const;

  double psi(const Vec& z) const;
  double phi(const Vec& y) const;
  Vec induced_mean(const Vec& z) const;   // grad psi
  Vec mean_to_natural(const Vec& y) const;  // grad phi, y strictly interior

  // || grad psi(grad phi(y)) - y ||_inf; zero up to roundoff when the pair
  // is conjugate. y must be strictly interior (tolerance 1e-6 from the
  // boundary for the probabilistic losses).
  double conjugacy_check(const Vec& y) const;
};

BregmanLoss loss_from_name(const std::string& name, int dim);
std::string loss_name(LossKind kind);

}  // namespace netgeom
