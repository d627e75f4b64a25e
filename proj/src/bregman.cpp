#include "netgeom/bregman.hpp"

#include <algorithm>
#include <cmath>

#include "netgeom/errors.hpp"

namespace netgeom {

static void check_dim(const Vec& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim)
    throw DataError(std::string(what) + ": expected length " + std::to_string(dim) +
                    ", got " + std::to_string(v.size()));
}

static void check_simplex(const Vec& y) {
  double s = 0.0;
  for (double v : y) {
    if (v < -1e-9) throw DataError("softmax_ce target has negative entry");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-9)
    throw DataError("softmax_ce target does not sum to 1");
}

static void check_unit_interval(const Vec& y) {
  for (double v : y)
    if (v < -1e-9 || v > 1.0 + 1e-9)
      throw DataError("bernoulli target outside [0, 1]");
}

// log(1 + e^t) without overflow.
static double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

static double sigmoid(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

static double logsumexp(const Vec& z) {
  double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

static Vec softmax(const Vec& z) {
  double m = *std::max_element(z.begin(), z.end());
  Vec p(z.size());
  double s = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    s += p[i];
  }
  for (double& v : p) v /= s;
  return p;
}

static double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

double BregmanLoss::psi(const Vec& z) const {
  check_dim(z, dim, "z");
  switch (kind) {
    case LossKind::Squared: {
      double s = 0.0;
      for (double v : z) s += v * v;
      return 0.5 * s;
    }
    case LossKind::SoftmaxCE:
      return logsumexp(z);
    case LossKind::Bernoulli: {
      double s = 0.0;
      for (double v : z) s += softplus(v);
      return s;
    }
  }
  return 0.0;
}

double BregmanLoss::phi(const Vec& y) const {
  check_dim(y, dim, "y");
  switch (kind) {
    case LossKind::Squared: {
      double s = 0.0;
      for (double v : y) s += v * v;
      return 0.5 * s;
    }
    case LossKind::SoftmaxCE: {
      check_simplex(y);
      double s = 0.0;
      for (double v : y) s += xlogx(v);
      return s;
    }
    case LossKind::Bernoulli: {
      check_unit_interval(y);
      double s = 0.0;
      for (double v : y) s += xlogx(v) + xlogx(1.0 - v);
      return s;
    }
  }
  return 0.0;
}

double BregmanLoss::value(const Vec& z, const Vec& y) const {
  check_dim(z, dim, "z");
  check_dim(y, dim, "y");
  double dot = 0.0;
  for (int i = 0; i < dim; ++i) dot += z[i] * y[i];
  double v = psi(z) - dot + phi(y);
  // Exact value is >= 0 by convexity; clip roundoff.
  return std::max(v, 0.0);
}

Vec BregmanLoss::induced_mean(const Vec& z) const {
  check_dim(z, dim, "z");
  switch (kind) {
    case LossKind::Squared:
      return z;
    case LossKind::SoftmaxCE:
      return softmax(z);
    case LossKind::Bernoulli: {
      Vec p(z.size());
      for (size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
      return p;
    }
  }
  return {};
}

Vec BregmanLoss::grad_z(const Vec& z, const Vec& y) const {
  check_dim(y, dim, "y");
  Vec g = induced_mean(z);
  for (int i = 0; i < dim; ++i) g[i] -= y[i];
  return g;
}

Matrix BregmanLoss::hessian_psi(const Vec& z) const {
  check_dim(z, dim, "z");
  Matrix h(dim, dim);
  switch (kind) {
    case LossKind::Squared:
      return Matrix::identity(dim);
    case LossKind::SoftmaxCE: {
      Vec p = softmax(z);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          h(i, j) = (i == j ? p[i] : 0.0) - p[i] * p[j];
      return h;
    }
    case LossKind::Bernoulli: {
      for (int i = 0; i < dim; ++i) {
        double p = sigmoid(z[i]);
        h(i, i) = p * (1.0 - p);
      }
      return h;
    }
  }
  return h;
}

Vec BregmanLoss::mean_to_natural(const Vec& y) const {
  check_dim(y, dim, "y");
  switch (kind) {
    case LossKind::Squared:
      return y;
    case LossKind::SoftmaxCE: {
      check_simplex(y);
      Vec z(y.size());
      for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 1e-6 || y[i] > 1.0 - 1e-6)
          throw DataError("mean_to_natural: simplex point not strictly interior");
        z[i] = std::log(y[i]);
      }
      return z;
    }
    case LossKind::Bernoulli: {
      Vec z(y.size());
      for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 1e-6 || y[i] > 1.0 - 1e-6)
          throw DataError("mean_to_natural: probability not strictly interior");
        z[i] = std::log(y[i] / (1.0 - y[i]));
      }
      return z;
    }
  }
  return {};
}

double BregmanLoss::conjugacy_check(const Vec& y) const {
  Vec back = induced_mean(mean_to_natural(y));
  double m = 0.0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(back[i] - y[i]));
  return m;
}

BregmanLoss loss_from_name(const std::string& name, int dim) {
  if (dim <= 0) throw ConfigError("loss dimension must be positive");
  if (name == "squared") return {LossKind::Squared, dim};
  if (name == "softmax_ce") return {LossKind::SoftmaxCE, dim};
  if (name == "bernoulli") return {LossKind::Bernoulli, dim};
  throw ConfigError("unknown loss '" + name + "' (squared|softmax_ce|bernoulli)");
}

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::Squared: return "squared";
    case LossKind::SoftmaxCE: return "softmax_ce";
    case LossKind::Bernoulli: return "bernoulli";
  }
  return "?";
}

}  // namespace netgeom
