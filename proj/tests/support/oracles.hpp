#pragma once

// Independent reference implementations used only by tests. Nothing here may
// call the production routine it checks.

#include <cmath>
#include <functional>
#include <vector>

#include "netgeom/matrix.hpp"

namespace oracle {

using netgeom::Matrix;
using netgeom::Vec;

// Plain triple loop, the reference for matmul.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

// Central-difference Jacobian of f: R^n -> R^m.
inline Matrix fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                          double h = 1e-5) {
  Vec fx = f(x);
  Matrix j(static_cast<int>(fx.size()), static_cast<int>(x.size()));
  for (size_t k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    Vec fp = f(xp), fm = f(xm);
    for (size_t i = 0; i < fx.size(); ++i)
      j(static_cast<int>(i), static_cast<int>(k)) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return j;
}

// Central-difference gradient of a scalar function.
inline Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                   double h = 1e-6) {
  Vec g(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Central-difference Hessian of a scalar function.
inline Matrix fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x,
                         double h = 1e-4) {
  int n = static_cast<int>(x.size());
  Matrix hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[i] += h; xpp[j] += h;
      xpm[i] += h; xpm[j] -= h;
      xmp[i] -= h; xmp[j] += h;
      xmm[i] -= h; xmm[j] -= h;
      hess(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
    }
  return hess;
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  double num = 0.0, den = 1.0;
  for (size_t i = 0; i < got.a.size(); ++i) {
    num = std::max(num, std::fabs(got.a[i] - want.a[i]));
    den = std::max(den, std::fabs(want.a[i]));
  }
  return num / den;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::fabs(a.a[i] - b.a[i]));
  return m;
}

}  // namespace oracle
