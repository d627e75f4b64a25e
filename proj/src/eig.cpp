#include "netgeom/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netgeom/errors.hpp"

namespace netgeom {

static double offdiag_fro(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

SymEigen sym_eig(const Matrix& in) {
  if (in.rows != in.cols) throw DataError("sym_eig: matrix not square");
  int n = in.rows;
  // Work on the symmetrized copy.
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (in(i, j) + in(j, i));

  Matrix v = Matrix::identity(n);
  double target = 1e-12 * fro_norm(a);

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (offdiag_fro(a) <= target) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

double largest_singular_value(const Matrix& w) {
  if (w.rows == 0 || w.cols == 0) return 0.0;
  // Gram matrix on the smaller side; W W^T and W^T W share their nonzero
  // spectrum, and wide or tall blocks would otherwise blow up memory.
  const bool wide = w.cols > w.rows;
  int n = wide ? w.rows : w.cols;
  Matrix g = wide ? matmul(w, transpose(w)) : matmul(transpose(w), w);

  // Fixed, slightly uneven start vector so ties and symmetry cannot stall it.
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * i;
  double nv = 0.0;
  for (double x : v) nv += x * x;
  nv = std::sqrt(nv);
  for (double& x : v) x /= nv;

  double prev = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vec gv = matvec(g, v);
    double norm = 0.0;
    for (double x : gv) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (double& x : gv) x /= norm;
    // Rayleigh quotient of g at the normalized iterate.
    Vec gv2 = matvec(g, gv);
    double lam = 0.0;
    for (int i = 0; i < n; ++i) lam += gv[i] * gv2[i];
    v = gv;
    if (it > 0 && std::fabs(lam - prev) <= 1e-12 * std::max(1.0, std::fabs(lam))) {
      prev = lam;
      break;
    }
    prev = lam;
  }
  return std::sqrt(std::max(0.0, prev));
}

double psd_min_eig(const Matrix& a) {
  SymEigen e = sym_eig(a);
  return e.values.back();
}

}  // namespace netgeom
