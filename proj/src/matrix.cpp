#include "netgeom/matrix.hpp"

#include <Eigen/Core>
#include <cmath>

#include "netgeom/errors.hpp"

namespace netgeom {

using EMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>;
using EMapMut =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Matrix Matrix::from_rows(const std::vector<Vec>& rows_in) {
  if (rows_in.empty()) return Matrix();
  Matrix m(static_cast<int>(rows_in.size()), static_cast<int>(rows_in[0].size()));
  for (int i = 0; i < m.rows; ++i) {
    if (static_cast<int>(rows_in[i].size()) != m.cols)
      throw DataError("from_rows: ragged rows");
    for (int j = 0; j < m.cols; ++j) m(i, j) = rows_in[i][j];
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DataError("matmul: inner dimensions disagree");
  Matrix c(a.rows, b.cols);
  if (a.rows == 0 || b.cols == 0 || a.cols == 0) return c;
  EMap ea(a.a.data(), a.rows, a.cols);
  EMap eb(b.a.data(), b.rows, b.cols);
  EMapMut ec(c.a.data(), c.rows, c.cols);
  ec.noalias() = ea * eb;
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

double trace(const Matrix& m) {
  if (m.rows != m.cols) throw DataError("trace: matrix not square");
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i) s += m(i, i);
  return s;
}

double fro_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::fabs(v));
  return s;
}

Vec matvec(const Matrix& m, const Vec& v) {
  if (m.cols != static_cast<int>(v.size()))
    throw DataError("matvec: dimension mismatch");
  Vec out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    const double* r = m.row(i);
    for (int j = 0; j < m.cols; ++j) s += r[j] * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace netgeom
