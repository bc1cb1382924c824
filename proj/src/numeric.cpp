#include "debiaskit/numeric.hpp"

#include "debiaskit/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace debiaskit {

// Port of the msum/fsum partials algorithm: keep a list of non-overlapping
// partial sums, then round the final expansion once.
double exact_sum(std::span<const double> values) {
  std::vector<double> partials;
  for (double x : values) {
    if (!std::isfinite(x)) {
      double s = 0.0;
      for (double y : values) s += y;
      return s;
    }
    std::size_t i = 0;
    for (double y : partials) {
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }

  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Half-way case: round according to the sign of the next partial.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

double exact_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "mean of an empty set");
  return exact_sum(values) / static_cast<double>(values.size());
}

void canonicalize_sign(Vector& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i)
    if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
  if (v.size() > 0 && v[best] < 0.0) v = -v;
}

Vector row_mean(const Matrix& rows) {
  if (rows.rows() == 0) throw Error(ErrorKind::InvalidArgument, "mean of an empty set");
  Vector mean(rows.cols());
  std::vector<double> col(static_cast<std::size_t>(rows.rows()));
  for (Index c = 0; c < rows.cols(); ++c) {
    for (Index r = 0; r < rows.rows(); ++r) col[r] = rows(r, c);
    mean[c] = exact_mean(col);
  }
  return mean;
}

double row_scale(const Matrix& rows) {
  double s = 0.0;
  for (Index r = 0; r < rows.rows(); ++r) s = std::max(s, rows.row(r).norm());
  return s;
}

PrincipalAxes principal_axes(const Matrix& rows, Index k, bool center) {
  if (rows.rows() == 0) throw Error(ErrorKind::InvalidArgument, "principal axes of an empty set");
  Eigen::MatrixXd data = rows;
  if (center) data.rowwise() -= row_mean(rows).transpose();

  k = std::min<Index>(k, std::min(data.rows(), data.cols()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
  PrincipalAxes out;
  out.axes.resize(k, data.cols());
  out.singular_values = svd.singularValues().head(k);
  for (Index i = 0; i < k; ++i) {
    Vector axis = svd.matrixV().col(i);
    axis.normalize();
    canonicalize_sign(axis);
    out.axes.row(i) = axis.transpose();
  }
  return out;
}

}  // namespace debiaskit
