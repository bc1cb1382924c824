#include "debiaskit/svm.hpp"

#include "debiaskit/error.hpp"

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

namespace debiaskit {

LinearSvm train_linear_svm(const Matrix& positives, const Matrix& negatives,
                           const SvmOptions& options) {
  if (positives.rows() == 0 || negatives.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, "classifier needs two non-empty classes");
  if (positives.cols() != negatives.cols())
    throw Error(ErrorKind::InvalidArgument, "class dimensions differ");

  const Index n = positives.rows() + negatives.rows();
  const Index d = positives.cols();
  Matrix x(n, d + 1);
  x.topLeftCorner(positives.rows(), d) = positives;
  x.bottomLeftCorner(negatives.rows(), d) = negatives;
  x.col(d).setConstant(options.bias_feature);
  std::vector<double> y(static_cast<std::size_t>(n), -1.0);
  std::fill(y.begin(), y.begin() + positives.rows(), 1.0);

  std::vector<double> qii(y.size());
  for (Index i = 0; i < n; ++i) qii[i] = x.row(i).squaredNorm();

  std::vector<double> alpha(y.size(), 0.0);
  Vector w = Vector::Zero(d + 1);
  const double c = options.c;

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double g = y[i] * x.row(i).dot(w) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] == c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qii[i], 0.0, c);
        w += ((alpha[i] - old) * y[i]) * x.row(i).transpose();
      }
    }
    if (pg_max - pg_min <= options.tolerance) {
      LinearSvm out;
      out.weights = w.head(d);
      out.bias = w[d] * options.bias_feature;
      out.epochs = epoch;
      return out;
    }
  }
  throw Error(ErrorKind::Convergence,
              "linear SVM did not converge within " + std::to_string(options.max_epochs) + " epochs");
}

double svm_accuracy(const LinearSvm& svm, const Matrix& positives, const Matrix& negatives) {
  Index correct = 0;
  for (Index r = 0; r < positives.rows(); ++r)
    if (svm.decision(positives.row(r).transpose()) > 0.0) ++correct;
  for (Index r = 0; r < negatives.rows(); ++r)
    if (svm.decision(negatives.row(r).transpose()) < 0.0) ++correct;
  return static_cast<double>(correct) / static_cast<double>(positives.rows() + negatives.rows());
}

double best_threshold_accuracy(const Eigen::Ref<const Vector>& direction, const Matrix& positives,
                               const Matrix& negatives, double tie_tolerance) {
  // Scan thresholds between consecutive distinct projections; a sample is
  // called positive when its projection is strictly above the threshold.
  // Neighbours closer than tie_tolerance cannot be split.
  std::vector<std::pair<double, int>> proj;
  for (Index r = 0; r < positives.rows(); ++r) proj.emplace_back(positives.row(r).dot(direction), 1);
  for (Index r = 0; r < negatives.rows(); ++r) proj.emplace_back(negatives.row(r).dot(direction), 0);
  std::sort(proj.begin(), proj.end());

  const auto n = static_cast<long>(proj.size());
  // Threshold below everything: all called positive.
  long correct = static_cast<long>(positives.rows());
  long best = correct;
  for (long i = 0; i < n;) {
    long j = i;
    while (j < n && (j == i || proj[j].first - proj[j - 1].first <= tie_tolerance)) {
      correct += proj[j].second == 1 ? -1 : 1;
      ++j;
    }
    best = std::max(best, correct);
    i = j;
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace debiaskit
