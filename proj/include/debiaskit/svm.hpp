#pragma once

#include "debiaskit/embedding.hpp"

namespace debiaskit {

struct SvmOptions {
  double c = 1.0;             // soft-margin penalty
  int max_epochs = 10000;
  double tolerance = 1e-6;    // projected-gradient spread stopping rule
  double bias_feature = 1.0;  // constant appended to every sample
};

/// Linear decision function sign(<w, x> + b).
struct LinearSvm {
  Vector weights;
  double bias = 0.0;
  int epochs = 0;

  double decision(const Eigen::Ref<const Vector>& x) const { return weights.dot(x) + bias; }
};

/// L2-regularized hinge-loss SVM fitted by dual coordinate descent, sweeping
/// samples in their given order (positives first, then negatives) every epoch.
/// The bias is learned through an appended constant feature. Throws
/// Error(Convergence) if the stopping rule is not met within max_epochs.
LinearSvm train_linear_svm(const Matrix& positives, const Matrix& negatives,
                           const SvmOptions& options = {});

/// Fraction of samples on the correct side of sign(<w,x> + b).
double svm_accuracy(const LinearSvm& svm, const Matrix& positives, const Matrix& negatives);

/// Best training accuracy of any threshold rule sign(<x,v> - t), with the
/// positives on the high side. Projections within tie_tolerance of their
/// sorted neighbour are treated as equal.
double best_threshold_accuracy(const Eigen::Ref<const Vector>& direction, const Matrix& positives,
                               const Matrix& negatives, double tie_tolerance = 0.0);

}  // namespace debiaskit
