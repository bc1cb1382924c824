#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/svm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace debiaskit {

/// One interpretable stage of a transform.
struct StepDescriptor {
  std::string label;
  std::string description;
  std::vector<Vector> directions;     // directions in effect during this step
  std::vector<Index> modified_rows;   // rows whose vector changed
  std::optional<EmbeddingSnapshot> state;  // snapshot after this step
  std::optional<double> accuracy;     // INLP: classifier training accuracy
};

struct TransformResult {
  EmbeddingSnapshot output;
  std::vector<StepDescriptor> steps;
};

/// Rows already orthogonal to v up to round-off (|<x,v>| <= 1e-12 max(|x|, 1))
/// are passed through untouched, which makes the projection exactly idempotent.
inline constexpr double kProjectionSkip = 1e-12;

/// x' = x - <v,x> v for every row not in `exclude`. A v whose norm is off by at
/// most 1e-6 is renormalized (with a warning in the step description); larger
/// deviations are an error.
TransformResult linear_projection(const EmbeddingSnapshot& snapshot, const Vector& v,
                                  const WordSet& exclude = {});

enum class HardDebiasScope { All, Sets };

/// Definitional words stay fixed, equalize pairs are re-centred on the
/// nullspace of v keeping their signed separation along v, and every other
/// word in scope is projected. `scope_tokens` lists the words projected when
/// scope == Sets.
TransformResult hard_debias(const EmbeddingSnapshot& snapshot, const Vector& v,
                            const WordSet& definitional, const PairedWordSet& equalize,
                            HardDebiasScope scope = HardDebiasScope::All,
                            const std::vector<std::string>& scope_tokens = {});

struct InlpOptions {
  int max_iters = 35;
  double accuracy_floor = 0.55;
  SvmOptions svm;
};

struct InlpRound {
  Vector direction;
  double accuracy = 0.0;  // best threshold accuracy along the fitted normal
};

struct InlpResult {
  TransformResult transform;
  std::vector<InlpRound> rounds;  // projected directions, in order
  double final_accuracy = 0.0;    // accuracy that stopped the loop
  bool hit_iteration_cap = false;
};

/// Repeatedly fit a linear classifier on the current vectors of F and M and
/// project the whole snapshot along its normal, until the classifier's best
/// training accuracy drops to the floor or max_iters projections were made.
InlpResult inlp(const EmbeddingSnapshot& snapshot, const WordSet& set_f, const WordSet& set_m,
                const InlpOptions& options = {});

/// Orthonormal frame of span(v1, v2) used by the graded rotation.
struct OscarPlane {
  Vector v1;      // unit v1
  Vector u1;      // +-v1, whichever makes an acute angle with v2
  Vector u2;      // unit, orthogonal to u1, <v2, u2> > 0
  double phi1;    // angle between u1 and v2, in (0, pi/2]
  double theta;   // rotation applied to v2: pi/2 - phi1
};

OscarPlane oscar_plane(const Vector& v1, const Vector& v2);

/// Rotation (toward u2) for a point at in-plane angle phi in (-pi, pi]: linear
/// from 0 at phi = 0 to theta at phi1, back to 0 at pi. A point with phi < 0
/// uses the angle of its antipode, phi + pi.
double oscar_rotation_angle(double phi, double phi1, double theta);

/// Rotate a single vector by the graded schedule; out-of-plane part untouched.
Vector oscar_apply(const OscarPlane& plane, const Eigen::Ref<const Vector>& x);

/// Graded rotation making v2 orthogonal to v1 inside span(v1, v2).
TransformResult oscar(const EmbeddingSnapshot& snapshot, const Vector& v1, const Vector& v2);

}  // namespace debiaskit
