#pragma once

#include "debiaskit/embedding.hpp"

#include <span>
#include <string>
#include <vector>

namespace debiaskit {

/// Targets X, Y and attributes A, B for the association test.
struct WeatSets {
  WordSet x, y, a, b;

  /// All four non-empty, X and Y disjoint, A and B disjoint.
  void validate() const;
};

struct WeatResult {
  double effect_size = 0.0;
  bool degenerate = false;   // association scores all equal; effect size defined as 0
  bool zero_vector = false;  // some cosine involved a zero vector
};

struct EctResult {
  double score = 0.0;        // Spearman rho in [-1, 1]
  bool degenerate = false;   // a similarity list has no rank variation
  bool zero_vector = false;
};

/// s(w, A, B) = mean_a cos(a, w) - mean_b cos(b, w).
double association(const Eigen::Ref<const Vector>& w, const Matrix& a, const Matrix& b);

/// Effect size s(X,Y,A,B) / stddev_{w in X u Y} s(w,A,B), population stddev.
WeatResult weat_effect_size(const Matrix& x, const Matrix& y, const Matrix& a, const Matrix& b);
WeatResult weat(const EmbeddingSnapshot& snapshot, const WeatSets& sets);

/// Fractional (average) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties. `degenerate` is set
/// (and 0 returned) when either side has zero rank variance.
double spearman(std::span<const double> a, std::span<const double> b, bool* degenerate = nullptr);

/// Spearman correlation between cos(mean X, w) and cos(mean Y, w) over the attributes.
EctResult ect_score(const Matrix& x, const Matrix& y, const Matrix& attributes);
EctResult ect(const EmbeddingSnapshot& snapshot, const WordSet& x, const WordSet& y,
              const WordSet& attributes);

/// Word sets for a before/after metric report. ECT uses weat.x / weat.y as the groups.
struct MetricSets {
  WeatSets weat;
  WordSet ect_attributes;
};

struct MetricReport {
  std::string snapshot_id;
  MetricSets sets;
  WeatResult weat;
  EctResult ect;
};

MetricReport evaluate_metrics(const EmbeddingSnapshot& snapshot, const MetricSets& sets);

}  // namespace debiaskit
