#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/metrics.hpp"
#include "debiaskit/subspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace debiaskit {

/// Word sets for comparing subspace methods by LP-then-measure.
struct SubspaceComparisonSets {
  WordSet train_f;          // seeds F (e.g. female names)
  WordSet train_m;          // seeds M (e.g. male names)
  WeatSets objective;       // WEAT optimized by the iterative method
  WeatSets evaluation;      // WEAT reported (adjective attributes)
  WordSet ect_attributes;   // ECT list, groups are evaluation.x / evaluation.y
};

/// Default sets from the bundled word lists, with the given name lists.
SubspaceComparisonSets default_comparison_sets(const WordSet& names_f, const WordSet& names_m);

struct ComparisonRow {
  std::string method;  // Baseline, PCA, 2-means, Classification (1 step), Iterative Subspace
  std::optional<SubspaceMethod> subspace;
  double ect = 0.0;
  double weat = 0.0;
  bool degenerate = false;
};

/// Baseline plus one row per subspace method, each debiased by a single
/// linear projection of the whole snapshot.
std::vector<ComparisonRow> compare_subspaces(const EmbeddingSnapshot& snapshot, const SubspaceComparisonSets& sets,
                                             const IterativeConfig& iterative = {});

std::string format_comparison_table(const std::vector<ComparisonRow>& rows);

}  // namespace debiaskit
