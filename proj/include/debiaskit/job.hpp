#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/metrics.hpp"
#include "debiaskit/subspace.hpp"
#include "debiaskit/transforms.hpp"

#include <optional>
#include <string>
#include <vector>

namespace debiaskit {

enum class DebiasMethod { LinearProjection, HardDebias, Inlp, Oscar };

DebiasMethod parse_debias_method(std::string_view name);
const char* to_string(DebiasMethod method);

/// Declarative description of one debiasing run.
struct DebiasJob {
  DebiasMethod method = DebiasMethod::LinearProjection;
  SubspaceMethod subspace_method = SubspaceMethod::TwoMeans;
  std::string label = "concept";

  WordSet seeds_f{"Seed F", {}};  // PCA uses seeds_f followed by seeds_m
  WordSet seeds_m{"Seed M", {}};
  PairedWordSet pairs{"Seed pairs", {}};  // paired PCA
  std::optional<PairedWordSet> equalize;         // HD only
  std::optional<WordSet> second_subspace_seeds;  // OSCaR only; PCA direction
  WordSet evaluation{"Evaluation", {}};
  WordSet exclude{"Excluded", {}};               // LP only

  int inlp_max_iters = 35;
  double inlp_accuracy_floor = 0.55;
  HardDebiasScope hd_scope = HardDebiasScope::All;
  std::optional<IterativeConfig> iterative;  // required for the iterative subspace
  std::optional<MetricSets> metrics;         // before/after report when present

  /// Structural checks only (no vocabulary); throws Error(JobInvariant).
  void validate() const;
  /// Every token the job references, for one-shot resolution.
  std::vector<std::string> all_tokens() const;
  /// Seed words that define the concept (HD keeps them fixed).
  WordSet definitional() const;
};

/// Concept direction for the job's seeds, by its subspace method.
ConceptDirection identify_direction(const EmbeddingSnapshot& snapshot, const DebiasJob& job);

struct JobResult {
  TransformResult transform;
  std::vector<ConceptDirection> directions;  // OSCaR: [v1, v2]; otherwise [v]
  std::optional<InlpResult> inlp;
  std::optional<IterativeResult> iterative;
};

JobResult run_job(const EmbeddingSnapshot& snapshot, const DebiasJob& job);

}  // namespace debiaskit
