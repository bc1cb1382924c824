#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/metrics.hpp"
#include "debiaskit/svm.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace debiaskit {

enum class SubspaceMethod { Pca, PairedPca, TwoMeans, ClassifierNormal, Iterative };

SubspaceMethod parse_subspace_method(std::string_view name);
const char* to_string(SubspaceMethod method);

/// A one-dimensional concept subspace: unit vector plus provenance.
struct ConceptDirection {
  Vector v;
  SubspaceMethod method = SubspaceMethod::TwoMeans;
  std::string label;
  std::vector<WordSet> seeds;          // F then M for two-set methods
  std::optional<PairedWordSet> pairs;  // paired_pca only
};

ConceptDirection identify_pca(const EmbeddingSnapshot& snapshot, const WordSet& seeds);
ConceptDirection identify_paired_pca(const EmbeddingSnapshot& snapshot, const PairedWordSet& pairs);
ConceptDirection identify_two_means(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                    const WordSet& set_m);

/// Unit normal of a soft-margin linear SVM separating F (positive) from M,
/// oriented so that mean(F) scores higher than mean(M).
ConceptDirection identify_classifier_normal(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                            const WordSet& set_m, const SvmOptions& options = {});

// Matrix-level cores, shared with the transforms.
Vector pca_direction(const Matrix& seeds);
Vector paired_pca_direction(const Matrix& differences);
Vector two_means_direction(const Matrix& set_f, const Matrix& set_m);
Vector classifier_direction(const Matrix& set_f, const Matrix& set_m, const SvmOptions& options,
                            LinearSvm* fitted = nullptr);

/// Golden-section search for the minimizer of a unimodal f on [lo, hi]. The
/// bracket shrinks by (sqrt(5) - 1) / 2 per step until its half-width is at
/// most tol; returns the midpoint. No derivatives are used.
template <class F>
double golden_section_search(F&& f, double lo, double hi, double tol);

struct IterativeConfig {
  int rounds = 2;
  double gss_tolerance = 1e-3;
  WeatSets weat_sets;

  void validate() const;
};

/// Per-candidate record of the alternating search, for traces and tests.
struct IterativeStep {
  int round = 0;
  bool moving_m = true;  // false: moving f
  std::string toward;    // token x the point moved toward
  double alpha = 0.0;    // accepted fraction; 0 when the move was rejected
  double objective = 0.0;
};

struct IterativeResult {
  ConceptDirection direction;
  double initial_objective = 0.0;  // S(v) of the two-means start
  double final_objective = 0.0;
  std::vector<IterativeStep> steps;
};

/// S(v) = |WEAT effect size| after removing the v-component from every vector
/// of the WEAT sets. Smaller is better.
double projected_weat_objective(const Matrix& x, const Matrix& y, const Matrix& a, const Matrix& b,
                                const Eigen::Ref<const Vector>& v);

/// Start from the two means of F and M, then for cfg.rounds rounds move m
/// toward each x in M (token order) and then f toward each x in F, choosing
/// each step length with golden-section search on S. A move is kept only if it
/// strictly lowers S, so S never ends above its two-means value.
IterativeResult identify_iterative(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                   const WordSet& set_m, const IterativeConfig& cfg);

// ---------------------------------------------------------------------------

namespace detail {
[[noreturn]] void throw_gss_error(const char* what);
}

template <class F>
double golden_section_search(F&& f, double lo, double hi, double tol) {
  if (!(lo < hi)) detail::throw_gss_error("golden-section search needs lo < hi");
  if (!(tol > 0.0)) detail::throw_gss_error("golden-section search needs tol > 0");
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;

  auto eval = [&](double t) {
    const double value = f(t);
    if (!std::isfinite(value)) detail::throw_gss_error("objective is not finite");
    return value;
  };

  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > 2.0 * tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = eval(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace debiaskit
