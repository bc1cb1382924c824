#include "debiaskit/subspace.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/numeric.hpp"

#include <limits>
#include <map>

namespace debiaskit {

namespace detail {
void throw_gss_error(const char* what) { throw Error(ErrorKind::InvalidArgument, what); }
}  // namespace detail

SubspaceMethod parse_subspace_method(std::string_view name) {
  if (name == "pca") return SubspaceMethod::Pca;
  if (name == "paired_pca" || name == "paired-pca") return SubspaceMethod::PairedPca;
  if (name == "two_means" || name == "two-means" || name == "2-means") return SubspaceMethod::TwoMeans;
  if (name == "classifier_normal" || name == "classifier") return SubspaceMethod::ClassifierNormal;
  if (name == "iterative") return SubspaceMethod::Iterative;
  throw Error(ErrorKind::InvalidArgument, "unknown subspace method '" + std::string(name) + "'");
}

const char* to_string(SubspaceMethod method) {
  switch (method) {
    case SubspaceMethod::Pca: return "pca";
    case SubspaceMethod::PairedPca: return "paired_pca";
    case SubspaceMethod::TwoMeans: return "two_means";
    case SubspaceMethod::ClassifierNormal: return "classifier_normal";
    case SubspaceMethod::Iterative: return "iterative";
  }
  return "unknown";
}

namespace {

constexpr double kRelativeZero = 1e-12;

bool negligible(double value, double scale) { return !(value > kRelativeZero * scale); }

void require_disjoint(const WordSet& f, const WordSet& m) {
  std::vector<std::string> shared;
  for (const auto& t : f.tokens)
    if (m.contains(t)) shared.push_back(t);
  if (!shared.empty()) {
    std::string msg = "seed sets must be disjoint; shared:";
    for (const auto& t : shared) msg += " " + t;
    throw Error(ErrorKind::InvalidArgument, msg);
  }
}

// Resolve both sets in one call so the error lists every missing token.
std::pair<Matrix, Matrix> resolve_pair(const EmbeddingSnapshot& snapshot, const WordSet& f,
                                       const WordSet& m) {
  std::vector<std::string> all = f.tokens;
  all.insert(all.end(), m.tokens.begin(), m.tokens.end());
  snapshot.indices_of(all);
  return {get_vectors(snapshot, f), get_vectors(snapshot, m)};
}

}  // namespace

Vector pca_direction(const Matrix& seeds) {
  if (seeds.rows() < 2) throw Error(ErrorKind::InvalidArgument, "PCA needs at least 2 seeds");
  const auto axes = principal_axes(seeds, 1, /*center=*/true);
  if (negligible(axes.singular_values[0], std::max(row_scale(seeds), 1e-300)))
    throw Error(ErrorKind::Degenerate, "PCA seeds have degenerate covariance");
  return axes.axes.row(0).transpose();
}

Vector paired_pca_direction(const Matrix& differences) {
  if (differences.rows() < 1) throw Error(ErrorKind::InvalidArgument, "paired PCA needs at least 1 pair");
  if (row_scale(differences) == 0.0)
    throw Error(ErrorKind::Degenerate, "all pair difference vectors are zero");
  const auto axes = principal_axes(differences, 1, /*center=*/false);
  return axes.axes.row(0).transpose();
}

Vector two_means_direction(const Matrix& set_f, const Matrix& set_m) {
  if (set_f.rows() == 0 || set_m.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, "two-means needs two non-empty sets");
  const Vector diff = row_mean(set_f) - row_mean(set_m);
  const double scale = std::max(row_scale(set_f), row_scale(set_m));
  const double norm = diff.norm();
  if (norm == 0.0 || negligible(norm, scale))
    throw Error(ErrorKind::Degenerate, "two-means: set means are identical");
  return diff / norm;
}

Vector classifier_direction(const Matrix& set_f, const Matrix& set_m, const SvmOptions& options,
                            LinearSvm* fitted) {
  LinearSvm svm = train_linear_svm(set_f, set_m, options);
  const double norm = svm.weights.norm();
  if (norm == 0.0 || negligible(norm, 1.0))
    throw Error(ErrorKind::Degenerate, "classifier normal is zero; classes are not separable");
  Vector v = svm.weights / norm;
  if (v.dot(row_mean(set_f)) < v.dot(row_mean(set_m))) v = -v;
  if (fitted) *fitted = std::move(svm);
  return v;
}

ConceptDirection identify_pca(const EmbeddingSnapshot& snapshot, const WordSet& seeds) {
  if (seeds.size() < 2) throw Error(ErrorKind::InvalidArgument, "PCA needs at least 2 seeds");
  ConceptDirection out;
  out.v = pca_direction(get_vectors(snapshot, seeds));
  out.method = SubspaceMethod::Pca;
  out.seeds = {seeds};
  return out;
}

ConceptDirection identify_paired_pca(const EmbeddingSnapshot& snapshot, const PairedWordSet& pairs) {
  if (pairs.empty()) throw Error(ErrorKind::InvalidArgument, "paired PCA needs at least 1 pair");
  snapshot.indices_of(pairs.tokens());
  Matrix diffs(static_cast<Index>(pairs.size()), snapshot.dim());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    diffs.row(static_cast<Index>(i)) =
        snapshot.row(snapshot.index_of(pairs.pairs[i].first)) -
        snapshot.row(snapshot.index_of(pairs.pairs[i].second));
  ConceptDirection out;
  out.v = paired_pca_direction(diffs);
  out.method = SubspaceMethod::PairedPca;
  out.pairs = pairs;
  return out;
}

ConceptDirection identify_two_means(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                    const WordSet& set_m) {
  if (set_f.empty() || set_m.empty())
    throw Error(ErrorKind::InvalidArgument, "two-means needs two non-empty sets");
  auto [f, m] = resolve_pair(snapshot, set_f, set_m);
  ConceptDirection out;
  out.v = two_means_direction(f, m);
  out.method = SubspaceMethod::TwoMeans;
  out.seeds = {set_f, set_m};
  return out;
}

ConceptDirection identify_classifier_normal(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                            const WordSet& set_m, const SvmOptions& options) {
  if (set_f.empty() || set_m.empty())
    throw Error(ErrorKind::InvalidArgument, "classifier needs two non-empty sets");
  require_disjoint(set_f, set_m);
  auto [f, m] = resolve_pair(snapshot, set_f, set_m);
  ConceptDirection out;
  out.v = classifier_direction(f, m, options);
  out.method = SubspaceMethod::ClassifierNormal;
  out.seeds = {set_f, set_m};
  return out;
}

void IterativeConfig::validate() const {
  if (rounds < 1) throw Error(ErrorKind::InvalidArgument, "iterative: rounds must be >= 1");
  if (!(gss_tolerance > 0.0 && gss_tolerance < 1.0))
    throw Error(ErrorKind::InvalidArgument, "iterative: gss_tolerance must be in (0, 1)");
  weat_sets.validate();
}

double projected_weat_objective(const Matrix& x, const Matrix& y, const Matrix& a, const Matrix& b,
                                const Eigen::Ref<const Vector>& v) {
  auto project = [&](const Matrix& m) {
    Matrix out = m;
    const Vector along = m * v;
    out.noalias() -= along * v.transpose();
    return out;
  };
  return std::fabs(weat_effect_size(project(x), project(y), project(a), project(b)).effect_size);
}

IterativeResult identify_iterative(const EmbeddingSnapshot& snapshot, const WordSet& set_f,
                                   const WordSet& set_m, const IterativeConfig& cfg) {
  cfg.validate();
  if (set_f.empty() || set_m.empty())
    throw Error(ErrorKind::InvalidArgument, "iterative needs two non-empty sets");

  const auto& ws = cfg.weat_sets;
  {
    std::vector<std::string> all = set_f.tokens;
    all.insert(all.end(), set_m.tokens.begin(), set_m.tokens.end());
    for (const WordSet* s : {&ws.x, &ws.y, &ws.a, &ws.b})
      all.insert(all.end(), s->tokens.begin(), s->tokens.end());
    snapshot.indices_of(all);
  }
  const Matrix fm = get_vectors(snapshot, set_f);
  const Matrix mm = get_vectors(snapshot, set_m);
  const Matrix x = get_vectors(snapshot, ws.x);
  const Matrix y = get_vectors(snapshot, ws.y);
  const Matrix a = get_vectors(snapshot, ws.a);
  const Matrix b = get_vectors(snapshot, ws.b);
  const double scale = std::max(row_scale(fm), row_scale(mm));

  Vector f = row_mean(fm);
  Vector m = row_mean(mm);
  Vector start = two_means_direction(fm, mm);  // also rejects identical means

  // A candidate pair (f, m) that collapses has no direction; score it worst.
  auto objective = [&](const Vector& f_pt, const Vector& m_pt) {
    const Vector diff = f_pt - m_pt;
    const double norm = diff.norm();
    if (norm == 0.0 || negligible(norm, scale)) return std::numeric_limits<double>::max();
    return projected_weat_objective(x, y, a, b, diff / norm);
  };

  IterativeResult result;
  double current = projected_weat_objective(x, y, a, b, start);
  result.initial_objective = current;

  auto sweep = [&](int round, bool moving_m) {
    const Matrix& set = moving_m ? mm : fm;
    const WordSet& words = moving_m ? set_m : set_f;
    Vector& point = moving_m ? m : f;
    for (Index r = 0; r < set.rows(); ++r) {
      IterativeStep step{round, moving_m, words.tokens[static_cast<std::size_t>(r)], 0.0, current};
      const Vector target = set.row(r).transpose();
      if (target == point) {
        result.steps.push_back(step);
        continue;
      }
      std::map<double, double> memo;
      auto along_segment = [&](double alpha) {
        if (auto it = memo.find(alpha); it != memo.end()) return it->second;
        const Vector moved = (1.0 - alpha) * point + alpha * target;
        const double value = moving_m ? objective(f, moved) : objective(moved, m);
        memo.emplace(alpha, value);
        return value;
      };
      const double alpha = golden_section_search(along_segment, 0.0, 1.0, cfg.gss_tolerance);
      const double value = along_segment(alpha);
      if (value < current) {
        point = (1.0 - alpha) * point + alpha * target;
        current = value;
        step.alpha = alpha;
        step.objective = value;
      }
      result.steps.push_back(step);
    }
  };

  for (int round = 1; round <= cfg.rounds; ++round) {
    sweep(round, /*moving_m=*/true);
    sweep(round, /*moving_m=*/false);
  }

  result.direction.v = two_means_direction(f.transpose(), m.transpose());
  result.direction.method = SubspaceMethod::Iterative;
  result.direction.seeds = {set_f, set_m};
  result.final_objective = current;
  return result;
}

}  // namespace debiaskit
