#include "debiaskit/comparison.hpp"

#include "debiaskit/transforms.hpp"
#include "debiaskit/wordlists.hpp"

#include <cstdio>

namespace debiaskit {

SubspaceComparisonSets default_comparison_sets(const WordSet& names_f, const WordSet& names_m) {
  SubspaceComparisonSets s;
  s.train_f = names_f;
  s.train_m = names_m;
  const WordSet male = bundled_word_set("gender_male", "Male words");
  const WordSet female = bundled_word_set("gender_female", "Female words");
  s.objective = {male, female, bundled_word_set("occupations_male", "Male occupations"),
                 bundled_word_set("occupations_female", "Female occupations")};
  s.evaluation = {male, female, bundled_word_set("adjectives_male", "Male adjectives"),
                  bundled_word_set("adjectives_female", "Female adjectives")};
  s.ect_attributes = bundled_word_set("ect_occupations", "Occupations");
  return s;
}

namespace {

ComparisonRow measure(const EmbeddingSnapshot& s, const SubspaceComparisonSets& sets, std::string name,
                      std::optional<SubspaceMethod> method) {
  const WeatResult w = weat(s, sets.evaluation);
  const EctResult e = ect(s, sets.evaluation.x, sets.evaluation.y, sets.ect_attributes);
  return {std::move(name), method, e.score, w.effect_size, w.degenerate || e.degenerate};
}

}  // namespace

std::vector<ComparisonRow> compare_subspaces(const EmbeddingSnapshot& snapshot, const SubspaceComparisonSets& sets,
                                             const IterativeConfig& iterative) {
  IterativeConfig cfg = iterative;
  cfg.weat_sets = sets.objective;

  std::vector<ComparisonRow> rows;
  rows.push_back(measure(snapshot, sets, "Baseline", std::nullopt));

  WordSet both{"Names", sets.train_m.tokens};
  both.tokens.insert(both.tokens.end(), sets.train_f.tokens.begin(), sets.train_f.tokens.end());

  const struct {
    const char* name;
    SubspaceMethod method;
  } methods[] = {{"PCA", SubspaceMethod::Pca},
                 {"2-means", SubspaceMethod::TwoMeans},
                 {"Classification (1 step)", SubspaceMethod::ClassifierNormal},
                 {"Iterative Subspace", SubspaceMethod::Iterative}};
  for (const auto& m : methods) {
    ConceptDirection dir;
    switch (m.method) {
      case SubspaceMethod::Pca: dir = identify_pca(snapshot, both); break;
      case SubspaceMethod::TwoMeans: dir = identify_two_means(snapshot, sets.train_f, sets.train_m); break;
      case SubspaceMethod::ClassifierNormal:
        dir = identify_classifier_normal(snapshot, sets.train_f, sets.train_m);
        break;
      default: dir = identify_iterative(snapshot, sets.train_f, sets.train_m, cfg).direction; break;
    }
    const EmbeddingSnapshot out = linear_projection(snapshot, dir.v).output;
    rows.push_back(measure(out, sets, m.name, m.method));
  }
  return rows;
}

std::string format_comparison_table(const std::vector<ComparisonRow>& rows) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-24s | %8s | %10s\n", "Method", "ECT", "WEAT (adj)");
  out += line;
  out += std::string(24, '-') + "-+-" + std::string(8, '-') + "-+-" + std::string(10, '-') + "\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-24s | %8.3f | %10.3f%s\n", r.method.c_str(), r.ect, r.weat,
                  r.degenerate ? "  (degenerate)" : "");
    out += line;
  }
  return out;
}

}  // namespace debiaskit
