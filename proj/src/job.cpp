#include "debiaskit/job.hpp"

#include "debiaskit/error.hpp"

#include <algorithm>

namespace debiaskit {

DebiasMethod parse_debias_method(std::string_view name) {
  if (name == "lp" || name == "linear_projection") return DebiasMethod::LinearProjection;
  if (name == "hd" || name == "hard_debias") return DebiasMethod::HardDebias;
  if (name == "inlp") return DebiasMethod::Inlp;
  if (name == "oscar") return DebiasMethod::Oscar;
  throw Error(ErrorKind::InvalidArgument, "unknown debias method '" + std::string(name) + "'");
}

const char* to_string(DebiasMethod method) {
  switch (method) {
    case DebiasMethod::LinearProjection: return "lp";
    case DebiasMethod::HardDebias: return "hd";
    case DebiasMethod::Inlp: return "inlp";
    case DebiasMethod::Oscar: return "oscar";
  }
  return "unknown";
}

namespace {

[[noreturn]] void invariant(const std::string& msg) { throw Error(ErrorKind::JobInvariant, msg); }

bool two_sets(SubspaceMethod m) {
  return m == SubspaceMethod::TwoMeans || m == SubspaceMethod::ClassifierNormal ||
         m == SubspaceMethod::Iterative;
}

void append(std::vector<std::string>& out, const std::vector<std::string>& tokens) {
  out.insert(out.end(), tokens.begin(), tokens.end());
}

}  // namespace

void DebiasJob::validate() const {
  if (method == DebiasMethod::HardDebias && !equalize) invariant("hd requires an equalize set");
  if (method == DebiasMethod::Oscar && !second_subspace_seeds)
    invariant("oscar requires second subspace seeds");
  if (method == DebiasMethod::Inlp && subspace_method != SubspaceMethod::ClassifierNormal)
    invariant("inlp requires the classifier_normal subspace method");
  if (subspace_method == SubspaceMethod::Iterative && !iterative)
    invariant("the iterative subspace method requires WEAT training sets");

  if (subspace_method == SubspaceMethod::PairedPca) {
    if (pairs.empty()) invariant("paired_pca requires seed pairs");
  } else if (subspace_method == SubspaceMethod::Pca) {
    if (seeds_f.size() + seeds_m.size() < 2) invariant("pca requires at least 2 seed words");
  } else if (two_sets(subspace_method)) {
    if (seeds_f.empty() || seeds_m.empty()) invariant(std::string(to_string(subspace_method)) +
                                                      " requires two non-empty seed sets");
  }
  if (method == DebiasMethod::Oscar && second_subspace_seeds->size() < 2)
    invariant("oscar second subspace needs at least 2 seed words");
  if (inlp_max_iters < 0) invariant("inlp_max_iters must be >= 0");
  if (iterative) iterative->validate();
}

std::vector<std::string> DebiasJob::all_tokens() const {
  std::vector<std::string> out;
  append(out, seeds_f.tokens);
  append(out, seeds_m.tokens);
  append(out, pairs.tokens());
  if (equalize) append(out, equalize->tokens());
  if (second_subspace_seeds) append(out, second_subspace_seeds->tokens);
  append(out, evaluation.tokens);
  append(out, exclude.tokens);
  if (iterative) {
    const auto& w = iterative->weat_sets;
    for (const WordSet* s : {&w.x, &w.y, &w.a, &w.b}) append(out, s->tokens);
  }
  if (metrics) {
    const auto& w = metrics->weat;
    for (const WordSet* s : {&w.x, &w.y, &w.a, &w.b}) append(out, s->tokens);
    append(out, metrics->ect_attributes.tokens);
  }
  return out;
}

WordSet DebiasJob::definitional() const {
  std::vector<std::string> tokens;
  auto add = [&](const std::string& t) {
    if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
  };
  if (subspace_method == SubspaceMethod::PairedPca) {
    for (const auto& t : pairs.tokens()) add(t);
  } else {
    for (const auto& t : seeds_f.tokens) add(t);
    for (const auto& t : seeds_m.tokens) add(t);
  }
  return WordSet{"Definitional", std::move(tokens)};
}

ConceptDirection identify_direction(const EmbeddingSnapshot& snapshot, const DebiasJob& job) {
  ConceptDirection dir;
  switch (job.subspace_method) {
    case SubspaceMethod::Pca: {
      WordSet all = job.definitional();
      all.label = "PCA seeds";
      dir = identify_pca(snapshot, all);
      break;
    }
    case SubspaceMethod::PairedPca: dir = identify_paired_pca(snapshot, job.pairs); break;
    case SubspaceMethod::TwoMeans: dir = identify_two_means(snapshot, job.seeds_f, job.seeds_m); break;
    case SubspaceMethod::ClassifierNormal:
      dir = identify_classifier_normal(snapshot, job.seeds_f, job.seeds_m);
      break;
    case SubspaceMethod::Iterative:
      if (!job.iterative) invariant("the iterative subspace method requires WEAT training sets");
      dir = identify_iterative(snapshot, job.seeds_f, job.seeds_m, *job.iterative).direction;
      break;
  }
  dir.label = job.label;
  return dir;
}

JobResult run_job(const EmbeddingSnapshot& snapshot, const DebiasJob& job) {
  job.validate();
  snapshot.indices_of(job.all_tokens());

  JobResult result{TransformResult{snapshot, {}}, {}, std::nullopt, std::nullopt};
  switch (job.method) {
    case DebiasMethod::LinearProjection: {
      ConceptDirection dir;
      if (job.subspace_method == SubspaceMethod::Iterative) {
        result.iterative = identify_iterative(snapshot, job.seeds_f, job.seeds_m, *job.iterative);
        dir = result.iterative->direction;
        dir.label = job.label;
      } else {
        dir = identify_direction(snapshot, job);
      }
      result.transform = linear_projection(snapshot, dir.v, job.exclude);
      result.directions.push_back(std::move(dir));
      break;
    }
    case DebiasMethod::HardDebias: {
      ConceptDirection dir = identify_direction(snapshot, job);
      std::vector<std::string> scope_tokens = job.evaluation.tokens;
      result.transform = hard_debias(snapshot, dir.v, job.definitional(), *job.equalize, job.hd_scope,
                                     scope_tokens);
      result.directions.push_back(std::move(dir));
      break;
    }
    case DebiasMethod::Inlp: {
      InlpOptions opts;
      opts.max_iters = job.inlp_max_iters;
      opts.accuracy_floor = job.inlp_accuracy_floor;
      InlpResult r = inlp(snapshot, job.seeds_f, job.seeds_m, opts);
      for (const auto& round : r.rounds) {
        ConceptDirection d;
        d.v = round.direction;
        d.method = SubspaceMethod::ClassifierNormal;
        d.label = job.label;
        d.seeds = {job.seeds_f, job.seeds_m};
        result.directions.push_back(std::move(d));
      }
      result.transform = r.transform;
      result.inlp = std::move(r);
      break;
    }
    case DebiasMethod::Oscar: {
      ConceptDirection v1 = identify_direction(snapshot, job);
      ConceptDirection v2 = identify_pca(snapshot, *job.second_subspace_seeds);
      v2.label = job.second_subspace_seeds->label;
      result.transform = oscar(snapshot, v1.v, v2.v);
      result.directions.push_back(std::move(v1));
      result.directions.push_back(std::move(v2));
      break;
    }
  }
  return result;
}

}  // namespace debiaskit
