#include "debiaskit/serialize.hpp"

#include "debiaskit/error.hpp"

namespace debiaskit {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

std::string required_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) bad(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

std::vector<std::string> string_list(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array of strings");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) bad(what + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::pair<std::string, std::string> pair_from_json(const Json& e, const std::string& what) {
  if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string())
    return {e[0].get<std::string>(), e[1].get<std::string>()};
  if (e.is_string()) {
    const std::string s = e.get<std::string>();
    const auto colon = s.find(':');
    if (colon != std::string::npos && colon > 0 && colon + 1 < s.size() &&
        s.find(':', colon + 1) == std::string::npos)
      return {s.substr(0, colon), s.substr(colon + 1)};
  }
  bad(what + " entries must be [a, b] or \"a:b\"");
}

}  // namespace

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const WordSet& set) { return Json{{"label", set.label}, {"tokens", set.tokens}}; }

Json to_json(const PairedWordSet& set) {
  Json pairs = Json::array();
  for (const auto& [a, b] : set.pairs) pairs.push_back(Json::array({a, b}));
  return Json{{"label", set.label}, {"pairs", pairs}};
}

Json to_json(const Camera& camera) {
  return Json{{"kind", to_string(camera.kind)},
              {"basis1", to_json(camera.basis1)},
              {"basis2", to_json(camera.basis2)},
              {"degenerate", camera.degenerate}};
}

Json to_json(const ViewFrame& frame) {
  Json points = Json::array();
  for (const auto& p : frame.points)
    points.push_back({{"token", p.token}, {"x", p.x}, {"y", p.y}, {"group", to_string(p.group)}});
  Json segments = Json::array();
  for (const auto& s : frame.direction_segments)
    segments.push_back({{"label", s.label}, {"x", s.x}, {"y", s.y}});
  return Json{{"step_index", frame.step_index},
              {"step_label", frame.step_label},
              {"description", frame.description},
              {"snapshot_id", frame.snapshot_id},
              {"camera", to_json(frame.camera)},
              {"points", points},
              {"direction_segments", segments}};
}

Json to_json(const StepTrace& trace) {
  Json frames = Json::array();
  Json snapshots = Json::array();
  for (const auto& f : trace.frames) {
    frames.push_back(to_json(f));
    snapshots.push_back(f.snapshot_id);
  }
  return Json{{"method", to_string(trace.method)},
              {"frames", frames},
              {"snapshots", snapshots},
              {"metrics_before", trace.metrics_before ? to_json(*trace.metrics_before) : Json()},
              {"metrics_after", trace.metrics_after ? to_json(*trace.metrics_after) : Json()}};
}

Json to_json(const WeatResult& r) {
  return Json{{"effect_size", r.effect_size}, {"degenerate", r.degenerate}, {"zero_vector", r.zero_vector}};
}

Json to_json(const EctResult& r) {
  return Json{{"score", r.score}, {"degenerate", r.degenerate}, {"zero_vector", r.zero_vector}};
}

Json to_json(const MetricReport& report) {
  return Json{{"snapshot_id", report.snapshot_id},
              {"weat", to_json(report.weat)},
              {"ect", to_json(report.ect)},
              {"sets",
               {{"x", to_json(report.sets.weat.x)},
                {"y", to_json(report.sets.weat.y)},
                {"a", to_json(report.sets.weat.a)},
                {"b", to_json(report.sets.weat.b)},
                {"ect_attributes", to_json(report.sets.ect_attributes)}}}};
}

Json to_json(const std::vector<Neighbor>& neighbors) {
  Json out = Json::array();
  for (const auto& n : neighbors)
    out.push_back({{"token", n.token}, {"similarity", n.similarity}, {"zero_vector", n.zero_vector}});
  return out;
}

Json to_json(const IterativeResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"round", s.round},
                     {"moving", s.moving_m ? "m" : "f"},
                     {"toward", s.toward},
                     {"alpha", s.alpha},
                     {"objective", s.objective}});
  return Json{{"initial_objective", r.initial_objective},
              {"final_objective", r.final_objective},
              {"steps", steps}};
}

Json to_json(const InlpResult& r) {
  Json rounds = Json::array();
  for (const auto& round : r.rounds) rounds.push_back({{"accuracy", round.accuracy}});
  return Json{{"rounds", rounds},
              {"final_accuracy", r.final_accuracy},
              {"hit_iteration_cap", r.hit_iteration_cap}};
}

Json to_json(const DebiasJob& job) {
  Json j{{"method", to_string(job.method)},
         {"subspace", to_string(job.subspace_method)},
         {"label", job.label},
         {"seeds_f", to_json(job.seeds_f)},
         {"seeds_m", to_json(job.seeds_m)},
         {"pairs", to_json(job.pairs)},
         {"evaluation", to_json(job.evaluation)},
         {"exclude", to_json(job.exclude)},
         {"inlp_max_iters", job.inlp_max_iters},
         {"inlp_accuracy_floor", job.inlp_accuracy_floor},
         {"hd_scope", job.hd_scope == HardDebiasScope::All ? "all" : "sets"}};
  if (job.equalize) j["equalize"] = to_json(*job.equalize);
  if (job.second_subspace_seeds) j["second_seeds"] = to_json(*job.second_subspace_seeds);
  auto weat_json = [](const WeatSets& w) {
    return Json{{"x", to_json(w.x)}, {"y", to_json(w.y)}, {"a", to_json(w.a)}, {"b", to_json(w.b)}};
  };
  if (job.iterative)
    j["iterative"] = {{"rounds", job.iterative->rounds},
                      {"tolerance", job.iterative->gss_tolerance},
                      {"weat", weat_json(job.iterative->weat_sets)}};
  if (job.metrics)
    j["metrics"] = {{"weat", weat_json(job.metrics->weat)},
                    {"ect_attributes", to_json(job.metrics->ect_attributes)}};
  return j;
}

Json direction_summary(const EmbeddingSnapshot& snapshot, const ConceptDirection& dir, std::size_t k) {
  const std::size_t kk = std::min(k, static_cast<std::size_t>(snapshot.size()));
  Json seeds = Json::array();
  for (const auto& s : dir.seeds) seeds.push_back(to_json(s));
  Json j{{"method", to_string(dir.method)},
         {"label", dir.label},
         {"vector", to_json(dir.v)},
         {"seeds", seeds},
         {"nearest_positive", to_json(nearest_to_vector(snapshot, dir.v, kk))},
         {"nearest_negative", to_json(nearest_to_vector(snapshot, -dir.v, kk))}};
  if (dir.pairs) j["pairs"] = to_json(*dir.pairs);
  return j;
}

Json job_result_json(const TraceResult& result) {
  Json directions = Json::array();
  for (const auto& d : result.job.directions)
    directions.push_back({{"method", to_string(d.method)}, {"label", d.label}, {"vector", to_json(d.v)}});
  Json j{{"trace", to_json(result.trace)},
         {"metrics_before", result.trace.metrics_before ? to_json(*result.trace.metrics_before) : Json()},
         {"metrics_after", result.trace.metrics_after ? to_json(*result.trace.metrics_after) : Json()},
         {"output_snapshot_id", result.job.transform.output.id()},
         {"directions", directions}};
  if (result.job.inlp) j["inlp"] = to_json(*result.job.inlp);
  if (result.job.iterative) j["iterative"] = to_json(*result.job.iterative);
  return j;
}

WordSet word_set_from_json(const Json& j, const std::string& default_label) {
  if (j.is_array()) return WordSet::make(default_label, string_list(j, default_label));
  if (j.is_object()) {
    if (!j.contains("tokens")) bad(default_label + " object needs a 'tokens' array");
    return WordSet::make(field<std::string>(j, "label", default_label), string_list(j.at("tokens"), default_label));
  }
  bad(default_label + " must be an array of tokens or an object with 'tokens'");
}

PairedWordSet paired_set_from_json(const Json& j, const std::string& default_label) {
  const Json* list = &j;
  std::string label = default_label;
  if (j.is_object()) {
    if (!j.contains("pairs")) bad(default_label + " object needs a 'pairs' array");
    list = &j.at("pairs");
    label = field<std::string>(j, "label", default_label);
  }
  if (!list->is_array()) bad(default_label + " must be an array of pairs");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& e : *list) pairs.push_back(pair_from_json(e, default_label));
  return PairedWordSet::make(label, std::move(pairs));
}

WeatSets weat_sets_from_json(const Json& j) {
  if (!j.is_object()) bad("WEAT sets must be an object with x, y, a, b");
  for (const char* k : {"x", "y", "a", "b"})
    if (!j.contains(k)) bad(std::string("WEAT sets missing '") + k + "'");
  WeatSets w{word_set_from_json(j.at("x"), "X"), word_set_from_json(j.at("y"), "Y"),
             word_set_from_json(j.at("a"), "A"), word_set_from_json(j.at("b"), "B")};
  return w;
}

MetricSets metric_sets_from_json(const Json& j) {
  if (!j.is_object()) bad("metrics must be an object");
  MetricSets m;
  m.weat = weat_sets_from_json(j.contains("weat") ? j.at("weat") : j);
  if (!j.contains("ect_attributes")) bad("metrics missing 'ect_attributes'");
  m.ect_attributes = word_set_from_json(j.at("ect_attributes"), "ECT attributes");
  return m;
}

DebiasJob job_from_json(const Json& j) {
  if (!j.is_object()) bad("job must be a JSON object");
  DebiasJob job;
  job.method = parse_debias_method(required_string(j, "method"));
  const std::string subspace =
      j.contains("subspace") ? required_string(j, "subspace") : field<std::string>(j, "subspace_method", "");
  if (subspace.empty()) {
    job.subspace_method = job.method == DebiasMethod::Inlp ? SubspaceMethod::ClassifierNormal : SubspaceMethod::TwoMeans;
  } else {
    job.subspace_method = parse_subspace_method(subspace);
  }
  job.label = field<std::string>(j, "label", job.label);

  if (j.contains("seeds_f")) job.seeds_f = word_set_from_json(j.at("seeds_f"), "Seed F");
  if (j.contains("seeds_m")) job.seeds_m = word_set_from_json(j.at("seeds_m"), "Seed M");
  if (j.contains("seeds")) {
    // Single-set form for PCA.
    job.seeds_f = word_set_from_json(j.at("seeds"), "Seeds");
  }
  if (j.contains("pairs")) job.pairs = paired_set_from_json(j.at("pairs"), "Seed pairs");
  if (j.contains("equalize") && !j.at("equalize").is_null())
    job.equalize = paired_set_from_json(j.at("equalize"), "Equalize");
  const char* second = j.contains("second_seeds") ? "second_seeds" : "second_subspace_seeds";
  if (j.contains(second) && !j.at(second).is_null())
    job.second_subspace_seeds = word_set_from_json(j.at(second), "Second subspace");
  if (j.contains("evaluation")) job.evaluation = word_set_from_json(j.at("evaluation"), "Evaluation");
  if (j.contains("exclude")) job.exclude = word_set_from_json(j.at("exclude"), "Excluded");

  job.inlp_max_iters = field<int>(j, "inlp_max_iters", job.inlp_max_iters);
  job.inlp_accuracy_floor = field<double>(j, "inlp_accuracy_floor", job.inlp_accuracy_floor);
  const std::string scope = field<std::string>(j, "hd_scope", "all");
  if (scope == "all") job.hd_scope = HardDebiasScope::All;
  else if (scope == "sets") job.hd_scope = HardDebiasScope::Sets;
  else bad("hd_scope must be 'all' or 'sets'");

  if (j.contains("iterative") && !j.at("iterative").is_null()) {
    const Json& it = j.at("iterative");
    if (!it.is_object()) bad("iterative must be an object");
    IterativeConfig cfg;
    cfg.rounds = field<int>(it, "rounds", cfg.rounds);
    cfg.gss_tolerance = field<double>(it, "tolerance", cfg.gss_tolerance);
    if (!it.contains("weat")) bad("iterative missing 'weat' sets");
    cfg.weat_sets = weat_sets_from_json(it.at("weat"));
    job.iterative = std::move(cfg);
  }
  if (j.contains("metrics") && !j.at("metrics").is_null()) job.metrics = metric_sets_from_json(j.at("metrics"));
  return job;
}

}  // namespace debiaskit
