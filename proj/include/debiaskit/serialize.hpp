#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/job.hpp"
#include "debiaskit/metrics.hpp"
#include "debiaskit/subspace.hpp"
#include "debiaskit/view.hpp"

#include <json.hpp>

namespace debiaskit {

using Json = nlohmann::json;

/// JSON schema shared by the service, the CLI and the Python bindings.
/// Parsing failures throw Error(InvalidArgument) naming the offending field.

Json to_json(const Vector& v);
Json to_json(const WordSet& set);
Json to_json(const PairedWordSet& set);
Json to_json(const Camera& camera);
Json to_json(const ViewFrame& frame);
Json to_json(const StepTrace& trace);
Json to_json(const WeatResult& r);
Json to_json(const EctResult& r);
Json to_json(const MetricReport& report);
Json to_json(const std::vector<Neighbor>& neighbors);
Json to_json(const IterativeResult& r);
Json to_json(const InlpResult& r);
Json to_json(const DebiasJob& job);

/// Summary of a direction: method, label, unit vector and the k tokens closest
/// to +v and to -v.
Json direction_summary(const EmbeddingSnapshot& snapshot, const ConceptDirection& dir, std::size_t k);

/// {trace, metrics_before, metrics_after, output_snapshot_id, directions, ...}
Json job_result_json(const TraceResult& result);

/// Accepts ["w1", "w2"] or {"label": ..., "tokens": [...]}.
WordSet word_set_from_json(const Json& j, const std::string& default_label);
/// Accepts [["a","b"], ...], ["a:b", ...] or {"label": ..., "pairs": [...]}.
PairedWordSet paired_set_from_json(const Json& j, const std::string& default_label);
WeatSets weat_sets_from_json(const Json& j);
MetricSets metric_sets_from_json(const Json& j);
DebiasJob job_from_json(const Json& j);

}  // namespace debiaskit
