#pragma once

#include "debiaskit/embedding.hpp"
#include "debiaskit/job.hpp"
#include "debiaskit/metrics.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace debiaskit {

enum class PointGroup { SeedF, SeedM, Evaluation, Equalize, Other };
const char* to_string(PointGroup group);

enum class CameraKind { Pca, Aligned, Span };
const char* to_string(CameraKind kind);

/// Orthonormal pair of d-vectors; a point's view position is its inner
/// product with each. No mean is subtracted, so the origin stays at (0, 0).
struct Camera {
  CameraKind kind = CameraKind::Pca;
  Vector basis1;
  Vector basis2;
  bool degenerate = false;  // second axis was not determined by the data

  std::pair<double, double> project(const Eigen::Ref<const Vector>& x) const {
    return {x.dot(basis1), x.dot(basis2)};
  }
};

/// Top-2 principal directions of the centered display vectors.
Camera camera_pca(const EmbeddingSnapshot& snapshot, const std::vector<std::string>& display);
/// x-axis = v; y-axis = top principal direction of the display vectors with
/// their v-component removed.
Camera camera_aligned(const EmbeddingSnapshot& snapshot, const Vector& v,
                      const std::vector<std::string>& display);
/// The plane of two directions, v1 on the x-axis and v2 in the upper half.
Camera camera_span(const Vector& v1, const Vector& v2);

struct ViewPoint {
  std::string token;
  double x = 0.0;
  double y = 0.0;
  PointGroup group = PointGroup::Other;
};

/// Segment from the origin to the projected unit direction.
struct DirectionSegment {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct ViewFrame {
  int step_index = 0;
  std::string step_label;
  std::string description;
  std::string snapshot_id;
  Camera camera;
  std::vector<ViewPoint> points;
  std::vector<DirectionSegment> direction_segments;
};

struct DisplaySet {
  std::vector<std::string> tokens;
  std::vector<PointGroup> groups;
};

/// Seeds, equalize and evaluation words in that order, each token once.
DisplaySet display_set(const DebiasJob& job);

ViewFrame make_frame(int step_index, std::string label, std::string description,
                     const EmbeddingSnapshot& state, const Camera& camera, const DisplaySet& display,
                     const std::vector<std::pair<std::string, Vector>>& directions);

struct StepTrace {
  DebiasMethod method = DebiasMethod::LinearProjection;
  std::vector<ViewFrame> frames;
  std::optional<MetricReport> metrics_before;
  std::optional<MetricReport> metrics_after;
};

/// Number of keyframes for a method: LP 4, HD 5, OSCaR 4, INLP 2 + 2r.
std::size_t expected_frame_count(DebiasMethod method, std::size_t inlp_rounds = 0);

struct TraceResult {
  StepTrace trace;
  JobResult job;
};

/// Run the job and decompose it into keyframes.
TraceResult build_trace(const EmbeddingSnapshot& snapshot, const DebiasJob& job);

}  // namespace debiaskit
