#include "debiaskit/view.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace debiaskit {

const char* to_string(PointGroup group) {
  switch (group) {
    case PointGroup::SeedF: return "seed_f";
    case PointGroup::SeedM: return "seed_m";
    case PointGroup::Evaluation: return "evaluation";
    case PointGroup::Equalize: return "equalize";
    case PointGroup::Other: return "other";
  }
  return "other";
}

const char* to_string(CameraKind kind) {
  switch (kind) {
    case CameraKind::Pca: return "pca";
    case CameraKind::Aligned: return "aligned";
    case CameraKind::Span: return "span";
  }
  return "pca";
}

namespace {

constexpr double kSecondAxisFloor = 1e-9;

// Unit vector orthogonal to u built from the coordinate axis u leans on least.
Vector orthogonal_fallback(const Vector& u) {
  Index k = 0;
  for (Index i = 1; i < u.size(); ++i)
    if (std::fabs(u[i]) < std::fabs(u[k])) k = i;
  Vector e = Vector::Zero(u.size());
  e[k] = 1.0;
  e -= e.dot(u) * u;
  e.normalize();
  canonicalize_sign(e);
  return e;
}

// Gram-Schmidt w against unit u; nullopt if nothing is left.
std::optional<Vector> orthogonalize(Vector w, const Vector& u) {
  const double n0 = w.norm();
  w -= w.dot(u) * u;
  w -= w.dot(u) * u;
  const double n = w.norm();
  if (!(n > kSecondAxisFloor * std::max(n0, 1e-300))) return std::nullopt;
  w /= n;
  canonicalize_sign(w);
  return w;
}

std::string describe(DebiasMethod m) {
  switch (m) {
    case DebiasMethod::LinearProjection: return "linear projection";
    case DebiasMethod::HardDebias: return "hard debiasing";
    case DebiasMethod::Inlp: return "iterative nullspace projection";
    case DebiasMethod::Oscar: return "orthogonal subspace correction";
  }
  return "";
}

}  // namespace

Camera camera_pca(const EmbeddingSnapshot& snapshot, const std::vector<std::string>& display) {
  if (display.size() < 2) throw Error(ErrorKind::InvalidArgument, "PCA view needs at least 2 display words");
  const Matrix pts = get_vectors(snapshot, display);
  const auto axes = principal_axes(pts, 2, /*center=*/true);

  Camera cam;
  cam.kind = CameraKind::Pca;
  const double scale = std::max(row_scale(pts), 1e-300);
  if (!(axes.singular_values[0] > 1e-12 * scale)) {
    // All display points coincide: any frame is as good as another.
    cam.basis1 = Vector::Zero(snapshot.dim());
    cam.basis1[0] = 1.0;
    cam.basis2 = orthogonal_fallback(cam.basis1);
    cam.degenerate = true;
    return cam;
  }
  cam.basis1 = axes.axes.row(0).transpose();
  std::optional<Vector> second;
  if (axes.axes.rows() > 1 && axes.singular_values[1] > kSecondAxisFloor * axes.singular_values[0])
    second = orthogonalize(axes.axes.row(1).transpose(), cam.basis1);
  if (second) {
    cam.basis2 = *second;
  } else {
    cam.basis2 = orthogonal_fallback(cam.basis1);
    cam.degenerate = true;
  }
  return cam;
}

Camera camera_aligned(const EmbeddingSnapshot& snapshot, const Vector& v,
                      const std::vector<std::string>& display) {
  if (v.size() != snapshot.dim()) throw Error(ErrorKind::InvalidArgument, "direction dimension mismatch");
  if (std::fabs(v.norm() - 1.0) > 1e-6) throw Error(ErrorKind::InvalidArgument, "aligned view needs a unit direction");
  Camera cam;
  cam.kind = CameraKind::Aligned;
  cam.basis1 = v;

  Matrix residual = get_vectors(snapshot, display);
  const Vector along = residual * v;
  residual.noalias() -= along * v.transpose();

  std::optional<Vector> second;
  if (residual.rows() >= 2) {
    const auto axes = principal_axes(residual, 1, /*center=*/true);
    if (axes.singular_values[0] > 1e-12 * std::max(row_scale(residual), 1e-300))
      second = orthogonalize(axes.axes.row(0).transpose(), v);
  }
  if (second) {
    cam.basis2 = *second;
  } else {
    cam.basis2 = orthogonal_fallback(v);
    cam.degenerate = true;
  }
  return cam;
}

Camera camera_span(const Vector& v1, const Vector& v2) {
  const OscarPlane plane = oscar_plane(v1, v2);
  Camera cam;
  cam.kind = CameraKind::Span;
  cam.basis1 = plane.v1;
  cam.basis2 = plane.u2;
  return cam;
}

DisplaySet display_set(const DebiasJob& job) {
  DisplaySet out;
  auto add = [&](const std::string& t, PointGroup g) {
    if (std::find(out.tokens.begin(), out.tokens.end(), t) != out.tokens.end()) return;
    out.tokens.push_back(t);
    out.groups.push_back(g);
  };
  if (job.subspace_method == SubspaceMethod::PairedPca) {
    for (const auto& [a, b] : job.pairs.pairs) {
      add(a, PointGroup::SeedF);
      add(b, PointGroup::SeedM);
    }
  } else {
    for (const auto& t : job.seeds_f.tokens) add(t, PointGroup::SeedF);
    for (const auto& t : job.seeds_m.tokens) add(t, PointGroup::SeedM);
  }
  if (job.second_subspace_seeds)
    for (const auto& t : job.second_subspace_seeds->tokens) add(t, PointGroup::Other);
  if (job.equalize)
    for (const auto& t : job.equalize->tokens()) add(t, PointGroup::Equalize);
  for (const auto& t : job.evaluation.tokens) add(t, PointGroup::Evaluation);
  return out;
}

ViewFrame make_frame(int step_index, std::string label, std::string description,
                     const EmbeddingSnapshot& state, const Camera& camera, const DisplaySet& display,
                     const std::vector<std::pair<std::string, Vector>>& directions) {
  ViewFrame f;
  f.step_index = step_index;
  f.step_label = std::move(label);
  f.description = std::move(description);
  f.snapshot_id = state.id();
  f.camera = camera;
  const auto rows = state.indices_of(display.tokens);
  f.points.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [x, y] = camera.project(state.row(rows[i]).transpose());
    f.points.push_back({display.tokens[i], x, y, display.groups[i]});
  }
  for (const auto& [name, d] : directions) {
    auto [x, y] = camera.project(d);
    f.direction_segments.push_back({name, x, y});
  }
  return f;
}

std::size_t expected_frame_count(DebiasMethod method, std::size_t inlp_rounds) {
  switch (method) {
    case DebiasMethod::LinearProjection: return 4;
    case DebiasMethod::HardDebias: return 5;
    case DebiasMethod::Oscar: return 4;
    case DebiasMethod::Inlp: return 2 + 2 * inlp_rounds;
  }
  return 0;
}

TraceResult build_trace(const EmbeddingSnapshot& snapshot, const DebiasJob& job) {
  JobResult run = run_job(snapshot, job);
  const DisplaySet display = display_set(job);
  const EmbeddingSnapshot& output = run.transform.output;

  StepTrace trace;
  trace.method = job.method;
  auto& frames = trace.frames;
  int step = 0;
  auto push = [&](std::string label, std::string description, const EmbeddingSnapshot& state,
                  const Camera& cam, const std::vector<std::pair<std::string, Vector>>& dirs) {
    frames.push_back(make_frame(step++, std::move(label), std::move(description), state, cam, display, dirs));
  };

  const std::string name = describe(job.method);
  const Camera start = camera_pca(snapshot, display.tokens);

  switch (job.method) {
    case DebiasMethod::LinearProjection:
    case DebiasMethod::HardDebias: {
      const Vector& v = run.directions.front().v;
      const std::vector<std::pair<std::string, Vector>> dirs = {{job.label, v}};
      push("Initial PCA view",
           "The display words seen from their best two-dimensional PCA perspective before " + name + ".",
           snapshot, start, dirs);
      const Camera aligned = camera_aligned(snapshot, v, display.tokens);
      push("Align concept direction",
           "Rotate the view so the " + job.label +
               " direction lies on the x-axis; the y-axis shows the largest remaining variance.",
           snapshot, aligned, dirs);
      if (job.method == DebiasMethod::LinearProjection) {
        push("Project", "Remove every word's component along the " + job.label +
                            " direction; the words collapse onto the y-axis.",
             output, aligned, dirs);
      } else {
        push("Project except definitional",
             "Remove the " + job.label +
                 " component from every word except the definitional seed words.",
             *run.transform.steps[0].state, aligned, dirs);
        push("Equalize", "Spread each equalize pair symmetrically along the " + job.label +
                             " direction by its original separation.",
             output, aligned, dirs);
      }
      break;
    }
    case DebiasMethod::Inlp: {
      const auto& rounds = run.inlp->rounds;
      std::vector<std::pair<std::string, Vector>> first;
      if (!rounds.empty()) first.push_back({job.label + " 1", rounds.front().direction});
      push("Initial PCA view", "The display words seen from their best PCA perspective before " + name + ".",
           snapshot, start, first);
      EmbeddingSnapshot before = snapshot;
      for (std::size_t i = 0; i < rounds.size(); ++i) {
        const auto& r = rounds[i];
        const std::string tag = job.label + " " + std::to_string(i + 1);
        const std::vector<std::pair<std::string, Vector>> dirs = {{tag, r.direction}};
        const Camera aligned = camera_aligned(before, r.direction, display.tokens);
        const EmbeddingSnapshot& after = *run.transform.steps[i].state;
        push("Classifier " + std::to_string(i + 1),
             "Align the normal of the best linear classifier between the seed groups with the x-axis "
             "(training accuracy " + std::to_string(r.accuracy) + ").",
             before, aligned, dirs);
        push("Project " + std::to_string(i + 1),
             "Project every word along classifier normal " + std::to_string(i + 1) + ".", after, aligned, dirs);
        before = after;
      }
      break;
    }
    case DebiasMethod::Oscar: {
      const Vector& v1 = run.directions[0].v;
      const Vector& v2 = run.directions[1].v;
      const auto& rotated = run.transform.steps.front().directions;
      const std::string l2 = run.directions[1].label.empty() ? "second" : run.directions[1].label;
      push("Initial PCA view", "The display words and both concept directions from the best PCA perspective.",
           snapshot, start, {{job.label, v1}, {l2, v2}});
      const Camera span = camera_span(v1, v2);
      push("Span of both directions",
           "View the plane spanned by the two concept directions, the first on the x-axis; the rotation "
           "happens only inside this plane.",
           snapshot, span, {{job.label, v1}, {l2, v2}});
      push("Graded rotation",
           "Rotate within the plane so the two directions become orthogonal; points near the first direction "
           "barely move.",
           output, span, {{job.label, rotated[0]}, {l2, rotated[1]}});
      break;
    }
  }

  std::vector<std::pair<std::string, Vector>> final_dirs;
  if (job.method == DebiasMethod::Oscar) {
    const auto& rotated = run.transform.steps.front().directions;
    final_dirs = {{job.label, rotated[0]}, {run.directions[1].label, rotated[1]}};
  } else if (!run.directions.empty()) {
    final_dirs = {{job.label, run.directions.back().v}};
  }
  push("Final PCA view",
       "The modified words seen from the best two-dimensional PCA perspective of the new data.", output,
       camera_pca(output, display.tokens), final_dirs);

  if (job.metrics) {
    trace.metrics_before = evaluate_metrics(snapshot, *job.metrics);
    trace.metrics_after = evaluate_metrics(output, *job.metrics);
  }
  return TraceResult{std::move(trace), std::move(run)};
}

}  // namespace debiaskit
