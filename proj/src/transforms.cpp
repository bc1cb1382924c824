#include "debiaskit/transforms.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/subspace.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace debiaskit {

namespace {

Vector checked_unit(const Vector& v, Index dim, std::string* warning) {
  if (v.size() != dim) throw Error(ErrorKind::InvalidArgument, "direction dimension does not match snapshot");
  const double n = v.norm();
  if (std::fabs(n - 1.0) <= 1e-10) return v;
  if (std::fabs(n - 1.0) <= 1e-6) {
    if (warning) *warning = " (direction renormalized from norm " + std::to_string(n) + ")";
    return v / n;
  }
  throw Error(ErrorKind::InvalidArgument, "direction is not a unit vector (norm " + std::to_string(n) + ")");
}

// Projects row r of `m` off u in place; false if the row was already orthogonal.
bool project_row(Matrix& m, Index r, const Vector& u) {
  const double along = m.row(r).dot(u);
  const double scale = std::max(m.row(r).norm(), 1.0);
  if (std::fabs(along) <= kProjectionSkip * scale) return false;
  m.row(r).noalias() -= along * u.transpose();
  return true;
}

std::vector<char> row_mask(const EmbeddingSnapshot& s, const std::vector<std::string>& tokens) {
  std::vector<char> mask(s.size(), 0);
  for (Index r : s.indices_of(tokens)) mask[static_cast<std::size_t>(r)] = 1;
  return mask;
}

}  // namespace

TransformResult linear_projection(const EmbeddingSnapshot& snapshot, const Vector& v,
                                  const WordSet& exclude) {
  std::string warning;
  const Vector u = checked_unit(v, snapshot.dim(), &warning);
  const auto excluded = row_mask(snapshot, exclude.tokens);

  Matrix out = snapshot.matrix();
  StepDescriptor step;
  for (Index r = 0; r < out.rows(); ++r)
    if (!excluded[r] && project_row(out, r, u)) step.modified_rows.push_back(r);

  EmbeddingSnapshot result = snapshot.derive(std::move(out), "linear_projection");
  step.label = "Linear projection";
  step.description = "Remove the component along the concept direction from every vector" +
                     std::string(exclude.empty() ? "" : " except the excluded words") + warning + ".";
  step.directions = {u};
  step.state = result;
  return TransformResult{result, {std::move(step)}};
}

TransformResult hard_debias(const EmbeddingSnapshot& snapshot, const Vector& v,
                            const WordSet& definitional, const PairedWordSet& equalize,
                            HardDebiasScope scope, const std::vector<std::string>& scope_tokens) {
  std::string warning;
  const Vector u = checked_unit(v, snapshot.dim(), &warning);

  {
    std::unordered_set<std::string> seen;
    for (const auto& t : equalize.tokens()) {
      if (definitional.contains(t))
        throw Error(ErrorKind::InvalidArgument,
                    "equalize token '" + t + "' is also in the definitional set");
      if (!seen.insert(t).second)
        throw Error(ErrorKind::InvalidArgument, "token '" + t + "' appears in more than one equalize pair");
    }
    std::vector<std::string> all = definitional.tokens;
    for (const auto& t : equalize.tokens()) all.push_back(t);
    if (scope == HardDebiasScope::Sets) all.insert(all.end(), scope_tokens.begin(), scope_tokens.end());
    snapshot.indices_of(all);
  }

  const auto fixed = row_mask(snapshot, definitional.tokens);
  std::vector<char> in_scope(snapshot.size(), 1);
  if (scope == HardDebiasScope::Sets) {
    in_scope = row_mask(snapshot, scope_tokens);
    for (Index r : snapshot.indices_of(equalize.tokens())) in_scope[r] = 1;
  }

  // Step 1: project everything in scope except the definitional words.
  Matrix projected = snapshot.matrix();
  StepDescriptor project;
  for (Index r = 0; r < projected.rows(); ++r)
    if (in_scope[r] && !fixed[r] && project_row(projected, r, u)) project.modified_rows.push_back(r);
  EmbeddingSnapshot mid = snapshot.derive(projected, "hard_debias/project");
  project.label = "Project except definitional";
  project.description =
      "Remove the component along the concept direction from every word except the definitional seed words" +
      warning + ".";
  project.directions = {u};
  project.state = mid;

  // Step 2: equalize each pair from its original vectors.
  Matrix equalized = std::move(projected);
  StepDescriptor eq;
  for (const auto& [ta, tb] : equalize.pairs) {
    const Index ia = snapshot.index_of(ta);
    const Index ib = snapshot.index_of(tb);
    const Vector a = snapshot.row(ia).transpose();
    const Vector b = snapshot.row(ib).transpose();
    const Vector mu = (a + b) / 2.0;
    const Vector nu = mu - mu.dot(u) * u;
    const double s = (a - b).dot(u);
    equalized.row(ia) = (nu + (s / 2.0) * u).transpose();
    equalized.row(ib) = (nu - (s / 2.0) * u).transpose();
    eq.modified_rows.push_back(ia);
    eq.modified_rows.push_back(ib);
  }
  EmbeddingSnapshot out = mid.derive(std::move(equalized), "hard_debias/equalize");
  eq.label = "Equalize pairs";
  eq.description =
      "Move each equalize pair onto the nullspace midpoint and spread it along the concept direction by its "
      "original separation.";
  eq.directions = {u};
  eq.state = out;

  return TransformResult{out, {std::move(project), std::move(eq)}};
}

InlpResult inlp(const EmbeddingSnapshot& snapshot, const WordSet& set_f, const WordSet& set_m,
                const InlpOptions& options) {
  if (set_f.empty() || set_m.empty()) throw Error(ErrorKind::InvalidArgument, "INLP needs two non-empty sets");
  if (options.max_iters < 0) throw Error(ErrorKind::InvalidArgument, "INLP max_iters must be >= 0");
  for (const auto& t : set_f.tokens)
    if (set_m.contains(t)) throw Error(ErrorKind::InvalidArgument, "INLP sets share token '" + t + "'");
  std::vector<std::string> all = set_f.tokens;
  all.insert(all.end(), set_m.tokens.begin(), set_m.tokens.end());
  snapshot.indices_of(all);

  InlpResult result{TransformResult{snapshot, {}}, {}, 0.0, false};
  EmbeddingSnapshot current = snapshot;
  const double n_f = static_cast<double>(set_f.size());
  const double n_m = static_cast<double>(set_m.size());
  // The SVM normal is only accurate to about its stopping tolerance, so points
  // that should coincide after a projection can differ by ~1e-6 of the data scale.
  constexpr double kCollapsed = 1e-5;
  const double original_scale =
      std::max(get_vectors(snapshot, set_f).rowwise().norm().maxCoeff(),
               get_vectors(snapshot, set_m).rowwise().norm().maxCoeff());

  for (int iter = 0;; ++iter) {
    const Matrix f = get_vectors(current, set_f);
    const Matrix m = get_vectors(current, set_m);
    const LinearSvm svm = train_linear_svm(f, m, options.svm);

    // Groups whose spread along the normal is at round-off level relative to
    // the original data are treated as collapsed: only the majority rule remains.
    // The same scale decides which projections count as ties.
    double accuracy = std::max(n_f, n_m) / (n_f + n_m);
    Vector v;
    bool usable = false;
    const double wn = svm.weights.norm();
    if (wn > 0.0) {
      v = svm.weights / wn;
      if (v.dot(f.colwise().mean().transpose()) < v.dot(m.colwise().mean().transpose())) v = -v;
      const Vector pf = f * v;
      const Vector pm = m * v;
      const double spread = std::max(pf.maxCoeff(), pm.maxCoeff()) - std::min(pf.minCoeff(), pm.minCoeff());
      usable = spread > kCollapsed * original_scale;
      if (usable) accuracy = best_threshold_accuracy(v, f, m, kCollapsed * original_scale);
    }

    const bool separable = usable && accuracy > options.accuracy_floor;
    if (!separable || iter == options.max_iters) {
      result.final_accuracy = accuracy;
      result.hit_iteration_cap = separable;
      StepDescriptor stop;
      stop.label = "Stop";
      stop.description = separable
                             ? "Iteration cap reached with training accuracy " + std::to_string(accuracy) + "."
                             : "No classifier beats the accuracy floor (accuracy " + std::to_string(accuracy) +
                                   "); the groups are no longer linearly separable.";
      if (usable) stop.directions = {v};
      stop.state = current;
      stop.accuracy = accuracy;
      result.transform.steps.push_back(std::move(stop));
      break;
    }

    Matrix next = current.matrix();
    StepDescriptor step;
    for (Index r = 0; r < next.rows(); ++r)
      if (project_row(next, r, v)) step.modified_rows.push_back(r);
    current = current.derive(std::move(next), "inlp/round" + std::to_string(iter + 1));
    step.label = "Round " + std::to_string(iter + 1);
    step.description = "Classifier normal separates the groups with training accuracy " +
                       std::to_string(accuracy) + "; project every word along it.";
    step.directions = {v};
    step.state = current;
    step.accuracy = accuracy;
    result.transform.steps.push_back(std::move(step));
    result.rounds.push_back({v, accuracy});
  }
  result.transform.output = current;
  return result;
}

OscarPlane oscar_plane(const Vector& v1, const Vector& v2) {
  if (v1.size() != v2.size()) throw Error(ErrorKind::InvalidArgument, "OSCaR directions differ in dimension");
  Vector u1 = checked_unit(v1, v1.size(), nullptr);
  const Vector w2 = checked_unit(v2, v2.size(), nullptr);
  double c = u1.dot(w2);
  if (std::fabs(c) >= 1.0 - 1e-9) throw Error(ErrorKind::Degenerate, "OSCaR directions are parallel");
  OscarPlane plane;
  plane.v1 = u1;
  if (c < 0.0) {
    u1 = -u1;
    c = -c;
  }
  Vector u2 = w2 - c * u1;
  u2.normalize();
  plane.u1 = u1;
  plane.u2 = u2;
  plane.phi1 = std::atan2(w2.dot(u2), w2.dot(u1));
  plane.theta = std::numbers::pi / 2.0 - plane.phi1;
  return plane;
}

double oscar_rotation_angle(double phi, double phi1, double theta) {
  // Point-symmetric: x and -x rotate by the same angle, so lines through the
  // origin stay lines and the whole v2 axis becomes orthogonal to v1.
  const double p = phi < 0.0 ? phi + std::numbers::pi : phi;
  return p <= phi1 ? theta * (p / phi1) : theta * ((std::numbers::pi - p) / (std::numbers::pi - phi1));
}

Vector oscar_apply(const OscarPlane& plane, const Eigen::Ref<const Vector>& x) {
  const double p1 = x.dot(plane.u1);
  const double p2 = x.dot(plane.u2);
  if (p1 == 0.0 && p2 == 0.0) return x;
  const double phi = std::atan2(p2, p1);
  const double rho = oscar_rotation_angle(phi, plane.phi1, plane.theta);
  if (rho == 0.0) return x;
  const double r = std::hypot(p1, p2);
  const double q1 = r * std::cos(phi + rho);
  const double q2 = r * std::sin(phi + rho);
  return x + (q1 - p1) * plane.u1 + (q2 - p2) * plane.u2;
}

TransformResult oscar(const EmbeddingSnapshot& snapshot, const Vector& v1, const Vector& v2) {
  if (v1.size() != snapshot.dim() || v2.size() != snapshot.dim())
    throw Error(ErrorKind::InvalidArgument, "direction dimension does not match snapshot");
  const OscarPlane plane = oscar_plane(v1, v2);

  Matrix out = snapshot.matrix();
  StepDescriptor step;
  for (Index r = 0; r < out.rows(); ++r) {
    Vector moved = oscar_apply(plane, out.row(r).transpose());
    if (moved != out.row(r).transpose()) {
      out.row(r) = moved.transpose();
      step.modified_rows.push_back(r);
    }
  }
  EmbeddingSnapshot result = snapshot.derive(std::move(out), "oscar");
  const Vector v2_unit = std::cos(plane.phi1) * plane.u1 + std::sin(plane.phi1) * plane.u2;
  step.label = "Graded rotation";
  step.description =
      "Rotate inside span(v1, v2) so the second direction becomes orthogonal to the first; points near v1 "
      "barely move, points near v2 rotate almost as much as v2.";
  step.directions = {plane.v1, oscar_apply(plane, v2_unit)};
  step.state = result;
  return TransformResult{result, {std::move(step)}};
}

}  // namespace debiaskit
