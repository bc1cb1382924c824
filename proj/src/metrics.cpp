#include "debiaskit/metrics.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace debiaskit {

namespace {

void require_disjoint(const WordSet& p, const WordSet& q) {
  for (const auto& t : p.tokens)
    if (q.contains(t))
      throw Error(ErrorKind::InvalidArgument,
                  "sets '" + p.label + "' and '" + q.label + "' share token '" + t + "'");
}

bool has_zero_row(const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r)
    if (m.row(r).squaredNorm() == 0.0) return true;
  return false;
}

double mean_cosine(const Eigen::Ref<const Vector>& w, const Matrix& set) {
  std::vector<double> cos(static_cast<std::size_t>(set.rows()));
  for (Index r = 0; r < set.rows(); ++r) cos[r] = cosine(set.row(r).transpose(), w);
  return exact_mean(cos);
}

}  // namespace

void WeatSets::validate() const {
  for (const WordSet* s : {&x, &y, &a, &b})
    if (s->empty()) throw Error(ErrorKind::InvalidArgument, "WEAT set '" + s->label + "' is empty");
  require_disjoint(x, y);
  require_disjoint(a, b);
}

double association(const Eigen::Ref<const Vector>& w, const Matrix& a, const Matrix& b) {
  return mean_cosine(w, a) - mean_cosine(w, b);
}

WeatResult weat_effect_size(const Matrix& x, const Matrix& y, const Matrix& a, const Matrix& b) {
  if (x.rows() == 0 || y.rows() == 0 || a.rows() == 0 || b.rows() == 0)
    throw Error(ErrorKind::InvalidArgument, "WEAT sets must be non-empty");

  std::vector<double> sx, sy;
  for (Index r = 0; r < x.rows(); ++r) sx.push_back(association(x.row(r).transpose(), a, b));
  for (Index r = 0; r < y.rows(); ++r) sy.push_back(association(y.row(r).transpose(), a, b));

  WeatResult out;
  out.zero_vector = has_zero_row(x) || has_zero_row(y) || has_zero_row(a) || has_zero_row(b);

  std::vector<double> all = sx;
  all.insert(all.end(), sy.begin(), sy.end());
  const double mean_all = exact_mean(all);
  std::vector<double> sq(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) sq[i] = (all[i] - mean_all) * (all[i] - mean_all);
  const double sd = std::sqrt(exact_mean(sq));

  if (!(sd > 0.0)) {
    out.degenerate = true;
    return out;
  }
  out.effect_size = (exact_mean(sx) - exact_mean(sy)) / sd;
  return out;
}

WeatResult weat(const EmbeddingSnapshot& snapshot, const WeatSets& sets) {
  sets.validate();
  std::vector<std::string> all;
  for (const WordSet* s : {&sets.x, &sets.y, &sets.a, &sets.b})
    all.insert(all.end(), s->tokens.begin(), s->tokens.end());
  snapshot.indices_of(all);  // reports every missing token at once
  return weat_effect_size(get_vectors(snapshot, sets.x), get_vectors(snapshot, sets.y),
                          get_vectors(snapshot, sets.a), get_vectors(snapshot, sets.b));
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "spearman: length mismatch");
  if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "spearman: need at least 2 values");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double ma = exact_mean(ra);
  const double mb = exact_mean(rb);
  std::vector<double> cov(ra.size()), va(ra.size()), vb(ra.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov[i] = (ra[i] - ma) * (rb[i] - mb);
    va[i] = (ra[i] - ma) * (ra[i] - ma);
    vb[i] = (rb[i] - mb) * (rb[i] - mb);
  }
  const double den = std::sqrt(exact_sum(va) * exact_sum(vb));
  if (degenerate) *degenerate = !(den > 0.0);
  if (!(den > 0.0)) return 0.0;
  return std::clamp(exact_sum(cov) / den, -1.0, 1.0);
}

EctResult ect_score(const Matrix& x, const Matrix& y, const Matrix& attributes) {
  if (x.rows() == 0 || y.rows() == 0) throw Error(ErrorKind::InvalidArgument, "ECT groups must be non-empty");
  if (attributes.rows() < 2) throw Error(ErrorKind::InvalidArgument, "ECT needs at least 2 attributes");
  const Vector m = row_mean(x);
  const Vector f = row_mean(y);
  std::vector<double> cm(static_cast<std::size_t>(attributes.rows()));
  std::vector<double> cf(cm.size());
  for (Index r = 0; r < attributes.rows(); ++r) {
    cm[r] = cosine(m, attributes.row(r).transpose());
    cf[r] = cosine(f, attributes.row(r).transpose());
  }
  EctResult out;
  out.zero_vector = m.squaredNorm() == 0.0 || f.squaredNorm() == 0.0 || has_zero_row(attributes);
  out.score = spearman(cm, cf, &out.degenerate);
  return out;
}

EctResult ect(const EmbeddingSnapshot& snapshot, const WordSet& x, const WordSet& y,
              const WordSet& attributes) {
  std::vector<std::string> all = x.tokens;
  all.insert(all.end(), y.tokens.begin(), y.tokens.end());
  all.insert(all.end(), attributes.tokens.begin(), attributes.tokens.end());
  snapshot.indices_of(all);
  return ect_score(get_vectors(snapshot, x), get_vectors(snapshot, y), get_vectors(snapshot, attributes));
}

MetricReport evaluate_metrics(const EmbeddingSnapshot& snapshot, const MetricSets& sets) {
  MetricReport report;
  report.snapshot_id = snapshot.id();
  report.sets = sets;
  report.weat = weat(snapshot, sets.weat);
  report.ect = ect(snapshot, sets.weat.x, sets.weat.y, sets.ect_attributes);
  return report;
}

}  // namespace debiaskit
