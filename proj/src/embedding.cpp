#include "debiaskit/embedding.hpp"

#include "debiaskit/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace debiaskit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::UnknownToken: return "unknown_token";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::JobInvariant: return "job_invariant";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::NotFound: return "not_found";
  }
  return "error";
}

namespace {

bool valid_token(std::string_view t) {
  if (t.empty()) return false;
  return std::none_of(t.begin(), t.end(),
                      [](unsigned char c) { return std::isspace(c) != 0; });
}

class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(std::string_view s) {
    add(s.data(), s.size());
    const char sep = '\x1f';
    add(&sep, 1);
  }
  std::string hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "snap-%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

void hash_matrix(Fnv1a& h, const Matrix& m) {
  const Index dims[2] = {m.rows(), m.cols()};
  h.add(dims, sizeof dims);
  h.add(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

}  // namespace

WordSet WordSet::make(std::string label, std::vector<std::string> tokens) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::string> dups;
  for (const auto& t : tokens) {
    if (!valid_token(t))
      throw Error(ErrorKind::InvalidArgument, "word set '" + label + "': invalid token '" + t + "'");
    if (!seen.insert(t).second) dups.push_back(t);
  }
  if (!dups.empty()) {
    std::string msg = "word set '" + label + "': duplicate token(s):";
    for (const auto& d : dups) msg += " " + d;
    throw Error(ErrorKind::InvalidArgument, msg);
  }
  return WordSet{std::move(label), std::move(tokens)};
}

bool WordSet::contains(std::string_view token) const {
  return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
}

PairedWordSet PairedWordSet::make(std::string label,
                                  std::vector<std::pair<std::string, std::string>> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    if (!valid_token(a) || !valid_token(b))
      throw Error(ErrorKind::InvalidArgument, "pair set '" + label + "': invalid token in pair");
    for (std::size_t j = 0; j < i; ++j) {
      if (pairs[j] == pairs[i])
        throw Error(ErrorKind::InvalidArgument,
                    "pair set '" + label + "': repeated pair " + a + ":" + b);
    }
  }
  return PairedWordSet{std::move(label), std::move(pairs)};
}

std::vector<std::string> PairedWordSet::tokens() const {
  std::vector<std::string> out;
  out.reserve(pairs.size() * 2);
  for (const auto& [a, b] : pairs) {
    out.push_back(a);
    out.push_back(b);
  }
  return out;
}

EmbeddingSnapshot::EmbeddingSnapshot(std::vector<std::string> tokens, Matrix matrix) {
  if (static_cast<Index>(tokens.size()) != matrix.rows())
    throw Error(ErrorKind::InvalidArgument, "token count does not match matrix rows");
  if (matrix.cols() < 2) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be >= 2");

  auto vocab = std::make_shared<Vocab>();
  vocab->index.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!valid_token(tokens[i]))
      throw Error(ErrorKind::InvalidArgument, "invalid token '" + tokens[i] + "'");
    if (!vocab->index.emplace(tokens[i], static_cast<Index>(i)).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate token '" + tokens[i] + "'");
  }
  vocab->tokens = std::move(tokens);

  Fnv1a h;
  for (const auto& t : vocab->tokens) h.add(t);
  hash_matrix(h, matrix);

  vocab_ = std::move(vocab);
  matrix_ = std::make_shared<const Matrix>(std::move(matrix));
  id_ = h.hex();
}

EmbeddingSnapshot::EmbeddingSnapshot(std::shared_ptr<const Vocab> vocab,
                                     std::shared_ptr<const Matrix> matrix, std::string id)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)), id_(std::move(id)) {}

std::optional<Index> EmbeddingSnapshot::find(std::string_view token) const {
  auto it = vocab_->index.find(std::string(token));
  if (it == vocab_->index.end()) return std::nullopt;
  return it->second;
}

Index EmbeddingSnapshot::index_of(std::string_view token) const {
  if (auto i = find(token)) return *i;
  throw UnknownTokenError({std::string(token)});
}

Vector EmbeddingSnapshot::vector(std::string_view token) const {
  return matrix_->row(index_of(token)).transpose();
}

std::vector<Index> EmbeddingSnapshot::indices_of(const std::vector<std::string>& tokens) const {
  std::vector<Index> out;
  std::vector<std::string> missing;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto i = find(t)) {
      out.push_back(*i);
    } else if (std::find(missing.begin(), missing.end(), t) == missing.end()) {
      missing.push_back(t);
    }
  }
  if (!missing.empty()) throw UnknownTokenError(std::move(missing));
  return out;
}

EmbeddingSnapshot EmbeddingSnapshot::derive(Matrix matrix, std::string_view operation) const {
  if (matrix.rows() != matrix_->rows() || matrix.cols() != matrix_->cols())
    throw Error(ErrorKind::InvalidArgument, "derived matrix must keep the snapshot shape");
  Fnv1a h;
  h.add(id_);
  h.add(operation);
  hash_matrix(h, matrix);
  return EmbeddingSnapshot(vocab_, std::make_shared<const Matrix>(std::move(matrix)), h.hex());
}

Matrix get_vectors(const EmbeddingSnapshot& snapshot, const std::vector<std::string>& tokens) {
  const auto idx = snapshot.indices_of(tokens);
  Matrix out(static_cast<Index>(idx.size()), snapshot.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = snapshot.row(idx[i]);
  return out;
}

Matrix get_vectors(const EmbeddingSnapshot& snapshot, const WordSet& words) {
  return get_vectors(snapshot, words.tokens);
}

double cosine(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

namespace {

std::vector<Neighbor> rank_rows(const EmbeddingSnapshot& snapshot, const Vector& query,
                                std::size_t k, std::optional<Index> exclude) {
  const Matrix& m = snapshot.matrix();
  const double qn = query.norm();
  std::vector<double> sims(static_cast<std::size_t>(m.rows()));
  std::vector<char> zero(sims.size(), 0);
  for (Index r = 0; r < m.rows(); ++r) {
    const double rn = m.row(r).norm();
    if (rn == 0.0 || qn == 0.0) {
      sims[r] = 0.0;
      zero[r] = 1;
    } else {
      sims[r] = std::clamp(m.row(r).dot(query) / (rn * qn), -1.0, 1.0);
    }
  }
  std::vector<Index> order;
  order.reserve(sims.size());
  for (Index r = 0; r < m.rows(); ++r)
    if (!exclude || r != *exclude) order.push_back(r);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return sims[a] > sims[b]; });
  order.resize(std::min(k, order.size()));

  std::vector<Neighbor> out;
  out.reserve(order.size());
  for (Index r : order) out.push_back({snapshot.token(r), sims[r], zero[r] != 0});
  return out;
}

}  // namespace

std::vector<Neighbor> nearest_neighbors(const EmbeddingSnapshot& snapshot, std::string_view token,
                                        std::size_t k) {
  const Index q = snapshot.index_of(token);
  if (k < 1 || k >= snapshot.size())
    throw Error(ErrorKind::InvalidArgument,
                "k must satisfy 1 <= k < N (N = " + std::to_string(snapshot.size()) + ")");
  return rank_rows(snapshot, snapshot.row(q).transpose(), k, q);
}

std::vector<Neighbor> nearest_to_vector(const EmbeddingSnapshot& snapshot,
                                        const Eigen::Ref<const Vector>& query, std::size_t k) {
  if (query.size() != snapshot.dim())
    throw Error(ErrorKind::InvalidArgument, "query dimension does not match snapshot");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  return rank_rows(snapshot, query, k, std::nullopt);
}

}  // namespace debiaskit
