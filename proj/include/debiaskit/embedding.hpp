#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace debiaskit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A labelled, ordered list of distinct tokens ("Male seed", "Evaluation", ...).
struct WordSet {
  std::string label;
  std::vector<std::string> tokens;

  /// Rejects empty tokens, tokens containing whitespace and duplicates.
  static WordSet make(std::string label, std::vector<std::string> tokens);

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool contains(std::string_view token) const;
};

/// Ordered (a, b) token pairs, e.g. man:woman. A pair may not repeat.
struct PairedWordSet {
  std::string label;
  std::vector<std::pair<std::string, std::string>> pairs;

  static PairedWordSet make(std::string label,
                            std::vector<std::pair<std::string, std::string>> pairs);

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  /// Both members of every pair, in pair order.
  std::vector<std::string> tokens() const;
};

/// Immutable vocabulary plus N x d matrix. Copies share storage; every transform
/// builds a new snapshot through derive(), which assigns a fresh identifier.
class EmbeddingSnapshot {
 public:
  /// Validates tokens (unique, non-empty, no whitespace) and d >= 2.
  EmbeddingSnapshot(std::vector<std::string> tokens, Matrix matrix);

  std::size_t size() const { return vocab_->tokens.size(); }
  Index dim() const { return matrix_->cols(); }
  const std::string& id() const { return id_; }

  const std::vector<std::string>& tokens() const { return vocab_->tokens; }
  const std::string& token(Index row) const { return vocab_->tokens[static_cast<std::size_t>(row)]; }
  const Matrix& matrix() const { return *matrix_; }
  auto row(Index r) const { return matrix_->row(r); }

  std::optional<Index> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  /// Throws UnknownTokenError.
  Index index_of(std::string_view token) const;
  Vector vector(std::string_view token) const;

  /// Row indices for every token; throws UnknownTokenError listing all misses.
  std::vector<Index> indices_of(const std::vector<std::string>& tokens) const;

  /// Same vocabulary, new matrix. The identifier is derived from this
  /// snapshot's id, the operation name and the new contents, so repeated runs
  /// of the same pipeline reproduce the same ids.
  EmbeddingSnapshot derive(Matrix matrix, std::string_view operation) const;

 private:
  struct Vocab {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, Index> index;
  };
  EmbeddingSnapshot(std::shared_ptr<const Vocab> vocab, std::shared_ptr<const Matrix> matrix,
                    std::string id);

  std::shared_ptr<const Vocab> vocab_;
  std::shared_ptr<const Matrix> matrix_;
  std::string id_;
};

/// Rows for the given tokens, in input order.
Matrix get_vectors(const EmbeddingSnapshot& snapshot, const WordSet& words);
Matrix get_vectors(const EmbeddingSnapshot& snapshot, const std::vector<std::string>& tokens);

/// Cosine similarity; 0 when either vector is zero.
double cosine(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
  bool zero_vector = false;  // similarity forced to 0 because one side is zero
};

/// k most cosine-similar tokens to `token`, query excluded, ties by vocab order.
std::vector<Neighbor> nearest_neighbors(const EmbeddingSnapshot& snapshot, std::string_view token,
                                        std::size_t k);
/// Same ranking against an arbitrary query vector (no exclusion).
std::vector<Neighbor> nearest_to_vector(const EmbeddingSnapshot& snapshot,
                                        const Eigen::Ref<const Vector>& query, std::size_t k);

// ---------------------------------------------------------------------------
// Text formats

enum class EmbeddingFormat { GloveText, Word2VecText };

EmbeddingFormat parse_format(std::string_view name);
const char* to_string(EmbeddingFormat format);

struct ExportOptions {
  /// 0 writes the shortest representation that reads back bit-exactly;
  /// n > 0 writes n significant digits.
  int significant_digits = 0;
};

EmbeddingSnapshot load_embedding(std::istream& in, EmbeddingFormat format,
                                 std::optional<std::size_t> limit = std::nullopt);
EmbeddingSnapshot load_embedding_file(const std::string& path, EmbeddingFormat format,
                                      std::optional<std::size_t> limit = std::nullopt);
EmbeddingSnapshot load_embedding_string(std::string_view text, EmbeddingFormat format,
                                        std::optional<std::size_t> limit = std::nullopt);

/// An empty snapshot writes nothing (glove_text) or only the `0 d` header.
void export_embedding(const EmbeddingSnapshot& snapshot, std::ostream& out, EmbeddingFormat format,
                      const ExportOptions& options = {});
std::string export_embedding_string(const EmbeddingSnapshot& snapshot, EmbeddingFormat format,
                                    const ExportOptions& options = {});

}  // namespace debiaskit
