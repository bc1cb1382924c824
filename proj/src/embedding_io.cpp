#include "debiaskit/embedding.hpp"
#include "debiaskit/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace debiaskit {

EmbeddingFormat parse_format(std::string_view name) {
  if (name == "glove_text" || name == "glove") return EmbeddingFormat::GloveText;
  if (name == "word2vec_text" || name == "word2vec") return EmbeddingFormat::Word2VecText;
  throw Error(ErrorKind::InvalidArgument, "unknown embedding format '" + std::string(name) + "'");
}

const char* to_string(EmbeddingFormat format) {
  return format == EmbeddingFormat::GloveText ? "glove_text" : "word2vec_text";
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_component(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": non-numeric component '" +
                                      std::string(field) + "'");
  return value;
}

template <class T>
T parse_count(std::string_view field, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorKind::Parse, std::string("word2vec header: bad ") + what);
  return value;
}

}  // namespace

EmbeddingSnapshot load_embedding(std::istream& in, EmbeddingFormat format,
                                 std::optional<std::size_t> limit) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared_rows;
  Index dim = -1;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };

  if (format == EmbeddingFormat::Word2VecText) {
    if (!next_line()) throw Error(ErrorKind::Parse, "empty stream");
    const auto header = split_fields(line);
    if (header.size() != 2) throw Error(ErrorKind::Parse, "word2vec header must be `N d`");
    declared_rows = parse_count<std::size_t>(header[0], "row count");
    dim = parse_count<Index>(header[1], "dimension");
    if (dim < 2) throw Error(ErrorKind::Parse, "word2vec header: dimension must be >= 2");
  }

  const std::size_t cap = std::min(limit.value_or(SIZE_MAX), declared_rows.value_or(SIZE_MAX));
  std::vector<std::string> tokens;
  std::vector<double> values;
  while (tokens.size() < cap && next_line()) {
    const auto fields = split_fields(line);
    const auto row_dim = static_cast<Index>(fields.size()) - 1;
    if (dim < 0) {
      if (row_dim < 2)
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": need at least 2 components");
      dim = row_dim;
    }
    if (row_dim != dim)
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": dimension mismatch (expected " +
                                        std::to_string(dim) + ", got " + std::to_string(row_dim) + ")");
    tokens.emplace_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i)
      values.push_back(parse_component(fields[i], line_no));
  }

  if (dim < 0) throw Error(ErrorKind::Parse, "empty stream");
  if (declared_rows && !limit && tokens.size() != *declared_rows)
    throw Error(ErrorKind::Parse, "word2vec header declares " + std::to_string(*declared_rows) +
                                      " rows, body has " + std::to_string(tokens.size()));

  Matrix m(static_cast<Index>(tokens.size()), dim);
  std::copy(values.begin(), values.end(), m.data());
  try {
    return EmbeddingSnapshot(std::move(tokens), std::move(m));
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

EmbeddingSnapshot load_embedding_file(const std::string& path, EmbeddingFormat format,
                                      std::optional<std::size_t> limit) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open embedding file '" + path + "'");
  return load_embedding(in, format, limit);
}

EmbeddingSnapshot load_embedding_string(std::string_view text, EmbeddingFormat format,
                                        std::optional<std::size_t> limit) {
  std::istringstream in{std::string(text)};
  return load_embedding(in, format, limit);
}

void export_embedding(const EmbeddingSnapshot& snapshot, std::ostream& out, EmbeddingFormat format,
                      const ExportOptions& options) {
  if (format == EmbeddingFormat::Word2VecText)
    out << snapshot.size() << ' ' << snapshot.dim() << '\n';

  std::string line;
  char buf[64];
  const Matrix& m = snapshot.matrix();
  for (Index r = 0; r < m.rows(); ++r) {
    line = snapshot.token(r);
    for (Index c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      auto res = options.significant_digits > 0
                     ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general,
                                     options.significant_digits)
                     : std::to_chars(buf, buf + sizeof buf, x);
      line += ' ';
      line.append(buf, res.ptr);
    }
    line += '\n';
    out << line;
  }
}

std::string export_embedding_string(const EmbeddingSnapshot& snapshot, EmbeddingFormat format,
                                     const ExportOptions& options) {
  std::ostringstream out;
  export_embedding(snapshot, out, format, options);
  return out.str();
}

}  // namespace debiaskit
