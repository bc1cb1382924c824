#include "support.hpp"

#include "debiaskit/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace debiaskit;
using namespace testing_support;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("io") {

TEST_CASE("glove_text read-back") {
  const auto s = load_embedding_string("a 1 2 3 4\nb 5 6 7 8\nc -1 -2 -3 -4.5\n", EmbeddingFormat::GloveText);
  CHECK(s.size() == 3);
  CHECK(s.dim() == 4);
  CHECK(s.token(2) == "c");
  CHECK(s.matrix()(2, 3) == -4.5);
}

TEST_CASE("word2vec_text read-back") {
  const auto s = load_embedding_string("2 3\nx 1 2 3\ny 4 5 6\n", EmbeddingFormat::Word2VecText);
  CHECK(s.size() == 2);
  CHECK(s.dim() == 3);
  CHECK(s.matrix()(1, 0) == 4.0);
}

TEST_CASE("format names") {
  CHECK(parse_format("glove") == EmbeddingFormat::GloveText);
  CHECK(parse_format("glove_text") == EmbeddingFormat::GloveText);
  CHECK(parse_format("word2vec") == EmbeddingFormat::Word2VecText);
  CHECK(parse_format("word2vec_text") == EmbeddingFormat::Word2VecText);
  CHECK_THROWS_AS(parse_format("fasttext"), Error);
}

TEST_CASE("malformed streams are parse errors") {
  auto kind_of = [](std::string_view text, EmbeddingFormat f) {
    try {
      (void)load_embedding_string(text, f);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NotFound;  // sentinel: no error
  };
  std::string bad_dims = "a";
  for (int i = 0; i < 50; ++i) bad_dims += " 0.1";
  bad_dims += "\nb";
  for (int i = 0; i < 49; ++i) bad_dims += " 0.1";
  bad_dims += "\n";
  CHECK(kind_of(bad_dims, EmbeddingFormat::GloveText) == ErrorKind::Parse);
  CHECK(kind_of("a 1 2\na 3 4\n", EmbeddingFormat::GloveText) == ErrorKind::Parse);   // duplicate token
  CHECK(kind_of("a 1 x\n", EmbeddingFormat::GloveText) == ErrorKind::Parse);         // non-numeric
  CHECK(kind_of("", EmbeddingFormat::GloveText) == ErrorKind::Parse);                // empty
  CHECK(kind_of("2 3\nx 1 2 3\n", EmbeddingFormat::Word2VecText) == ErrorKind::Parse);  // short body
  CHECK(kind_of("two 3\nx 1 2 3\n", EmbeddingFormat::Word2VecText) == ErrorKind::Parse);
  CHECK(kind_of("1 3\nx 1 2\n", EmbeddingFormat::Word2VecText) == ErrorKind::Parse);   // header d mismatch
}

TEST_CASE("limit keeps the first rows") {
  const auto s = load_embedding_string("a 1 2\nb 3 4\nc 5 6\n", EmbeddingFormat::GloveText, 2);
  CHECK(s.size() == 2);
  CHECK(s.token(1) == "b");
}

TEST_CASE("CRLF and blank lines are tolerated") {
  const auto s = load_embedding_string("a 1 2\r\n\r\nb 3 4\r\n", EmbeddingFormat::GloveText);
  CHECK(s.size() == 2);
  CHECK(s.matrix()(1, 1) == 4.0);
}

TEST_CASE("missing file is NotFound") {
  try {
    (void)load_embedding_file("/nonexistent/embedding.txt", EmbeddingFormat::GloveText);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFound);
  }
}

TEST_CASE("export/load round trip: 3x4 and 100x50 in both formats") {
  for (EmbeddingFormat f : {EmbeddingFormat::GloveText, EmbeddingFormat::Word2VecText}) {
    const auto small = random_snapshot(3, 4, 11);
    const auto big = random_snapshot(100, 50, 12);
    for (const auto* s : {&small, &big}) {
      const auto back = load_embedding_string(export_embedding_string(*s, f), f);
      CHECK(back.tokens() == s->tokens());
      CHECK(max_abs_diff(back.matrix(), s->matrix()) == 0.0);  // shortest round-trip digits are exact
      const auto six = load_embedding_string(export_embedding_string(*s, f, {6}), f);
      CHECK(max_abs_diff(six.matrix(), s->matrix()) <= 1e-5 * s->matrix().cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("six significant digits match the GloVe convention") {
  const auto s = snap({"a", "b"}, rows({{0.123456789, -1.5}, {1e-7, 2.0}}));
  CHECK(export_embedding_string(s, EmbeddingFormat::GloveText, {6}) == "a 0.123457 -1.5\nb 1e-07 2\n");
}

TEST_CASE("empty snapshot export") {
  const auto s = snap({}, Matrix(0, 3));
  CHECK(export_embedding_string(s, EmbeddingFormat::GloveText).empty());
  CHECK(export_embedding_string(s, EmbeddingFormat::Word2VecText) == "0 3\n");
}

TEST_CASE("export is byte-stable") {
  const auto s = random_snapshot(30, 7, 5);
  CHECK(export_embedding_string(s, EmbeddingFormat::GloveText) ==
        export_embedding_string(s, EmbeddingFormat::GloveText));
  const auto path = std::filesystem::temp_directory_path() / "debiaskit_io_test.txt";
  {
    std::ofstream out(path);
    export_embedding(s, out, EmbeddingFormat::Word2VecText);
  }
  const auto back = load_embedding_file(path.string(), EmbeddingFormat::Word2VecText);
  CHECK(back.matrix() == s.matrix());
  std::filesystem::remove(path);
}

TEST_CASE("bundled vectors load and contain every shipped word list") {
  const auto& s = bundled();
  CHECK(s.dim() == 300);
  CHECK(s.size() > 2000);
  for (const char* list : {"gender_male", "gender_female", "occupations_male", "occupations_female",
                           "adjectives_male", "adjectives_female", "names_male", "names_female", "inlp_male",
                           "inlp_female", "oscar_gender", "oscar_occupation", "oscar_eval", "royalty_royal",
                           "royalty_common", "royalty_eval", "ect_occupations"}) {
    CAPTURE(list);
    CHECK_NOTHROW(s.indices_of(bundled_list(list).tokens));
  }
}

}  // TEST_SUITE
