#include "support.hpp"

#include "debiaskit/wordlists.hpp"

namespace testing_support {

const EmbeddingSnapshot& bundled() {
  static const EmbeddingSnapshot s = debiaskit::load_embedding_file(
      debiaskit::data_dir() + "/gnews300_subset.txt", debiaskit::EmbeddingFormat::GloveText);
  return s;
}

WordSet bundled_list(const std::string& name) { return debiaskit::bundled_word_set(name); }

}  // namespace testing_support
