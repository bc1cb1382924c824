#pragma once

#include "debiaskit/embedding.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace debiaskit {

/// Tokens from a file, one per line; blank lines and lines starting with '#'
/// are skipped. Missing file throws Error(NotFound).
std::vector<std::string> read_token_file(const std::string& path);

/// "a,b,c" or "@path". Whitespace around items is trimmed.
WordSet parse_word_set(std::string_view spec, std::string label);

/// "a:b,c:d" or "@path" where each line is "a:b" or "a b".
PairedWordSet parse_paired_set(std::string_view spec, std::string label);

/// Directory with bundled data; DEBIASKIT_DATA_DIR overrides the build-time path.
std::string data_dir();

/// Bundled list by name, e.g. "gender_male" -> data/wordlists/gender_male.txt.
WordSet bundled_word_set(const std::string& name, std::string label = {});

}  // namespace debiaskit
