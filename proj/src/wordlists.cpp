#include "debiaskit/wordlists.hpp"

#include "debiaskit/error.hpp"

#include <cstdlib>
#include <fstream>

#ifndef DEBIASKIT_DATA_DIR
#define DEBIASKIT_DATA_DIR "data"
#endif

namespace debiaskit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_items(std::string_view spec) {
  std::vector<std::string> out;
  if (!spec.empty() && spec.front() == '@') return read_token_file(std::string(spec.substr(1)));
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const auto end = comma == std::string_view::npos ? spec.size() : comma;
    const auto item = trim(spec.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> read_token_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open word list '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto item = trim(line);
    if (item.empty() || item.front() == '#') continue;
    out.emplace_back(item);
  }
  return out;
}

WordSet parse_word_set(std::string_view spec, std::string label) {
  return WordSet::make(std::move(label), split_items(spec));
}

PairedWordSet parse_paired_set(std::string_view spec, std::string label) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& item : split_items(spec)) {
    auto sep = item.find(':');
    if (sep == std::string::npos) sep = item.find_first_of(" \t");
    if (sep == std::string::npos || sep == 0 || sep + 1 >= item.size())
      throw Error(ErrorKind::InvalidArgument, "pair '" + item + "' is not of the form a:b");
    const auto a = trim(std::string_view(item).substr(0, sep));
    const auto b = trim(std::string_view(item).substr(sep + 1));
    if (a.empty() || b.empty() || b.find_first_of(": \t") != std::string_view::npos)
      throw Error(ErrorKind::InvalidArgument, "pair '" + item + "' is not of the form a:b");
    pairs.emplace_back(std::string(a), std::string(b));
  }
  return PairedWordSet::make(std::move(label), std::move(pairs));
}

std::string data_dir() {
  if (const char* env = std::getenv("DEBIASKIT_DATA_DIR"); env && *env) return env;
  return DEBIASKIT_DATA_DIR;
}

WordSet bundled_word_set(const std::string& name, std::string label) {
  return WordSet::make(label.empty() ? name : std::move(label),
                       read_token_file(data_dir() + "/wordlists/" + name + ".txt"));
}

}  // namespace debiaskit
