#pragma once

#include "debiaskit/embedding.hpp"

#include <cmath>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using debiaskit::EmbeddingSnapshot;
using debiaskit::Index;
using debiaskit::Matrix;
using debiaskit::Vector;
using debiaskit::WordSet;

inline Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline std::vector<std::string> names(std::size_t n, const std::string& prefix = "w") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

inline EmbeddingSnapshot snap(std::vector<std::string> tokens, Matrix m) {
  return EmbeddingSnapshot(std::move(tokens), std::move(m));
}

inline Matrix gaussian(Index n, Index d, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> g(0.0, sigma);
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

inline Vector unit_gaussian(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (Index j = 0; j < d; ++j) v[j] = g(rng);
  return v / v.norm();
}

inline EmbeddingSnapshot random_snapshot(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return snap(names(static_cast<std::size_t>(n)), gaussian(n, d, rng));
}

inline WordSet ws(std::vector<std::string> t, std::string label = "set") {
  return WordSet::make(std::move(label), std::move(t));
}

// Plain-loop cosine used as an oracle; deliberately not sharing library code.
inline double naive_cos(const Vector& a, const Vector& b) {
  double ab = 0, aa = 0, bb = 0;
  for (Index i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

// Bundled vectors; loaded once per test binary.
const EmbeddingSnapshot& bundled();
WordSet bundled_list(const std::string& name);

}  // namespace testing_support
