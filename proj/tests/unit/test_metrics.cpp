#include "oracles.hpp"
#include "support.hpp"

#include "debiaskit/error.hpp"
#include "debiaskit/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace debiaskit;
using namespace testing_support;

TEST_SUITE("metrics") {

TEST_CASE("WEAT: hand-computed 2-D example pins the population stddev") {
  const auto r = weat_effect_size(rows({{1, 0}}), rows({{0, 1}}), rows({{1, 0}}), rows({{0, 1}}));
  CHECK(r.effect_size == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("WEAT: identical targets with A = B is degenerate zero") {
  const auto r =
      weat_effect_size(rows({{1, 2}, {1, 2}}), rows({{1, 2}}), rows({{0, 1}}), rows({{0, 1}}));
  CHECK(r.effect_size == 0.0);
  CHECK(r.degenerate);
}

TEST_CASE("WEAT: zero vectors are flagged, not NaN") {
  const auto r = weat_effect_size(rows({{0, 0}}), rows({{0, 1}}), rows({{1, 0}}), rows({{0, 1}}));
  CHECK(r.zero_vector);
  CHECK(std::isfinite(r.effect_size));
}

TEST_CASE("WEAT set validation") {
  const auto s = snap({"a", "b", "c", "d"}, rows({{1, 0}, {0, 1}, {1, 1}, {1, -1}}));
  CHECK_THROWS_AS(weat(s, {ws({"a"}), ws({"a"}), ws({"c"}), ws({"d"})}), Error);
  CHECK_THROWS_AS(weat(s, {ws({"a"}), ws({"b"}), ws({"c"}), ws({"c"})}), Error);
  CHECK_THROWS_AS(weat(s, {WordSet{"x", {}}, ws({"b"}), ws({"c"}), ws({"d"})}), Error);
  CHECK_THROWS_AS(weat(s, {ws({"a"}), ws({"b"}), ws({"c"}), ws({"zz"})}), UnknownTokenError);
}

TEST_CASE("ECT: worked examples") {
  const Matrix x = rows({{1, 0}, {0.5, 0.5}});
  const Matrix attrs = rows({{1, 0}, {0, 1}, {1, 1}});
  CHECK(ect_score(x, x, attrs).score == doctest::Approx(1.0));
  // m = e1, f = e2: attribute (1,0.1) vs (0.1,1) orderings are reversed.
  const auto r = ect_score(rows({{1, 0}}), rows({{0, 1}}), rows({{1, 0.1}, {0.1, 1}}));
  CHECK(r.score == doctest::Approx(-1.0));
  CHECK_THROWS_AS(ect_score(x, x, rows({{1, 0}})), Error);
}

TEST_CASE("ECT: constant similarity list is degenerate") {
  const auto r = ect_score(rows({{1, 0}}), rows({{0, 1}}), rows({{0, 1}, {0, 2}}));
  CHECK(r.degenerate);
  CHECK(r.score == 0.0);
}

TEST_CASE("average ranks and Spearman") {
  const std::vector<double> v{3, 1, 3, 2};
  CHECK(average_ranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  CHECK(spearman(a, a) == doctest::Approx(1.0));
  CHECK(spearman(a, b) == doctest::Approx(-1.0));
  bool degenerate = false;
  const std::vector<double> c{5, 5, 5};
  CHECK(spearman(a, c, &degenerate) == 0.0);
  CHECK(degenerate);
}

TEST_CASE("WEAT and ECT match brute-force oracles on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 6);
  for (int t = 0; t < 25; ++t) {
    const Index d = 2 + t % 7;
    const Matrix x = gaussian(size(rng), d, rng), y = gaussian(size(rng), d, rng);
    const Matrix a = gaussian(size(rng), d, rng), b = gaussian(size(rng), d, rng);
    const Matrix attrs = gaussian(2 + size(rng), d, rng);
    CHECK(std::fabs(weat_effect_size(x, y, a, b).effect_size - oracle_weat(x, y, a, b)) <= 1e-12);
    CHECK(std::fabs(ect_score(x, y, attrs).score - oracle_ect(x, y, attrs)) <= 1e-12);
  }
}

TEST_CASE("WEAT antisymmetry is exact; ECT stays bounded and permutation invariant") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(1, 7);
  for (int t = 0; t < 1000; ++t) {
    const Index d = 2 + t % 5;
    const Matrix x = gaussian(size(rng), d, rng), y = gaussian(size(rng), d, rng);
    const Matrix a = gaussian(size(rng), d, rng), b = gaussian(size(rng), d, rng);
    const double w = weat_effect_size(x, y, a, b).effect_size;
    CHECK(weat_effect_size(y, x, a, b).effect_size == -w);
    CHECK(weat_effect_size(x, y, b, a).effect_size == -w);

    Matrix attrs = gaussian(2 + size(rng), d, rng);
    const double e = ect_score(x, y, attrs).score;
    CHECK(e >= -1.0);
    CHECK(e <= 1.0);
    std::vector<Index> perm(static_cast<std::size_t>(attrs.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix shuffled(attrs.rows(), d);
    for (Index i = 0; i < attrs.rows(); ++i) shuffled.row(i) = attrs.row(perm[static_cast<std::size_t>(i)]);
    CHECK(ect_score(x, y, shuffled).score == e);
  }
}

TEST_CASE("WEAT is invariant to positive rescaling of a single vector") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lambda(0.1, 10.0);
  for (int t = 0; t < 50; ++t) {
    Matrix x = gaussian(3, 4, rng), y = gaussian(3, 4, rng), a = gaussian(2, 4, rng), b = gaussian(2, 4, rng);
    const double before = weat_effect_size(x, y, a, b).effect_size;
    Matrix* target[] = {&x, &y, &a, &b};
    Matrix& m = *target[t % 4];
    m.row(t % 2) *= lambda(rng);
    CHECK(std::fabs(weat_effect_size(x, y, a, b).effect_size - before) <= 1e-12);
  }
}

TEST_CASE("metric report on a snapshot") {
  const auto s = random_snapshot(20, 5, 3);
  MetricSets sets{{ws({"w0", "w1"}), ws({"w2", "w3"}), ws({"w4", "w5"}), ws({"w6", "w7"})},
                  ws({"w8", "w9", "w10", "w11"})};
  const auto r = evaluate_metrics(s, sets);
  CHECK(r.snapshot_id == s.id());
  CHECK(r.weat.effect_size == weat(s, sets.weat).effect_size);
  CHECK(r.ect.score == ect(s, sets.weat.x, sets.weat.y, sets.ect_attributes).score);
  CHECK(r.ect.score >= -1.0);
  CHECK(r.ect.score <= 1.0);
}

}  // TEST_SUITE
