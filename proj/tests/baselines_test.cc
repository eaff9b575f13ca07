// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s2l/baselines.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "s2l/error.hpp"

namespace s2l {
namespace {

ScoreVector scores_of(std::vector<double> values, Stat stat) {
  ScoreVector s{{}, std::move(values), stat};
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "id%05zu", i);
    s.ids.emplace_back(buf);
  }
  return s;
}

// Full-sort oracle by (score, id), independent of the library's rank helper.
std::vector<std::size_t> sorted_by(const ScoreVector& s, bool descending) {
  std::vector<std::pair<double, std::string>> keyed;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    keyed.emplace_back(descending ? -s.scores[i] : s.scores[i], s.ids[i]);
  }
  std::vector<std::size_t> idx(s.scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keyed[a] < keyed[b]; });
  return idx;
}

SimilarityMatrix random_similarity(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = u(gen);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, v[i * n + j]);
    v[i * n + i] = m + u(gen) * 0.5;
  }
  return SimilarityMatrix(std::move(v), n);
}

double brute_force_best(const SimilarityMatrix& sim, std::size_t b) {
  const std::size_t n = sim.size();
  double best = 0.0;
  std::vector<std::size_t> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != b) continue;
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    best = std::max(best, facility_location_value(sim, subset));
  }
  return best;
}

TEST(RandomSelect, ExamplesAndDeterminism) {
  EXPECT_EQ(random_select(5, 9, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(random_select(100, 10, 42), random_select(100, 10, 42));
  EXPECT_NE(random_select(100, 10, 42), random_select(100, 10, 43));
  const auto picked = random_select(1000, 300, 3);
  EXPECT_EQ(std::set<std::size_t>(picked.begin(), picked.end()).size(), 300u);
}

TEST(RandomSelect, UniformWithinThreeSigma) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) ++hits[random_select(10, 1, seed)[0]];
  const double sigma = std::sqrt(10000 * 0.1 * 0.9);
  for (int h : hits) EXPECT_LE(std::abs(h - 1000.0), 3 * sigma);
}

TEST(LeastConfidence, Examples) {
  EXPECT_EQ(least_confidence_select(scores_of({0.9, 0.1, 0.5}, Stat::kConfidence), 1),
            (std::vector<std::size_t>{1}));
  EXPECT_EQ(least_confidence_select(scores_of({0.3, 0.3, 0.3, 0.3}, Stat::kConfidence), 2),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(least_confidence_select(scores_of({0.3, 0.2}, Stat::kConfidence), 7).size(), 2u);
  EXPECT_THROW(least_confidence_select(scores_of({0.3}, Stat::kPerplexity), 1), ArgumentError);
}

TEST(LeastConfidence, MatchesSortOracleAndIsAffineInvariant) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + gen() % 300;
    std::vector<double> v(n);
    for (auto& x : v) x = gen() % 4 == 0 ? 0.5 : u(gen);
    const auto s = scores_of(v, Stat::kConfidence);
    auto expected = sorted_by(s, false);
    expected.resize(n / 2);
    const auto got = least_confidence_select(s, n / 2);
    EXPECT_EQ(got, expected);
    auto scaled = s;
    for (auto& x : scaled.scores) x = 3.5 * x + 11.0;
    EXPECT_EQ(least_confidence_select(scaled, n / 2), got);
  }
}

TEST(MiddlePerplexity, CenteredBand) {
  // Perplexities given in reverse order so rank r sits at index 9 - r.
  std::vector<double> v;
  for (int i = 10; i >= 1; --i) v.push_back(i);
  const auto s = scores_of(v, Stat::kPerplexity);
  // Ranks 4-7 (one-based) are values 4..7 at indices 6..3.
  EXPECT_EQ(middle_perplexity_select(s, 4), (std::vector<std::size_t>{6, 5, 4, 3}));
  EXPECT_EQ(middle_perplexity_select(s, 10).size(), 10u);
  EXPECT_EQ(middle_perplexity_select(s, 99).size(), 10u);
  const auto odd = scores_of({5.0, 1.0, 3.0, 9.0, 7.0}, Stat::kPerplexity);
  EXPECT_EQ(middle_perplexity_select(odd, 1), (std::vector<std::size_t>{0}));  // median 5.0
}

TEST(MiddlePerplexity, ContiguousRankBlock) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<double> v(n);
    for (auto& x : v) x = u(gen);
    const auto s = scores_of(v, Stat::kPerplexity);
    const std::size_t b = 1 + gen() % (n + 5);
    const auto got = middle_perplexity_select(s, b);
    const auto order = sorted_by(s, false);
    const std::size_t m = std::min(b, n);
    ASSERT_EQ(got.size(), m);
    const std::size_t off = (n - m) / 2;
    EXPECT_TRUE(std::equal(got.begin(), got.end(), order.begin() + off));
  }
}

TEST(HighLearnability, Examples) {
  // Trajectories (5 -> 1), (3 -> 2.5), (2 -> 2).
  const auto s = scores_of({5.0 - 1.0, 3.0 - 2.5, 2.0 - 2.0}, Stat::kLearnability);
  EXPECT_EQ(high_learnability_select(s, 1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(high_learnability_select(s, 3).size(), 3u);
  const auto flat = scores_of({0, 0, 0, 0, 0}, Stat::kLearnability);
  EXPECT_EQ(high_learnability_select(flat, 3), (std::vector<std::size_t>{0, 1, 2}));
  auto scaled = s;
  for (auto& x : scaled.scores) x = 0.01 * x - 4.0;
  EXPECT_EQ(high_learnability_select(scaled, 2), high_learnability_select(s, 2));
}

TEST(SimilarityMatrix, Validation) {
  EXPECT_THROW(SimilarityMatrix({1.0, 0.5, 0.4, 1.0}, 2), ArgumentError);
  EXPECT_THROW(SimilarityMatrix({1.0, -0.1, -0.1, 1.0}, 2), ArgumentError);
  EXPECT_THROW(SimilarityMatrix({0.5, 0.9, 0.9, 1.0}, 2), ArgumentError);
  EXPECT_THROW(SimilarityMatrix({1.0, 0.0, 0.0}, 2), ArgumentError);
  EXPECT_NO_THROW(SimilarityMatrix({1.0, 0.5, 0.5 + 1e-12, 1.0}, 2));
}

TEST(FacilityLocation, WorkedPairExample) {
  std::vector<double> v(16, 0.0);
  for (int i = 0; i < 4; ++i) v[i * 4 + i] = 1.0;
  v[0 * 4 + 1] = v[1 * 4 + 0] = 0.9;
  v[2 * 4 + 3] = v[3 * 4 + 2] = 0.8;
  const SimilarityMatrix sim(v, 4);
  const auto r = facility_location_select(sim, 2);
  EXPECT_EQ(r.order, (std::vector<std::size_t>{0, 2}));
  EXPECT_NEAR(r.gains[0], 1.9, 1e-12);
  EXPECT_NEAR(r.gains[1], 1.8, 1e-12);
  EXPECT_NEAR(r.value, 3.7, 1e-12);
  EXPECT_NEAR(brute_force_best(sim, 2), 3.7, 1e-12);
}

TEST(FacilityLocation, FullBudgetCoversDiagonal) {
  std::mt19937_64 gen(3);
  const auto sim = random_similarity(gen, 9);
  const auto r = facility_location_select(sim, 9);
  double diag = 0.0;
  for (std::size_t i = 0; i < 9; ++i) diag += sim(i, i);
  EXPECT_NEAR(r.value, diag, 1e-9);
  EXPECT_EQ(std::set<std::size_t>(r.order.begin(), r.order.end()).size(), 9u);
}

TEST(FacilityLocation, NearOptimalWithNonIncreasingGains) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + gen() % 11;
    const std::size_t b = 1 + gen() % std::min<std::size_t>(4, n);
    const auto sim = random_similarity(gen, n);
    const auto r = facility_location_select(sim, b);
    ASSERT_EQ(r.order.size(), b);
    EXPECT_GE(r.value, (1.0 - std::exp(-1.0)) * brute_force_best(sim, b) - 1e-12);
    EXPECT_NEAR(r.value, facility_location_value(sim, r.order), 1e-9);
    for (std::size_t s = 1; s < b; ++s) EXPECT_LE(r.gains[s], r.gains[s - 1] + 1e-12);
  }
}

TEST(FacilityLocation, LazyMatchesEagerGreedy) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 5 + gen() % 60;
    const auto sim = random_similarity(gen, n);
    const std::size_t b = 1 + gen() % n;
    std::vector<std::size_t> chosen;
    std::vector<char> used(n, 0);
    for (std::size_t step = 0; step < b; ++step) {
      const double base = facility_location_value(sim, chosen);
      std::size_t best = n;
      double best_gain = -1.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (used[c]) continue;
        chosen.push_back(c);
        const double g = facility_location_value(sim, chosen) - base;
        chosen.pop_back();
        if (g > best_gain + 1e-12) {
          best_gain = g;
          best = c;
        }
      }
      used[best] = 1;
      chosen.push_back(best);
    }
    EXPECT_EQ(facility_location_select(sim, b, 1 + static_cast<int>(trial % 3)).order, chosen);
  }
}

TEST(FacilityLocation, FeatureOverloadUsesShiftedCosine) {
  // Two tight groups of directions; B = 2 should pick one from each.
  FeatureMatrix f({"a", "b", "c", "d"}, {1, 0, 0.99f, 0.1f, 0, 1, 0.1f, 0.99f}, 2);
  const auto sim = cosine_similarity(f);
  EXPECT_NEAR(sim(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(sim(0, 2), 1.0, 1e-12);
  const auto r = facility_location_select(f, 2);
  std::set<std::size_t> picked(r.order.begin(), r.order.end());
  EXPECT_EQ(picked.count(0) + picked.count(1), 1u);
  EXPECT_EQ(picked.count(2) + picked.count(3), 1u);
}

}  // namespace
}  // namespace s2l
