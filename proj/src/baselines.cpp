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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "s2l/error.hpp"
#include "s2l/kernels.hpp"
#include "s2l/parallel.hpp"
#include "s2l/random.hpp"

namespace s2l {
namespace {

void expect_stat(const ScoreVector& scores, Stat stat) {
  if (scores.stat != stat) {
    throw ArgumentError("expected " + std::string(stat_name(stat)) + " scores, got " +
                        std::string(stat_name(scores.stat)));
  }
  if (scores.ids.size() != scores.scores.size()) {
    throw ArgumentError("score vector ids and scores differ in length");
  }
  for (double s : scores.scores) {
    if (!std::isfinite(s)) throw ArgumentError("scores must be finite");
  }
}

// Indices ordered by score (ascending or descending), ties by ascending id.
std::vector<std::size_t> rank(const ScoreVector& scores, bool descending) {
  std::vector<std::size_t> idx(scores.scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores.scores[a];
    const double sb = scores.scores[b];
    if (sa != sb) return descending ? sa > sb : sa < sb;
    return scores.ids[a] < scores.ids[b];
  });
  return idx;
}

struct Candidate {
  double bound;
  std::size_t index;
  std::size_t fresh_at;  // step at which `bound` was computed exactly
};

struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.index > b.index;
  }
};

// Lazy greedy over similarity columns supplied by `column(j, out)`.
template <typename ColumnFn>
FacilityLocationResult lazy_greedy(std::size_t n, std::size_t budget, int workers,
                                   ColumnFn&& column) {
  if (budget == 0) throw ArgumentError("budget must be >= 1");
  FacilityLocationResult result;
  std::vector<double> coverage(n, 0.0);

  std::vector<double> initial(n);
  for_each_block(n, 64, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    std::vector<double> col(n);
    for (std::size_t j = lo; j < hi; ++j) {
      column(j, col);
      initial[j] = kernels::coverage_gain(col, coverage);
    }
  });
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;
  for (std::size_t j = 0; j < n; ++j) heap.push({initial[j], j, 0});

  const std::size_t picks = std::min(budget, n);
  std::vector<double> col(n);
  for (std::size_t step = 0; step < picks; ++step) {
    for (;;) {
      Candidate top = heap.top();
      heap.pop();
      if (top.fresh_at == step) {
        column(top.index, col);
        kernels::raise_coverage(col, coverage);
        result.order.push_back(top.index);
        result.gains.push_back(top.bound);
        break;
      }
      column(top.index, col);
      heap.push({kernels::coverage_gain(col, coverage), top.index, step});
    }
  }
  result.value = std::accumulate(coverage.begin(), coverage.end(), 0.0);
  return result;
}

std::vector<double> unit_rows(const FeatureMatrix& features) {
  const std::size_t n = features.size();
  const std::size_t d = features.dim();
  std::vector<double> u(features.values().begin(), features.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> r(u.data() + i * d, d);
    const double norm = std::sqrt(kernels::dot(r, r));
    for (double& v : r) v = norm > 0.0 ? v / norm : 0.0;
  }
  return u;
}

}  // namespace

std::vector<std::size_t> random_select(std::size_t n, std::size_t budget, std::uint64_t seed) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(seed);
  auto picked = sample_without_replacement(all, std::min(budget, n), rng);
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<std::size_t> least_confidence_select(const ScoreVector& scores, std::size_t budget) {
  expect_stat(scores, Stat::kConfidence);
  auto idx = rank(scores, /*descending=*/false);
  idx.resize(std::min(budget, idx.size()));
  return idx;
}

std::vector<std::size_t> middle_perplexity_select(const ScoreVector& scores, std::size_t budget) {
  expect_stat(scores, Stat::kPerplexity);
  const auto idx = rank(scores, /*descending=*/false);
  const std::size_t n = idx.size();
  const std::size_t b = std::min(budget, n);
  const std::size_t offset = (n - b) / 2;
  return std::vector<std::size_t>(idx.begin() + static_cast<std::ptrdiff_t>(offset),
                                  idx.begin() + static_cast<std::ptrdiff_t>(offset + b));
}

std::vector<std::size_t> high_learnability_select(const ScoreVector& scores, std::size_t budget) {
  expect_stat(scores, Stat::kLearnability);
  auto idx = rank(scores, /*descending=*/true);
  idx.resize(std::min(budget, idx.size()));
  return idx;
}

SimilarityMatrix::SimilarityMatrix(std::vector<double> values, std::size_t n)
    : values_(std::move(values)), n_(n) {
  if (n_ == 0) throw ArgumentError("similarity matrix is empty");
  if (values_.size() != n_ * n_) throw ArgumentError("similarity matrix is not square");
  for (std::size_t i = 0; i < n_; ++i) {
    const double diag = (*this)(i, i);
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ArgumentError("similarity entries must be finite and non-negative");
      }
      if (std::abs(v - (*this)(j, i)) > kSymmetryTolerance) {
        throw ArgumentError("similarity matrix is not symmetric at (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
      }
      if (v > diag) {
        throw ArgumentError("similarity diagonal is not maximal in row " + std::to_string(i));
      }
    }
  }
}

SimilarityMatrix cosine_similarity(const FeatureMatrix& features, int workers) {
  const std::size_t n = features.size();
  const std::size_t d = features.dim();
  const auto u = unit_rows(features);
  std::vector<double> sim(n * n);
  for_each_block(n, 64, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::span<const double> ri(u.data() + i * d, d);
      for (std::size_t j = 0; j < n; ++j) {
        sim[i * n + j] = kernels::dot(ri, std::span<const double>(u.data() + j * d, d)) + 1.0;
      }
    }
  });
  // Rounding can leave a unit vector's self-similarity a hair below a
  // near-duplicate's; pin the diagonal to the row maximum.
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, sim[i * n + j]);
    sim[i * n + i] = m;
  }
  return SimilarityMatrix(std::move(sim), n);
}

FacilityLocationResult facility_location_select(const SimilarityMatrix& sim, std::size_t budget,
                                                int workers) {
  return lazy_greedy(sim.size(), budget, workers, [&](std::size_t j, std::vector<double>& out) {
    const auto r = sim.row(j);
    std::copy(r.begin(), r.end(), out.begin());
  });
}

FacilityLocationResult facility_location_select(const FeatureMatrix& features, std::size_t budget,
                                                int workers) {
  const std::size_t n = features.size();
  const std::size_t d = features.dim();
  const auto u = unit_rows(features);
  return lazy_greedy(n, budget, workers, [&](std::size_t j, std::vector<double>& out) {
    std::span<const double> rj(u.data() + j * d, d);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = kernels::dot(std::span<const double>(u.data() + i * d, d), rj) + 1.0;
    }
  });
}

double facility_location_value(const SimilarityMatrix& sim, std::span<const std::size_t> subset) {
  double total = 0.0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    double best = 0.0;
    for (std::size_t j : subset) best = std::max(best, sim(i, j));
    total += best;
  }
  return total;
}

}  // namespace s2l
