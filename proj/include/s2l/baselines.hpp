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

#ifndef S2L_BASELINES_HPP_
#define S2L_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "s2l/trajectory.hpp"

namespace s2l {

// Uniform sample of min(B, n) distinct indices, returned ascending.
std::vector<std::size_t> random_select(std::size_t n, std::size_t budget, std::uint64_t seed);

// The B least-confident examples (lowest confidence, ties by ascending id),
// in rank order. Expects a confidence ScoreVector.
std::vector<std::size_t> least_confidence_select(const ScoreVector& scores, std::size_t budget);

// Ranks by perplexity ascending (ties by id) and keeps the band of B ranks
// starting at floor((n - B) / 2).
std::vector<std::size_t> middle_perplexity_select(const ScoreVector& scores, std::size_t budget);

// Top-B learnability, descending (ties by ascending id).
std::vector<std::size_t> high_learnability_select(const ScoreVector& scores, std::size_t budget);

// Dense symmetric similarity with non-negative entries and a maximal diagonal.
class SimilarityMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  // Throws ArgumentError when the matrix is not square, not symmetric within
  // tolerance, has negative or non-finite entries, or some sim(i,i) < sim(i,j).
  SimilarityMatrix(std::vector<double> values, std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }

 private:
  std::vector<double> values_;
  std::size_t n_;
};

// Cosine similarity of unit-normalized rows shifted by +1 into [0, 2].
// All-zero rows normalize to the zero vector.
SimilarityMatrix cosine_similarity(const FeatureMatrix& features, int workers = 1);

struct FacilityLocationResult {
  std::vector<std::size_t> order;  // selection order
  std::vector<double> gains;       // marginal gain of each pick
  double value = 0.0;              // f(S) = sum_i max_{j in S} sim(i, j)
};

// Lazy greedy maximization of the facility-location function. Picks match
// plain greedy with lowest-index tie-breaking.
FacilityLocationResult facility_location_select(const SimilarityMatrix& sim, std::size_t budget,
                                                int workers = 1);

// Same, computing cosine+1 similarity columns on the fly (O(n) memory).
FacilityLocationResult facility_location_select(const FeatureMatrix& features, std::size_t budget,
                                                int workers = 1);

// f(S) for an arbitrary subset.
double facility_location_value(const SimilarityMatrix& sim, std::span<const std::size_t> subset);

}  // namespace s2l

#endif  // S2L_BASELINES_HPP_
