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

#include "kernels_impl.hpp"

namespace s2l::kernels::scalar {
namespace {

// Four-lane reference order shared with the vector variants.
inline double combine(const double (&lane)[4]) {
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = a[i + l] - b[i + l];
      lane[l] += d * d;
    }
  }
  double total = combine(lane);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) lane[l] += a[i + l] * b[i + l];
  }
  double total = combine(lane);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

std::size_t nearest_centroid(const double* row, const double* centroids, std::size_t k,
                             std::size_t dim, double* best_distance) {
  std::size_t best = 0;
  double best_d = squared_distance(row, centroids, dim);
  for (std::size_t c = 1; c < k; ++c) {
    const double d = squared_distance(row, centroids + c * dim, dim);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_distance != nullptr) *best_distance = best_d;
  return best;
}

double coverage_gain(const double* candidate, const double* coverage, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = candidate[i + l] - coverage[i + l];
      lane[l] += d > 0.0 ? d : 0.0;
    }
  }
  double total = combine(lane);
  for (; i < n; ++i) {
    const double d = candidate[i] - coverage[i];
    total += d > 0.0 ? d : 0.0;
  }
  return total;
}

void raise_coverage(const double* candidate, double* coverage, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    coverage[i] = coverage[i] > candidate[i] ? coverage[i] : candidate[i];
  }
}

}  // namespace

const KernelTable kTable = {squared_distance, dot, nearest_centroid, coverage_gain,
                            raise_coverage};

}  // namespace s2l::kernels::scalar
