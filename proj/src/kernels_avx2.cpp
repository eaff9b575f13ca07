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

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace s2l::kernels::avx2 {
namespace {

// Matches scalar::combine: (l0 + l2) + (l1 + l3).
inline double reduce(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = reduce(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double total = reduce(acc);
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
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(candidate + i), _mm256_loadu_pd(coverage + i));
    acc = _mm256_add_pd(acc, _mm256_max_pd(d, zero));
  }
  double total = reduce(acc);
  for (; i < n; ++i) {
    const double d = candidate[i] - coverage[i];
    total += d > 0.0 ? d : 0.0;
  }
  return total;
}

void raise_coverage(const double* candidate, double* coverage, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(coverage + i,
                     _mm256_max_pd(_mm256_loadu_pd(coverage + i), _mm256_loadu_pd(candidate + i)));
  }
  for (; i < n; ++i) coverage[i] = coverage[i] > candidate[i] ? coverage[i] : candidate[i];
}

}  // namespace

const KernelTable kTable = {squared_distance, dot, nearest_centroid, coverage_gain,
                            raise_coverage};

}  // namespace s2l::kernels::avx2
