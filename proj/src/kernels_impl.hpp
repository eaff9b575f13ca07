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

#ifndef S2L_SRC_KERNELS_IMPL_HPP_
#define S2L_SRC_KERNELS_IMPL_HPP_

#include <cstddef>

namespace s2l::kernels {

struct KernelTable {
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  std::size_t (*nearest_centroid)(const double* row, const double* centroids, std::size_t k,
                                  std::size_t dim, double* best_distance);
  double (*coverage_gain)(const double* candidate, const double* coverage, std::size_t n);
  void (*raise_coverage)(const double* candidate, double* coverage, std::size_t n);
};

namespace scalar {
extern const KernelTable kTable;
}

#if defined(S2L_HAVE_AVX2_TU)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace s2l::kernels

#endif  // S2L_SRC_KERNELS_IMPL_HPP_
