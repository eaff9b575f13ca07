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

#ifndef S2L_KERNELS_HPP_
#define S2L_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>

// Inner-loop arithmetic for clustering and facility location.
//
// Every kernel has a scalar reference and, on x86-64, an AVX2 variant chosen
// at runtime. Reductions run over four double lanes in a fixed order
// (lane i accumulates elements i, i+4, ...; lanes combine as
// (l0 + l2) + (l1 + l3); the tail is added last, in index order) and never use
// fused multiply-add, so the two variants agree bit for bit.
namespace s2l::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// True when this build contains the variant and the CPU can run it.
bool isa_supported(Isa isa);

// Best supported variant; what the library uses unless overridden.
Isa detect_isa();

// Currently selected variant.
Isa active_isa();

// Forces a variant (tests, benchmarks). Throws ArgumentError if unsupported.
void set_active_isa(Isa isa);

// Sum over i of (a[i] - b[i])^2.
double squared_distance(std::span<const double> a, std::span<const double> b);

// Sum over i of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);

// Index of the centroid (row-major, centroids.size() / row.size() rows)
// closest to `row` in squared Euclidean distance; ties go to the lowest index.
// Writes the winning distance to *best_distance when non-null.
std::size_t nearest_centroid(std::span<const double> row, std::span<const double> centroids,
                             double* best_distance);

// Sum over i of max(0, candidate[i] - coverage[i]).
double coverage_gain(std::span<const double> candidate, std::span<const double> coverage);

// coverage[i] = max(coverage[i], candidate[i]).
void raise_coverage(std::span<const double> candidate, std::span<double> coverage);

}  // namespace s2l::kernels

#endif  // S2L_KERNELS_HPP_
