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

#include "s2l/kernels.hpp"

#include <atomic>
#include <string>

#include "kernels_impl.hpp"
#include "s2l/error.hpp"

namespace s2l::kernels {
namespace {

const KernelTable& table_for(Isa isa) {
#if defined(S2L_HAVE_AVX2_TU)
  if (isa == Isa::kAvx2) return avx2::kTable;
#endif
  (void)isa;
  return scalar::kTable;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&table_for(detect_isa())};
  return table;
}

std::atomic<Isa>& active_tag() {
  static std::atomic<Isa> tag{detect_isa()};
  return tag;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ArgumentError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                        std::to_string(b));
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(S2L_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() { return active_tag().load(); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ArgumentError("kernel variant not available: " + std::string(isa_name(isa)));
  }
  active_tag().store(isa);
  active_table().store(&table_for(isa));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return active_table().load()->squared_distance(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return active_table().load()->dot(a.data(), b.data(), a.size());
}

std::size_t nearest_centroid(std::span<const double> row, std::span<const double> centroids,
                             double* best_distance) {
  const std::size_t dim = row.size();
  if (dim == 0 || centroids.empty() || centroids.size() % dim != 0) {
    throw ArgumentError("centroid matrix width does not match row length");
  }
  return active_table().load()->nearest_centroid(row.data(), centroids.data(),
                                                 centroids.size() / dim, dim, best_distance);
}

double coverage_gain(std::span<const double> candidate, std::span<const double> coverage) {
  check_same_size(candidate.size(), coverage.size());
  return active_table().load()->coverage_gain(candidate.data(), coverage.data(),
                                              candidate.size());
}

void raise_coverage(std::span<const double> candidate, std::span<double> coverage) {
  check_same_size(candidate.size(), coverage.size());
  active_table().load()->raise_coverage(candidate.data(), coverage.data(), candidate.size());
}

}  // namespace s2l::kernels
