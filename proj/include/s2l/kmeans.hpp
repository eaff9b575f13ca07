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

#ifndef S2L_KMEANS_HPP_
#define S2L_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2l/trajectory.hpp"

namespace s2l {

enum class Normalization { kNone, kZScore };

std::string_view normalization_name(Normalization n);
Normalization parse_normalization(std::string_view name);

struct KMeansOptions {
  std::size_t k = 100;
  std::size_t iters = 20;
  std::uint64_t seed = 0;
  Normalization normalize = Normalization::kNone;
  int workers = 1;  // never affects the result
};

// Fitted k-means partition of a trajectory store.
//
// Centroids live in the (possibly normalized) trajectory space; the per-column
// mean/scale used for normalization travel with the model so assign() can map
// new stores into the same space.
struct ClusterModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;            // k x dim, row-major
  std::vector<std::uint32_t> assignments;   // one per example
  std::vector<std::string> ids;             // example ids, parallel to assignments
  double objective = 0.0;                   // within-cluster SSE
  std::vector<double> objective_history;    // after initial assignment, then per iteration
  std::uint64_t seed = 0;
  std::size_t iters_run = 0;
  Normalization normalize = Normalization::kNone;
  std::vector<double> column_mean;          // empty unless normalize == kZScore
  std::vector<double> column_scale;

  std::span<const double> centroid(std::size_t c) const {
    return std::span<const double>(centroids).subspan(c * dim, dim);
  }
  std::vector<std::size_t> cluster_sizes() const;
};

// Seeds with greedy k-means++ (2 + floor(ln K) candidates per step, keep the
// one that lowers the potential most), then runs up to `iters` Lloyd
// iterations, stopping once assignments no longer change. Rows are processed
// in lexicographic trajectory order, so permuting the store only permutes the
// assignments. Throws ArgumentError unless 1 <= K <= n and iters >= 1.
ClusterModel kmeans_fit(const TrajectoryStore& store, const KMeansOptions& options);

// Nearest-centroid assignment under the model's normalization; ties go to the
// lowest cluster index. Throws ArgumentError on a width mismatch.
std::vector<std::uint32_t> assign(const ClusterModel& model, const TrajectoryStore& store,
                                  int workers = 1);

// Within-cluster SSE of `assignments` against the model centroids.
double clustering_objective(const ClusterModel& model, const TrajectoryStore& store,
                            std::span<const std::uint32_t> assignments);

// Store rows mapped into the model space (row-major n x T doubles).
std::vector<double> working_matrix(const ClusterModel& model, const TrajectoryStore& store);

void write_cluster_model(const ClusterModel& model, const std::filesystem::path& path);
ClusterModel read_cluster_model(const std::filesystem::path& path);
std::string encode_cluster_model(const ClusterModel& model);
ClusterModel decode_cluster_model(std::string_view text);

}  // namespace s2l

#endif  // S2L_KMEANS_HPP_
