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

#ifndef S2L_REPORT_HPP_
#define S2L_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2l/kmeans.hpp"
#include "s2l/manifest.hpp"
#include "s2l/trajectory.hpp"

namespace s2l {

// Shannon entropy (nats) of a count vector; 0 log 0 = 0.
double shannon_entropy(std::span<const std::size_t> counts);

// Chance-corrected agreement between two labelings of the same items
// (1.0 = identical up to relabeling). Defined as 1.0 when both labelings are
// a single cluster or all singletons.
double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// "down" if every first difference is negative, "up" if every one is
// positive, otherwise "other" (including T = 1).
std::string centroid_shape(std::span<const double> centroid);

struct ClusterReport {
  std::size_t k = 0;
  std::size_t n = 0;
  double objective = 0.0;
  std::size_t iters_run = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::string> shapes;
  // Buckets [1, 2), [2, 4), [4, 8), ... ; bucket 0 counts empty clusters.
  std::vector<std::size_t> size_histogram;
  double size_min = 0, size_q25 = 0, size_median = 0, size_q75 = 0, size_max = 0;
};

ClusterReport cluster_report(const ClusterModel& model);

struct CountShare {
  std::string key;
  std::size_t full = 0;
  std::size_t selected = 0;
  double full_fraction = 0.0;
  double selected_fraction = 0.0;
};

struct SelectionReport {
  std::size_t n = 0;
  std::size_t selected = 0;
  std::vector<CountShare> sources;   // first-appearance order in the store
  std::vector<CountShare> clusters;  // by cluster index
  double full_source_entropy = 0.0;
  double selected_source_entropy = 0.0;
  double full_cluster_entropy = 0.0;
  double selected_cluster_entropy = 0.0;
  std::vector<std::size_t> uncovered_clusters;  // non-empty clusters with no selected example
};

// Compares the selected subset against the full store. Cluster membership
// comes from `model` (matched by id). Throws IntegrityError when the manifest
// names an id missing from the store or the model does not cover the store.
SelectionReport selection_report(const SelectionManifest& manifest, const TrajectoryStore& store,
                                 const ClusterModel& model);

nlohmann::ordered_json to_json(const ClusterReport& report);
nlohmann::ordered_json to_json(const SelectionReport& report);
std::string render_text(const ClusterReport& report);
std::string render_text(const SelectionReport& report);

}  // namespace s2l

#endif  // S2L_REPORT_HPP_
