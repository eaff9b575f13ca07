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

#ifndef S2L_SELECTION_HPP_
#define S2L_SELECTION_HPP_

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

struct SelectionConfig {
  std::size_t budget = 0;
  std::size_t k = 100;
  std::size_t kmeans_iters = 20;
  std::uint64_t seed = 0;
  bool per_source = false;
  Normalization normalize = Normalization::kNone;
  bool topup = true;

  // Throws ArgumentError unless budget >= 1, k >= 1 and kmeans_iters >= 1.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  // Missing keys keep the current values.
  void merge_json(const nlohmann::json& j);
};

struct SelectedRow {
  std::size_t row;
  std::uint32_t cluster;
  Round round;
};

// Cluster-balanced sampling.
//
// Clusters are visited smallest first (equal sizes by ascending index). With
// m clusters still to visit and S selected so far, the visited cluster gets
// R = floor((B - |S|) / m) slots: it is taken whole if it fits, otherwise R
// members are drawn uniformly without replacement. Unused slots flow to the
// larger clusters that follow. With `topup`, any shortfall below min(B, n) is
// then filled uniformly from the unselected rows.
//
// Output lists clusters in visit order (members by ascending row), then the
// top-up rows by ascending row.
std::vector<SelectedRow> balanced_select(std::span<const std::uint32_t> assignments,
                                         std::size_t budget, std::uint64_t seed,
                                         bool topup = true);

// Splits `budget` across sources in proportion to their sizes.
//
// Largest-remainder rounding (remainder ties to the lower index); when the
// budget covers every source, a source rounded down to zero takes one slot
// from the currently largest allocation. Allocations above a source's size
// are capped and the overflow re-split over the uncapped sources by the same
// rule. The result sums to min(budget, sum of sizes).
std::vector<std::size_t> allocate_budgets(std::span<const std::size_t> source_sizes,
                                          std::size_t budget);

struct SourceRun {
  std::string source;
  std::vector<std::size_t> rows;  // store rows of this source
  std::size_t budget = 0;
  ClusterModel model;             // empty (k == 0) when the source got no budget
};

struct S2LResult {
  SelectionManifest manifest;
  std::vector<SourceRun> runs;  // one per source, or a single global run
};

// Manifest cluster indices are global: run r's clusters are numbered after
// those of runs 0..r-1.
//
// Stacks the per-run models into one labeling of the whole store (cluster
// numbering as in the manifest). A single global run is returned as is;
// stacked centroids are mapped back to raw loss space.
ClusterModel combined_model(const S2LResult& result, const TrajectoryStore& store);

// Clusters trajectories and samples the budget cluster-balanced, either once
// over the whole store or independently per source (budgets from
// allocate_budgets, K clamped to each source's size, seeds derived from
// (seed, source tag)), concatenating per-source results in source order.
S2LResult s2l_run(const TrajectoryStore& store, const SelectionConfig& config, int workers = 1);

inline SelectionManifest s2l_pipeline(const TrajectoryStore& store, const SelectionConfig& config,
                                      int workers = 1) {
  return s2l_run(store, config, workers).manifest;
}

}  // namespace s2l

#endif  // S2L_SELECTION_HPP_
