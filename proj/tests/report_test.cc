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

#include "s2l/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "s2l/error.hpp"
#include "s2l/selection.hpp"
#include "s2l/synthgen.hpp"
#include "test_util.hpp"

namespace s2l {
namespace {

// Store of n rows with a hand-made model assigning row i to labels[i].
struct Fixture {
  TrajectoryStore store;
  ClusterModel model;
};

Fixture labelled(const std::vector<std::uint32_t>& labels, std::size_t k) {
  std::vector<std::string> ids;
  std::vector<std::string> sources;
  std::vector<float> losses;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ids.push_back("r" + std::to_string(i));
    sources.push_back(i % 3 == 0 ? "web" : "code");
    losses.push_back(static_cast<float>(labels[i]));
    losses.push_back(0.0f);
  }
  ClusterModel model;
  model.k = k;
  model.dim = 2;
  for (std::size_t c = 0; c < k; ++c) {
    model.centroids.push_back(static_cast<double>(c));
    model.centroids.push_back(0.0);
  }
  model.assignments = labels;
  model.ids = ids;
  TrajectoryStore store(ids, sources, losses, {500, 1000});
  return {std::move(store), std::move(model)};
}

SelectionManifest manifest_of(const TrajectoryStore& store, const std::vector<std::size_t>& rows) {
  SelectionManifest m{"s2l", 0, rows.size(), 0, "", {}};
  for (std::size_t r : rows) {
    m.entries.push_back({store.ids()[r], store.sources()[r], 0, Round::kMain});
  }
  return m;
}

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(shannon_entropy(std::vector<std::size_t>{5}), 0.0);
  EXPECT_NEAR(shannon_entropy(std::vector<std::size_t>{3, 3, 3}), std::log(3.0), 1e-12);
  EXPECT_NEAR(shannon_entropy(std::vector<std::size_t>{1, 0, 1}), std::log(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(shannon_entropy(std::vector<std::size_t>{0, 0}), 0.0);
}

TEST(AdjustedRandIndex, KnownValues) {
  const std::vector<std::uint32_t> a = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, a), 1.0);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(a, std::vector<std::uint32_t>{5, 5, 2, 2}), 1.0);
  EXPECT_NEAR(adjusted_rand_index(a, std::vector<std::uint32_t>{0, 1, 0, 1}), -0.5, 1e-12);
  EXPECT_NEAR(adjusted_rand_index(a, std::vector<std::uint32_t>{0, 0, 1, 2}), 4.0 / 7.0, 1e-12);
  EXPECT_THROW(adjusted_rand_index(a, std::vector<std::uint32_t>{0}), ArgumentError);
}

TEST(CentroidShape, SignOfDifferences) {
  EXPECT_EQ(centroid_shape(std::vector<double>{4, 3, 2.5, 1}), "down");
  EXPECT_EQ(centroid_shape(std::vector<double>{1, 2, 3}), "up");
  EXPECT_EQ(centroid_shape(std::vector<double>{1, 2, 2}), "other");
  EXPECT_EQ(centroid_shape(std::vector<double>{3, 1, 2}), "other");
  EXPECT_EQ(centroid_shape(std::vector<double>{3}), "other");
}

TEST(ClusterReport, SingleClusterAndQuantiles) {
  auto f = labelled(std::vector<std::uint32_t>(37, 0), 1);
  auto r = cluster_report(f.model);
  EXPECT_EQ(r.sizes, (std::vector<std::size_t>{37}));
  EXPECT_EQ(r.size_median, 37.0);

  f = labelled({0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3}, 5);
  r = cluster_report(f.model);
  EXPECT_EQ(r.sizes, (std::vector<std::size_t>{1, 2, 4, 8, 0}));
  // Sorted sizes 0 1 2 4 8.
  EXPECT_EQ(r.size_min, 0.0);
  EXPECT_EQ(r.size_q25, 1.0);
  EXPECT_EQ(r.size_median, 2.0);
  EXPECT_EQ(r.size_max, 8.0);
  EXPECT_EQ(r.size_histogram, (std::vector<std::size_t>{1, 1, 1, 1, 1}));
  const auto j = to_json(r);
  for (const char* key : {"k", "n", "objective", "iters_run", "sizes", "size_histogram_log2", "size_quantiles", "centroid_shapes"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NE(render_text(r).find("clusters"), std::string::npos);
}

TEST(ClusterReport, PlantedSizesRecovered) {
  std::vector<TemplateSpec> templates;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> level(0.0, 8.0);
  std::vector<std::size_t> planted;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> base(6);
    for (auto& b : base) b = level(gen);
    planted.push_back(10 + 7 * t);
    templates.push_back({"p" + std::to_string(t), Shape::kExplicit, base, planted.back(), 0.0});
  }
  const auto data = generate(templates, 6, 2);
  KMeansOptions opts;
  opts.k = 20;
  auto sizes = cluster_report(kmeans_fit(data.store, opts)).sizes;
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, planted);
}

TEST(SelectionReport, FullSelectionMatchesDataset) {
  std::mt19937_64 gen(3);
  std::vector<std::uint32_t> labels(60);
  for (auto& l : labels) l = static_cast<std::uint32_t>(gen() % 4);
  const auto f = labelled(labels, 4);
  std::vector<std::size_t> all(60);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto r = selection_report(manifest_of(f.store, all), f.store, f.model);
  EXPECT_EQ(r.selected, 60u);
  EXPECT_DOUBLE_EQ(r.full_cluster_entropy, r.selected_cluster_entropy);
  EXPECT_DOUBLE_EQ(r.full_source_entropy, r.selected_source_entropy);
  for (const auto& c : r.clusters) EXPECT_EQ(c.full, c.selected);
  ASSERT_EQ(r.sources.size(), 2u);
  EXPECT_EQ(r.sources[0].key, "web");
  EXPECT_TRUE(r.uncovered_clusters.empty());
}

TEST(SelectionReport, BalancedSelectionFlattensSkew) {
  std::vector<std::uint32_t> labels;
  labels.insert(labels.end(), 900, 0);
  labels.insert(labels.end(), 50, 1);
  labels.insert(labels.end(), 50, 2);
  const auto f = labelled(labels, 3);
  std::vector<std::size_t> rows;
  for (const auto& p : balanced_select(labels, 90, 11)) rows.push_back(p.row);
  const auto r = selection_report(manifest_of(f.store, rows), f.store, f.model);
  EXPECT_GE(r.selected_cluster_entropy, r.full_cluster_entropy);
  EXPECT_NEAR(r.selected_cluster_entropy, std::log(3.0), 1e-12);
  EXPECT_NEAR(r.full_cluster_entropy,
              -(0.9 * std::log(0.9) + 2 * 0.05 * std::log(0.05)), 1e-12);
  std::size_t full = 0;
  std::size_t sel = 0;
  for (const auto& c : r.clusters) {
    full += c.full;
    sel += c.selected;
  }
  EXPECT_EQ(full, 1000u);
  EXPECT_EQ(sel, 90u);
  EXPECT_TRUE(r.uncovered_clusters.empty());
  EXPECT_LE(r.selected_cluster_entropy, std::log(3.0) + 1e-12);
}

TEST(SelectionReport, FlagsUncoveredAndRejectsUnknownIds) {
  const auto f = labelled({0, 0, 1, 1, 2, 2}, 4);
  const auto r = selection_report(manifest_of(f.store, {0, 2}), f.store, f.model);
  // Cluster 3 is empty, so only cluster 2 counts as uncovered.
  EXPECT_EQ(r.uncovered_clusters, (std::vector<std::size_t>{2}));
  const auto j = to_json(r);
  EXPECT_EQ(j.at("uncovered_clusters"), nlohmann::json::array({2}));
  EXPECT_FALSE(render_text(r).empty());

  auto bad = manifest_of(f.store, {1});
  bad.entries[0].id = "nope";
  EXPECT_THROW(selection_report(bad, f.store, f.model), IntegrityError);
  auto partial = f.model;
  partial.ids[5] = "elsewhere";
  EXPECT_THROW(selection_report(manifest_of(f.store, {1}), f.store, partial), IntegrityError);
}

}  // namespace
}  // namespace s2l
