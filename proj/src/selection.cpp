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

#include "s2l/selection.hpp"

#include <algorithm>
#include <numeric>

#include "s2l/error.hpp"
#include "s2l/kernels.hpp"
#include "s2l/random.hpp"

namespace s2l {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Largest-remainder split of `amount` over `weights` (all eligible weights
// positive). Ineligible entries (eligible[i] == false) receive nothing.
std::vector<std::size_t> largest_remainder(std::span<const std::size_t> weights,
                                           const std::vector<bool>& eligible,
                                           std::size_t amount) {
  const std::size_t m = weights.size();
  std::vector<std::size_t> out(m, 0);
  unsigned __int128 total = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (eligible[i]) total += weights[i];
  }
  if (total == 0 || amount == 0) return out;
  std::vector<unsigned __int128> remainder(m, 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!eligible[i]) continue;
    const unsigned __int128 scaled = static_cast<unsigned __int128>(amount) * weights[i];
    out[i] = static_cast<std::size_t>(scaled / total);
    remainder[i] = scaled % total;
    assigned += out[i];
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < m; ++i) {
    if (eligible[i]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t r = 0; assigned < amount; ++r, ++assigned) ++out[order[r % order.size()]];
  return out;
}

}  // namespace

void SelectionConfig::validate() const {
  if (budget == 0) throw ArgumentError("budget must be >= 1");
  if (k == 0) throw ArgumentError("K must be >= 1");
  if (kmeans_iters == 0) throw ArgumentError("k-means iterations must be >= 1");
}

ordered_json SelectionConfig::to_json() const {
  ordered_json j;
  j["budget"] = budget;
  j["k"] = k;
  j["kmeans_iters"] = kmeans_iters;
  j["seed"] = seed;
  j["per_source"] = per_source;
  j["normalize"] = normalization_name(normalize);
  j["topup"] = topup;
  return j;
}

void SelectionConfig::merge_json(const json& j) {
  try {
    if (j.contains("budget")) budget = j.at("budget").get<std::size_t>();
    if (j.contains("k")) k = j.at("k").get<std::size_t>();
    if (j.contains("kmeans_iters")) kmeans_iters = j.at("kmeans_iters").get<std::size_t>();
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("per_source")) per_source = j.at("per_source").get<bool>();
    if (j.contains("normalize")) normalize = parse_normalization(j.at("normalize").get<std::string>());
    if (j.contains("topup")) topup = j.at("topup").get<bool>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("selection config: ") + e.what());
  }
}

std::vector<SelectedRow> balanced_select(std::span<const std::uint32_t> assignments,
                                         std::size_t budget, std::uint64_t seed, bool topup) {
  const std::size_t n = assignments.size();
  std::uint32_t k = 0;
  for (auto a : assignments) k = std::max(k, a + 1);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[assignments[i]].push_back(i);

  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return members[a].size() < members[b].size();
  });

  Rng rng(seed);
  std::vector<SelectedRow> out;
  out.reserve(std::min(budget, n));
  std::vector<char> taken(n, 0);
  for (std::size_t step = 0; step < k; ++step) {
    const std::uint32_t c = order[step];
    const std::size_t remaining_clusters = k - step;
    const std::size_t share = (budget - out.size()) / remaining_clusters;
    std::vector<std::size_t> pick;
    if (members[c].size() <= share) {
      pick = members[c];
    } else {
      pick = sample_without_replacement(members[c], share, rng);
      std::sort(pick.begin(), pick.end());
    }
    for (std::size_t row : pick) {
      out.push_back({row, c, Round::kMain});
      taken[row] = 1;
    }
  }

  const std::size_t target = std::min(budget, n);
  if (topup && out.size() < target) {
    std::vector<std::size_t> pool;
    pool.reserve(n - out.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) pool.push_back(i);
    }
    auto fill = sample_without_replacement(pool, target - out.size(), rng);
    std::sort(fill.begin(), fill.end());
    for (std::size_t row : fill) out.push_back({row, assignments[row], Round::kTopup});
  }
  return out;
}

std::vector<std::size_t> allocate_budgets(std::span<const std::size_t> source_sizes,
                                          std::size_t budget) {
  const std::size_t m = source_sizes.size();
  if (m == 0) throw ArgumentError("no sources to allocate budget to");
  std::size_t total = 0;
  for (std::size_t s : source_sizes) {
    if (s == 0) throw ArgumentError("source sizes must be positive");
    total += s;
  }
  const std::size_t target = std::min(budget, total);

  std::vector<bool> eligible(m, true);
  std::vector<std::size_t> alloc = largest_remainder(source_sizes, eligible, target);

  if (target >= m) {
    for (std::size_t i = 0; i < m; ++i) {
      if (alloc[i] != 0) continue;
      const auto donor = static_cast<std::size_t>(
          std::max_element(alloc.begin(), alloc.end()) - alloc.begin());
      --alloc[donor];
      alloc[i] = 1;
    }
  }

  for (;;) {
    std::size_t excess = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (alloc[i] > source_sizes[i]) {
        excess += alloc[i] - source_sizes[i];
        alloc[i] = source_sizes[i];
      }
      eligible[i] = alloc[i] < source_sizes[i];
    }
    if (excess == 0) break;
    const auto extra = largest_remainder(source_sizes, eligible, excess);
    for (std::size_t i = 0; i < m; ++i) alloc[i] += extra[i];
  }
  return alloc;
}

S2LResult s2l_run(const TrajectoryStore& store, const SelectionConfig& config, int workers) {
  config.validate();
  S2LResult result;
  SelectionManifest& manifest = result.manifest;
  manifest.tool = "s2l";
  manifest.seed = config.seed;
  manifest.budget = config.budget;
  manifest.k = config.k;
  manifest.config_digest = config_digest(config.to_json(), store_digest(store));

  std::int64_t cluster_offset = 0;
  auto run_one = [&](const std::string& source, std::vector<std::size_t> rows,
                     std::size_t budget, std::uint64_t seed) {
    SourceRun run{source, std::move(rows), budget, {}};
    if (budget > 0) {
      const TrajectoryStore sub = select_rows(store, run.rows);
      KMeansOptions opts{std::min(config.k, sub.size()), config.kmeans_iters, seed,
                         config.normalize, workers};
      run.model = kmeans_fit(sub, opts);
      const auto picked =
          balanced_select(run.model.assignments, budget, mix_seed(seed, 1), config.topup);
      for (const auto& p : picked) {
        const std::size_t row = run.rows[p.row];
        manifest.entries.push_back(
            {store.ids()[row], store.sources()[row],
             cluster_offset + static_cast<std::int64_t>(p.cluster), p.round});
      }
      cluster_offset += static_cast<std::int64_t>(run.model.k);
    }
    result.runs.push_back(std::move(run));
  };

  if (config.per_source) {
    auto views = partition_by_source(store);
    std::vector<std::size_t> sizes;
    for (const auto& v : views) sizes.push_back(v.rows.size());
    const auto budgets = allocate_budgets(sizes, config.budget);
    for (std::size_t s = 0; s < views.size(); ++s) {
      run_one(views[s].source, std::move(views[s].rows), budgets[s],
              derive_seed(config.seed, views[s].source));
    }
  } else {
    std::vector<std::size_t> rows(store.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    run_one("", std::move(rows), config.budget, config.seed);
  }
  return result;
}

ClusterModel combined_model(const S2LResult& result, const TrajectoryStore& store) {
  if (result.runs.size() == 1 && result.runs.front().model.k > 0) {
    return result.runs.front().model;
  }
  ClusterModel out;
  out.dim = store.length();
  out.seed = result.manifest.seed;
  out.ids = store.ids();
  out.assignments.assign(store.size(), 0);
  for (const auto& run : result.runs) {
    const ClusterModel& m = run.model;
    if (m.k == 0) continue;
    for (std::size_t c = 0; c < m.k; ++c) {
      const auto centroid = m.centroid(c);
      for (std::size_t j = 0; j < m.dim; ++j) {
        double v = centroid[j];
        if (m.normalize == Normalization::kZScore) v = v * m.column_scale[j] + m.column_mean[j];
        out.centroids.push_back(v);
      }
    }
    for (std::size_t i = 0; i < run.rows.size(); ++i) {
      out.assignments[run.rows[i]] = static_cast<std::uint32_t>(out.k + m.assignments[i]);
    }
    out.k += m.k;
    out.iters_run = std::max(out.iters_run, m.iters_run);
  }
  if (out.k == 0) throw ArgumentError("selection produced no cluster models");
  // Rows of sources that received no budget were never clustered; attach each
  // to its nearest stacked centroid so the labeling covers the store.
  std::vector<bool> covered(store.size(), false);
  for (const auto& run : result.runs) {
    if (run.model.k == 0) continue;
    for (std::size_t r : run.rows) covered[r] = true;
  }
  const auto x = working_matrix(out, store);
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (covered[i]) continue;
    out.assignments[i] = static_cast<std::uint32_t>(kernels::nearest_centroid(
        std::span<const double>(x).subspan(i * out.dim, out.dim), out.centroids, nullptr));
  }
  out.objective = clustering_objective(out, store, out.assignments);
  return out;
}

}  // namespace s2l
