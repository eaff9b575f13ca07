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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "s2l/error.hpp"

namespace s2l {
namespace {

using nlohmann::ordered_json;

double quantile(const std::vector<std::size_t>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return static_cast<double>(sorted[lo]) * (1.0 - frac) + static_cast<double>(sorted[hi]) * frac;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

ordered_json shares_json(const std::vector<CountShare>& shares) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : shares) {
    ordered_json o;
    o["key"] = s.key;
    o["full"] = s.full;
    o["selected"] = s.selected;
    o["full_fraction"] = s.full_fraction;
    o["selected_fraction"] = s.selected_fraction;
    arr.push_back(std::move(o));
  }
  return arr;
}

void render_shares(std::ostringstream& os, const std::string& title,
                   const std::vector<CountShare>& shares) {
  std::size_t width = title.size();
  for (const auto& s : shares) width = std::max(width, s.key.size());
  os << std::left << std::setw(static_cast<int>(width)) << title << std::right << std::setw(10)
     << "full" << std::setw(9) << "frac" << std::setw(10) << "selected" << std::setw(9)
     << "frac" << "\n";
  for (const auto& s : shares) {
    os << std::left << std::setw(static_cast<int>(width)) << s.key << std::right
       << std::setw(10) << s.full << std::setw(9) << std::fixed << std::setprecision(4)
       << s.full_fraction << std::setw(10) << s.selected << std::setw(9) << s.selected_fraction
       << "\n";
  }
}

}  // namespace

double shannon_entropy(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) throw ArgumentError("labelings differ in length");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> joint;
  std::map<std::uint32_t, std::size_t> rows;
  std::map<std::uint32_t, std::size_t> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  double index = 0.0;
  for (const auto& [_, c] : joint) index += choose2(static_cast<double>(c));
  double sum_a = 0.0;
  for (const auto& [_, c] : rows) sum_a += choose2(static_cast<double>(c));
  double sum_b = 0.0;
  for (const auto& [_, c] : cols) sum_b += choose2(static_cast<double>(c));
  const double pairs = choose2(n);
  const double expected = pairs > 0.0 ? sum_a * sum_b / pairs : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

std::string centroid_shape(std::span<const double> centroid) {
  if (centroid.size() < 2) return "other";
  bool all_down = true;
  bool all_up = true;
  for (std::size_t j = 1; j < centroid.size(); ++j) {
    const double d = centroid[j] - centroid[j - 1];
    all_down = all_down && d < 0.0;
    all_up = all_up && d > 0.0;
  }
  if (all_down) return "down";
  if (all_up) return "up";
  return "other";
}

ClusterReport cluster_report(const ClusterModel& model) {
  ClusterReport r;
  r.k = model.k;
  r.n = model.assignments.size();
  r.objective = model.objective;
  r.iters_run = model.iters_run;
  r.sizes = model.cluster_sizes();
  for (std::size_t c = 0; c < model.k; ++c) {
    auto centroid = model.centroid(c);
    if (model.normalize == Normalization::kZScore) {
      // Classify in loss space, not the standardized one.
      std::vector<double> raw(centroid.begin(), centroid.end());
      for (std::size_t j = 0; j < raw.size(); ++j) {
        raw[j] = raw[j] * model.column_scale[j] + model.column_mean[j];
      }
      r.shapes.push_back(centroid_shape(raw));
    } else {
      r.shapes.push_back(centroid_shape(centroid));
    }
  }
  for (std::size_t s : r.sizes) {
    std::size_t bucket = 0;
    for (std::size_t v = s; v > 0; v >>= 1) ++bucket;
    if (r.size_histogram.size() <= bucket) r.size_histogram.resize(bucket + 1, 0);
    ++r.size_histogram[bucket];
  }
  auto sorted = r.sizes;
  std::sort(sorted.begin(), sorted.end());
  r.size_min = quantile(sorted, 0.0);
  r.size_q25 = quantile(sorted, 0.25);
  r.size_median = quantile(sorted, 0.5);
  r.size_q75 = quantile(sorted, 0.75);
  r.size_max = quantile(sorted, 1.0);
  return r;
}

SelectionReport selection_report(const SelectionManifest& manifest, const TrajectoryStore& store,
                                 const ClusterModel& model) {
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < store.size(); ++i) row_of.emplace(store.ids()[i], i);
  std::unordered_map<std::string_view, std::uint32_t> cluster_of;
  for (std::size_t i = 0; i < model.ids.size(); ++i) {
    cluster_of.emplace(model.ids[i], model.assignments[i]);
  }

  SelectionReport r;
  r.n = store.size();
  r.selected = manifest.entries.size();

  std::vector<std::size_t> cluster_full(model.k, 0);
  std::vector<std::size_t> cluster_sel(model.k, 0);
  std::vector<std::uint32_t> row_cluster(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto it = cluster_of.find(store.ids()[i]);
    if (it == cluster_of.end()) {
      throw IntegrityError("cluster model has no assignment for id '" + store.ids()[i] + "'");
    }
    row_cluster[i] = it->second;
    ++cluster_full[it->second];
  }

  const auto views = partition_by_source(store);
  std::unordered_map<std::string_view, std::size_t> source_slot;
  std::vector<std::size_t> source_full;
  std::vector<std::size_t> source_sel(views.size(), 0);
  for (std::size_t s = 0; s < views.size(); ++s) {
    source_slot.emplace(views[s].source, s);
    source_full.push_back(views[s].rows.size());
  }

  for (const auto& e : manifest.entries) {
    const auto it = row_of.find(e.id);
    if (it == row_of.end()) {
      throw IntegrityError("manifest id '" + e.id + "' is not in the trajectory store");
    }
    ++cluster_sel[row_cluster[it->second]];
    ++source_sel[source_slot.at(store.sources()[it->second])];
  }

  auto share = [&](std::string key, std::size_t full, std::size_t sel) {
    return CountShare{std::move(key), full, sel,
                      r.n ? static_cast<double>(full) / static_cast<double>(r.n) : 0.0,
                      r.selected ? static_cast<double>(sel) / static_cast<double>(r.selected)
                                 : 0.0};
  };
  for (std::size_t s = 0; s < views.size(); ++s) {
    r.sources.push_back(share(views[s].source, source_full[s], source_sel[s]));
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    r.clusters.push_back(share(std::to_string(c), cluster_full[c], cluster_sel[c]));
    if (cluster_full[c] > 0 && cluster_sel[c] == 0) r.uncovered_clusters.push_back(c);
  }
  r.full_source_entropy = shannon_entropy(source_full);
  r.selected_source_entropy = shannon_entropy(source_sel);
  r.full_cluster_entropy = shannon_entropy(cluster_full);
  r.selected_cluster_entropy = shannon_entropy(cluster_sel);
  return r;
}

ordered_json to_json(const ClusterReport& r) {
  ordered_json j;
  j["report"] = "clusters";
  j["k"] = r.k;
  j["n"] = r.n;
  j["objective"] = r.objective;
  j["iters_run"] = r.iters_run;
  j["sizes"] = r.sizes;
  j["size_histogram_log2"] = r.size_histogram;
  j["size_quantiles"] = {{"min", r.size_min},     {"q25", r.size_q25}, {"median", r.size_median},
                         {"q75", r.size_q75},     {"max", r.size_max}};
  j["centroid_shapes"] = r.shapes;
  return j;
}

ordered_json to_json(const SelectionReport& r) {
  ordered_json j;
  j["report"] = "selection";
  j["n"] = r.n;
  j["selected"] = r.selected;
  j["sources"] = shares_json(r.sources);
  j["clusters"] = shares_json(r.clusters);
  j["entropy"] = {{"full_source", r.full_source_entropy},
                  {"selected_source", r.selected_source_entropy},
                  {"full_cluster", r.full_cluster_entropy},
                  {"selected_cluster", r.selected_cluster_entropy}};
  j["uncovered_clusters"] = r.uncovered_clusters;
  return j;
}

std::string render_text(const ClusterReport& r) {
  std::ostringstream os;
  os << "clusters: k=" << r.k << " n=" << r.n << " objective=" << std::setprecision(10)
     << r.objective << " iters=" << r.iters_run << "\n";
  os << "sizes: min=" << r.size_min << " q25=" << r.size_q25 << " median=" << r.size_median
     << " q75=" << r.size_q75 << " max=" << r.size_max << "\n";
  os << std::left << std::setw(8) << "cluster" << std::right << std::setw(10) << "size"
     << "  shape\n";
  for (std::size_t c = 0; c < r.k; ++c) {
    os << std::left << std::setw(8) << c << std::right << std::setw(10) << r.sizes[c] << "  "
       << r.shapes[c] << "\n";
  }
  return os.str();
}

std::string render_text(const SelectionReport& r) {
  std::ostringstream os;
  os << "selection: " << r.selected << " of " << r.n << " examples\n";
  os << std::fixed << std::setprecision(4) << "cluster entropy: full=" << r.full_cluster_entropy
     << " selected=" << r.selected_cluster_entropy << "\n"
     << "source entropy:  full=" << r.full_source_entropy
     << " selected=" << r.selected_source_entropy << "\n";
  render_shares(os, "source", r.sources);
  render_shares(os, "cluster", r.clusters);
  os << "uncovered clusters:";
  if (r.uncovered_clusters.empty()) os << " none";
  for (auto c : r.uncovered_clusters) os << " " << c;
  os << "\n";
  return os.str();
}

}  // namespace s2l
