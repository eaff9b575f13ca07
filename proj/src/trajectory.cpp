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

#include "s2l/trajectory.hpp"

#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "s2l/error.hpp"

namespace s2l {

TrajectoryStore::TrajectoryStore(std::vector<std::string> ids, std::vector<std::string> sources,
                                 std::vector<float> losses,
                                 std::vector<std::uint64_t> checkpoint_steps)
    : ids_(std::move(ids)),
      sources_(std::move(sources)),
      losses_(std::move(losses)),
      steps_(std::move(checkpoint_steps)) {
  if (ids_.empty()) throw FormatError("trajectory store is empty");
  if (steps_.empty()) throw FormatError("trajectories must have at least one checkpoint");
  if (sources_.size() != ids_.size()) {
    throw FormatError("source tags (" + std::to_string(sources_.size()) +
                      ") do not match ids (" + std::to_string(ids_.size()) + ")");
  }
  if (losses_.size() != ids_.size() * steps_.size()) {
    throw FormatError("loss matrix has " + std::to_string(losses_.size()) +
                      " entries, expected " + std::to_string(ids_.size()) + " x " +
                      std::to_string(steps_.size()));
  }
  for (std::size_t j = 1; j < steps_.size(); ++j) {
    if (steps_[j] <= steps_[j - 1]) {
      throw FormatError("checkpoint steps must be strictly increasing (column " +
                        std::to_string(j) + ")");
    }
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids_.size());
  const std::size_t t = steps_.size();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) throw FormatError("duplicate id '" + ids_[i] + "'");
    for (std::size_t j = 0; j < t; ++j) {
      const float v = losses_[i * t + j];
      if (!std::isfinite(v) || v < 0.0f) {
        throw FormatError("id '" + ids_[i] + "' has invalid loss at column " +
                          std::to_string(j) + " (must be finite and >= 0)");
      }
    }
  }
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> ids, std::vector<float> features,
                             std::size_t dim)
    : ids_(std::move(ids)), features_(std::move(features)), dim_(dim) {
  if (dim_ == 0) throw FormatError("feature dimension must be >= 1");
  if (features_.size() != ids_.size() * dim_) {
    throw FormatError("feature matrix has " + std::to_string(features_.size()) +
                      " entries, expected " + std::to_string(ids_.size()) + " x " +
                      std::to_string(dim_));
  }
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) throw FormatError("duplicate id '" + ids_[i] + "'");
    for (std::size_t j = 0; j < dim_; ++j) {
      if (!std::isfinite(features_[i * dim_ + j])) {
        throw FormatError("id '" + ids_[i] + "' has a non-finite feature");
      }
    }
  }
}

std::string_view stat_name(Stat stat) {
  switch (stat) {
    case Stat::kFinalLoss:
      return "final_loss";
    case Stat::kEarlyLoss:
      return "early_loss";
    case Stat::kLearnability:
      return "learnability";
    case Stat::kPerplexity:
      return "perplexity";
    case Stat::kConfidence:
      return "confidence";
  }
  return "unknown";
}

Stat parse_stat(std::string_view name) {
  for (Stat s : {Stat::kFinalLoss, Stat::kEarlyLoss, Stat::kLearnability, Stat::kPerplexity,
                 Stat::kConfidence}) {
    if (stat_name(s) == name) return s;
  }
  throw ArgumentError("unknown statistic '" + std::string(name) + "'");
}

TrajectoryStore subsample_checkpoints(const TrajectoryStore& store,
                                      std::span<const std::size_t> keep) {
  if (keep.empty()) throw ArgumentError("checkpoint selection is empty");
  const std::size_t t = store.length();
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (keep[j] >= t) {
      throw ArgumentError("checkpoint index " + std::to_string(keep[j]) +
                          " out of range (T = " + std::to_string(t) + ")");
    }
    if (j > 0 && keep[j] <= keep[j - 1]) {
      throw ArgumentError("checkpoint indices must be strictly increasing");
    }
  }
  std::vector<float> losses;
  losses.reserve(store.size() * keep.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto row = store.row(i);
    for (std::size_t col : keep) losses.push_back(row[col]);
  }
  std::vector<std::uint64_t> steps;
  steps.reserve(keep.size());
  for (std::size_t col : keep) steps.push_back(store.checkpoint_steps()[col]);
  return TrajectoryStore(store.ids(), store.sources(), std::move(losses), std::move(steps));
}

std::vector<std::size_t> uniform_checkpoints(std::size_t total, std::size_t length) {
  if (length == 0 || length > total) {
    throw ArgumentError("trajectory length " + std::to_string(length) + " not in [1, " +
                        std::to_string(total) + "]");
  }
  std::vector<std::size_t> out(length);
  for (std::size_t j = 0; j < length; ++j) out[j] = j * total / length;
  return out;
}

std::vector<std::size_t> window_checkpoints(std::size_t total, std::size_t length, Stage stage) {
  if (length == 0 || length > total) {
    throw ArgumentError("trajectory length " + std::to_string(length) + " not in [1, " +
                        std::to_string(total) + "]");
  }
  std::size_t start = 0;
  switch (stage) {
    case Stage::kEarly:
      start = 0;
      break;
    case Stage::kMiddle:
      start = (total - length) / 2;
      break;
    case Stage::kLate:
      start = total - length;
      break;
  }
  std::vector<std::size_t> out(length);
  for (std::size_t j = 0; j < length; ++j) out[j] = start + j;
  return out;
}

ScoreVector derive_scalar(const TrajectoryStore& store, Stat stat, std::size_t early_index,
                          std::size_t late_index) {
  const std::size_t t = store.length();
  if (early_index >= t || late_index >= t) {
    throw ArgumentError("checkpoint index out of range (T = " + std::to_string(t) + ")");
  }
  ScoreVector out{store.ids(), std::vector<double>(store.size()), stat};
  for (std::size_t i = 0; i < store.size(); ++i) {
    const double early = store.at(i, early_index);
    const double late = store.at(i, late_index);
    double v = 0.0;
    switch (stat) {
      case Stat::kFinalLoss:
        v = store.at(i, t - 1);
        break;
      case Stat::kEarlyLoss:
        v = store.at(i, 0);
        break;
      case Stat::kLearnability:
        v = early - late;
        break;
      case Stat::kPerplexity:
        v = std::exp(late);
        break;
      case Stat::kConfidence:
        v = std::exp(-late);
        break;
    }
    if (!std::isfinite(v)) {
      throw ArgumentError("statistic " + std::string(stat_name(stat)) + " overflows for id '" +
                          store.ids()[i] + "'");
    }
    out.scores[i] = v;
  }
  return out;
}

std::vector<SourceView> partition_by_source(const TrajectoryStore& store) {
  std::vector<SourceView> views;
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < store.size(); ++i) {
    const std::string& src = store.sources()[i];
    auto [it, inserted] = slot.try_emplace(src, views.size());
    if (inserted) views.push_back(SourceView{src, {}});
    views[it->second].rows.push_back(i);
  }
  return views;
}

TrajectoryStore select_rows(const TrajectoryStore& store, std::span<const std::size_t> rows) {
  std::vector<std::string> ids;
  std::vector<std::string> sources;
  std::vector<float> losses;
  ids.reserve(rows.size());
  sources.reserve(rows.size());
  losses.reserve(rows.size() * store.length());
  for (std::size_t r : rows) {
    if (r >= store.size()) throw ArgumentError("row index out of range");
    ids.push_back(store.ids()[r]);
    sources.push_back(store.sources()[r]);
    const auto row = store.row(r);
    losses.insert(losses.end(), row.begin(), row.end());
  }
  return TrajectoryStore(std::move(ids), std::move(sources), std::move(losses),
                         store.checkpoint_steps());
}

}  // namespace s2l
