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

#ifndef S2L_TRAJECTORY_HPP_
#define S2L_TRAJECTORY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s2l {

// Per-example loss trajectories: n examples by T checkpoints.
//
// A loss entry is the mean per-token negative log-likelihood (nats) of the
// example under the reference model at that checkpoint. The store is
// validated on construction and immutable afterwards.
class TrajectoryStore {
 public:
  // Throws FormatError when any invariant fails: n >= 1, T >= 1, unique ids,
  // one source per id, finite non-negative losses, strictly increasing steps.
  TrajectoryStore(std::vector<std::string> ids, std::vector<std::string> sources,
                  std::vector<float> losses, std::vector<std::uint64_t> checkpoint_steps);

  std::size_t size() const { return ids_.size(); }
  std::size_t length() const { return steps_.size(); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& sources() const { return sources_; }
  const std::vector<std::uint64_t>& checkpoint_steps() const { return steps_; }

  // Row-major n x T.
  std::span<const float> losses() const { return losses_; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(losses_).subspan(i * length(), length());
  }
  float at(std::size_t i, std::size_t j) const { return losses_[i * length() + j]; }

  friend bool operator==(const TrajectoryStore&, const TrajectoryStore&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> sources_;
  std::vector<float> losses_;
  std::vector<std::uint64_t> steps_;
};

// Default label for column j when a file carries no step header: one
// checkpoint every 500 training iterations.
inline std::uint64_t default_checkpoint_step(std::size_t column) {
  return 500 * (static_cast<std::uint64_t>(column) + 1);
}

enum class Stat { kFinalLoss, kEarlyLoss, kLearnability, kPerplexity, kConfidence };

std::string_view stat_name(Stat stat);
Stat parse_stat(std::string_view name);

struct ScoreVector {
  std::vector<std::string> ids;
  std::vector<double> scores;
  Stat stat;
};

// Dense n x d features (e.g. reference-model hidden states).
class FeatureMatrix {
 public:
  // Throws FormatError unless d >= 1, rows == ids and all entries finite.
  FeatureMatrix(std::vector<std::string> ids, std::vector<float> features, std::size_t dim);

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> values() const { return features_; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(features_).subspan(i * dim_, dim_);
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<float> features_;
  std::size_t dim_;
};

// Keeps the checkpoint columns listed in `keep` (non-empty, strictly
// increasing, each < T). Throws ArgumentError otherwise.
TrajectoryStore subsample_checkpoints(const TrajectoryStore& store,
                                      std::span<const std::size_t> keep);

// Column sets for trajectory ablations.
//
// uniform_checkpoints(T, L): L columns spread evenly, column j = floor(j*T/L).
// window_checkpoints(T, L, stage): L consecutive columns at the start, the
// centre (offset floor((T-L)/2)) or the end of training.
enum class Stage { kEarly, kMiddle, kLate };
std::vector<std::size_t> uniform_checkpoints(std::size_t total, std::size_t length);
std::vector<std::size_t> window_checkpoints(std::size_t total, std::size_t length, Stage stage);

// learnability = loss[early] - loss[late]; perplexity = exp(loss[late]);
// confidence = exp(-loss[late]); final/early loss read the last/first column.
ScoreVector derive_scalar(const TrajectoryStore& store, Stat stat, std::size_t early_index,
                          std::size_t late_index);

struct SourceView {
  std::string source;
  std::vector<std::size_t> rows;
};

// One view per source tag, in order of first appearance; rows keep store order.
std::vector<SourceView> partition_by_source(const TrajectoryStore& store);

// Sub-store holding `rows` (in the given order).
TrajectoryStore select_rows(const TrajectoryStore& store, std::span<const std::size_t> rows);

// ---- file formats ----

enum class TrajectoryFormat { kJsonl, kBinary };

// ".bin" selects binary, anything else JSONL.
TrajectoryFormat format_from_path(const std::filesystem::path& path);
TrajectoryFormat parse_format(std::string_view name);

TrajectoryStore read_trajectories_jsonl(std::istream& in);
TrajectoryStore read_trajectories_binary(std::istream& in);
void write_trajectories_jsonl(const TrajectoryStore& store, std::ostream& out);
void write_trajectories_binary(const TrajectoryStore& store, std::ostream& out);

TrajectoryStore load_trajectories(const std::filesystem::path& path, TrajectoryFormat format);
void write_trajectories(const TrajectoryStore& store, const std::filesystem::path& path,
                        TrajectoryFormat format);

FeatureMatrix read_features_binary(std::istream& in);
void write_features_binary(const FeatureMatrix& features, std::ostream& out);
FeatureMatrix load_features(const std::filesystem::path& path);
void write_features(const FeatureMatrix& features, const std::filesystem::path& path);

// Bytes of the binary encoding; the canonical input for digests.
std::string encode_trajectories_binary(const TrajectoryStore& store);

}  // namespace s2l

#endif  // S2L_TRAJECTORY_HPP_
