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

#include "s2l/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "s2l/error.hpp"
#include "s2l/kernels.hpp"
#include "s2l/parallel.hpp"
#include "s2l/random.hpp"

namespace s2l {
namespace {

using nlohmann::json;

// Tolerated relative rise of the objective between iterations (rounding only).
constexpr double kObjectiveSlack = 1e-9;

struct Matrix {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

// Row order in which the fit runs: lexicographic by trajectory, ties by
// store index. Makes the partition independent of input row order.
std::vector<std::size_t> canonical_order(const TrajectoryStore& store) {
  std::vector<std::size_t> order(store.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = store.row(a);
    const auto rb = store.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

Matrix gather(const TrajectoryStore& store, std::span<const std::size_t> order) {
  Matrix m{std::vector<double>(store.size() * store.length()), store.size(), store.length()};
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto r = store.row(order[p]);
    std::copy(r.begin(), r.end(), m.values.begin() + static_cast<std::ptrdiff_t>(p * m.cols));
  }
  return m;
}

void column_stats(const Matrix& x, std::vector<double>& mean, std::vector<double>& scale) {
  mean.assign(x.cols, 0.0);
  scale.assign(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) mean[j] += x.values[i * x.cols + j];
  }
  for (double& m : mean) m /= static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = x.values[i * x.cols + j] - mean[j];
      scale[j] += d * d;
    }
  }
  for (double& s : scale) {
    s = std::sqrt(s / static_cast<double>(x.rows));
    if (!(s > 0.0)) s = 1.0;
  }
}

void normalize_in_place(Matrix& m, std::span<const double> mean, std::span<const double> scale) {
  if (mean.empty()) return;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      double& v = m.values[i * m.cols + j];
      v = (v - mean[j]) / scale[j];
    }
  }
}

Matrix to_working(const TrajectoryStore& store, std::span<const double> mean,
                  std::span<const double> scale) {
  Matrix m{std::vector<double>(store.losses().begin(), store.losses().end()), store.size(),
           store.length()};
  normalize_in_place(m, mean, scale);
  return m;
}

// Sums per-block partials in block order.
double ordered_sum(std::span<const double> partials) {
  double total = 0.0;
  for (double p : partials) total += p;
  return total;
}

// Assigns every row to its nearest centroid; returns the SSE and fills
// `dist` with each row's squared distance.
double assign_rows(const Matrix& x, std::span<const double> centroids, int workers,
                   std::vector<std::uint32_t>& labels, std::vector<double>& dist) {
  labels.resize(x.rows);
  dist.resize(x.rows);
  std::vector<double> partial(block_count(x.rows, kRowBlock), 0.0);
  for_each_block(x.rows, kRowBlock, workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      double d = 0.0;
      labels[i] = static_cast<std::uint32_t>(kernels::nearest_centroid(x.row(i), centroids, &d));
      dist[i] = d;
      sum += d;
    }
    partial[b] = sum;
  });
  return ordered_sum(partial);
}

// Greedy k-means++ seeding.
std::vector<double> seed_centroids(const Matrix& x, std::size_t k, Rng& rng, int workers) {
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;
  const std::size_t blocks = block_count(n, kRowBlock);
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

  std::vector<double> centroids;
  centroids.reserve(k * dim);
  std::vector<char> chosen(n, 0);
  auto take = [&](std::size_t i) {
    const auto r = x.row(i);
    centroids.insert(centroids.end(), r.begin(), r.end());
    chosen[i] = 1;
  };

  std::vector<double> d2(n);
  std::vector<double> partial(blocks);
  const std::size_t first = rng.uniform_below(n);
  take(first);
  for_each_block(n, kRowBlock, workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      d2[i] = kernels::squared_distance(x.row(i), x.row(first));
      sum += d2[i];
    }
    partial[b] = sum;
  });
  double potential = ordered_sum(partial);

  std::vector<double> block_sums(partial);
  std::vector<double> cand_d2(n);
  std::vector<double> best_d2(n);
  for (std::size_t c = 1; c < k; ++c) {
    if (!(potential > 0.0)) {
      // Every row coincides with a chosen centre; fall back to the lowest
      // unused row so centroids stay distinct rows.
      std::size_t i = 0;
      while (chosen[i]) ++i;
      take(i);
      continue;
    }
    std::size_t best_idx = n;
    std::vector<double> best_partial;
    double best_potential = std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trials; ++trial) {
      // Draw a row with probability proportional to d2.
      double target = rng.uniform01() * potential;
      std::size_t pick = n;
      for (std::size_t b = 0; b < blocks && pick == n; ++b) {
        if (target >= block_sums[b] && b + 1 < blocks) {
          target -= block_sums[b];
          continue;
        }
        const std::size_t lo = b * kRowBlock;
        const std::size_t hi = std::min(n, lo + kRowBlock);
        for (std::size_t i = lo; i < hi; ++i) {
          if (d2[i] > 0.0) {
            pick = i;
            if (target < d2[i]) break;
            target -= d2[i];
          }
        }
        // Rounding overshoot: fall through with the last positive row seen.
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }

      std::vector<double> cand_partial(blocks);
      for_each_block(n, kRowBlock, workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          cand_d2[i] = std::min(d2[i], kernels::squared_distance(x.row(i), x.row(pick)));
          sum += cand_d2[i];
        }
        cand_partial[b] = sum;
      });
      const double cand_potential = ordered_sum(cand_partial);
      if (cand_potential < best_potential) {
        best_potential = cand_potential;
        best_idx = pick;
        best_d2.swap(cand_d2);
        best_partial = std::move(cand_partial);
      }
    }
    take(best_idx);
    d2.swap(best_d2);
    block_sums = std::move(best_partial);
    potential = best_potential;
  }
  return centroids;
}

// Recomputes centroids as cluster means; partial sums are formed per row
// block and reduced in block order.
std::vector<std::size_t> update_means(const Matrix& x, std::size_t k,
                                      std::span<const std::uint32_t> labels, int workers,
                                      std::vector<double>& centroids) {
  const std::size_t dim = x.cols;
  const std::size_t blocks = block_count(x.rows, kRowBlock);
  std::vector<double> sums(blocks * k * dim, 0.0);
  std::vector<std::size_t> counts(blocks * k, 0);
  for_each_block(x.rows, kRowBlock, workers, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double* s = sums.data() + b * k * dim;
    std::size_t* cnt = counts.data() + b * k;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint32_t c = labels[i];
      const auto r = x.row(i);
      for (std::size_t j = 0; j < dim; ++j) s[c * dim + j] += r[j];
      ++cnt[c];
    }
  });
  std::vector<std::size_t> total(k, 0);
  std::vector<double> acc(k * dim, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t c = 0; c < k; ++c) total[c] += counts[b * k + c];
    for (std::size_t e = 0; e < k * dim; ++e) acc[e] += sums[b * k * dim + e];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (total[c] == 0) continue;  // keeps its old centroid until repaired
    for (std::size_t j = 0; j < dim; ++j) {
      centroids[c * dim + j] = acc[c * dim + j] / static_cast<double>(total[c]);
    }
  }
  return total;
}

// Gives every empty cluster the row farthest from its own centroid (taken
// only from clusters that keep at least one member). Returns true if
// anything moved.
bool repair_empty(const Matrix& x, std::size_t k, std::vector<std::uint32_t>& labels,
                  std::vector<std::size_t>& sizes, std::vector<double>& centroids) {
  const std::size_t dim = x.cols;
  bool moved = false;
  std::vector<double> own;
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    if (own.empty()) {
      own.resize(x.rows);
      for (std::size_t i = 0; i < x.rows; ++i) {
        own[i] = kernels::squared_distance(
            x.row(i), std::span<const double>(centroids).subspan(labels[i] * dim, dim));
      }
    }
    std::size_t far = x.rows;
    for (std::size_t i = 0; i < x.rows; ++i) {
      if (sizes[labels[i]] < 2) continue;
      if (far == x.rows || own[i] > own[far]) far = i;
    }
    if (far == x.rows) throw std::logic_error("k-means repair: no donor cluster");
    --sizes[labels[far]];
    labels[far] = static_cast<std::uint32_t>(c);
    sizes[c] = 1;
    own[far] = 0.0;
    const auto r = x.row(far);
    std::copy(r.begin(), r.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
    moved = true;
  }
  return moved;
}

std::vector<std::size_t> count_labels(std::span<const std::uint32_t> labels, std::size_t k) {
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  return sizes;
}

double sse(const Matrix& x, std::span<const double> centroids,
           std::span<const std::uint32_t> labels) {
  const std::size_t dim = x.cols;
  std::vector<double> partial(block_count(x.rows, kRowBlock), 0.0);
  for_each_block(x.rows, kRowBlock, 1, [&](std::size_t b, std::size_t lo, std::size_t hi) {
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum += kernels::squared_distance(x.row(i), centroids.subspan(labels[i] * dim, dim));
    }
    partial[b] = sum;
  });
  return ordered_sum(partial);
}

}  // namespace

std::string_view normalization_name(Normalization n) {
  return n == Normalization::kZScore ? "zscore" : "none";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "none") return Normalization::kNone;
  if (name == "zscore") return Normalization::kZScore;
  throw ArgumentError("unknown normalization '" + std::string(name) + "' (none|zscore)");
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  return count_labels(assignments, k);
}

ClusterModel kmeans_fit(const TrajectoryStore& store, const KMeansOptions& options) {
  const std::size_t n = store.size();
  const std::size_t k = options.k;
  if (k == 0) throw ArgumentError("K must be >= 1");
  if (k > n) {
    throw ArgumentError("K = " + std::to_string(k) + " exceeds example count " +
                        std::to_string(n));
  }
  if (options.iters == 0) throw ArgumentError("iteration count must be >= 1");

  ClusterModel model;
  model.k = k;
  model.dim = store.length();
  model.seed = options.seed;
  model.normalize = options.normalize;
  model.ids = store.ids();
  const auto order = canonical_order(store);
  Matrix x = gather(store, order);
  if (options.normalize == Normalization::kZScore) {
    column_stats(x, model.column_mean, model.column_scale);
    normalize_in_place(x, model.column_mean, model.column_scale);
  }
  const int workers = options.workers;

  Rng rng(options.seed);
  model.centroids = seed_centroids(x, k, rng, workers);

  std::vector<std::uint32_t> labels;
  std::vector<double> dist;
  double objective = assign_rows(x, model.centroids, workers, labels, dist);
  std::vector<std::size_t> sizes = count_labels(labels, k);
  if (repair_empty(x, k, labels, sizes, model.centroids)) {
    objective = sse(x, model.centroids, labels);
  }
  model.objective_history.push_back(objective);

  std::vector<std::uint32_t> next;
  for (std::size_t it = 1; it <= options.iters; ++it) {
    sizes = update_means(x, k, labels, workers, model.centroids);
    repair_empty(x, k, labels, sizes, model.centroids);
    objective = assign_rows(x, model.centroids, workers, next, dist);
    model.iters_run = it;
    const bool stable = next == labels;
    labels.swap(next);
    sizes = count_labels(labels, k);
    if (repair_empty(x, k, labels, sizes, model.centroids)) {
      objective = sse(x, model.centroids, labels);
    }
    const double previous = model.objective_history.back();
    if (objective > previous * (1.0 + kObjectiveSlack) + 1e-300) {
      throw std::logic_error("k-means objective increased between iterations");
    }
    model.objective_history.push_back(objective);
    if (stable) break;
  }
  model.assignments.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) model.assignments[order[p]] = labels[p];
  model.objective = objective;
  return model;
}

std::vector<double> working_matrix(const ClusterModel& model, const TrajectoryStore& store) {
  if (store.length() != model.dim) {
    throw ArgumentError("trajectory length " + std::to_string(store.length()) +
                        " does not match model width " + std::to_string(model.dim));
  }
  return to_working(store, model.column_mean, model.column_scale).values;
}

std::vector<std::uint32_t> assign(const ClusterModel& model, const TrajectoryStore& store,
                                  int workers) {
  Matrix x{working_matrix(model, store), store.size(), store.length()};
  std::vector<std::uint32_t> labels;
  std::vector<double> dist;
  assign_rows(x, model.centroids, workers, labels, dist);
  return labels;
}

double clustering_objective(const ClusterModel& model, const TrajectoryStore& store,
                            std::span<const std::uint32_t> assignments) {
  if (assignments.size() != store.size()) {
    throw ArgumentError("assignment count does not match store size");
  }
  for (auto a : assignments) {
    if (a >= model.k) throw ArgumentError("assignment index out of range");
  }
  Matrix x{working_matrix(model, store), store.size(), store.length()};
  return sse(x, model.centroids, assignments);
}

std::string encode_cluster_model(const ClusterModel& model) {
  json centroids = json::array();
  for (std::size_t c = 0; c < model.k; ++c) {
    const auto row = model.centroid(c);
    centroids.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json j = {{"k", model.k},
            {"seed", model.seed},
            {"normalize", normalization_name(model.normalize)},
            {"objective", model.objective},
            {"iters_run", model.iters_run},
            {"objective_history", model.objective_history},
            {"centroids", std::move(centroids)},
            {"assignments", model.assignments},
            {"ids", model.ids}};
  if (model.normalize == Normalization::kZScore) {
    j["column_mean"] = model.column_mean;
    j["column_scale"] = model.column_scale;
  }
  return j.dump() + "\n";
}

ClusterModel decode_cluster_model(std::string_view text) {
  ClusterModel m;
  try {
    const json j = json::parse(text);
    m.k = j.at("k").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.normalize = parse_normalization(j.at("normalize").get<std::string>());
    m.objective = j.at("objective").get<double>();
    m.iters_run = j.value("iters_run", std::size_t{0});
    m.objective_history = j.value("objective_history", std::vector<double>{});
    m.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
    m.ids = j.at("ids").get<std::vector<std::string>>();
    const auto rows = j.at("centroids").get<std::vector<std::vector<double>>>();
    if (rows.size() != m.k || rows.empty()) throw FormatError("centroid count does not match k");
    m.dim = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != m.dim || m.dim == 0) throw FormatError("ragged centroid matrix");
      m.centroids.insert(m.centroids.end(), r.begin(), r.end());
    }
    if (m.normalize == Normalization::kZScore) {
      m.column_mean = j.at("column_mean").get<std::vector<double>>();
      m.column_scale = j.at("column_scale").get<std::vector<double>>();
      if (m.column_mean.size() != m.dim || m.column_scale.size() != m.dim) {
        throw FormatError("normalization parameters do not match centroid width");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("cluster model: ") + e.what());
  }
  if (m.assignments.size() != m.ids.size()) {
    throw FormatError("cluster model: assignments and ids differ in length");
  }
  for (auto a : m.assignments) {
    if (a >= m.k) throw FormatError("cluster model: assignment index out of range");
  }
  return m;
}

void write_cluster_model(const ClusterModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << encode_cluster_model(model);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ClusterModel read_cluster_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_cluster_model(ss.str());
}

}  // namespace s2l
