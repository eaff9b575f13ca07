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

#ifndef S2L_SYNTHGEN_HPP_
#define S2L_SYNTHGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "s2l/trajectory.hpp"

namespace s2l {

enum class Shape { kDecreasing, kIncreasing, kDoubleDescent, kFlat, kExplicit };

std::string_view shape_name(Shape shape);

struct TemplateSpec {
  std::string name;            // ids are "<name>-<k>"; must be unique across templates
  Shape shape = Shape::kFlat;
  std::vector<double> base;    // explicit base losses, used when shape == kExplicit
  std::size_t count = 1;
  double noise_sigma = 0.0;
  std::string source = "synthetic";
};

// Base loss vector of a built-in shape over T checkpoints:
//   decreasing     0.5 + 3.5 * r^j with r = exp(-3 / (T - 1))  (4.0 down toward 0.5)
//   increasing     decreasing reversed
//   double_descent decreasing up to T/2, jump to 0.5 + 2.0 there, decay again
//   flat           2.0 everywhere
std::vector<double> builtin_shape(Shape shape, std::size_t length);

struct SyntheticData {
  TrajectoryStore store;
  std::vector<std::uint32_t> labels;  // template index per example
};

// Each example = its template's base vector plus N(0, sigma^2) noise per
// entry, clipped at 0. Row r draws from its own stream mix_seed(seed, r), so
// the output depends only on (templates, T, seed).
SyntheticData generate(const std::vector<TemplateSpec>& templates, std::size_t length,
                       std::uint64_t seed, int workers = 1);

// JSON list of template objects:
//   {"name": str, "shape": "decreasing"|"increasing"|"double_descent"|"flat"|[numbers],
//    "count": int, "noise_sigma": number, "source": str}
std::vector<TemplateSpec> parse_templates(const nlohmann::json& j);
std::vector<TemplateSpec> load_templates(const std::filesystem::path& path);

}  // namespace s2l

#endif  // S2L_SYNTHGEN_HPP_
