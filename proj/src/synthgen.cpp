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

#include "s2l/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "s2l/error.hpp"
#include "s2l/parallel.hpp"
#include "s2l/random.hpp"

namespace s2l {

using nlohmann::json;

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::kDecreasing:
      return "decreasing";
    case Shape::kIncreasing:
      return "increasing";
    case Shape::kDoubleDescent:
      return "double_descent";
    case Shape::kFlat:
      return "flat";
    case Shape::kExplicit:
      return "explicit";
  }
  return "unknown";
}

std::vector<double> builtin_shape(Shape shape, std::size_t length) {
  if (length == 0) throw ArgumentError("trajectory length must be >= 1");
  const double ratio = length > 1 ? std::exp(-3.0 / static_cast<double>(length - 1)) : 1.0;
  std::vector<double> v(length);
  switch (shape) {
    case Shape::kDecreasing:
    case Shape::kIncreasing:
      for (std::size_t j = 0; j < length; ++j) {
        v[j] = 0.5 + 3.5 * std::pow(ratio, static_cast<double>(j));
      }
      if (shape == Shape::kIncreasing) std::reverse(v.begin(), v.end());
      break;
    case Shape::kDoubleDescent: {
      const std::size_t half = length / 2;
      for (std::size_t j = 0; j < length; ++j) {
        v[j] = j < half ? 0.5 + 3.5 * std::pow(ratio, static_cast<double>(j))
                        : 0.5 + 2.0 * std::pow(ratio, static_cast<double>(j - half));
      }
      break;
    }
    case Shape::kFlat:
      std::fill(v.begin(), v.end(), 2.0);
      break;
    case Shape::kExplicit:
      throw ArgumentError("explicit templates carry their own base vector");
  }
  return v;
}

SyntheticData generate(const std::vector<TemplateSpec>& templates, std::size_t length,
                       std::uint64_t seed, int workers) {
  if (length == 0) throw ArgumentError("trajectory length must be >= 1");
  if (templates.empty()) throw ArgumentError("no templates given");

  std::vector<std::vector<double>> bases;
  std::unordered_set<std::string> names;
  std::size_t n = 0;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    const auto& spec = templates[t];
    if (spec.count == 0) throw ArgumentError("template '" + spec.name + "' has count 0");
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
      throw ArgumentError("template '" + spec.name + "' has invalid noise_sigma");
    }
    if (!names.insert(spec.name).second) {
      throw ArgumentError("duplicate template name '" + spec.name + "'");
    }
    if (spec.shape == Shape::kExplicit) {
      if (spec.base.size() != length) {
        throw ArgumentError("template '" + spec.name + "' has " +
                            std::to_string(spec.base.size()) + " base losses, expected " +
                            std::to_string(length));
      }
      for (double b : spec.base) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
          throw ArgumentError("template '" + spec.name + "' has a negative base loss");
        }
      }
      bases.push_back(spec.base);
    } else {
      bases.push_back(builtin_shape(spec.shape, length));
    }
    n += spec.count;
  }

  std::vector<std::string> ids;
  std::vector<std::string> sources;
  std::vector<std::uint32_t> labels;
  std::vector<double> sigma;
  ids.reserve(n);
  sources.reserve(n);
  labels.reserve(n);
  for (std::size_t t = 0; t < templates.size(); ++t) {
    for (std::size_t c = 0; c < templates[t].count; ++c) {
      ids.push_back(templates[t].name + "-" + std::to_string(c));
      sources.push_back(templates[t].source);
      labels.push_back(static_cast<std::uint32_t>(t));
    }
  }

  std::vector<float> losses(n * length);
  for_each_block(n, kRowBlock, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      const auto& spec = templates[labels[r]];
      const auto& base = bases[labels[r]];
      Rng rng(mix_seed(seed, r));
      for (std::size_t j = 0; j < length; ++j) {
        const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
        losses[r * length + j] = static_cast<float>(std::max(0.0, base[j] + noise));
      }
    }
  });

  std::vector<std::uint64_t> steps(length);
  for (std::size_t j = 0; j < length; ++j) steps[j] = default_checkpoint_step(j);
  return SyntheticData{
      TrajectoryStore(std::move(ids), std::move(sources), std::move(losses), std::move(steps)),
      std::move(labels)};
}

std::vector<TemplateSpec> parse_templates(const json& j) {
  if (!j.is_array()) throw FormatError("template file must be a JSON list");
  std::vector<TemplateSpec> out;
  try {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& o = j[i];
      TemplateSpec spec;
      spec.name = o.value("name", "t" + std::to_string(i));
      const auto& shape = o.at("shape");
      if (shape.is_array()) {
        spec.shape = Shape::kExplicit;
        spec.base = shape.get<std::vector<double>>();
      } else {
        const auto name = shape.get<std::string>();
        bool found = false;
        for (Shape s : {Shape::kDecreasing, Shape::kIncreasing, Shape::kDoubleDescent,
                        Shape::kFlat}) {
          if (shape_name(s) == name) {
            spec.shape = s;
            found = true;
          }
        }
        if (!found) throw FormatError("unknown template shape '" + name + "'");
      }
      spec.count = o.at("count").get<std::size_t>();
      spec.noise_sigma = o.value("noise_sigma", 0.0);
      spec.source = o.value("source", std::string("synthetic"));
      out.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("template file: ") + e.what());
  }
  return out;
}

std::vector<TemplateSpec> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_templates(j);
}

}  // namespace s2l
