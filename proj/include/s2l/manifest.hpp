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

#ifndef S2L_MANIFEST_HPP_
#define S2L_MANIFEST_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "s2l/trajectory.hpp"

namespace s2l {

enum class Round { kMain, kTopup };

std::string_view round_name(Round round);

struct ManifestEntry {
  std::string id;
  std::string source;
  std::int64_t cluster = -1;  // -1 for selectors that do not cluster
  Round round = Round::kMain;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

// Ordered record of a selection run.
struct SelectionManifest {
  std::string tool;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t k = 0;
  std::string config_digest;  // hex SHA-256 of the config and the input store
  std::vector<ManifestEntry> entries;

  friend bool operator==(const SelectionManifest&, const SelectionManifest&) = default;
};

// SHA-256 of the binary encoding of the store.
std::string store_digest(const TrajectoryStore& store);

// SHA-256 over the config object (serialized with insertion order preserved)
// followed by an input digest.
std::string config_digest(const nlohmann::ordered_json& config, std::string_view input_digest);

std::string encode_manifest(const SelectionManifest& manifest);
SelectionManifest decode_manifest(std::istream& in);
void write_manifest(const SelectionManifest& manifest, const std::filesystem::path& path);
SelectionManifest read_manifest(const std::filesystem::path& path);

}  // namespace s2l

#endif  // S2L_MANIFEST_HPP_
