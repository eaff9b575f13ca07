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

#include "s2l/manifest.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include "s2l/digest.hpp"
#include "s2l/error.hpp"

namespace s2l {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view round_name(Round round) { return round == Round::kTopup ? "topup" : "main"; }

std::string store_digest(const TrajectoryStore& store) {
  const std::string bytes = encode_trajectories_binary(store);
  Sha256 h;
  h.update(bytes);
  const auto d = h.finish();
  return to_hex(d);
}

std::string config_digest(const ordered_json& config, std::string_view input_digest) {
  Sha256 h;
  h.update(config.dump()).update("\n").update(input_digest);
  const auto d = h.finish();
  return to_hex(d);
}

std::string encode_manifest(const SelectionManifest& manifest) {
  ordered_json header;
  header["tool"] = manifest.tool;
  header["version"] = 1;
  header["seed"] = manifest.seed;
  header["budget"] = manifest.budget;
  header["k"] = manifest.k;
  header["config_digest"] = manifest.config_digest;
  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& e : manifest.entries) {
    ordered_json line;
    line["id"] = e.id;
    line["source"] = e.source;
    line["cluster"] = e.cluster;
    line["round"] = round_name(e.round);
    out.append(line.dump());
    out.push_back('\n');
  }
  return out;
}

SelectionManifest decode_manifest(std::istream& in) {
  SelectionManifest m;
  std::string line;
  bool have_header = false;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.at("version").get<int>() != 1) throw FormatError("unsupported manifest version");
        m.tool = j.at("tool").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.budget = j.at("budget").get<std::size_t>();
        m.k = j.at("k").get<std::size_t>();
        m.config_digest = j.at("config_digest").get<std::string>();
        have_header = true;
        continue;
      }
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.source = j.at("source").get<std::string>();
      e.cluster = j.at("cluster").get<std::int64_t>();
      const auto round = j.at("round").get<std::string>();
      if (round == "main") {
        e.round = Round::kMain;
      } else if (round == "topup") {
        e.round = Round::kTopup;
      } else {
        throw FormatError("unknown round '" + round + "'");
      }
      if (!seen.insert(e.id).second) throw FormatError("duplicate manifest id '" + e.id + "'");
      m.entries.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw FormatError(std::string("manifest: ") + e.what());
    }
  }
  if (!have_header) throw FormatError("manifest: missing header line");
  return m;
}

void write_manifest(const SelectionManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::string text = encode_manifest(manifest);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

SelectionManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return decode_manifest(in);
}

}  // namespace s2l
