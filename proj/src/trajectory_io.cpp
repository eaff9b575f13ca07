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

#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "s2l/error.hpp"
#include "s2l/trajectory.hpp"

namespace s2l {
namespace {

using nlohmann::json;

constexpr char kTrajectoryMagic[4] = {'S', '2', 'L', 'T'};
constexpr char kFeatureMagic[4] = {'S', '2', 'L', 'F'};
constexpr std::uint32_t kFormatVersion = 1;

// ---- little-endian primitives ----

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

void put_string(std::string& out, const std::string& s, std::string_view what) {
  if (s.size() > 0xffff) {
    throw FormatError(std::string(what) + " longer than 65535 bytes: '" + s.substr(0, 32) +
                      "...'");
  }
  put_u16(out, static_cast<std::uint16_t>(s.size()));
  out.append(s);
}

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}

  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("truncated binary file");
  }

  template <typename T>
  T uint() {
    unsigned char buf[sizeof(T)];
    read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }

  std::string string() {
    const auto len = uint<std::uint16_t>();
    std::string s(len, '\0');
    if (len > 0) read(s.data(), len);
    return s;
  }

  void expect_magic(const char (&magic)[4]) {
    char got[4];
    read(got, 4);
    if (!std::equal(got, got + 4, magic)) {
      throw FormatError("bad magic bytes, expected '" + std::string(magic, 4) + "'");
    }
    const auto version = uint<std::uint32_t>();
    if (version != kFormatVersion) {
      throw FormatError("unsupported format version " + std::to_string(version));
    }
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw FormatError("trailing bytes after last record");
    }
  }

 private:
  std::istream& in_;
};

void append_float(std::string& out, float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

TrajectoryFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? TrajectoryFormat::kBinary : TrajectoryFormat::kJsonl;
}

TrajectoryFormat parse_format(std::string_view name) {
  if (name == "jsonl") return TrajectoryFormat::kJsonl;
  if (name == "binary" || name == "bin") return TrajectoryFormat::kBinary;
  throw ArgumentError("unknown format '" + std::string(name) + "' (expected jsonl or binary)");
}

TrajectoryStore read_trajectories_jsonl(std::istream& in) {
  std::vector<std::string> ids;
  std::vector<std::string> sources;
  std::vector<float> losses;
  std::vector<std::uint64_t> steps;
  bool have_header = false;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw FormatError("line " + std::to_string(line_no) + ": not an object");

    if (ids.empty() && !have_header && obj.contains("checkpoint_steps") && !obj.contains("id")) {
      try {
        steps = obj.at("checkpoint_steps").get<std::vector<std::uint64_t>>();
      } catch (const json::exception&) {
        throw FormatError("checkpoint_steps header must be a list of non-negative integers");
      }
      have_header = true;
      continue;
    }

    const auto id_it = obj.find("id");
    const auto src_it = obj.find("source");
    const auto loss_it = obj.find("losses");
    if (id_it == obj.end() || !id_it->is_string()) {
      throw FormatError("line " + std::to_string(line_no) + ": missing string field 'id'");
    }
    std::string id = id_it->get<std::string>();
    if (src_it == obj.end() || !src_it->is_string()) {
      throw FormatError("id '" + id + "': missing string field 'source'");
    }
    if (loss_it == obj.end() || !loss_it->is_array()) {
      throw FormatError("id '" + id + "': missing array field 'losses'");
    }
    if (ids.empty()) {
      width = loss_it->size();
      if (width == 0) throw FormatError("id '" + id + "': empty loss list");
    } else if (loss_it->size() != width) {
      throw FormatError("ragged row '" + id + "': " + std::to_string(loss_it->size()) +
                        " losses, expected " + std::to_string(width));
    }
    for (const auto& v : *loss_it) {
      if (!v.is_number()) throw FormatError("id '" + id + "': non-numeric loss");
      losses.push_back(static_cast<float>(v.get<double>()));
    }
    ids.push_back(std::move(id));
    sources.push_back(src_it->get<std::string>());
  }
  if (in.bad()) throw IoError("read error");
  if (ids.empty()) throw FormatError("no trajectory records");
  if (have_header) {
    if (steps.size() != width) {
      throw FormatError("checkpoint_steps has " + std::to_string(steps.size()) +
                        " entries but rows have " + std::to_string(width));
    }
  } else {
    for (std::size_t j = 0; j < width; ++j) steps.push_back(default_checkpoint_step(j));
  }
  return TrajectoryStore(std::move(ids), std::move(sources), std::move(losses), std::move(steps));
}

void write_trajectories_jsonl(const TrajectoryStore& store, std::ostream& out) {
  std::string buf = json{{"checkpoint_steps", store.checkpoint_steps()}}.dump();
  buf.push_back('\n');
  for (std::size_t i = 0; i < store.size(); ++i) {
    buf.append("{\"id\":");
    buf.append(json(store.ids()[i]).dump());
    buf.append(",\"source\":");
    buf.append(json(store.sources()[i]).dump());
    buf.append(",\"losses\":[");
    const auto row = store.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) buf.push_back(',');
      append_float(buf, row[j]);
    }
    buf.append("]}\n");
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string encode_trajectories_binary(const TrajectoryStore& store) {
  std::string out;
  out.reserve(24 + store.length() * 8 + store.size() * (store.length() * 4 + 24));
  out.append(kTrajectoryMagic, 4);
  put_u32(out, kFormatVersion);
  put_u64(out, store.size());
  put_u32(out, static_cast<std::uint32_t>(store.length()));
  for (std::uint64_t step : store.checkpoint_steps()) put_u64(out, step);
  for (std::size_t i = 0; i < store.size(); ++i) {
    put_string(out, store.ids()[i], "id");
    put_string(out, store.sources()[i], "source tag");
    for (float v : store.row(i)) put_f32(out, v);
  }
  return out;
}

void write_trajectories_binary(const TrajectoryStore& store, std::ostream& out) {
  const std::string bytes = encode_trajectories_binary(store);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TrajectoryStore read_trajectories_binary(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kTrajectoryMagic);
  const auto n = r.uint<std::uint64_t>();
  const auto t = r.uint<std::uint32_t>();
  if (n == 0) throw FormatError("no trajectory records");
  if (t == 0) throw FormatError("trajectories must have at least one checkpoint");
  std::vector<std::uint64_t> steps(t);
  for (auto& s : steps) s = r.uint<std::uint64_t>();
  std::vector<std::string> ids;
  std::vector<std::string> sources;
  std::vector<float> losses;
  // n comes from the file; grow as records arrive rather than trusting it.
  for (std::uint64_t i = 0; i < n; ++i) {
    ids.push_back(r.string());
    sources.push_back(r.string());
    for (std::uint32_t j = 0; j < t; ++j) losses.push_back(r.f32());
  }
  r.expect_end();
  return TrajectoryStore(std::move(ids), std::move(sources), std::move(losses), std::move(steps));
}

TrajectoryStore load_trajectories(const std::filesystem::path& path, TrajectoryFormat format) {
  auto in = open_in(path);
  try {
    return format == TrajectoryFormat::kBinary ? read_trajectories_binary(in)
                                               : read_trajectories_jsonl(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_trajectories(const TrajectoryStore& store, const std::filesystem::path& path,
                        TrajectoryFormat format) {
  auto out = open_out(path);
  if (format == TrajectoryFormat::kBinary) {
    write_trajectories_binary(store, out);
  } else {
    write_trajectories_jsonl(store, out);
  }
  finish_out(out, path);
}

void write_features_binary(const FeatureMatrix& features, std::ostream& out) {
  std::string buf;
  buf.append(kFeatureMagic, 4);
  put_u32(buf, kFormatVersion);
  put_u64(buf, features.size());
  put_u32(buf, static_cast<std::uint32_t>(features.dim()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    put_string(buf, features.ids()[i], "id");
    for (float v : features.row(i)) put_f32(buf, v);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

FeatureMatrix read_features_binary(std::istream& in) {
  ByteReader r(in);
  r.expect_magic(kFeatureMagic);
  const auto n = r.uint<std::uint64_t>();
  const auto d = r.uint<std::uint32_t>();
  if (n == 0) throw FormatError("no feature records");
  std::vector<std::string> ids;
  std::vector<float> values;
  for (std::uint64_t i = 0; i < n; ++i) {
    ids.push_back(r.string());
    for (std::uint32_t j = 0; j < d; ++j) values.push_back(r.f32());
  }
  r.expect_end();
  return FeatureMatrix(std::move(ids), std::move(values), d);
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_features_binary(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_features(const FeatureMatrix& features, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_features_binary(features, out);
  finish_out(out, path);
}

}  // namespace s2l
