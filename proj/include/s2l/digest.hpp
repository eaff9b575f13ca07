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

#ifndef S2L_DIGEST_HPP_
#define S2L_DIGEST_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace s2l {

// Incremental SHA-256, used for config/input digests and seed derivation.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  Sha256& update_u64(std::uint64_t value);  // little-endian

  std::array<std::uint8_t, 32> finish();

 private:
  void* ctx_;
};

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace s2l

#endif  // S2L_DIGEST_HPP_
