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

#ifndef S2L_RANDOM_HPP_
#define S2L_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace s2l {

// Seeded 64-bit generator with portable derived distributions.
//
// std::mt19937_64 produces the same bit stream on every conforming
// implementation, but the standard distributions do not, so every draw used
// by selection goes through the helpers below instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Standard normal deviate (Box-Muller, one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Draws k distinct elements of `pool` uniformly at random (partial
// Fisher-Yates over a copy). Returns them in draw order. k is clamped to the
// pool size.
std::vector<std::size_t> sample_without_replacement(
    std::span<const std::size_t> pool, std::size_t k, Rng& rng);

// Stable seed for a named sub-stream: first 8 bytes of SHA-256 over the
// little-endian seed followed by the tag bytes.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

// Splits a seed into per-index sub-seeds (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace s2l

#endif  // S2L_RANDOM_HPP_
