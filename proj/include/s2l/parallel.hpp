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

#ifndef S2L_PARALLEL_HPP_
#define S2L_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace s2l {

// Row-block size used by every parallel reduction. Partial results are
// produced per block and combined in block order, so output never depends on
// how many workers ran.
inline constexpr std::size_t kRowBlock = 2048;

// Calls fn(block_index, begin, end) once for every block of `block` rows in
// [0, n), spread over `workers` threads (1 = run inline).
void for_each_block(std::size_t n, std::size_t block, int workers,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t block_count(std::size_t n, std::size_t block) {
  return (n + block - 1) / block;
}

}  // namespace s2l

#endif  // S2L_PARALLEL_HPP_
