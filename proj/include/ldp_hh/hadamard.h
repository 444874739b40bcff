// Copyright 2026 The ldp-hh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDP_HH_HADAMARD_H_
#define LDP_HH_HADAMARD_H_

#include <bit>
#include <cstdint>

#include "ldp_hh/core.h"

namespace ldp_hh {

// The +-1 matrix sqrt(m) * H_m, never materialized. Indices are 0-based.
class Hadamard {
 public:
  explicit Hadamard(uint64_t m) : m_(m) {
    if (m == 0 || !IsPow2(m)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "Hadamard dimension must be a power of two");
    }
  }

  uint64_t size() const { return m_; }

  int Entry(uint64_t row, uint64_t col) const {
    if (row >= m_ || col >= m_) {
      throw Error(ErrorCode::kOutOfRange, "Hadamard index out of range");
    }
    return UncheckedEntry(row, col);
  }

  static int UncheckedEntry(uint64_t row, uint64_t col) {
    return (std::popcount(row & col) & 1) ? -1 : 1;
  }

 private:
  uint64_t m_;
};

}  // namespace ldp_hh

#endif  // LDP_HH_HADAMARD_H_
