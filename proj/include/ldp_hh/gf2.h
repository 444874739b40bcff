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

// Arithmetic in GF(2^w) for 1 <= w <= 63, with the modulus found at startup
// as the numerically smallest irreducible polynomial of degree w.

#ifndef LDP_HH_GF2_H_
#define LDP_HH_GF2_H_

#include <array>
#include <bit>
#include <cstdint>

#include "ldp_hh/core.h"

namespace ldp_hh {
namespace gf2 {

inline constexpr int kMaxWidth = 63;

inline int Degree(uint64_t p) { return static_cast<int>(std::bit_width(p)) - 1; }

inline uint64_t PolyMod(uint64_t a, uint64_t b) {
  const int db = Degree(b);
  for (int da = Degree(a); da >= db; da = Degree(a)) a ^= b << (da - db);
  return a;
}

inline uint64_t PolyGcd(uint64_t a, uint64_t b) {
  while (b != 0) {
    uint64_t r = PolyMod(a, b);
    a = b;
    b = r;
  }
  return a;
}

// a * b mod `modulus`, where modulus has degree w and a, b < 2^w.
inline uint64_t MulMod(uint64_t a, uint64_t b, uint64_t modulus, int w) {
  uint64_t result = 0;
  const uint64_t top = uint64_t{1} << w;
  while (b != 0) {
    if (b & 1) result ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= modulus;
  }
  return result;
}

// Ben-Or: a degree-w polynomial is irreducible iff gcd(x^(2^i) - x, p) = 1
// for every 1 <= i <= w/2.
inline bool IsIrreducible(uint64_t p) {
  const int w = Degree(p);
  if (w < 1) return false;
  if (w == 1) return true;
  if ((p & 1) == 0) return false;
  uint64_t power = 2;  // x
  for (int i = 1; i <= w / 2; ++i) {
    power = MulMod(power, power, p, w);
    if (PolyGcd(p, power ^ 2) != 1) return false;
  }
  return true;
}

inline uint64_t FindIrreducible(int w) {
  const uint64_t lead = uint64_t{1} << w;
  for (uint64_t low = 1;; ++low) {
    if (IsIrreducible(lead | low)) return lead | low;
  }
}

inline uint64_t Modulus(int w) {
  static const std::array<uint64_t, kMaxWidth + 1> kTable = [] {
    std::array<uint64_t, kMaxWidth + 1> t{};
    for (int i = 1; i <= kMaxWidth; ++i) t[i] = FindIrreducible(i);
    return t;
  }();
  if (w < 1 || w > kMaxWidth) {
    throw Error(ErrorCode::kInvalidArgument, "GF(2^w) width out of range");
  }
  return kTable[w];
}

class Field {
 public:
  explicit Field(int w) : width_(w), modulus_(Modulus(w)) {}

  int width() const { return width_; }
  uint64_t modulus() const { return modulus_; }
  uint64_t size_mask() const { return LowMask(width_); }

  uint64_t Mul(uint64_t a, uint64_t b) const {
    return MulMod(a, b, modulus_, width_);
  }

 private:
  int width_;
  uint64_t modulus_;
};

}  // namespace gf2
}  // namespace ldp_hh

#endif  // LDP_HH_GF2_H_
