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

// Shared (public) randomness and per-user noise.
//
// Every random object in a simulation is a pure function of the master seed,
// a role tag and one or two indices, so the server and each simulated client
// derive identical hash functions, partitions and Z columns without ever
// materializing them. Client noise comes from a separate stream per user and
// role; noise streams are not thread-safe and must not be shared.

#ifndef LDP_HH_RANDOMNESS_H_
#define LDP_HH_RANDOMNESS_H_

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ldp_hh/core.h"
#include "ldp_hh/gf2.h"

namespace ldp_hh {

inline uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using u128 = unsigned __int128;

// Role tags domain-separate every derived object.
enum class Role : uint64_t {
  kTreeHistHashH = 1,
  kTreeHistHashG,
  kTreeHistAssign,
  kTreeHistNoisePruning,
  kTreeHistNoiseFinal,
  kHashtogramSubset,
  kHashtogramHash,
  kHashtogramColumn,
  kExplicitColumn,
  kBitstogramPartition,
  kBitstogramHash,
  kBitstogramInner,
  kBitstogramOuter,
  kSuccinctPartition,
  kSuccinctHash,
  kSuccinctLevel,
  kSuccinctFinal,
  kNoiseInner,
  kNoiseOuter,
  kNoiseSingle,
  kKWiseRow,
  kDataset,
  kTest,
};

// Keyed pseudorandom function with a 128-bit output. Not cryptographic.
inline u128 Prf(uint64_t key, uint64_t tag, uint64_t index, uint64_t sub = 0) {
  const uint64_t a = Mix64(key ^ Mix64(tag ^ Mix64(index ^ Mix64(sub))));
  const uint64_t b = Mix64(a ^ 0x632be59bd9b4e019ULL ^ Mix64(index + tag));
  return (u128{a} << 64) | b;
}

// Uniform on [0, bound) by reduction of a 128-bit value; the bias is below
// bound / 2^128 <= 2^-64.
inline uint64_t ReduceBelow(u128 x, uint64_t bound) {
  return static_cast<uint64_t>(x % bound);
}

// Per-user randomness for randomized response (splitmix64 stream).
class NoiseStream {
 public:
  explicit NoiseStream(uint64_t state) : state_(state) {}

  uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Returns x with probability keep_prob and -x otherwise.
inline int RrBit(int x, double keep_prob, NoiseStream& noise) {
  if (!(keep_prob >= 0.5 && keep_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "keep probability must be in [1/2, 1]");
  }
  if (keep_prob == 1.0) return x;
  return noise.NextDouble() < keep_prob ? x : -x;
}

// e^x / (e^x + 1); 1 in the noiseless limit x = +inf.
inline double KeepProbability(double x) {
  if (std::isinf(x)) return 1.0;
  return 1.0 / (1.0 + std::exp(-x));
}

// max over (input, input', output) of Pr[output | input] / Pr[output | input']
// for randomized response on one bit.
inline double RrLikelihoodRatio(double keep_prob) {
  return keep_prob / (1.0 - keep_prob);
}

// Member of the pairwise-independent family x -> a*x + b over GF(2^w),
// reduced to [range). Power-of-two ranges keep the low log2(range) bits;
// other ranges take the high part of value * range, which deviates from
// uniform by less than range / 2^w.
class PairwiseHash {
 public:
  PairwiseHash() = default;

  PairwiseHash(int width, uint64_t range, uint64_t a, uint64_t b)
      : field_(width), range_(range), a_(a & field_.size_mask()),
        b_(b & field_.size_mask()) {
    if (range == 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
    truncate_ = IsPow2(range) && Log2Exact(range) <= width;
  }

  uint64_t Raw(uint64_t x) const {
    if ((x & ~field_.size_mask()) != 0) {
      throw Error(ErrorCode::kOutOfRange, "hash input wider than field");
    }
    return field_.Mul(a_, x) ^ b_;
  }

  uint64_t operator()(uint64_t x) const {
    const uint64_t raw = Raw(x);
    if (truncate_) return raw & (range_ - 1);
    return static_cast<uint64_t>((u128{raw} * range_) >> field_.width());
  }

  int width() const { return field_.width(); }
  uint64_t range() const { return range_; }

 private:
  gf2::Field field_{1};
  uint64_t range_ = 1;
  uint64_t a_ = 0;
  uint64_t b_ = 0;
  bool truncate_ = true;
};

// A bucket hash h into [m] and an independent sign hash g into {-1, +1},
// defined on every prefix of every length.
class HashPair {
 public:
  HashPair() = default;
  HashPair(PairwiseHash h, PairwiseHash g) : h_(h), g_(g) {}

  uint64_t Bucket(const Prefix& x) const { return h_(x.Key()); }
  int Sign(const Prefix& x) const { return g_(x.Key()) == 0 ? 1 : -1; }

  std::pair<uint64_t, int> Eval(const Prefix& x) const {
    return {Bucket(x), Sign(x)};
  }

  const PairwiseHash& h() const { return h_; }
  const PairwiseHash& g() const { return g_; }

 private:
  PairwiseHash h_;
  PairwiseHash g_;
};

// Compact description of one pairwise-independent +-1 column of length T:
// entry(t) = (-1)^(<a, t> xor b) with a a ceil(log2 T)-bit word and b a bit.
// These are Hadamard rows with a random sign, so at most 2 * 2^bits columns
// are realizable.
struct ZColumnDescriptor {
  uint64_t a = 0;
  uint32_t b = 0;
  int bits = 0;
  uint64_t rows = 1;  // T

  int Entry(uint64_t t) const {
    if (t >= rows) throw Error(ErrorCode::kOutOfRange, "Z row out of range");
    const int parity = (std::popcount(a & t) & 1) ^ static_cast<int>(b);
    return parity ? -1 : 1;
  }

  // Distinct descriptors map to distinct keys.
  uint64_t Key() const { return (a << 1) | b; }

  static ZColumnDescriptor FromKey(uint64_t key, int bits, uint64_t rows) {
    return ZColumnDescriptor{key >> 1, static_cast<uint32_t>(key & 1), bits,
                             rows};
  }
};

inline int ColumnBits(uint64_t rows) {
  return rows <= 1 ? 0 : static_cast<int>(std::bit_width(rows - 1));
}

inline ZColumnDescriptor DrawZColumn(u128 randomness, uint64_t rows) {
  const int bits = ColumnBits(rows);
  const uint64_t hi = static_cast<uint64_t>(randomness >> 64);
  const uint64_t lo = static_cast<uint64_t>(randomness);
  return ZColumnDescriptor{hi & LowMask(bits), static_cast<uint32_t>(lo & 1),
                           bits, rows};
}

// Independence a row of Z needs for the Chernoff-style analysis:
// k = ceil(3 ln(d / beta)).
inline int KWiseRowRequirement(double d, double beta) {
  return static_cast<int>(std::ceil(3.0 * std::log(d / beta)));
}

// Opt-in generator of a Z row whose entries over columns j are k-wise
// independent: the low bit of a random degree-(k-1) polynomial over GF(2^63)
// evaluated at j.
class KWiseRow {
 public:
  KWiseRow(uint64_t seed, uint64_t row, int k) : field_(gf2::kMaxWidth) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
    coeffs_.reserve(k);
    for (int i = 0; i < k; ++i) {
      coeffs_.push_back(static_cast<uint64_t>(
                            Prf(seed, static_cast<uint64_t>(Role::kKWiseRow),
                                row, static_cast<uint64_t>(i))) &
                        field_.size_mask());
    }
  }

  int Entry(uint64_t column) const {
    uint64_t acc = 0;
    const uint64_t x = column & field_.size_mask();
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = field_.Mul(acc, x) ^ *it;
    }
    return (acc & 1) ? -1 : 1;
  }

  int k() const { return static_cast<int>(coeffs_.size()); }

 private:
  gf2::Field field_;
  std::vector<uint64_t> coeffs_;
};

// Immutable view of the public randomness of one run.
class SharedRandomness {
 public:
  explicit SharedRandomness(uint64_t master_seed) : seed_(master_seed) {}

  uint64_t seed() const { return seed_; }

  u128 Derive(Role role, uint64_t index, uint64_t sub = 0) const {
    return Prf(seed_, static_cast<uint64_t>(role), index, sub);
  }

  uint64_t UniformBelow(Role role, uint64_t index, uint64_t bound,
                        uint64_t sub = 0) const {
    return ReduceBelow(Derive(role, index, sub), bound);
  }

  NoiseStream Noise(Role role, uint64_t user, uint64_t sub = 0) const {
    return NoiseStream(static_cast<uint64_t>(Derive(role, user, sub) >> 64));
  }

  // Key for a nested object (for example one inner oracle of a protocol).
  uint64_t SubKey(Role role, uint64_t index, uint64_t sub = 0) const {
    return static_cast<uint64_t>(Derive(role, index, sub));
  }

  PairwiseHash MakeHash(Role role, uint64_t index, int width, uint64_t range,
                        uint64_t sub = 0) const {
    const u128 r = Derive(role, index, sub);
    return PairwiseHash(width, range, static_cast<uint64_t>(r >> 64),
                        static_cast<uint64_t>(r));
  }

 private:
  uint64_t seed_;
};

// Per-user indices of the tree protocol: level in [1, levels], hash index in
// [0, t), Hadamard row in [0, m).
struct TreeHistAssignment {
  int level = 1;
  int64_t hash_index = 0;
  uint64_t row = 0;

  friend bool operator==(const TreeHistAssignment&,
                         const TreeHistAssignment&) = default;
};

inline TreeHistAssignment AssignUserTreeHist(const SharedRandomness& sr,
                                             int64_t n, int64_t user,
                                             int levels, int64_t t,
                                             uint64_t m) {
  if (user < 0 || user >= n) {
    throw Error(ErrorCode::kOutOfRange, "user index out of range");
  }
  const uint64_t cells =
      static_cast<uint64_t>(levels) * static_cast<uint64_t>(t) * m;
  uint64_t v = sr.UniformBelow(Role::kTreeHistAssign,
                               static_cast<uint64_t>(user), cells);
  TreeHistAssignment a;
  a.level = static_cast<int>(v % levels) + 1;
  v /= levels;
  a.hash_index = static_cast<int64_t>(v % static_cast<uint64_t>(t));
  a.row = v / static_cast<uint64_t>(t);
  return a;
}

}  // namespace ldp_hh

#endif  // LDP_HH_RANDOMNESS_H_
