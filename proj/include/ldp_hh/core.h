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

// Binary items, prefixes of items, and the parameter formulas shared by the
// heavy-hitter protocols.

#ifndef LDP_HH_CORE_H_
#define LDP_HH_CORE_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ldp_hh {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidLength,
  kLeaf,
  kInvalidInput,
  kInvalidDomain,
  kOutOfRange,
  kDuplicateUser,
  kPhaseMismatch,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Items are stored in a single machine word; one bit is reserved for the
// prefix-length marker used when hashing prefixes.
inline constexpr int kMaxDomainBits = 62;

inline uint64_t LowMask(int bits) {
  return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
}

// A user's private value: exactly `width` bits, most significant bit first.
struct Item {
  uint64_t value = 0;
  int width = 0;

  friend bool operator==(const Item&, const Item&) = default;
  friend auto operator<=>(const Item&, const Item&) = default;
};

// The first `length` bits of an item. Length 0 is the empty prefix (the root
// of the prefix tree).
struct Prefix {
  uint64_t bits = 0;
  int length = 0;

  friend bool operator==(const Prefix&, const Prefix&) = default;
  friend auto operator<=>(const Prefix&, const Prefix&) = default;

  // Injective encoding of prefixes of every length into one word: a leading
  // marker bit followed by the prefix bits. Used as the hash-domain point.
  uint64_t Key() const { return (uint64_t{1} << length) | bits; }

  Item AsItem() const { return Item{bits, length}; }
};

inline void CheckDomainBits(int bits) {
  if (bits < 1 || bits > kMaxDomainBits) {
    throw Error(ErrorCode::kInvalidDomain,
                "domain width must be in [1, " +
                    std::to_string(kMaxDomainBits) + "] bits, got " +
                    std::to_string(bits));
  }
}

inline Item MakeItem(uint64_t value, int width) {
  CheckDomainBits(width);
  if ((value & ~LowMask(width)) != 0) {
    throw Error(ErrorCode::kInvalidInput, "item value wider than domain");
  }
  return Item{value, width};
}

inline Prefix PrefixOf(const Item& v, int length) {
  if (length < 0 || length > v.width) {
    throw Error(ErrorCode::kInvalidLength,
                "prefix length " + std::to_string(length) +
                    " outside [0, " + std::to_string(v.width) + "]");
  }
  const int drop = v.width - length;
  return Prefix{length == 0 ? 0 : (v.value >> drop), length};
}

inline Prefix PrefixOf(const Prefix& p, int length) {
  return PrefixOf(p.AsItem(), length);
}

inline std::pair<Prefix, Prefix> Children(const Prefix& p, int domain_bits) {
  if (p.length >= domain_bits) {
    throw Error(ErrorCode::kLeaf, "prefix is already a full item");
  }
  return {Prefix{p.bits << 1, p.length + 1},
          Prefix{(p.bits << 1) | 1, p.length + 1}};
}

// Children of every prefix in `ps`, in lexicographic order.
inline std::vector<Prefix> ChildSet(std::span<const Prefix> ps,
                                    int domain_bits) {
  std::vector<Prefix> out;
  if (ps.empty()) return out;
  const int length = ps.front().length;
  out.reserve(2 * ps.size());
  for (const Prefix& p : ps) {
    if (p.length != length) {
      throw Error(ErrorCode::kInvalidInput, "mixed prefix lengths");
    }
    auto [zero, one] = Children(p, domain_bits);
    out.push_back(zero);
    out.push_back(one);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string ToBinary(const Prefix& p) {
  std::string s;
  for (int i = p.length - 1; i >= 0; --i) s.push_back(((p.bits >> i) & 1) ? '1' : '0');
  return s;
}

inline Prefix PrefixFromBinary(const std::string& s) {
  Prefix p{0, static_cast<int>(s.size())};
  for (char c : s) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::kInvalidInput, "not a binary string: " + s);
    }
    p.bits = (p.bits << 1) | static_cast<uint64_t>(c == '1');
  }
  return p;
}

// Rounds half away from zero, the rounding rule for every integer parameter.
inline int64_t RoundHalfAway(double x) {
  return static_cast<int64_t>(std::round(x));
}

inline uint64_t NextPow2(double x) {
  if (x <= 1.0) return 1;
  uint64_t p = 1;
  while (static_cast<double>(p) < x) p <<= 1;
  return p;
}

inline bool IsPow2(uint64_t x) { return std::has_single_bit(x); }

inline int Log2Exact(uint64_t x) { return std::countr_zero(x); }

// Bias correction of randomized response that keeps a bit with probability
// e^x / (e^x + 1): (e^x + 1) / (e^x - 1). Equals 1 in the noiseless limit.
inline double DebiasFactor(double x) {
  if (std::isinf(x)) return 1.0;
  return (std::exp(x) + 1.0) / std::expm1(x);
}

// Public parameters of the tree-based protocol.
struct ProtocolParams {
  int64_t n = 0;
  int domain_bits = 0;  // log2 d
  double epsilon = 0;
  double beta = 0;
  int64_t t = 0;        // hash pairs
  uint64_t m = 0;       // Hadamard dimension
  double eta = 0;       // pruning keeps estimates >= 2 * eta
  double a_eps = 0;
  // n <= ln(n / beta) * log2(d): only trivial error can be guaranteed.
  bool below_triviality_bound = false;

  uint64_t d() const { return uint64_t{1} << domain_bits; }
};

inline void CheckPrivacyArgs(int64_t n, double epsilon, double beta) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "n must be >= 2");
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  if (!(beta > 0 && beta < 1)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be in (0, 1)");
  }
}

inline ProtocolParams MakeTreeHistParamsForBits(int64_t n, int domain_bits,
                                                double epsilon, double beta) {
  CheckPrivacyArgs(n, epsilon, beta);
  CheckDomainBits(domain_bits);
  const double log_nb = std::log(static_cast<double>(n) / beta);
  ProtocolParams p;
  p.n = n;
  p.domain_bits = domain_bits;
  p.epsilon = epsilon;
  p.beta = beta;
  p.t = std::max<int64_t>(1, RoundHalfAway(110.0 * log_nb));
  p.m = NextPow2(48.0 * std::sqrt(static_cast<double>(n) / log_nb));
  p.eta = 147.0 * std::sqrt(static_cast<double>(n) * log_nb * domain_bits) /
          epsilon;
  p.a_eps = DebiasFactor(epsilon / 2);
  p.below_triviality_bound = static_cast<double>(n) <= log_nb * domain_bits;
  return p;
}

inline ProtocolParams MakeTreeHistParams(int64_t n, uint64_t d, double epsilon,
                                         double beta) {
  if (d < 2 || !IsPow2(d)) {
    throw Error(ErrorCode::kInvalidDomain,
                "domain size must be a power of two >= 2");
  }
  return MakeTreeHistParamsForBits(n, Log2Exact(d), epsilon, beta);
}

// Median; an even count averages the two middle order statistics.
inline double Median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + mid);
  return (lower + upper) / 2;
}

}  // namespace ldp_hh

#endif  // LDP_HH_CORE_H_
