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

#ifndef LDP_HH_ECC_H_
#define LDP_HH_ECC_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ldp_hh/core.h"

namespace ldp_hh {

// Bit 0 is the most significant message bit, matching the prefix-tree order.
using Bits = std::vector<uint8_t>;

inline Bits ToBits(const Item& v) {
  Bits out(static_cast<size_t>(v.width));
  for (int i = 0; i < v.width; ++i) out[i] = (v.value >> (v.width - 1 - i)) & 1;
  return out;
}

inline Item FromBits(const Bits& bits) {
  Item v{0, static_cast<int>(bits.size())};
  for (uint8_t b : bits) v.value = (v.value << 1) | (b & 1);
  return v;
}

inline std::string BitsToString(const Bits& bits) {
  std::string s;
  for (uint8_t b : bits) s.push_back(b ? '1' : '0');
  return s;
}

// A binary (code_bits, message_bits) code. Dec(Enc(x)) = x, and Dec(y) = x
// whenever y is within correctable_errors() flips of Enc(x).
class BinaryCode {
 public:
  virtual ~BinaryCode() = default;

  virtual std::string name() const = 0;
  virtual int message_bits() const = 0;
  virtual int code_bits() const = 0;
  // Flips tolerated anywhere in a codeword.
  virtual int correctable_errors() const = 0;
  virtual Bits Encode(const Bits& message) const = 0;
  virtual Bits Decode(const Bits& word) const = 0;

  // Fraction of codeword bits that may be flipped adversarially.
  double zeta() const {
    return static_cast<double>(correctable_errors()) / code_bits();
  }

 protected:
  void CheckWidth(const Bits& b, int expected) const {
    if (static_cast<int>(b.size()) != expected) {
      throw Error(ErrorCode::kInvalidLength,
                  name() + ": expected " + std::to_string(expected) +
                      " bits, got " + std::to_string(b.size()));
    }
  }
};

// Each message bit repeated `reps` times consecutively; majority decoding per
// block. Any floor((reps-1)/2) flips inside one block are corrected.
class RepetitionCode : public BinaryCode {
 public:
  RepetitionCode(int message_bits, int reps = 5)
      : k_(message_bits), reps_(reps) {
    if (k_ < 1 || reps_ < 1 || reps_ % 2 == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "repetition code needs k >= 1 and an odd repetition count");
    }
  }

  std::string name() const override {
    return "repetition-" + std::to_string(reps_);
  }
  int message_bits() const override { return k_; }
  int code_bits() const override { return k_ * reps_; }
  int correctable_errors() const override { return (reps_ - 1) / 2; }
  int per_block_correctable() const { return (reps_ - 1) / 2; }
  int reps() const { return reps_; }

  Bits Encode(const Bits& message) const override {
    CheckWidth(message, k_);
    Bits out;
    out.reserve(static_cast<size_t>(code_bits()));
    for (uint8_t b : message) out.insert(out.end(), reps_, b & 1);
    return out;
  }

  Bits Decode(const Bits& word) const override {
    CheckWidth(word, code_bits());
    Bits out(static_cast<size_t>(k_));
    for (int i = 0; i < k_; ++i) {
      int ones = 0;
      for (int r = 0; r < reps_; ++r) ones += word[i * reps_ + r] & 1;
      out[i] = 2 * ones > reps_;
    }
    return out;
  }

 private:
  int k_;
  int reps_;
};

// No redundancy; turns the full protocol into the warmup bit-by-bit scheme.
class IdentityCode : public BinaryCode {
 public:
  explicit IdentityCode(int message_bits) : k_(message_bits) {
    if (k_ < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  }

  std::string name() const override { return "identity"; }
  int message_bits() const override { return k_; }
  int code_bits() const override { return k_; }
  int correctable_errors() const override { return 0; }

  Bits Encode(const Bits& message) const override {
    CheckWidth(message, k_);
    return message;
  }
  Bits Decode(const Bits& word) const override {
    CheckWidth(word, k_);
    return word;
  }

 private:
  int k_;
};

inline std::shared_ptr<const BinaryCode> MakeCode(const std::string& name,
                                                  int message_bits) {
  if (name == "identity") return std::make_shared<IdentityCode>(message_bits);
  if (name.rfind("repetition", 0) == 0) {
    int reps = 5;
    if (name.size() > 11) reps = std::stoi(name.substr(11));
    return std::make_shared<RepetitionCode>(message_bits, reps);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown code: " + name);
}

}  // namespace ldp_hh

#endif  // LDP_HH_ECC_H_
