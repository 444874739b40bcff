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

#include "ldp_hh/ecc.h"

#include "gtest/gtest.h"

namespace ldp_hh {
namespace {

TEST(RepetitionCodeTest, EncodesExample) {
  const RepetitionCode code(3);
  const Bits word = code.Encode(ToBits(Item{0b101, 3}));
  EXPECT_EQ(BitsToString(word), "111110000011111");
  EXPECT_EQ(FromBits(code.Decode(word)), (Item{0b101, 3}));
}

TEST(RepetitionCodeTest, OneFlipPerBlockCorrected) {
  const RepetitionCode code(3);
  const Bits clean = code.Encode(ToBits(Item{0b101, 3}));
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        Bits w = clean;
        w[a] ^= 1;
        w[5 + b] ^= 1;
        w[10 + c] ^= 1;
        EXPECT_EQ(code.Decode(w), ToBits(Item{0b101, 3}));
      }
    }
  }
}

// Every 8-bit message, and every pattern of at most two flips confined to a
// single block.
TEST(RepetitionCodeTest, ExhaustiveSingleBlockFlips) {
  const RepetitionCode code(8);
  for (uint64_t x = 0; x < 256; ++x) {
    const Bits msg = ToBits(Item{x, 8});
    const Bits clean = code.Encode(msg);
    ASSERT_EQ(code.Decode(clean), msg);
    for (int block = 0; block < 8; ++block) {
      for (int mask = 0; mask < 32; ++mask) {
        if (__builtin_popcount(mask) > 2) continue;
        Bits w = clean;
        for (int k = 0; k < 5; ++k) {
          if (mask & (1 << k)) w[block * 5 + k] ^= 1;
        }
        ASSERT_EQ(code.Decode(w), msg) << x << " " << block << " " << mask;
      }
    }
  }
}

TEST(RepetitionCodeTest, ThreeFlipsInOneBlockFlipThatBit) {
  const RepetitionCode code(2);
  Bits w = code.Encode({0, 1});
  w[0] = w[1] = w[2] = 1;
  EXPECT_EQ(code.Decode(w), (Bits{1, 1}));
}

TEST(RepetitionCodeTest, AdversarialFractionIsTwoOverCodeLength) {
  const RepetitionCode code(8);
  EXPECT_EQ(code.code_bits(), 40);
  EXPECT_EQ(code.correctable_errors(), 2);
  EXPECT_EQ(code.per_block_correctable(), 2);
  EXPECT_DOUBLE_EQ(code.zeta(), 2.0 / 40);
}

TEST(RepetitionCodeTest, RejectsWrongWidths) {
  const RepetitionCode code(4);
  try {
    code.Encode(Bits(5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidLength);
  }
  EXPECT_THROW(code.Decode(Bits(19)), Error);
  EXPECT_THROW(RepetitionCode(4, 4), Error);
}

TEST(IdentityCodeTest, RoundTripsWithoutRedundancy) {
  const auto code = MakeCode("identity", 6);
  EXPECT_EQ(code->code_bits(), 6);
  EXPECT_EQ(code->zeta(), 0.0);
  for (uint64_t x = 0; x < 64; ++x) {
    const Bits m = ToBits(Item{x, 6});
    EXPECT_EQ(code->Decode(code->Encode(m)), m);
  }
}

TEST(MakeCodeTest, Names) {
  EXPECT_EQ(MakeCode("repetition-5", 4)->code_bits(), 20);
  EXPECT_EQ(MakeCode("repetition-3", 4)->code_bits(), 12);
  EXPECT_THROW(MakeCode("reed-solomon", 4), Error);
}

}  // namespace
}  // namespace ldp_hh
