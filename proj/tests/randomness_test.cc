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

#include "ldp_hh/randomness.h"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "ldp_hh/gf2.h"

namespace ldp_hh {
namespace {

// Brute-force irreducibility: no polynomial of degree 1..w/2 divides p.
bool IrreducibleByTrialDivision(uint64_t p) {
  const int w = gf2::Degree(p);
  for (int deg = 1; deg <= w / 2; ++deg) {
    for (uint64_t q = uint64_t{1} << deg; q < (uint64_t{2} << deg); ++q) {
      if (gf2::PolyMod(p, q) == 0) return false;
    }
  }
  return true;
}

TEST(Gf2Test, BenOrAgreesWithTrialDivision) {
  for (uint64_t p = 2; p < (uint64_t{1} << 13); ++p) {
    ASSERT_EQ(gf2::IsIrreducible(p), IrreducibleByTrialDivision(p)) << p;
  }
}

TEST(Gf2Test, ModulusHasExactDegree) {
  for (int w = 1; w <= gf2::kMaxWidth; ++w) {
    const uint64_t mod = gf2::Modulus(w);
    EXPECT_EQ(gf2::Degree(mod), w);
    EXPECT_TRUE(gf2::IsIrreducible(mod));
  }
  EXPECT_EQ(gf2::Modulus(8), 0x11bu);  // x^8 + x^4 + x^3 + x + 1
}

TEST(Gf2Test, MultiplicationIsAFieldForSmallWidths) {
  for (int w = 1; w <= 7; ++w) {
    const gf2::Field f(w);
    const uint64_t size = uint64_t{1} << w;
    for (uint64_t a = 1; a < size; ++a) {
      std::set<uint64_t> products;
      for (uint64_t b = 0; b < size; ++b) products.insert(f.Mul(a, b));
      EXPECT_EQ(products.size(), size) << "w=" << w << " a=" << a;
    }
  }
}

TEST(PairwiseHashTest, Deterministic) {
  const SharedRandomness sr(42);
  const PairwiseHash h = sr.MakeHash(Role::kTest, 3, 20, 1024);
  const PairwiseHash h2 = sr.MakeHash(Role::kTest, 3, 20, 1024);
  for (uint64_t x = 0; x < 1000; ++x) EXPECT_EQ(h(x), h2(x));
}

TEST(PairwiseHashTest, RejectsInputsWiderThanField) {
  const PairwiseHash h(8, 4, 3, 5);
  EXPECT_THROW(h(256), Error);
}

TEST(PairwiseHashTest, NonPowerOfTwoRangeStaysInRange) {
  const SharedRandomness sr(1);
  const PairwiseHash h = sr.MakeHash(Role::kTest, 0, 63, 1000);
  for (uint64_t x = 0; x < 10000; ++x) EXPECT_LT(h(x * 7919), 1000u);
}

// Over fresh seeds, (h(x), h(x')) is uniform on [m]^2: every cell count lies
// within 5 binomial standard deviations of its mean.
TEST(HashPairTest, PairwiseIndependenceOfBucket) {
  constexpr int kTrials = 100000;
  constexpr uint64_t kM = 8;
  const Prefix x{0b1011, 4};
  const Prefix y{0b10110110, 8};
  std::vector<int> counts(kM * kM, 0);
  int sign_sum = 0;
  for (int s = 0; s < kTrials; ++s) {
    const SharedRandomness sr(static_cast<uint64_t>(s));
    const HashPair hp(sr.MakeHash(Role::kTreeHistHashH, 0, 11, kM),
                      sr.MakeHash(Role::kTreeHistHashG, 0, 11, 2));
    ++counts[hp.Bucket(x) * kM + hp.Bucket(y)];
    sign_sum += hp.Sign(x);
  }
  const double p = 1.0 / (kM * kM);
  const double mean = kTrials * p;
  const double sd = std::sqrt(kTrials * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, mean, 5 * sd);
  EXPECT_LE(std::abs(static_cast<double>(sign_sum) / kTrials), 0.02);
}

TEST(HashPairTest, PrefixesAndItemsShareOneFunction) {
  const SharedRandomness sr(9);
  const PairwiseHash h = sr.MakeHash(Role::kTreeHistHashH, 0, 17, 64);
  const HashPair hp(h, sr.MakeHash(Role::kTreeHistHashG, 0, 17, 2));
  for (int len = 1; len <= 16; ++len) {
    const Prefix p{0x5a5a & LowMask(len), len};
    EXPECT_EQ(hp.Bucket(p), h(p.Key()));
  }
}

TEST(RrBitTest, KeepProbabilityOneIsIdentity) {
  NoiseStream noise(5);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(RrBit(1, 1.0, noise), 1);
    EXPECT_EQ(RrBit(-1, 1.0, noise), -1);
  }
}

TEST(RrBitTest, RejectsKeepProbabilityOutsideRange) {
  NoiseStream noise(5);
  EXPECT_THROW(RrBit(1, 0.49, noise), Error);
  EXPECT_THROW(RrBit(1, 1.01, noise), Error);
}

TEST(RrBitTest, HalfIsUninformative) {
  NoiseStream noise(11);
  constexpr int kCalls = 100000;
  int64_t agree = 0;
  for (int i = 0; i < kCalls; ++i) {
    const int x = (i % 2) ? 1 : -1;
    agree += RrBit(x, KeepProbability(0.0), noise) * x;
  }
  EXPECT_LE(std::abs(static_cast<double>(agree) / kCalls), 0.02);
}

// The tree randomizer spends eps / 2 per report: e / (e + 1) at eps = 2.
TEST(RrBitTest, AgreementRateAtEpsilonTwo) {
  const double p = KeepProbability(2.0 / 2);
  EXPECT_NEAR(p, 0.7310585786300049, 1e-15);
  NoiseStream noise(12);
  constexpr int kCalls = 100000;
  int kept = 0;
  for (int i = 0; i < kCalls; ++i) kept += RrBit(1, p, noise) == 1;
  EXPECT_NEAR(static_cast<double>(kept) / kCalls, p, 0.01);
}

TEST(RrBitTest, LikelihoodRatioIsExactlyExpEpsilon) {
  for (double eps : {0.1, 0.5, 1.0, std::log(3.0), 2.0, 4.0}) {
    EXPECT_NEAR(RrLikelihoodRatio(KeepProbability(eps)), std::exp(eps),
                1e-12 * std::exp(eps));
  }
}

TEST(AssignmentTest, DeterministicAndInRange) {
  const SharedRandomness sr(77);
  for (int64_t i = 0; i < 1000; ++i) {
    const auto a = AssignUserTreeHist(sr, 1000, i, 24, 1849, 4096);
    EXPECT_EQ(a, AssignUserTreeHist(sr, 1000, i, 24, 1849, 4096));
    EXPECT_GE(a.level, 1);
    EXPECT_LE(a.level, 24);
    EXPECT_LT(a.hash_index, 1849);
    EXPECT_LT(a.row, 4096u);
  }
  EXPECT_THROW(AssignUserTreeHist(sr, 1000, 1000, 24, 1849, 4096), Error);
  EXPECT_THROW(AssignUserTreeHist(sr, 1000, -1, 24, 1849, 4096), Error);
}

// Chi-square goodness of fit of the level marginal over 10^6 users. The
// critical value is the 0.999 quantile of chi-square with 23 degrees of
// freedom.
TEST(AssignmentTest, LevelsUniform) {
  constexpr int64_t kN = 1000000;
  constexpr int kLevels = 24;
  const SharedRandomness sr(2024);
  std::vector<int64_t> counts(kLevels, 0);
  std::vector<int64_t> bucket(kLevels * 1849, 0);
  for (int64_t i = 0; i < kN; ++i) {
    const auto a = AssignUserTreeHist(sr, kN, i, kLevels, 1849, 16384);
    ++counts[a.level - 1];
    ++bucket[(a.level - 1) * 1849 + a.hash_index];
  }
  const double expected = static_cast<double>(kN) / kLevels;
  double chi2 = 0;
  for (int64_t c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 49.73);
  int64_t total = 0;
  const double mean = static_cast<double>(kN) / bucket.size();
  for (int64_t b : bucket) {
    total += b;
    EXPECT_NEAR(b, mean, 7 * std::sqrt(mean));
  }
  EXPECT_EQ(total, kN);
}

TEST(ZColumnTest, EntriesDeterministicAndRangeChecked) {
  const ZColumnDescriptor z = DrawZColumn(Prf(1, 2, 3), 16);
  for (uint64_t t = 0; t < 16; ++t) EXPECT_EQ(z.Entry(t), z.Entry(t));
  EXPECT_THROW(z.Entry(16), Error);
}

TEST(ZColumnTest, AtMostTwoTDistinctColumns) {
  constexpr uint64_t kT = 16;
  std::set<std::vector<int>> columns;
  for (uint64_t a = 0; a < kT; ++a) {
    for (uint32_t b = 0; b < 2; ++b) {
      const ZColumnDescriptor z{a, b, ColumnBits(kT), kT};
      std::vector<int> col;
      for (uint64_t t = 0; t < kT; ++t) col.push_back(z.Entry(t));
      columns.insert(col);
    }
  }
  EXPECT_EQ(columns.size(), 2 * kT);
}

TEST(ZColumnTest, KeyRoundTrips) {
  for (uint64_t k = 0; k < 64; ++k) {
    EXPECT_EQ(ZColumnDescriptor::FromKey(k, 5, 32).Key(), k);
  }
}

TEST(ZColumnTest, PairwiseIndependentAcrossRows) {
  constexpr int kTrials = 100000;
  constexpr uint64_t kT = 16;
  const uint64_t t1 = 3;
  const uint64_t t2 = 12;
  int counts[2][2] = {{0, 0}, {0, 0}};
  int64_t sum = 0;
  for (int s = 0; s < kTrials; ++s) {
    const ZColumnDescriptor z = DrawZColumn(Prf(99, 1, static_cast<uint64_t>(s)), kT);
    ++counts[z.Entry(t1) > 0][z.Entry(t2) > 0];
    sum += z.Entry(t1);
  }
  const double sd = std::sqrt(kTrials * 0.25 * 0.75);
  for (auto& row : counts) {
    for (int c : row) EXPECT_NEAR(c, kTrials / 4.0, 5 * sd);
  }
  EXPECT_LE(std::abs(static_cast<double>(sum) / kTrials), 0.02);
}

TEST(KWiseTest, RequirementFormula) {
  EXPECT_EQ(KWiseRowRequirement(std::ldexp(1.0, 20), 0.05), 51);
  EXPECT_EQ(KWiseRowRequirement(2, 1 - 1e-12), 3);
  int prev = 0;
  for (double d = 2; d < 1e12; d *= 3) {
    const int k = KWiseRowRequirement(d, 0.1);
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(KWiseTest, RowEntriesBalanced) {
  const KWiseRow row(5, 0, 4);
  EXPECT_EQ(row.k(), 4);
  int64_t sum = 0;
  for (uint64_t j = 0; j < 100000; ++j) sum += row.Entry(j);
  EXPECT_LE(std::abs(static_cast<double>(sum) / 100000), 0.02);
}

TEST(SharedRandomnessTest, RolesAreSeparated) {
  const SharedRandomness sr(3);
  EXPECT_NE(sr.Derive(Role::kNoiseInner, 5), sr.Derive(Role::kNoiseOuter, 5));
  EXPECT_NE(sr.Derive(Role::kNoiseInner, 5), sr.Derive(Role::kNoiseInner, 6));
  EXPECT_EQ(sr.Derive(Role::kNoiseInner, 5), SharedRandomness(3).Derive(Role::kNoiseInner, 5));
}

}  // namespace
}  // namespace ldp_hh
