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

#include "ldp_hh/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "ldp_hh/harness.h"

namespace ldp_hh {
namespace {

constexpr double kNoiseless = std::numeric_limits<double>::infinity();

TEST(BasicRandomizerTest, KeepProbabilityAndRatio) {
  EXPECT_NEAR(KeepProbability(std::log(3.0)), 0.75, 1e-15);
  for (double eps : {0.25, 1.0, std::log(3.0), 3.0}) {
    const double p = KeepProbability(eps);
    EXPECT_NEAR(p / (1 - p), std::exp(eps), 1e-12 * std::exp(eps));
  }
  NoiseStream noise(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(BasicRandomizer(-1, kNoiseless, noise), -1);
  EXPECT_THROW(BasicRandomizer(1, 0.0, noise), Error);
}

TEST(ColumnSumsTest, DotAllMatchesDot) {
  for (uint64_t rows : {1u, 2u, 5u, 16u, 100u}) {
    ColumnSums sums;
    NoiseStream rng(rows);
    const int bits = ColumnBits(rows);
    for (int k = 0; k < 300; ++k) {
      const ZColumnDescriptor z = DrawZColumn(Prf(rows, 1, k), rows);
      sums.Add(z.Key(), (rng.NextU64() & 1) ? 1 : -1);
    }
    sums.Finalize();
    const auto all = sums.DotAll(bits, rows);
    ASSERT_EQ(all.size(), rows);
    for (uint64_t t = 0; t < rows; ++t) EXPECT_EQ(all[t], sums.Dot(t, bits, rows));
  }
}

TEST(ExplicitHistTest, QueryEqualsNaiveFormula) {
  constexpr int64_t kN = 700;
  constexpr uint64_t kRows = 37;
  ExplicitHist oracle(99, kRows, 1.0);
  NoiseStream data(5);
  std::vector<int> y(kN);
  for (int64_t j = 0; j < kN; ++j) {
    NoiseStream noise(1000 + j);
    y[j] = oracle.Randomize(j, data.NextU64() % kRows, noise);
    oracle.Ingest(j, y[j]);
  }
  oracle.Finalize();
  const auto all = oracle.QueryAll();
  for (uint64_t v = 0; v < kRows; ++v) {
    int64_t naive = 0;
    for (int64_t j = 0; j < kN; ++j) naive += y[j] * oracle.Column(j).Entry(v);
    EXPECT_EQ(oracle.RawSum(v), naive);
    EXPECT_EQ(oracle.Query(v), DebiasFactor(1.0) * static_cast<double>(naive));
    EXPECT_EQ(all[v], oracle.Query(v));
  }
  EXPECT_LE(oracle.distinct_columns(), 2 * 64u);
}

TEST(ExplicitHistTest, NoiselessAllSameItem) {
  constexpr int64_t kN = 500;
  ExplicitHist oracle(3, 64, kNoiseless);
  NoiseStream noise(0);
  for (int64_t j = 0; j < kN; ++j) oracle.Ingest(j, oracle.Randomize(j, 17, noise));
  oracle.Finalize();
  EXPECT_EQ(oracle.Query(17), kN);
}

TEST(ExplicitHistTest, Unbiased) {
  constexpr int64_t kN = 10000;
  constexpr int kRuns = 100;
  constexpr uint64_t kRows = 16;
  const double eps = 1.0;
  std::vector<double> planted;
  std::vector<double> absent;
  for (int run = 0; run < kRuns; ++run) {
    ExplicitHist oracle(500 + run, kRows, eps);
    for (int64_t j = 0; j < kN; ++j) {
      NoiseStream noise(Prf(run, 7, j));
      const uint64_t v = j < kN / 10 ? 3 : 4 + j % 12;
      oracle.Ingest(j, oracle.Randomize(j, v, noise));
    }
    oracle.Finalize();
    planted.push_back(oracle.Query(3));
    absent.push_back(oracle.Query(0));
  }
  const MetricSummary p = Summarize(planted);
  const MetricSummary a = Summarize(absent);
  EXPECT_NEAR(p.mean, kN / 10.0, 3 * *p.stddev / std::sqrt(kRuns));
  EXPECT_NEAR(a.mean, 0.0, 3 * *a.stddev / std::sqrt(kRuns));
}

TEST(ExplicitHistTest, ErrorEnvelopeOverHundredQueries) {
  constexpr int64_t kN = 20000;
  constexpr uint64_t kRows = 100;
  const double eps = 1.0;
  const double beta = 0.1;
  const double envelope = (3 / eps) * std::sqrt(kN * std::log(4 * 100 / beta));
  int ok = 0;
  constexpr int kRuns = 20;
  for (int run = 0; run < kRuns; ++run) {
    ExplicitHist oracle(run, kRows, eps);
    std::vector<int64_t> f(kRows, 0);
    NoiseStream data(run + 77);
    for (int64_t j = 0; j < kN; ++j) {
      const uint64_t v = (data.NextU64() % 3 == 0) ? 0 : data.NextU64() % kRows;
      ++f[v];
      NoiseStream noise(Prf(run, 8, j));
      oracle.Ingest(j, oracle.Randomize(j, v, noise));
    }
    oracle.Finalize();
    double worst = 0;
    for (uint64_t v = 0; v < kRows; ++v) {
      worst = std::max(worst, std::abs(oracle.Query(v) - static_cast<double>(f[v])));
    }
    ok += worst <= envelope;
  }
  EXPECT_GE(ok, 18);
}

// sum over users j in subset r of y_j * Z[t, j], straight from the reports.
int64_t DirectCell(const Hashtogram& h, const std::vector<int>& y, int64_t r,
                   uint64_t t) {
  int64_t s = 0;
  for (size_t j = 0; j < y.size(); ++j) {
    if (h.Subset(static_cast<int64_t>(j)) != r) continue;
    s += y[j] * h.Column(static_cast<int64_t>(j)).Entry(t);
  }
  return s;
}

TEST(HashtogramTest, BucketedEqualsDirectSum) {
  for (uint64_t instance = 0; instance < 60; ++instance) {
    NoiseStream rng(instance + 1);
    const int64_t n = 20 + static_cast<int64_t>(rng.NextU64() % 981);
    HashtogramConfig c;
    c.R = 1 + static_cast<int64_t>(rng.NextU64() % 7);
    c.T = 1 + rng.NextU64() % 300;
    Hashtogram h(instance, c, 0.5 + 2 * rng.NextDouble());
    std::vector<int> y(static_cast<size_t>(n));
    for (int64_t j = 0; j < n; ++j) {
      NoiseStream noise(Prf(instance, 9, j));
      y[j] = h.Randomize(j, rng.NextU64() % 50, noise);
      h.Ingest(j, y[j]);
    }
    h.Finalize();
    for (int64_t r = 0; r < c.R; ++r) {
      for (uint64_t t = 0; t < c.T; ++t) ASSERT_EQ(h.CellSum(r, t), DirectCell(h, y, r, t));
    }
  }
}

TEST(HashtogramTest, EmptySubsetsGiveZeroCells) {
  HashtogramConfig c{4, 32};
  Hashtogram h(1, c, 1.0);
  h.Finalize();
  for (int64_t r = 0; r < 4; ++r) {
    for (uint64_t t = 0; t < 32; ++t) EXPECT_EQ(h.Cell(r, t), 0.0);
  }
  EXPECT_EQ(h.Query(12345), 0.0);
}

TEST(HashtogramTest, SingleHashQueryIsTheCell) {
  HashtogramConfig c{1, 64};
  Hashtogram h(2, c, 1.0);
  for (int64_t j = 0; j < 300; ++j) {
    NoiseStream noise(j);
    h.Ingest(j, h.Randomize(j, j % 5, noise));
  }
  h.Finalize();
  for (uint64_t v = 0; v < 10; ++v) EXPECT_EQ(h.Query(v), h.Cell(0, h.HashPoint(0, v)));
}

TEST(HashtogramTest, QueryIsMedianOverAnySubsetOrder) {
  HashtogramConfig c{6, 128};
  Hashtogram h(3, c, 2.0);
  for (int64_t j = 0; j < 2000; ++j) {
    NoiseStream noise(j);
    h.Ingest(j, h.Randomize(j, j % 9, noise));
  }
  h.Finalize();
  for (uint64_t v = 0; v < 9; ++v) {
    std::vector<double> cells;
    for (int64_t r = c.R - 1; r >= 0; --r) cells.push_back(h.Cell(r, h.HashPoint(r, v)));
    std::rotate(cells.begin(), cells.begin() + 2, cells.end());
    EXPECT_EQ(h.Query(v), 6 * Median(cells));
  }
}

TEST(HashtogramTest, Deterministic) {
  HashtogramConfig c{5, 100};
  auto build = [&] {
    Hashtogram h(77, c, 1.0);
    for (int64_t j = 0; j < 1000; ++j) {
      NoiseStream noise(Prf(1, 2, j));
      h.Ingest(j, h.Randomize(j, j % 13, noise));
    }
    h.Finalize();
    return h;
  };
  const Hashtogram a = build();
  const Hashtogram b = build();
  for (uint64_t v = 0; v < 13; ++v) EXPECT_EQ(a.Query(v), b.Query(v));
}

TEST(HashtogramTest, PresetFormulas) {
  const HashtogramConfig few = FewQueriesPreset(100000, 1.0, 2, 1.0 / 256);
  EXPECT_EQ(few.R, static_cast<int64_t>(std::ceil(132 * std::log(4 * 2 * 256.0))));
  const double l = std::log(2 * 256.0);
  EXPECT_EQ(few.T, static_cast<uint64_t>(std::ceil(l + std::sqrt(100000 / l))));
  const HashtogramConfig many = ManyQueriesPreset(100000, 1.0, 1, 0.1);
  EXPECT_EQ(many.R, static_cast<int64_t>(std::ceil(300 * std::log(12 * 100000 / 0.1))));
  EXPECT_FALSE(ManyQueriesPresetFeasible(100000, many));
  EXPECT_TRUE(ManyQueriesPresetFeasible(43 * many.R, many));
}

// Planted element at n/2 with the many-queries preset; R is clamped to n/43
// because n = 10^5 cannot support the preset.
TEST(HashtogramTest, PlantedAndAbsentWithinEnvelope) {
  constexpr int64_t kN = 100000;
  const double eps = 1.0;
  const double beta = 0.1;
  HashtogramConfig c = ManyQueriesPreset(kN, eps, 1, beta);
  c.R = std::min<int64_t>(c.R, kN / 43);
  const double envelope = (400 / eps) * std::sqrt(kN * std::log(12 * kN * 1 / beta));
  int ok = 0;
  for (int run = 0; run < 20; ++run) {
    Hashtogram h(1000 + run, c, eps);
    NoiseStream data(run);
    for (int64_t j = 0; j < kN; ++j) {
      const uint64_t v = j % 2 == 0 ? 42 : 1000 + data.NextU64() % 1000000;
      NoiseStream noise(Prf(run, 3, j));
      h.Ingest(j, h.Randomize(j, v, noise));
    }
    h.Finalize();
    ok += std::abs(h.Query(42) - kN / 2.0) <= envelope &&
          std::abs(h.Query(7)) <= envelope;
  }
  EXPECT_GE(ok, 18);
}

TEST(HashtogramTest, RejectsBadConfigAndQueriesBeforeFinalize) {
  EXPECT_THROW(Hashtogram(1, HashtogramConfig{0, 4}, 1.0), Error);
  EXPECT_THROW(Hashtogram(1, HashtogramConfig{1, 4}, 0.0), Error);
  Hashtogram h(1, HashtogramConfig{2, 4}, 1.0);
  h.Ingest(0, 1);
  EXPECT_THROW(h.CellSum(0, 0), Error);
  h.Finalize();
  EXPECT_THROW(h.CellSum(2, 0), Error);
  EXPECT_THROW(h.CellSum(0, 4), Error);
}

}  // namespace
}  // namespace ldp_hh
