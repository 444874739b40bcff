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

// Bit-by-bit heavy hitters.
//
// Items are hashed into T cells. Users are split into groups, one group per
// (hash function, codeword bit); a user in group (r, l) reports on the pair
// (h_r(v), bit l of Enc(v)) to a small frequency oracle over [T] x {0, 1}.
// A heavy item dominates its cell, so for every bit position the oracle's
// count of (cell, true bit) beats (cell, other bit) and the whole codeword
// is read off cell by cell; decoding repairs the positions that lose. Every
// user also reports once to a frequency oracle over the full domain, which
// estimates the recovered candidates.

#ifndef LDP_HH_BITSTOGRAM_H_
#define LDP_HH_BITSTOGRAM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ldp_hh/core.h"
#include "ldp_hh/ecc.h"
#include "ldp_hh/oracles.h"
#include "ldp_hh/randomness.h"
#include "ldp_hh/result.h"

namespace ldp_hh {

// Bit of `v` at position `index`, most significant first.
inline int BitAt(const Bits& bits, int index) { return bits[index] & 1; }

// argmax{a(t, 0), a(t, 1)} with ties going to 0.
inline int ArgmaxBit(double a0, double a1) { return a1 > a0 ? 1 : 0; }

// ---------------------------------------------------------------------------
// Warmup: single hash, no error correction.

struct SuccinctHistOptions {
  // Number of hash cells; 0 derives it as round(32 n / w).
  uint64_t T = 0;
  PrivacyLedger* ledger = nullptr;
};

// Frequency above which the warmup protocol finds an item with probability
// at least 1/2:
// w = 32 log d log(16 log d) + (48 / eps) sqrt(2 n log d ln(64 log d)).
inline double SuccinctHistThreshold(int64_t n, int domain_bits, double epsilon) {
  const double L = domain_bits;
  const double noise =
      std::isinf(epsilon)
          ? 0.0
          : (48.0 / epsilon) *
                std::sqrt(2.0 * static_cast<double>(n) * L * std::log(64 * L));
  return 32.0 * L * std::log2(16 * L) + noise;
}

inline uint64_t SuccinctHistCells(int64_t n, int domain_bits, double epsilon) {
  const double w = SuccinctHistThreshold(n, domain_bits, epsilon);
  return static_cast<uint64_t>(
      std::max<int64_t>(1, RoundHalfAway(32.0 * static_cast<double>(n) / w)));
}

// Returns exactly T (item, estimate) pairs, one per hash cell, in cell order.
inline HeavyHittersResult RunSuccinctHist(std::span<const Item> items,
                                          double epsilon, uint64_t seed,
                                          const SuccinctHistOptions& options = {}) {
  if (items.empty()) throw Error(ErrorCode::kInvalidArgument, "no items");
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  const int64_t n = static_cast<int64_t>(items.size());
  const int depth = items.front().width;
  CheckDomainBits(depth);
  const uint64_t T =
      options.T > 0 ? options.T : SuccinctHistCells(n, depth, epsilon);
  const SharedRandomness sr(seed);
  const double half = epsilon / 2;

  const PairwiseHash hash = sr.MakeHash(Role::kSuccinctHash, 0, gf2::kMaxWidth, T);
  std::vector<ExplicitHist> levels;
  levels.reserve(static_cast<size_t>(depth));
  for (int l = 0; l < depth; ++l) {
    levels.emplace_back(sr.SubKey(Role::kSuccinctLevel, static_cast<uint64_t>(l)),
                        2 * T, half);
  }
  ExplicitHist whole(sr.SubKey(Role::kSuccinctFinal, 0), uint64_t{1} << depth,
                     half);

  HeavyHittersResult result;
  result.protocol = "succinct-hist";
  result.seed = seed;
  result.domain_bits = depth;
  result.params = {{"n", static_cast<double>(n)},
                   {"domain_bits", static_cast<double>(depth)},
                   {"epsilon", epsilon},
                   {"T", static_cast<double>(T)},
                   {"w", SuccinctHistThreshold(n, depth, epsilon)}};

  Stopwatch clock;
  std::vector<std::pair<int, int>> level_reports(items.size());
  std::vector<int> whole_reports(items.size());
  for (int64_t j = 0; j < n; ++j) {
    const Item& v = items[static_cast<size_t>(j)];
    if (v.width != depth) {
      throw Error(ErrorCode::kInvalidInput, "items differ in width");
    }
    const int l = static_cast<int>(
        sr.UniformBelow(Role::kSuccinctPartition, static_cast<uint64_t>(j),
                        static_cast<uint64_t>(depth)));
    const uint64_t point =
        2 * hash(v.value) + ((v.value >> (depth - 1 - l)) & 1);
    NoiseStream inner = sr.Noise(Role::kNoiseInner, static_cast<uint64_t>(j));
    NoiseStream outer = sr.Noise(Role::kNoiseOuter, static_cast<uint64_t>(j));
    level_reports[j] = {l, levels[l].Randomize(j, point, inner)};
    whole_reports[j] = whole.Randomize(j, v.value, outer);
    if (options.ledger) {
      options.ledger->Charge(j, half);
      options.ledger->Charge(j, half);
    }
  }
  result.timings.report_generation = clock.Lap();
  for (int64_t j = 0; j < n; ++j) {
    levels[level_reports[j].first].Ingest(j, level_reports[j].second);
    whole.Ingest(j, whole_reports[j]);
  }
  for (ExplicitHist& h : levels) h.Finalize();
  whole.Finalize();
  result.timings.ingestion = clock.Lap();

  std::vector<std::vector<double>> cells;
  cells.reserve(levels.size());
  for (const ExplicitHist& h : levels) cells.push_back(h.QueryAll());
  for (uint64_t t = 0; t < T; ++t) {
    uint64_t value = 0;
    for (int l = 0; l < depth; ++l) {
      value = (value << 1) |
              static_cast<uint64_t>(ArgmaxBit(cells[l][2 * t], cells[l][2 * t + 1]));
    }
    result.items.push_back(HeavyHitter{Item{value, depth}, whole.Query(value)});
  }
  result.timings.oracle_queries = clock.Lap();
  return result;
}

// ---------------------------------------------------------------------------
// Full protocol.

// Oracle used for each (hash function, codeword bit) group.
struct InnerOracleConfig {
  enum class Kind { kExplicit, kHashtogram };
  Kind kind = Kind::kExplicit;
  HashtogramConfig hashtogram;
};

struct BitstogramParams {
  int64_t n = 0;
  int domain_bits = 0;
  double epsilon = 0;
  double beta = 0;
  int64_t R = 1;    // hash functions on items
  uint64_t T = 1;   // cells per hash function
  std::shared_ptr<const BinaryCode> code;
  InnerOracleConfig inner;
  HashtogramConfig outer;
  // Candidates whose final estimate is at most this are discarded.
  double drop_threshold = 0;
  // Domains with d < sqrt(n) are answered by querying every element.
  bool explicit_small_domain = true;
  std::vector<std::string> notes;
};

// R = ceil(ln(1 / beta)).
inline int64_t DefaultBitstogramR(double beta) {
  return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(std::log(1 / beta))));
}

// T = max(1, round(eps n / (326 sqrt(R log d')))).
inline uint64_t DefaultBitstogramT(int64_t n, double epsilon, int64_t R,
                                   int code_bits) {
  const double t = epsilon * static_cast<double>(n) /
                   (326.0 * std::sqrt(static_cast<double>(R) * code_bits));
  if (!std::isfinite(t)) return static_cast<uint64_t>(std::max<int64_t>(1, n));
  return static_cast<uint64_t>(std::max<int64_t>(1, RoundHalfAway(t)));
}

// Outer hash count when n < 43 R: the largest odd R <= min(n / 43, sqrt(n) / 8).
// Estimates are R a_eps times a median of integers of fixed parity, so this
// keeps their lattice step 2 R a_eps below a quarter of the noise scale
// a_eps sqrt(n).
inline int64_t DeskScaleOuterR(int64_t n) {
  const double cap = std::min(static_cast<double>(n) / 43.0,
                              std::sqrt(static_cast<double>(n)) / 8.0);
  int64_t r = std::max<int64_t>(1, static_cast<int64_t>(cap));
  if (r % 2 == 0) --r;
  return r;
}

// Outer cell count in the same fallback: NextPow2(4 sqrt(n)). Every query
// carries about n / T of other items' mass from hash collisions, so this keeps
// that offset a small fraction of the noise scale a_eps sqrt(n).
inline uint64_t DeskScaleOuterT(int64_t n) {
  return NextPow2(4.0 * std::sqrt(static_cast<double>(n)));
}

// Inner oracles answer two queries per cell with per-query failure 1/256.
inline constexpr double kInnerDomainQueries = 2;
inline constexpr double kInnerBeta = 1.0 / 256;

// Fills every derived field. Presets that the user count cannot support are
// replaced by the closest usable configuration and recorded in `notes`.
inline BitstogramParams MakeBitstogramParams(
    int64_t n, int domain_bits, double epsilon, double beta,
    const std::string& code_name = "repetition-5", int64_t R = 0,
    uint64_t T = 0) {
  CheckPrivacyArgs(n, epsilon, beta);
  CheckDomainBits(domain_bits);
  BitstogramParams p;
  p.n = n;
  p.domain_bits = domain_bits;
  p.epsilon = epsilon;
  p.beta = beta;
  p.code = MakeCode(code_name, domain_bits);
  p.R = R > 0 ? R : DefaultBitstogramR(beta);
  const int code_bits = p.code->code_bits();
  p.T = T > 0 ? T : DefaultBitstogramT(n, epsilon, p.R, code_bits);
  p.drop_threshold = std::sqrt(static_cast<double>(n));

  const int64_t group_size = std::max<int64_t>(1, n / (p.R * code_bits));
  const HashtogramConfig inner =
      FewQueriesPreset(group_size, epsilon / 2, kInnerDomainQueries, kInnerBeta);
  if (FewQueriesPresetFeasible(group_size, inner, kInnerDomainQueries,
                               kInnerBeta)) {
    p.inner = {InnerOracleConfig::Kind::kHashtogram, inner};
  } else {
    p.inner = {InnerOracleConfig::Kind::kExplicit, {}};
    p.notes.push_back("inner oracle: groups of ~" + std::to_string(group_size) +
                      " users cannot support R=" + std::to_string(inner.R) +
                      "; using the explicit oracle over [T]x{0,1}");
  }

  const double queries = static_cast<double>(p.R) * static_cast<double>(p.T);
  HashtogramConfig outer = ManyQueriesPreset(n, epsilon / 2, queries, beta);
  if (!ManyQueriesPresetFeasible(n, outer)) {
    const int64_t fallback = DeskScaleOuterR(n);
    const uint64_t cells = std::max(outer.T, DeskScaleOuterT(n));
    p.notes.push_back("outer oracle: R=" + std::to_string(outer.R) +
                      " needs n >= 43R; using R=" + std::to_string(fallback) +
                      ", T=" + std::to_string(cells));
    outer.R = fallback;
    outer.T = cells;
  }
  p.outer = outer;
  if (p.code->name() != "identity") {
    p.notes.push_back("code " + p.code->name() +
                      " corrects per-block flips only (zeta=" +
                      std::to_string(p.code->zeta()) + ")");
  }
  return p;
}

namespace internal {

class InnerOracle {
 public:
  InnerOracle(const InnerOracleConfig& config, uint64_t key, uint64_t T,
              double epsilon)
      : impl_(Make(config, key, T, epsilon)) {}

  int Randomize(int64_t user, uint64_t point, NoiseStream& noise) const {
    return std::visit([&](const auto& o) { return o.Randomize(user, point, noise); },
                      impl_);
  }
  void Ingest(int64_t user, int y) {
    std::visit([&](auto& o) { o.Ingest(user, y); }, impl_);
  }
  void Finalize() {
    std::visit([](auto& o) { o.Finalize(); }, impl_);
    if (const auto* e = std::get_if<ExplicitHist>(&impl_)) all_ = e->QueryAll();
  }
  double Query(uint64_t point) const {
    if (!all_.empty()) return all_.at(point);
    return std::visit([&](const auto& o) { return o.Query(point); }, impl_);
  }

 private:
  using Impl = std::variant<ExplicitHist, Hashtogram>;

  static Impl Make(const InnerOracleConfig& config, uint64_t key, uint64_t T,
                   double epsilon) {
    if (config.kind == InnerOracleConfig::Kind::kExplicit) {
      return ExplicitHist(key, 2 * T, epsilon);
    }
    return Hashtogram(key, config.hashtogram, epsilon);
  }

  Impl impl_;
  std::vector<double> all_;
};

}  // namespace internal

inline HeavyHittersResult RunBitstogram(std::span<const Item> items,
                                        const BitstogramParams& params,
                                        uint64_t seed,
                                        PrivacyLedger* ledger = nullptr) {
  const int64_t n = params.n;
  if (static_cast<int64_t>(items.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "item count differs from n");
  }
  const int depth = params.domain_bits;
  for (const Item& v : items) {
    if (v.width != depth) {
      throw Error(ErrorCode::kInvalidInput, "item width differs from domain");
    }
  }
  const SharedRandomness sr(seed);
  HeavyHittersResult result;
  result.protocol = "bitstogram";
  result.seed = seed;
  result.domain_bits = depth;
  result.notes = params.notes;
  result.params = {{"n", static_cast<double>(n)},
                   {"domain_bits", static_cast<double>(depth)},
                   {"epsilon", params.epsilon},
                   {"beta", params.beta},
                   {"R", static_cast<double>(params.R)},
                   {"T", static_cast<double>(params.T)},
                   {"code_bits", static_cast<double>(params.code->code_bits())},
                   {"outer_R", static_cast<double>(params.outer.R)},
                   {"outer_T", static_cast<double>(params.outer.T)},
                   {"drop_threshold", params.drop_threshold}};
  Stopwatch clock;

  const double d = std::ldexp(1.0, depth);
  if (params.explicit_small_domain && d < std::sqrt(static_cast<double>(n))) {
    result.notes.push_back("d < sqrt(n): every domain element queried");
    ExplicitHist oracle(sr.SubKey(Role::kBitstogramOuter, 0), uint64_t{1} << depth,
                        params.epsilon);
    std::vector<int> reports(items.size());
    for (int64_t j = 0; j < n; ++j) {
      NoiseStream noise = sr.Noise(Role::kNoiseSingle, static_cast<uint64_t>(j));
      reports[j] = oracle.Randomize(j, items[j].value, noise);
      if (ledger) ledger->Charge(j, params.epsilon);
    }
    result.timings.report_generation = clock.Lap();
    for (int64_t j = 0; j < n; ++j) oracle.Ingest(j, reports[j]);
    oracle.Finalize();
    result.timings.ingestion = clock.Lap();
    const std::vector<double> all = oracle.QueryAll();
    for (uint64_t v = 0; v < all.size(); ++v) {
      if (all[v] > params.drop_threshold) {
        result.items.push_back(HeavyHitter{Item{v, depth}, all[v]});
      }
    }
  } else {
    const BinaryCode& code = *params.code;
    const int code_bits = code.code_bits();
    const double half = params.epsilon / 2;
    const uint64_t T = params.T;
    std::vector<PairwiseHash> hashes;
    hashes.reserve(static_cast<size_t>(params.R));
    for (int64_t r = 0; r < params.R; ++r) {
      hashes.push_back(sr.MakeHash(Role::kBitstogramHash, static_cast<uint64_t>(r),
                                   gf2::kMaxWidth, T));
    }
    std::vector<internal::InnerOracle> inner;
    inner.reserve(static_cast<size_t>(params.R) * code_bits);
    for (int64_t r = 0; r < params.R; ++r) {
      for (int l = 0; l < code_bits; ++l) {
        inner.emplace_back(params.inner,
                           sr.SubKey(Role::kBitstogramInner,
                                     static_cast<uint64_t>(r),
                                     static_cast<uint64_t>(l)),
                           T, half);
      }
    }
    Hashtogram outer(sr.SubKey(Role::kBitstogramOuter, 0), params.outer, half);

    const uint64_t groups = static_cast<uint64_t>(params.R) * code_bits;
    std::vector<std::pair<uint64_t, int>> inner_reports(items.size());
    std::vector<int> outer_reports(items.size());
    for (int64_t j = 0; j < n; ++j) {
      const Item& v = items[static_cast<size_t>(j)];
      const uint64_t group =
          sr.UniformBelow(Role::kBitstogramPartition, static_cast<uint64_t>(j), groups);
      const int64_t r = static_cast<int64_t>(group / code_bits);
      const int l = static_cast<int>(group % code_bits);
      const Bits word = code.Encode(ToBits(v));
      // Enc is injective, so hashing v is hashing its codeword.
      const uint64_t point = 2 * hashes[r](v.value) + BitAt(word, l);
      NoiseStream inner_noise = sr.Noise(Role::kNoiseInner, static_cast<uint64_t>(j));
      NoiseStream outer_noise = sr.Noise(Role::kNoiseOuter, static_cast<uint64_t>(j));
      inner_reports[j] = {group, inner[group].Randomize(j, point, inner_noise)};
      outer_reports[j] = outer.Randomize(j, v.value, outer_noise);
      if (ledger) {
        ledger->Charge(j, half);
        ledger->Charge(j, half);
      }
    }
    result.timings.report_generation = clock.Lap();
    for (int64_t j = 0; j < n; ++j) {
      inner[inner_reports[j].first].Ingest(j, inner_reports[j].second);
      outer.Ingest(j, outer_reports[j]);
    }
    for (auto& o : inner) o.Finalize();
    outer.Finalize();
    result.timings.ingestion = clock.Lap();

    std::set<uint64_t> seen;
    Bits word(static_cast<size_t>(code_bits));
    for (int64_t r = 0; r < params.R; ++r) {
      for (uint64_t t = 0; t < T; ++t) {
        for (int l = 0; l < code_bits; ++l) {
          const auto& o = inner[static_cast<size_t>(r) * code_bits + l];
          word[l] = static_cast<uint8_t>(ArgmaxBit(o.Query(2 * t), o.Query(2 * t + 1)));
        }
        const Item candidate = FromBits(code.Decode(word));
        if (!seen.insert(candidate.value).second) continue;
        const double estimate = outer.Query(candidate.value);
        if (estimate > params.drop_threshold) {
          result.items.push_back(HeavyHitter{candidate, estimate});
        }
      }
    }
    result.params["candidates"] = static_cast<double>(seen.size());
  }
  std::stable_sort(result.items.begin(), result.items.end(),
                   [](const HeavyHitter& a, const HeavyHitter& b) {
                     return a.estimate > b.estimate;
                   });
  result.timings.oracle_queries = clock.Lap();
  return result;
}

}  // namespace ldp_hh

#endif  // LDP_HH_BITSTOGRAM_H_
