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

// Heavy hitters by a level-by-level scan of the binary prefix tree.
//
// Each user is assigned a (level, hash index, Hadamard row) triple from the
// shared randomness and sends two one-bit reports: one about the prefix of
// its item at its level (pruning phase) and one about the full item (final
// phase). A report is the user's count-sketch contribution g(x) * e_{h(x)}
// after a Hadamard transform, sampled at the user's row and passed through
// randomized response. The server keeps only per-(level, hash, row) sums of
// report bits and answers frequency queries from those sums.

#ifndef LDP_HH_TREEHIST_H_
#define LDP_HH_TREEHIST_H_

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ldp_hh/core.h"
#include "ldp_hh/hadamard.h"
#include "ldp_hh/randomness.h"
#include "ldp_hh/result.h"

namespace ldp_hh {

enum class Phase { kPruning, kFinal };

inline const char* PhaseName(Phase p) {
  return p == Phase::kPruning ? "pruning" : "final";
}

struct Report {
  int64_t user = 0;
  Phase phase = Phase::kPruning;
  int bit = 1;  // +1 or -1
};

// The public state of one run: parameters, the t hash pairs and the shared
// randomness that assigns users to buckets.
class TreeHist {
 public:
  TreeHist(const ProtocolParams& params, uint64_t seed)
      : params_(params), randomness_(seed), hadamard_(params.m) {
    CheckDomainBits(params.domain_bits);
    if (params.t < 1) throw Error(ErrorCode::kInvalidArgument, "t must be >= 1");
    if (params.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
    const int width =
        std::max(params.domain_bits, Log2Exact(params.m)) + 1;
    hashes_.reserve(static_cast<size_t>(params.t));
    for (int64_t j = 0; j < params.t; ++j) {
      hashes_.emplace_back(
          randomness_.MakeHash(Role::kTreeHistHashH, j, width, params.m),
          randomness_.MakeHash(Role::kTreeHistHashG, j, width, 2));
    }
  }

  const ProtocolParams& params() const { return params_; }
  const SharedRandomness& randomness() const { return randomness_; }
  const HashPair& hash(int64_t j) const { return hashes_.at(j); }

  TreeHistAssignment Assign(int64_t user) const {
    return AssignUserTreeHist(randomness_, params_.n, user,
                              params_.domain_bits, params_.t, params_.m);
  }

  // Probability of reporting the clean bit: e^{eps/2} / (e^{eps/2} + 1).
  double KeepProb() const { return KeepProbability(params_.epsilon / 2); }

  // The point a user reports about: its prefix at the assigned level in the
  // pruning phase, the full item in the final phase.
  Prefix ReportedPoint(const Item& v, const TreeHistAssignment& a,
                       Phase phase) const {
    return phase == Phase::kPruning ? PrefixOf(v, a.level)
                                    : PrefixOf(v, v.width);
  }

  // x_i = g_j(point) * W[r_i, h_j(point)] before randomization.
  int CleanBit(const Item& v, const TreeHistAssignment& a, Phase phase) const {
    const Prefix x = ReportedPoint(v, a, phase);
    const auto [c, s] = hashes_[a.hash_index].Eval(x);
    return s * hadamard_.Entry(a.row, c);
  }

  Report LocalRnd(const Item& v, int64_t user, const TreeHistAssignment& a,
                  Phase phase, NoiseStream& noise) const {
    CheckItem(v);
    return Report{user, phase, RrBit(CleanBit(v, a, phase), KeepProb(), noise)};
  }

  // Uses the user's own noise stream for this phase.
  Report LocalRnd(const Item& v, int64_t user, Phase phase) const {
    NoiseStream noise = randomness_.Noise(
        phase == Phase::kPruning ? Role::kTreeHistNoisePruning
                                 : Role::kTreeHistNoiseFinal,
        static_cast<uint64_t>(user));
    return LocalRnd(v, user, Assign(user), phase, noise);
  }

  // Exact Pr[report = +1 | item] for a fixed assignment.
  double ProbabilityOfPlus(const Item& v, const TreeHistAssignment& a,
                           Phase phase) const {
    const double p = KeepProb();
    return CleanBit(v, a, phase) == 1 ? p : 1.0 - p;
  }

 private:
  void CheckItem(const Item& v) const {
    if (v.width != params_.domain_bits) {
      throw Error(ErrorCode::kInvalidInput, "item width differs from domain");
    }
  }

  ProtocolParams params_;
  SharedRandomness randomness_;
  Hadamard hadamard_;
  std::vector<HashPair> hashes_;
};

struct CellEntry {
  uint64_t row = 0;
  int64_t sum = 0;
};

// Sums of report bits per (level, hash index, row) for the pruning phase and
// per (hash index, row) for the final phase. Only nonzero cells are stored,
// so memory is O(min(n, levels * t * m)).
class SketchAccumulator {
 public:
  SketchAccumulator(Phase phase, int levels, int64_t t, uint64_t m, int64_t n)
      : phase_(phase), levels_(levels), t_(t), m_(m),
        seen_(static_cast<size_t>(n), false) {}

  static SketchAccumulator For(const TreeHist& protocol, Phase phase) {
    const ProtocolParams& p = protocol.params();
    return SketchAccumulator(phase, p.domain_bits, p.t, p.m, p.n);
  }

  Phase phase() const { return phase_; }
  int64_t ingested() const { return ingested_; }

  void Ingest(const Report& report, const TreeHistAssignment& a) {
    if (report.phase != phase_) {
      throw Error(ErrorCode::kPhaseMismatch,
                  std::string("report phase ") + PhaseName(report.phase) +
                      " does not match accumulator phase " +
                      PhaseName(phase_));
    }
    if (report.user < 0 || static_cast<size_t>(report.user) >= seen_.size()) {
      throw Error(ErrorCode::kOutOfRange, "user index out of range");
    }
    if (seen_[report.user]) {
      throw Error(ErrorCode::kDuplicateUser,
                  "user " + std::to_string(report.user) +
                      " already reported in this phase");
    }
    seen_[report.user] = true;
    ++ingested_;
    pending_.emplace_back(CellIndex(a), report.bit);
    finalized_ = false;
  }

  // Cell-wise addition of another shard over disjoint users.
  void Merge(const SketchAccumulator& other) {
    if (other.phase_ != phase_ || other.levels_ != levels_ ||
        other.t_ != t_ || other.m_ != m_ || other.seen_.size() != seen_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "incompatible accumulators");
    }
    for (size_t i = 0; i < seen_.size(); ++i) {
      if (other.seen_[i]) {
        if (seen_[i]) {
          throw Error(ErrorCode::kDuplicateUser,
                      "user " + std::to_string(i) + " present in both shards");
        }
        seen_[i] = true;
      }
    }
    ingested_ += other.ingested_;
    pending_.insert(pending_.end(), other.pending_.begin(),
                    other.pending_.end());
    for (size_t b = 0; b + 1 < other.offsets_.size(); ++b) {
      for (size_t k = other.offsets_[b]; k < other.offsets_[b + 1]; ++k) {
        pending_.emplace_back(b * m_ + other.entries_[k].row,
                              other.entries_[k].sum);
      }
    }
    finalized_ = false;
  }

  // Folds pending contributions into the sorted cell table.
  void Finalize() {
    if (finalized_) return;
    for (size_t b = 0; b + 1 < offsets_.size(); ++b) {
      for (size_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
        pending_.emplace_back(b * m_ + entries_[k].row, entries_[k].sum);
      }
    }
    std::sort(pending_.begin(), pending_.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    const size_t buckets = NumBuckets();
    entries_.clear();
    offsets_.assign(buckets + 1, 0);
    size_t i = 0;
    for (size_t b = 0; b < buckets; ++b) {
      offsets_[b] = entries_.size();
      const uint64_t end = (b + 1) * m_;
      while (i < pending_.size() && pending_[i].first < end) {
        const uint64_t cell = pending_[i].first;
        int64_t sum = 0;
        while (i < pending_.size() && pending_[i].first == cell) {
          sum += pending_[i].second;
          ++i;
        }
        if (sum != 0) entries_.push_back(CellEntry{cell - b * m_, sum});
      }
    }
    offsets_[buckets] = entries_.size();
    pending_.clear();
    pending_.shrink_to_fit();
    finalized_ = true;
  }

  // Nonzero cells of one (level, hash index) bucket, ordered by row. The
  // level is ignored in the final phase.
  std::span<const CellEntry> Bucket(int level, int64_t j) const {
    RequireFinalized();
    const size_t b = BucketIndex(level, j);
    return std::span<const CellEntry>(entries_.data() + offsets_[b],
                                      offsets_[b + 1] - offsets_[b]);
  }

  int64_t Cell(int level, int64_t j, uint64_t row) const {
    if (row >= m_) throw Error(ErrorCode::kOutOfRange, "row out of range");
    const auto bucket = Bucket(level, j);
    auto it = std::lower_bound(
        bucket.begin(), bucket.end(), row,
        [](const CellEntry& e, uint64_t r) { return e.row < r; });
    return (it != bucket.end() && it->row == row) ? it->sum : 0;
  }

  // Sum of |cell| over all cells; at most the number of ingested reports.
  int64_t TotalAbsoluteMass() const {
    RequireFinalized();
    int64_t total = 0;
    for (const CellEntry& e : entries_) total += e.sum < 0 ? -e.sum : e.sum;
    return total;
  }

  size_t NonzeroCells() const {
    RequireFinalized();
    return entries_.size();
  }

 private:
  size_t NumBuckets() const {
    return phase_ == Phase::kPruning
               ? static_cast<size_t>(levels_) * static_cast<size_t>(t_)
               : static_cast<size_t>(t_);
  }

  size_t BucketIndex(int level, int64_t j) const {
    if (j < 0 || j >= t_) throw Error(ErrorCode::kOutOfRange, "hash index");
    if (phase_ == Phase::kFinal) return static_cast<size_t>(j);
    if (level < 1 || level > levels_) {
      throw Error(ErrorCode::kOutOfRange, "level out of range");
    }
    return static_cast<size_t>(level - 1) * static_cast<size_t>(t_) +
           static_cast<size_t>(j);
  }

  uint64_t CellIndex(const TreeHistAssignment& a) const {
    return BucketIndex(a.level, a.hash_index) * m_ + a.row;
  }

  void RequireFinalized() const {
    if (!finalized_) {
      throw Error(ErrorCode::kInvalidArgument, "accumulator not finalized");
    }
  }

  Phase phase_;
  int levels_;
  int64_t t_;
  uint64_t m_;
  std::vector<bool> seen_;
  int64_t ingested_ = 0;
  std::vector<std::pair<uint64_t, int64_t>> pending_;
  std::vector<CellEntry> entries_;
  std::vector<size_t> offsets_;
  bool finalized_ = false;
};

struct FreqEstimate {
  Prefix query;
  std::vector<double> per_hash;  // empty unless requested
  double estimate = 0;
};

// One per-hash estimate from an integer sum of report bits. Shared by the
// bucketed oracle and direct-sum checks so both round identically.
inline double ScaleEstimate(double gamma, double a_eps, int sign, int64_t sum) {
  return gamma * a_eps * static_cast<double>(sign * sum);
}

// Estimates the frequency of each length-`level` prefix in `queries` as the
// median over hash indices j of gamma * a_eps * g_j(q) * sum_k B[j][k] W[k, h_j(q)].
inline std::vector<FreqEstimate> FreqOracle(const TreeHist& protocol,
                                            const SketchAccumulator& acc,
                                            std::span<const Prefix> queries,
                                            int level, double gamma,
                                            bool keep_per_hash = false) {
  const ProtocolParams& p = protocol.params();
  if (acc.phase() == Phase::kFinal && level != p.domain_bits) {
    throw Error(ErrorCode::kInvalidLength,
                "final-phase queries must be full items");
  }
  std::vector<FreqEstimate> out;
  out.reserve(queries.size());
  std::vector<double> per_hash(static_cast<size_t>(p.t));
  for (const Prefix& q : queries) {
    if (q.length != level) {
      throw Error(ErrorCode::kInvalidLength,
                  "query length " + std::to_string(q.length) +
                      " differs from level " + std::to_string(level));
    }
    for (int64_t j = 0; j < p.t; ++j) {
      const auto [c, s] = protocol.hash(j).Eval(q);
      int64_t sum = 0;
      for (const CellEntry& e : acc.Bucket(level, j)) {
        sum += e.sum * Hadamard::UncheckedEntry(e.row, c);
      }
      per_hash[j] = ScaleEstimate(gamma, p.a_eps, s, sum);
    }
    FreqEstimate est;
    est.query = q;
    est.estimate = Median(per_hash);
    if (keep_per_hash) est.per_hash = per_hash;
    out.push_back(std::move(est));
  }
  return out;
}

// Runs every user's randomizer for one phase and aggregates the reports.
inline SketchAccumulator CollectReports(const TreeHist& protocol,
                                        std::span<const Item> items,
                                        Phase phase,
                                        PhaseTimings* timings = nullptr,
                                        PrivacyLedger* ledger = nullptr) {
  if (static_cast<int64_t>(items.size()) != protocol.params().n) {
    throw Error(ErrorCode::kInvalidArgument, "item count differs from n");
  }
  SketchAccumulator acc = SketchAccumulator::For(protocol, phase);
  std::vector<Report> reports;
  reports.reserve(items.size());
  Stopwatch clock;
  for (size_t i = 0; i < items.size(); ++i) {
    reports.push_back(protocol.LocalRnd(items[i], static_cast<int64_t>(i), phase));
    if (ledger) ledger->Charge(static_cast<int64_t>(i), protocol.params().epsilon / 2);
  }
  if (timings) timings->report_generation += clock.Lap();
  for (const Report& r : reports) acc.Ingest(r, protocol.Assign(r.user));
  acc.Finalize();
  if (timings) timings->ingestion += clock.Lap();
  return acc;
}

struct TreeHistOptions {
  // Keep at most this many prefixes per level (highest estimates first);
  // 0 means unlimited.
  int64_t max_survivors = 0;
  PrivacyLedger* ledger = nullptr;
};

inline HeavyHittersResult RunTreeHist(std::span<const Item> items,
                                      const ProtocolParams& params,
                                      uint64_t seed,
                                      const TreeHistOptions& options = {}) {
  const TreeHist protocol(params, seed);
  const int depth = params.domain_bits;
  HeavyHittersResult result;
  result.protocol = "treehist";
  result.seed = seed;
  result.domain_bits = depth;
  result.params = {{"n", static_cast<double>(params.n)},
                   {"domain_bits", static_cast<double>(depth)},
                   {"epsilon", params.epsilon},
                   {"beta", params.beta},
                   {"t", static_cast<double>(params.t)},
                   {"m", static_cast<double>(params.m)},
                   {"eta", params.eta},
                   {"a_eps", params.a_eps}};
  if (params.below_triviality_bound) {
    result.notes.push_back("n <= ln(n/beta) * log2(d): error may be trivial");
  }

  const SketchAccumulator pruning =
      CollectReports(protocol, items, Phase::kPruning, &result.timings,
                     options.ledger);
  const SketchAccumulator final_acc =
      CollectReports(protocol, items, Phase::kFinal, &result.timings,
                     options.ledger);

  Stopwatch clock;
  const double threshold = 2 * params.eta;
  std::vector<Prefix> prefixes = {Prefix{}};
  for (int level = 1; level <= depth && !prefixes.empty(); ++level) {
    const std::vector<Prefix> candidates = ChildSet(prefixes, depth);
    result.queried_per_level.push_back(static_cast<int64_t>(candidates.size()));
    const std::vector<FreqEstimate> est =
        FreqOracle(protocol, pruning, candidates, level,
                   static_cast<double>(params.t) * depth);
    std::vector<const FreqEstimate*> kept;
    for (const FreqEstimate& e : est) {
      if (e.estimate >= threshold) kept.push_back(&e);
    }
    if (options.max_survivors > 0 &&
        static_cast<int64_t>(kept.size()) > options.max_survivors) {
      std::stable_sort(kept.begin(), kept.end(), [](auto* a, auto* b) {
        return a->estimate > b->estimate;
      });
      kept.resize(static_cast<size_t>(options.max_survivors));
    }
    prefixes.clear();
    for (const FreqEstimate* e : kept) prefixes.push_back(e->query);
    std::sort(prefixes.begin(), prefixes.end());
    result.survivors_per_level.push_back(static_cast<int64_t>(prefixes.size()));
  }
  for (const FreqEstimate& e :
       FreqOracle(protocol, final_acc, prefixes, depth,
                  static_cast<double>(params.t))) {
    result.items.push_back(HeavyHitter{e.query.AsItem(), e.estimate});
  }
  std::stable_sort(result.items.begin(), result.items.end(),
                   [](const HeavyHitter& a, const HeavyHitter& b) {
                     return a.estimate > b.estimate;
                   });
  result.timings.oracle_queries += clock.Lap();
  return result;
}

}  // namespace ldp_hh

#endif  // LDP_HH_TREEHIST_H_
