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

// One-bit frequency oracles built on a public +-1 matrix Z.
//
// User j holding point v reports R(Z[v, j]), where R is randomized response
// with keep probability e^eps / (e^eps + 1). The explicit oracle answers
// a(v) = c * sum_j y_j Z[v, j]; the hashed oracle first maps points into [T]
// with one of R hash functions chosen by the user's subset and takes R times
// the median over subsets. Columns of Z are pairwise independent and drawn
// from a family with few distinct members, so the server groups report bits
// by column and never touches individual users at query time.

#ifndef LDP_HH_ORACLES_H_
#define LDP_HH_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ldp_hh/core.h"
#include "ldp_hh/randomness.h"

namespace ldp_hh {

inline int BasicRandomizer(int x, double epsilon, NoiseStream& noise) {
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  return RrBit(x, KeepProbability(epsilon), noise);
}

// Sums of report bits grouped by Z-column descriptor.
class ColumnSums {
 public:
  void Add(uint64_t column_key, int64_t y) { pending_.emplace_back(column_key, y); }

  void Finalize() {
    if (pending_.empty()) return;
    pending_.insert(pending_.end(), sums_.begin(), sums_.end());
    std::sort(pending_.begin(), pending_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    sums_.clear();
    for (size_t i = 0; i < pending_.size();) {
      const uint64_t key = pending_[i].first;
      int64_t s = 0;
      for (; i < pending_.size() && pending_[i].first == key; ++i) {
        s += pending_[i].second;
      }
      if (s != 0) sums_.emplace_back(key, s);
    }
    pending_.clear();
  }

  bool finalized() const { return pending_.empty(); }

  // sum over distinct columns z of (sum of y with column z) * z[row]
  int64_t Dot(uint64_t row, int bits, uint64_t rows) const {
    int64_t total = 0;
    for (const auto& [key, s] : sums_) {
      total += s * ZColumnDescriptor::FromKey(key, bits, rows).Entry(row);
    }
    return total;
  }

  size_t distinct() const { return sums_.size(); }

  // Dot() for every row in [0, rows): the column sums folded onto their
  // Hadamard index, then one in-place Walsh-Hadamard butterfly.
  std::vector<int64_t> DotAll(int bits, uint64_t rows) const {
    std::vector<int64_t> v(size_t{1} << bits, 0);
    for (const auto& [key, s] : sums_) v[key >> 1] += (key & 1) ? -s : s;
    for (size_t h = 1; h < v.size(); h <<= 1) {
      for (size_t i = 0; i < v.size(); i += 2 * h) {
        for (size_t k = i; k < i + h; ++k) {
          const int64_t x = v[k];
          const int64_t y = v[k + h];
          v[k] = x + y;
          v[k + h] = x - y;
        }
      }
    }
    v.resize(rows);
    return v;
  }

 private:
  std::vector<std::pair<uint64_t, int64_t>> pending_;
  std::vector<std::pair<uint64_t, int64_t>> sums_;
};

// Frequency oracle over the points [0, rows) answering every point directly.
class ExplicitHist {
 public:
  ExplicitHist(uint64_t key, uint64_t rows, double epsilon)
      : key_(key), rows_(rows), epsilon_(epsilon),
        debias_(DebiasFactor(epsilon)) {
    if (rows == 0) throw Error(ErrorCode::kInvalidArgument, "empty domain");
    if (!(epsilon > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
    }
  }

  uint64_t rows() const { return rows_; }
  double epsilon() const { return epsilon_; }
  double debias() const { return debias_; }
  int64_t participants() const { return participants_; }

  ZColumnDescriptor Column(int64_t user) const {
    return DrawZColumn(
        Prf(key_, static_cast<uint64_t>(Role::kExplicitColumn),
            static_cast<uint64_t>(user)),
        rows_);
  }

  int Randomize(int64_t user, uint64_t point, NoiseStream& noise) const {
    return BasicRandomizer(Column(user).Entry(point), epsilon_, noise);
  }

  void Ingest(int64_t user, int y) {
    sums_.Add(Column(user).Key(), y);
    ++participants_;
  }

  void Finalize() { sums_.Finalize(); }

  // sum_j y_j Z[point, j]
  int64_t RawSum(uint64_t point) const {
    if (!sums_.finalized()) {
      throw Error(ErrorCode::kInvalidArgument, "oracle not finalized");
    }
    if (point >= rows_) throw Error(ErrorCode::kOutOfRange, "point out of range");
    return sums_.Dot(point, ColumnBits(rows_), rows_);
  }

  double Query(uint64_t point) const {
    return debias_ * static_cast<double>(RawSum(point));
  }

  // Query() for every point; only for domains small enough to enumerate.
  std::vector<double> QueryAll() const {
    if (rows_ > (uint64_t{1} << 24)) {
      throw Error(ErrorCode::kInvalidArgument, "domain too large to enumerate");
    }
    if (!sums_.finalized()) {
      throw Error(ErrorCode::kInvalidArgument, "oracle not finalized");
    }
    std::vector<double> out;
    out.reserve(rows_);
    for (int64_t s : sums_.DotAll(ColumnBits(rows_), rows_)) {
      out.push_back(debias_ * static_cast<double>(s));
    }
    return out;
  }

  size_t distinct_columns() const { return sums_.distinct(); }

 private:
  uint64_t key_;
  uint64_t rows_;
  double epsilon_;
  double debias_;
  int64_t participants_ = 0;
  ColumnSums sums_;
};

struct HashtogramConfig {
  int64_t R = 1;
  uint64_t T = 1;

  friend bool operator==(const HashtogramConfig&,
                         const HashtogramConfig&) = default;
};

// Parameters under which the hashed oracle is accurate for a few queries:
// R >= 132 ln(4d'/beta), T >= eps^2 ln(d'/beta) + eps sqrt(n / ln(d'/beta)).
// Valid when n >= 8 R ln(8d'/beta).
// Cell count from a preset formula, capped at n (infinite in noiseless mode).
inline uint64_t PresetCells(double t, int64_t n) {
  const double cap = std::max(1.0, static_cast<double>(n));
  return static_cast<uint64_t>(std::clamp(std::ceil(t), 1.0, cap));
}

inline HashtogramConfig FewQueriesPreset(int64_t n, double epsilon,
                                         double d_prime, double beta) {
  const double l = std::log(d_prime / beta);
  HashtogramConfig c;
  c.R = static_cast<int64_t>(std::ceil(132.0 * std::log(4 * d_prime / beta)));
  c.T = PresetCells(
      epsilon * epsilon * l + epsilon * std::sqrt(static_cast<double>(n) / l), n);
  return c;
}

inline bool FewQueriesPresetFeasible(int64_t n, const HashtogramConfig& c,
                                     double d_prime, double beta) {
  return static_cast<double>(n) >=
         8.0 * static_cast<double>(c.R) * std::log(8 * d_prime / beta);
}

// Parameters under which the hashed oracle is accurate for many queries:
// R >= 300 ln(12 n d'/beta), T >= eps sqrt(n / ln(n d'/beta)). Valid when
// n >= 43 R.
inline HashtogramConfig ManyQueriesPreset(int64_t n, double epsilon,
                                          double d_prime, double beta) {
  const double nd = static_cast<double>(n) * d_prime;
  HashtogramConfig c;
  c.R = static_cast<int64_t>(std::ceil(300.0 * std::log(12 * nd / beta)));
  c.T = PresetCells(
      epsilon * std::sqrt(static_cast<double>(n) / std::log(nd / beta)), n);
  return c;
}

inline bool ManyQueriesPresetFeasible(int64_t n, const HashtogramConfig& c) {
  return n >= 43 * c.R;
}

// Hashed frequency oracle over points [0, 2^63).
class Hashtogram {
 public:
  Hashtogram(uint64_t key, const HashtogramConfig& config, double epsilon)
      : key_(key), config_(config), epsilon_(epsilon),
        debias_(DebiasFactor(epsilon)), column_bits_(ColumnBits(config.T)),
        sums_(static_cast<size_t>(config.R)) {
    if (config.R < 1 || config.T < 1) {
      throw Error(ErrorCode::kInvalidArgument, "R and T must be >= 1");
    }
    if (!(epsilon > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
    }
    hashes_.reserve(static_cast<size_t>(config.R));
    for (int64_t r = 0; r < config.R; ++r) {
      const u128 x = Prf(key_, static_cast<uint64_t>(Role::kHashtogramHash),
                         static_cast<uint64_t>(r));
      hashes_.emplace_back(gf2::kMaxWidth, config.T,
                           static_cast<uint64_t>(x >> 64),
                           static_cast<uint64_t>(x));
    }
  }

  const HashtogramConfig& config() const { return config_; }
  double epsilon() const { return epsilon_; }
  double debias() const { return debias_; }
  int64_t participants() const { return participants_; }

  int64_t Subset(int64_t user) const {
    return static_cast<int64_t>(ReduceBelow(
        Prf(key_, static_cast<uint64_t>(Role::kHashtogramSubset),
            static_cast<uint64_t>(user)),
        static_cast<uint64_t>(config_.R)));
  }

  uint64_t HashPoint(int64_t r, uint64_t point) const {
    return hashes_.at(static_cast<size_t>(r))(point);
  }

  ZColumnDescriptor Column(int64_t user) const {
    return DrawZColumn(
        Prf(key_, static_cast<uint64_t>(Role::kHashtogramColumn),
            static_cast<uint64_t>(user)),
        config_.T);
  }

  int Randomize(int64_t user, uint64_t point, NoiseStream& noise) const {
    const uint64_t t = HashPoint(Subset(user), point);
    return BasicRandomizer(Column(user).Entry(t), epsilon_, noise);
  }

  void Ingest(int64_t user, int y) {
    sums_[static_cast<size_t>(Subset(user))].Add(Column(user).Key(), y);
    ++participants_;
    finalized_ = false;
  }

  // Computes sum_{j in I_r} y_j Z[t, j] for every (r, t) from the per-column
  // partial sums.
  void Finalize() {
    if (finalized_) return;
    cells_.assign(static_cast<size_t>(config_.R) * config_.T, 0);
    for (int64_t r = 0; r < config_.R; ++r) {
      ColumnSums& s = sums_[static_cast<size_t>(r)];
      s.Finalize();
      if (s.distinct() == 0) continue;
      int64_t* row = cells_.data() + static_cast<size_t>(r) * config_.T;
      const double direct_cost = static_cast<double>(s.distinct()) * config_.T;
      const double transform_cost =
          static_cast<double>(uint64_t{1} << column_bits_) * (column_bits_ + 1);
      if (direct_cost <= 4 * transform_cost) {
        for (uint64_t t = 0; t < config_.T; ++t) {
          row[t] = s.Dot(t, column_bits_, config_.T);
        }
      } else {
        const std::vector<int64_t> all = s.DotAll(column_bits_, config_.T);
        std::copy(all.begin(), all.end(), row);
      }
    }
    finalized_ = true;
  }

  int64_t CellSum(int64_t r, uint64_t t) const {
    if (!finalized_) {
      throw Error(ErrorCode::kInvalidArgument, "oracle not finalized");
    }
    if (r < 0 || r >= config_.R || t >= config_.T) {
      throw Error(ErrorCode::kOutOfRange, "cell out of range");
    }
    return cells_[static_cast<size_t>(r) * config_.T + t];
  }

  // a_r(t)
  double Cell(int64_t r, uint64_t t) const {
    return debias_ * static_cast<double>(CellSum(r, t));
  }

  // R * median_r a_r(h_r(point))
  double Query(uint64_t point) const {
    std::vector<double> a(static_cast<size_t>(config_.R));
    for (int64_t r = 0; r < config_.R; ++r) {
      a[static_cast<size_t>(r)] = Cell(r, HashPoint(r, point));
    }
    return static_cast<double>(config_.R) * Median(std::move(a));
  }

 private:
  uint64_t key_;
  HashtogramConfig config_;
  double epsilon_;
  double debias_;
  int column_bits_;
  std::vector<PairwiseHash> hashes_;
  std::vector<ColumnSums> sums_;
  std::vector<int64_t> cells_;
  int64_t participants_ = 0;
  bool finalized_ = false;
};

}  // namespace ldp_hh

#endif  // LDP_HH_ORACLES_H_
