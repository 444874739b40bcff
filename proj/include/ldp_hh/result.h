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

#ifndef LDP_HH_RESULT_H_
#define LDP_HH_RESULT_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ldp_hh/core.h"

namespace ldp_hh {

struct HeavyHitter {
  Item item;
  double estimate = 0;
};

// Wall-clock seconds per protocol phase.
struct PhaseTimings {
  double report_generation = 0;
  double ingestion = 0;
  double oracle_queries = 0;

  double server() const { return ingestion + oracle_queries; }
};

// A succinct histogram: listed items with estimates; every unlisted item is
// implicitly estimated as 0.
struct HeavyHittersResult {
  std::string protocol;
  uint64_t seed = 0;
  int domain_bits = 0;
  std::vector<HeavyHitter> items;
  std::map<std::string, double> params;
  std::vector<std::string> notes;
  // Tree protocol only: prefixes kept at each level, and nodes queried.
  std::vector<int64_t> survivors_per_level;
  std::vector<int64_t> queried_per_level;
  PhaseTimings timings;
};

using SuccinctHistogram = HeavyHittersResult;

// Records every randomizer invocation on a user's data and the privacy
// parameter it used.
class PrivacyLedger {
 public:
  explicit PrivacyLedger(int64_t n)
      : invocations_(static_cast<size_t>(n), 0),
        spent_(static_cast<size_t>(n), 0.0) {}

  void Charge(int64_t user, double epsilon) {
    ++invocations_.at(static_cast<size_t>(user));
    spent_.at(static_cast<size_t>(user)) += epsilon;
  }

  int invocations(int64_t user) const {
    return invocations_.at(static_cast<size_t>(user));
  }
  double spent(int64_t user) const { return spent_.at(static_cast<size_t>(user)); }
  int64_t users() const { return static_cast<int64_t>(spent_.size()); }

 private:
  std::vector<int> invocations_;
  std::vector<double> spent_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace ldp_hh

#endif  // LDP_HH_RESULT_H_
