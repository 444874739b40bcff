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

// Experiment plumbing: datasets, ground truth, metrics and repeated runs.

#ifndef LDP_HH_HARNESS_H_
#define LDP_HH_HARNESS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ldp_hh/bitstogram.h"
#include "ldp_hh/core.h"
#include "ldp_hh/oracles.h"
#include "ldp_hh/randomness.h"
#include "ldp_hh/result.h"
#include "ldp_hh/treehist.h"

namespace ldp_hh {

struct Dataset {
  int domain_bits = 0;
  std::vector<Item> items;
  std::string provenance;

  int64_t n() const { return static_cast<int64_t>(items.size()); }
};

// ---------------------------------------------------------------------------
// Item text encodings.

inline std::string ItemToHex(const Item& v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int digits = std::max(1, (v.width + 3) / 4);
  std::string s(static_cast<size_t>(digits), '0');
  uint64_t x = v.value;
  for (int i = digits - 1; i >= 0; --i, x >>= 4) s[i] = kDigits[x & 0xf];
  return s;
}

inline Item ItemFromHex(const std::string& hex, int domain_bits) {
  if (hex.empty() || hex.size() > 16) {
    throw Error(ErrorCode::kInvalidInput, "bad hex item '" + hex + "'");
  }
  uint64_t value = 0;
  for (char c : hex) {
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      throw Error(ErrorCode::kInvalidInput, "bad hex item '" + hex + "'");
    }
    value = (value << 4) | static_cast<uint64_t>(digit);
  }
  return MakeItem(value, domain_bits);
}

// Words over a-z, 5 bits per character (pad = 0, a..z = 1..26), followed by
// zero bits up to a multiple of 8.
inline constexpr int kBitsPerChar = 5;

inline int WordDomainBits(int chars) {
  if (chars < 1) throw Error(ErrorCode::kInvalidArgument, "chars must be >= 1");
  const int bits = (kBitsPerChar * chars + 7) / 8 * 8;
  if (bits > kMaxDomainBits) {
    throw Error(ErrorCode::kInvalidArgument, "word too long for 62-bit items");
  }
  return bits;
}

// Truncates or pads with '\0' (the pad symbol) to exactly `chars` symbols.
inline std::string CanonicalToken(const std::string& token, int chars) {
  std::string s = token.substr(0, static_cast<size_t>(chars));
  for (char c : s) {
    if (c < 'a' || c > 'z') {
      throw Error(ErrorCode::kInvalidInput,
                  "token '" + token + "' has characters outside a-z");
    }
  }
  s.resize(static_cast<size_t>(chars), '\0');
  return s;
}

inline Item EncodeToken(const std::string& token, int chars) {
  const std::string canon = CanonicalToken(token, chars);
  const int bits = WordDomainBits(chars);
  uint64_t value = 0;
  for (char c : canon) {
    value = (value << kBitsPerChar) |
            static_cast<uint64_t>(c == '\0' ? 0 : c - 'a' + 1);
  }
  return Item{value << (bits - kBitsPerChar * chars), bits};
}

// Inverse of EncodeToken; pad symbols are dropped, unknown codes become '?'.
inline std::string DecodeToken(const Item& v, int chars) {
  const uint64_t body = v.value >> (v.width - kBitsPerChar * chars);
  std::string s;
  for (int i = chars - 1; i >= 0; --i) {
    const uint64_t code = (body >> (kBitsPerChar * i)) & 0x1f;
    if (code == 0) continue;
    s.push_back(code <= 26 ? static_cast<char>('a' + code - 1) : '?');
  }
  return s;
}

// ---------------------------------------------------------------------------
// Dataset files: "ldp-items v1 D=<bits> n=<count>", then one hex item per line.

inline void WriteDataset(const Dataset& ds, std::ostream& out) {
  out << "ldp-items v1 D=" << ds.domain_bits << " n=" << ds.n() << "\n";
  for (const Item& v : ds.items) out << ItemToHex(v) << "\n";
}

inline Dataset ReadDataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kIo, "empty dataset file");
  }
  std::istringstream header(line);
  std::string magic, version, dfield, nfield;
  header >> magic >> version >> dfield >> nfield;
  if (magic != "ldp-items" || version != "v1" || dfield.rfind("D=", 0) != 0 ||
      nfield.rfind("n=", 0) != 0) {
    throw Error(ErrorCode::kIo, "bad dataset header: " + line);
  }
  Dataset ds;
  int64_t n = 0;
  try {
    ds.domain_bits = std::stoi(dfield.substr(2));
    n = std::stoll(nfield.substr(2));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kIo, "bad dataset header: " + line);
  }
  CheckDomainBits(ds.domain_bits);
  if (n < 1) throw Error(ErrorCode::kIo, "dataset must hold n >= 1 items");
  ds.items.reserve(static_cast<size_t>(n));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ds.items.push_back(ItemFromHex(line, ds.domain_bits));
  }
  if (ds.n() != n) {
    throw Error(ErrorCode::kIo, "header says n=" + std::to_string(n) +
                                    " but file has " + std::to_string(ds.n()));
  }
  return ds;
}

inline void WriteDatasetFile(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  WriteDataset(ds, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

inline Dataset ReadDatasetFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  Dataset ds = ReadDataset(in);
  ds.provenance = "file:" + path;
  return ds;
}

// ---------------------------------------------------------------------------
// Generators.

struct PowerlawSpec {
  int domain_bits = 32;  // ignored when word_chars > 0
  int64_t n = 0;
  double power = 15;
  int64_t bins = 100;
  // > 0: each bin is a random lowercase word of this many characters.
  int word_chars = 0;
  uint64_t seed = 0;
};

// Normalized weights k^-power for k = 1..bins.
inline std::vector<double> PowerlawWeights(int64_t bins, double power) {
  std::vector<double> w(static_cast<size_t>(bins));
  double total = 0;
  for (int64_t k = 1; k <= bins; ++k) {
    w[k - 1] = std::pow(static_cast<double>(k), -power);
    total += w[k - 1];
  }
  for (double& x : w) x /= total;
  return w;
}

// Distinct random labels for the bins, in bin order.
inline std::vector<Item> PowerlawLabels(const PowerlawSpec& spec) {
  const int bits =
      spec.word_chars > 0 ? WordDomainBits(spec.word_chars) : spec.domain_bits;
  CheckDomainBits(bits);
  const double space = spec.word_chars > 0 ? std::pow(26.0, spec.word_chars)
                                           : std::ldexp(1.0, bits);
  if (static_cast<double>(spec.bins) > space) {
    throw Error(ErrorCode::kInvalidArgument, "more bins than domain elements");
  }
  NoiseStream rng(Prf(spec.seed, static_cast<uint64_t>(Role::kDataset), 0));
  std::vector<Item> labels;
  std::map<uint64_t, bool> used;
  while (static_cast<int64_t>(labels.size()) < spec.bins) {
    Item v;
    if (spec.word_chars > 0) {
      std::string word;
      for (int c = 0; c < spec.word_chars; ++c) {
        word.push_back(static_cast<char>('a' + rng.NextU64() % 26));
      }
      v = EncodeToken(word, spec.word_chars);
    } else {
      v = Item{rng.NextU64() & LowMask(bits), bits};
    }
    if (used.emplace(v.value, true).second) labels.push_back(v);
  }
  return labels;
}

// n i.i.d. draws from the power-law histogram over random labels.
inline Dataset GenPowerlaw(const PowerlawSpec& spec) {
  if (!(spec.power > 1)) {
    throw Error(ErrorCode::kInvalidArgument, "power must be > 1");
  }
  if (spec.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (spec.bins < 1) throw Error(ErrorCode::kInvalidArgument, "bins must be >= 1");
  const std::vector<Item> labels = PowerlawLabels(spec);
  std::vector<double> cdf = PowerlawWeights(spec.bins, spec.power);
  for (size_t k = 1; k < cdf.size(); ++k) cdf[k] += cdf[k - 1];
  NoiseStream rng(Prf(spec.seed, static_cast<uint64_t>(Role::kDataset), 1));
  Dataset ds;
  ds.domain_bits = labels.front().width;
  ds.items.reserve(static_cast<size_t>(spec.n));
  for (int64_t i = 0; i < spec.n; ++i) {
    const double u = rng.NextDouble();
    size_t k = static_cast<size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    ds.items.push_back(labels[std::min(k, labels.size() - 1)]);
  }
  std::ostringstream prov;
  prov << "powerlaw power=" << spec.power << " bins=" << spec.bins
       << " seed=" << spec.seed;
  if (spec.word_chars > 0) prov << " chars=" << spec.word_chars;
  ds.provenance = prov.str();
  return ds;
}

// `count` copies of `planted` followed by `n - count` uniform draws from the
// other domain elements.
inline Dataset GenPlanted(int domain_bits, int64_t n, const Item& planted,
                          int64_t count, uint64_t seed) {
  CheckDomainBits(domain_bits);
  if (count < 0 || count > n) {
    throw Error(ErrorCode::kInvalidArgument, "planted count outside [0, n]");
  }
  NoiseStream rng(Prf(seed, static_cast<uint64_t>(Role::kDataset), 2));
  Dataset ds;
  ds.domain_bits = domain_bits;
  ds.items.assign(static_cast<size_t>(count), planted);
  const uint64_t others = LowMask(domain_bits);  // d - 1
  while (ds.n() < n) {
    uint64_t x = static_cast<uint64_t>(u128{rng.NextU64()} * others >> 64);
    if (x >= planted.value) ++x;
    ds.items.push_back(Item{x, domain_bits});
  }
  ds.provenance = "planted";
  return ds;
}

inline std::vector<std::string> ReadTokens(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) tokens.push_back(line);
  }
  if (tokens.empty()) throw Error(ErrorCode::kIo, "empty token corpus");
  return tokens;
}

// n tokens drawn i.i.d. with replacement, each encoded with EncodeToken.
inline Dataset SampleCorpus(const std::vector<std::string>& tokens, int chars,
                            int64_t n, uint64_t seed) {
  if (tokens.empty()) throw Error(ErrorCode::kIo, "empty token corpus");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  std::vector<Item> encoded;
  encoded.reserve(tokens.size());
  for (const std::string& t : tokens) encoded.push_back(EncodeToken(t, chars));
  NoiseStream rng(Prf(seed, static_cast<uint64_t>(Role::kDataset), 3));
  Dataset ds;
  ds.domain_bits = WordDomainBits(chars);
  ds.items.reserve(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    const uint64_t k = static_cast<uint64_t>(
        u128{rng.NextU64()} * encoded.size() >> 64);
    ds.items.push_back(encoded[k]);
  }
  return ds;
}

inline Dataset IngestCorpus(const std::string& path, int chars, int64_t n,
                            uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  Dataset ds = SampleCorpus(ReadTokens(in), chars, n, seed);
  ds.provenance = "corpus:" + path;
  return ds;
}

// ---------------------------------------------------------------------------
// Ground truth and metrics.

struct GroundTruth {
  int64_t n = 0;
  std::map<uint64_t, int64_t> counts;  // only items with f > 0

  int64_t f(uint64_t v) const {
    const auto it = counts.find(v);
    return it == counts.end() ? 0 : it->second;
  }
};

inline GroundTruth ExactCounts(const Dataset& ds) {
  GroundTruth gt;
  gt.n = ds.n();
  for (const Item& v : ds.items) ++gt.counts[v.value];
  return gt;
}

struct EvalRow {
  Item item;
  int64_t true_f = 0;
  double estimate = 0;
};

struct EvalReport {
  double threshold = 0;
  int64_t listed = 0;
  int64_t true_heavy = 0;
  int64_t true_positives = 0;
  // 0/0 is reported as 1 for both.
  double precision = 1;
  double recall = 1;
  // max |f_hat - f| over listed items.
  double list_max_error = 0;
  // max |f_hat - f| over listed and truly heavy items; unlisted items are
  // estimated as 0.
  double linf_error = 0;
  std::vector<EvalRow> rows;  // one per listed item, in list order
  PhaseTimings timings;
};

inline double DefaultHeavyThreshold(int64_t n) {
  return 15.0 * std::sqrt(static_cast<double>(n));
}

inline EvalReport Evaluate(const HeavyHittersResult& result,
                           const GroundTruth& gt, double threshold) {
  if (!(threshold > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be > 0");
  }
  EvalReport r;
  r.threshold = threshold;
  r.timings = result.timings;
  std::map<uint64_t, double> listed;
  for (const HeavyHitter& h : result.items) {
    const int64_t f = gt.f(h.item.value);
    r.rows.push_back(EvalRow{h.item, f, h.estimate});
    listed.emplace(h.item.value, h.estimate);
    const double err = std::abs(h.estimate - static_cast<double>(f));
    r.list_max_error = std::max(r.list_max_error, err);
    if (static_cast<double>(f) >= threshold) ++r.true_positives;
  }
  r.listed = static_cast<int64_t>(result.items.size());
  r.linf_error = r.list_max_error;
  for (const auto& [v, f] : gt.counts) {
    if (static_cast<double>(f) < threshold) continue;
    ++r.true_heavy;
    const auto it = listed.find(v);
    const double est = it == listed.end() ? 0.0 : it->second;
    r.linf_error = std::max(r.linf_error, std::abs(est - static_cast<double>(f)));
  }
  int64_t heavy_found = 0;
  for (const auto& [v, est] : listed) {
    if (static_cast<double>(gt.f(v)) >= threshold) ++heavy_found;
  }
  r.precision = r.listed == 0 ? 1.0
                              : static_cast<double>(r.true_positives) /
                                    static_cast<double>(r.listed);
  r.recall = r.true_heavy == 0 ? 1.0
                               : static_cast<double>(heavy_found) /
                                     static_cast<double>(r.true_heavy);
  return r;
}

// ---------------------------------------------------------------------------
// Protocol dispatch.

// Zero / negative fields mean "derive from the defaults".
struct ProtocolOverrides {
  int64_t t = 0;
  uint64_t m = 0;
  double eta = 0;
  int64_t R = 0;
  uint64_t T = 0;
  int64_t max_survivors = 0;
  std::string code = "repetition-5";
};

inline ProtocolParams TreeHistParamsWithOverrides(int64_t n, int domain_bits,
                                                  double epsilon, double beta,
                                                  const ProtocolOverrides& o) {
  ProtocolParams p = MakeTreeHistParamsForBits(n, domain_bits, epsilon, beta);
  if (o.t > 0) p.t = o.t;
  if (o.m > 0) {
    if (!IsPow2(o.m)) {
      throw Error(ErrorCode::kInvalidArgument, "m must be a power of two");
    }
    p.m = o.m;
  }
  if (o.eta > 0) p.eta = o.eta;
  return p;
}

// Queries every domain element of a single explicit oracle (d <= 2^24) and
// lists those above sqrt(n).
inline HeavyHittersResult RunExplicitOracle(std::span<const Item> items,
                                            int domain_bits, double epsilon,
                                            uint64_t seed) {
  CheckDomainBits(domain_bits);
  if (domain_bits > 24) {
    throw Error(ErrorCode::kInvalidDomain,
                "explicit-oracle enumerates the domain; needs D <= 24");
  }
  const int64_t n = static_cast<int64_t>(items.size());
  const SharedRandomness sr(seed);
  ExplicitHist oracle(sr.SubKey(Role::kExplicitColumn, 0),
                      uint64_t{1} << domain_bits, epsilon);
  HeavyHittersResult result;
  result.protocol = "explicit-oracle";
  result.seed = seed;
  result.domain_bits = domain_bits;
  const double drop = std::sqrt(static_cast<double>(n));
  result.params = {{"n", static_cast<double>(n)},
                   {"domain_bits", static_cast<double>(domain_bits)},
                   {"epsilon", epsilon},
                   {"drop_threshold", drop}};
  Stopwatch clock;
  std::vector<int> reports(items.size());
  for (int64_t j = 0; j < n; ++j) {
    const Item& v = items[static_cast<size_t>(j)];
    if (v.width != domain_bits) {
      throw Error(ErrorCode::kInvalidInput, "item width differs from domain");
    }
    NoiseStream noise = sr.Noise(Role::kNoiseSingle, static_cast<uint64_t>(j));
    reports[j] = oracle.Randomize(j, v.value, noise);
  }
  result.timings.report_generation = clock.Lap();
  for (int64_t j = 0; j < n; ++j) oracle.Ingest(j, reports[j]);
  oracle.Finalize();
  result.timings.ingestion = clock.Lap();
  const std::vector<double> all = oracle.QueryAll();
  for (uint64_t v = 0; v < all.size(); ++v) {
    if (all[v] > drop) result.items.push_back(HeavyHitter{Item{v, domain_bits}, all[v]});
  }
  std::stable_sort(result.items.begin(), result.items.end(),
                   [](const HeavyHitter& a, const HeavyHitter& b) {
                     return a.estimate > b.estimate;
                   });
  result.timings.oracle_queries = clock.Lap();
  return result;
}

inline const std::vector<std::string>& ProtocolNames() {
  static const std::vector<std::string> kNames = {"treehist", "bitstogram",
                                                  "explicit-oracle"};
  return kNames;
}

inline HeavyHittersResult RunProtocol(const std::string& protocol,
                                      const Dataset& ds, double epsilon,
                                      double beta, uint64_t seed,
                                      const ProtocolOverrides& o = {}) {
  if (protocol == "treehist") {
    const ProtocolParams p =
        TreeHistParamsWithOverrides(ds.n(), ds.domain_bits, epsilon, beta, o);
    TreeHistOptions options;
    options.max_survivors = o.max_survivors;
    return RunTreeHist(ds.items, p, seed, options);
  }
  if (protocol == "bitstogram") {
    const BitstogramParams p = MakeBitstogramParams(
        ds.n(), ds.domain_bits, epsilon, beta, o.code, o.R, o.T);
    return RunBitstogram(ds.items, p, seed);
  }
  if (protocol == "explicit-oracle") {
    CheckPrivacyArgs(ds.n(), epsilon, beta);
    return RunExplicitOracle(ds.items, ds.domain_bits, epsilon, seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown protocol: " + protocol);
}

// ---------------------------------------------------------------------------
// Repeated runs.

struct ExperimentConfig {
  std::string protocol = "treehist";
  double epsilon = 2;
  double beta = 0.05;
  uint64_t seed = 0;
  int repetitions = 1;
  double threshold = 0;  // 0: 15 sqrt(n)
  ProtocolOverrides overrides;
  // Items ranked by true frequency whose estimates are tracked per run.
  int64_t tracked_items = 100;
};

struct MetricSummary {
  double mean = 0;
  std::optional<double> stddev;  // absent for a single repetition
};

// Estimate of the item at a given rank of the true histogram.
struct PercentileRow {
  int64_t rank = 0;  // 1 = most frequent
  Item item;
  int64_t true_f = 0;
  MetricSummary estimate;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<uint64_t> seeds;
  std::vector<HeavyHittersResult> results;
  std::vector<EvalReport> runs;
  std::map<std::string, MetricSummary> metrics;
  std::vector<PercentileRow> percentiles;
};

inline uint64_t RepetitionSeed(uint64_t master, int rep) {
  return static_cast<uint64_t>(
      Prf(master, static_cast<uint64_t>(Role::kTest), static_cast<uint64_t>(rep),
          0x7265));
}

// LDP_HH_THREADS if set to a positive integer, else the hardware count.
inline int WorkerThreads() {
  if (const char* env = std::getenv("LDP_HH_THREADS")) {
    const int k = std::atoi(env);
    if (k > 0) return k;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline MetricSummary Summarize(const std::vector<double>& xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Fills report.runs, report.metrics and report.percentiles from
// report.results, using report.config.threshold.
inline void EvaluateRuns(const GroundTruth& gt, int domain_bits,
                         ExperimentReport& report) {
  const double threshold = report.config.threshold;
  const ExperimentConfig& config = report.config;
  report.runs.clear();
  report.metrics.clear();
  report.percentiles.clear();
  std::map<std::string, std::vector<double>> series;
  for (const HeavyHittersResult& res : report.results) {
    const EvalReport ev = Evaluate(res, gt, threshold);
    series["precision"].push_back(ev.precision);
    series["recall"].push_back(ev.recall);
    series["list_max_error"].push_back(ev.list_max_error);
    series["linf_error"].push_back(ev.linf_error);
    series["listed"].push_back(static_cast<double>(ev.listed));
    report.runs.push_back(ev);
  }
  for (const auto& [name, xs] : series) report.metrics[name] = Summarize(xs);

  std::vector<std::pair<int64_t, uint64_t>> ranked;
  for (const auto& [v, f] : gt.counts) ranked.emplace_back(f, v);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (static_cast<int64_t>(ranked.size()) > config.tracked_items) {
    ranked.resize(static_cast<size_t>(std::max<int64_t>(0, config.tracked_items)));
  }
  for (size_t k = 0; k < ranked.size(); ++k) {
    std::vector<double> est;
    for (const HeavyHittersResult& res : report.results) {
      double e = 0;
      for (const HeavyHitter& h : res.items) {
        if (h.item.value == ranked[k].second) e = h.estimate;
      }
      est.push_back(e);
    }
    report.percentiles.push_back(PercentileRow{
        static_cast<int64_t>(k + 1), Item{ranked[k].second, domain_bits},
        ranked[k].first, Summarize(est)});
  }
}

inline ExperimentReport RunExperiment(const ExperimentConfig& config,
                                      const Dataset& ds) {
  if (config.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  if (ds.items.empty()) throw Error(ErrorCode::kInvalidArgument, "empty dataset");
  const GroundTruth gt = ExactCounts(ds);
  const double threshold =
      config.threshold > 0 ? config.threshold : DefaultHeavyThreshold(ds.n());

  ExperimentReport report;
  report.config = config;
  report.config.threshold = threshold;
  const size_t reps = static_cast<size_t>(config.repetitions);
  for (size_t r = 0; r < reps; ++r) {
    report.seeds.push_back(RepetitionSeed(config.seed, static_cast<int>(r)));
  }
  report.results.resize(reps);
  std::vector<std::exception_ptr> errors(reps);
  const size_t workers = std::min(reps, static_cast<size_t>(WorkerThreads()));
  auto work = [&](size_t first) {
    for (size_t r = first; r < reps; r += workers) {
      try {
        report.results[r] = RunProtocol(config.protocol, ds, config.epsilon,
                                        config.beta, report.seeds[r],
                                        config.overrides);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvaluateRuns(gt, ds.domain_bits, report);
  return report;
}

}  // namespace ldp_hh

#endif  // LDP_HH_HARNESS_H_
