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

// JSON documents written and read by the command-line tool.
//
// Result documents carry no wall-clock data so that identical runs produce
// identical bytes; timings are serialized separately.

#ifndef LDP_HH_JSON_IO_H_
#define LDP_HH_JSON_IO_H_

#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldp_hh/core.h"
#include "ldp_hh/harness.h"
#include "ldp_hh/result.h"

namespace ldp_hh {

inline constexpr char kResultSchema[] = "ldp-hh-result";
inline constexpr char kEvalSchema[] = "ldp-hh-eval";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline Json ResultToJson(const HeavyHittersResult& r) {
  Json j;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["domain_bits"] = r.domain_bits;
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["notes"] = r.notes;
  if (!r.survivors_per_level.empty()) {
    j["survivors_per_level"] = r.survivors_per_level;
    j["queried_per_level"] = r.queried_per_level;
  }
  Json items = Json::array();
  for (const HeavyHitter& h : r.items) {
    items.push_back({{"item", ItemToHex(h.item)}, {"estimate", h.estimate}});
  }
  j["items"] = items;
  return j;
}

inline HeavyHittersResult ResultFromJson(const Json& j) {
  HeavyHittersResult r;
  try {
    r.protocol = j.at("protocol").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.domain_bits = j.at("domain_bits").get<int>();
    for (const auto& [k, v] : j.at("params").items()) r.params[k] = v.get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("survivors_per_level")) {
      r.survivors_per_level = j["survivors_per_level"].get<std::vector<int64_t>>();
      r.queried_per_level = j.at("queried_per_level").get<std::vector<int64_t>>();
    }
    for (const Json& h : j.at("items")) {
      r.items.push_back(HeavyHitter{
          ItemFromHex(h.at("item").get<std::string>(), r.domain_bits),
          h.at("estimate").get<double>()});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed result: ") + e.what());
  }
  return r;
}

inline Json TimingsToJson(const PhaseTimings& t) {
  return Json{{"report_generation", t.report_generation},
              {"ingestion", t.ingestion},
              {"oracle_queries", t.oracle_queries},
              {"server", t.server()}};
}

// A run document: config echo plus one result per repetition.
inline Json RunDocument(const Json& config,
                        const std::vector<HeavyHittersResult>& results) {
  Json j;
  j["schema"] = kResultSchema;
  j["version"] = kSchemaVersion;
  j["config"] = config;
  Json runs = Json::array();
  for (const HeavyHittersResult& r : results) runs.push_back(ResultToJson(r));
  j["runs"] = runs;
  return j;
}

inline std::vector<HeavyHittersResult> ResultsFromRunDocument(const Json& j) {
  if (j.value("schema", std::string()) != kResultSchema) {
    throw Error(ErrorCode::kIo, "not an ldp-hh result document");
  }
  if (j.value("version", 0) != kSchemaVersion) {
    throw Error(ErrorCode::kIo, "unsupported result version");
  }
  std::vector<HeavyHittersResult> out;
  for (const Json& r : j.at("runs")) out.push_back(ResultFromJson(r));
  return out;
}

inline Json SummaryToJson(const MetricSummary& s) {
  Json j{{"mean", s.mean}};
  if (s.stddev) j["stddev"] = *s.stddev;
  return j;
}

inline Json EvalToJson(const EvalReport& e) {
  return Json{{"threshold", e.threshold},
              {"listed", e.listed},
              {"true_heavy", e.true_heavy},
              {"true_positives", e.true_positives},
              {"precision", e.precision},
              {"recall", e.recall},
              {"list_max_error", e.list_max_error},
              {"linf_error", e.linf_error}};
}

inline void WriteEvalCsv(const std::vector<EvalReport>& runs, std::ostream& out) {
  out << "run,item,true_f,est_f\n";
  for (size_t r = 0; r < runs.size(); ++r) {
    for (const EvalRow& row : runs[r].rows) {
      out << r << "," << ItemToHex(row.item) << "," << row.true_f << ","
          << Json(row.estimate).dump() << "\n";
    }
  }
}

inline Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIo, path + ": " + e.what());
  }
}

inline void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace ldp_hh

#endif  // LDP_HH_JSON_IO_H_
