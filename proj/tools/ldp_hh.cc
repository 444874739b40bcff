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

// ldp-hh: generate datasets, run the heavy-hitter protocols, evaluate runs.
//
//   ldp-hh gen-data --dist powerlaw --n 100000 --domain-bits 32 --out d.txt
//   ldp-hh run --data d.txt --protocol treehist --epsilon 2 --out r.json
//   ldp-hh eval --result r.json --data d.txt --out e.json --csv e.csv
//   ldp-hh params --n 1000000 --epsilon 2 --domain-bits 48
//
// Every subcommand accepts --config FILE with one key=value per line; keys
// are the long flag names (dashes or underscores) and flags given on the
// command line take precedence.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldp_hh/bitstogram.h"
#include "ldp_hh/core.h"
#include "ldp_hh/harness.h"
#include "ldp_hh/json_io.h"

namespace ldp_hh {
namespace {

constexpr int kUsageError = 2;

// Rewrites `--config FILE` into the equivalent flags, placed right after the
// subcommand name so that later command-line flags override them.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i),
                 args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::Error& e) {
    throw Error(ErrorCode::kIo, "config " + path + ": " + e.what());
  }
  std::vector<std::string> flags;
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty()) {
      if (item.name == "++" || item.name == "--") continue;
      throw Error(ErrorCode::kInvalidArgument,
                  "config " + path + ": sections are not supported (" +
                      item.fullname() + ")");
    }
    std::string name = item.name;
    for (char& c : name) {
      if (c == '_') c = '-';
    }
    if (name == "config") {
      throw Error(ErrorCode::kInvalidArgument, "config files cannot nest");
    }
    flags.push_back("--" + name);
    flags.insert(flags.end(), item.inputs.begin(), item.inputs.end());
  }
  const size_t at = args.size() > 1 ? 2 : 1;
  args.insert(args.begin() + static_cast<long>(at), flags.begin(), flags.end());
  return args;
}

std::string FormatEpsilon(double epsilon) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", epsilon);
  return buf;
}

// ---------------------------------------------------------------------------

struct GenDataFlags {
  std::string dist = "powerlaw";
  int64_t n = 0;
  int domain_bits = 32;
  double power = 15;
  int64_t bins = 100;
  int chars = 0;
  std::string corpus;
  std::string planted_item;
  int64_t planted_count = 0;
  uint64_t seed = 0;
  std::string out;
};

void AddGenData(CLI::App& app, GenDataFlags& f) {
  CLI::App* cmd = app.add_subcommand("gen-data", "Write a dataset file");
  cmd->add_option("--dist", f.dist, "powerlaw | planted | corpus")
      ->check(CLI::IsMember({"powerlaw", "planted", "corpus"}));
  cmd->add_option("--n", f.n, "Number of items")->required();
  cmd->add_option("--domain-bits", f.domain_bits, "Item width D");
  cmd->add_option("--power", f.power, "Power-law exponent");
  cmd->add_option("--bins", f.bins, "Power-law bins");
  cmd->add_option("--chars", f.chars,
                  "Word length: powerlaw labels become words; corpus default 6");
  cmd->add_option("--corpus", f.corpus, "Newline-delimited token file");
  cmd->add_option("--planted-item", f.planted_item, "Planted item (hex)");
  cmd->add_option("--planted-count", f.planted_count, "Copies of the planted item");
  cmd->add_option("--seed", f.seed, "Seed");
  cmd->add_option("--out", f.out, "Output dataset file")->required();
}

int GenData(const GenDataFlags& f) {
  Dataset ds;
  if (f.dist == "powerlaw") {
    PowerlawSpec spec;
    spec.domain_bits = f.domain_bits;
    spec.n = f.n;
    spec.power = f.power;
    spec.bins = f.bins;
    spec.word_chars = f.chars;
    spec.seed = f.seed;
    ds = GenPowerlaw(spec);
  } else if (f.dist == "planted") {
    if (f.planted_item.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--planted-item is required");
    }
    ds = GenPlanted(f.domain_bits, f.n, ItemFromHex(f.planted_item, f.domain_bits),
                    f.planted_count, f.seed);
  } else {
    if (f.corpus.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--corpus is required");
    }
    ds = IngestCorpus(f.corpus, f.chars > 0 ? f.chars : 6, f.n, f.seed);
  }
  WriteDatasetFile(ds, f.out);
  std::cout << "wrote " << f.out << ": D=" << ds.domain_bits << " n=" << ds.n()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct RunFlags {
  std::string data;
  std::string protocol = "treehist";
  double epsilon = 2;
  double beta = 0.05;
  uint64_t seed = 0;
  int repetitions = 1;
  int64_t n = 0;
  int domain_bits = 0;
  ProtocolOverrides overrides;
  std::string out;
};

void AddRun(CLI::App& app, RunFlags& f) {
  CLI::App* cmd = app.add_subcommand("run", "Run a protocol on a dataset");
  cmd->add_option("--data", f.data, "Dataset file")->required();
  cmd->add_option("--protocol", f.protocol, "treehist | bitstogram | explicit-oracle")
      ->check(CLI::IsMember(ProtocolNames()));
  cmd->add_option("--epsilon", f.epsilon, "Privacy parameter (> 0)");
  cmd->add_option("--beta", f.beta, "Failure probability in (0, 1)");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--repetitions", f.repetitions, "Independent runs");
  cmd->add_option("--n", f.n, "Expected item count (checked against the data)");
  cmd->add_option("--domain-bits", f.domain_bits,
                  "Expected item width (checked against the data)");
  cmd->add_option("--t", f.overrides.t, "TreeHist: hash pairs");
  cmd->add_option("--m", f.overrides.m, "TreeHist: Hadamard dimension");
  cmd->add_option("--eta", f.overrides.eta, "TreeHist: pruning threshold");
  cmd->add_option("--max-survivors", f.overrides.max_survivors,
                  "TreeHist: prefixes kept per level (0 = all)");
  cmd->add_option("--R", f.overrides.R, "Bitstogram: hash functions");
  cmd->add_option("--T", f.overrides.T, "Bitstogram: cells per hash");
  cmd->add_option("--code", f.overrides.code, "Bitstogram: identity | repetition-5");
  cmd->add_option("--out", f.out, "Result JSON")->required();
}

Json RunConfigJson(const RunFlags& f, const Dataset& ds) {
  Json c;
  c["protocol"] = f.protocol;
  c["data"] = ds.provenance;
  c["n"] = ds.n();
  c["domain_bits"] = ds.domain_bits;
  c["epsilon"] = f.epsilon;
  c["beta"] = f.beta;
  c["seed"] = f.seed;
  c["repetitions"] = f.repetitions;
  Json o = Json::object();
  if (f.overrides.t > 0) o["t"] = f.overrides.t;
  if (f.overrides.m > 0) o["m"] = f.overrides.m;
  if (f.overrides.eta > 0) o["eta"] = f.overrides.eta;
  if (f.overrides.max_survivors > 0) o["max_survivors"] = f.overrides.max_survivors;
  if (f.overrides.R > 0) o["R"] = f.overrides.R;
  if (f.overrides.T > 0) o["T"] = f.overrides.T;
  if (f.protocol == "bitstogram") o["code"] = f.overrides.code;
  c["overrides"] = o;
  return c;
}

int Run(const RunFlags& f) {
  CheckPrivacyArgs(2, f.epsilon, f.beta);
  if (f.repetitions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  }
  if (f.overrides.t < 0 || f.overrides.eta < 0 || f.overrides.R < 0 ||
      f.overrides.max_survivors < 0) {
    throw Error(ErrorCode::kInvalidArgument, "overrides must be >= 0");
  }
  if (f.overrides.m > 0 && !IsPow2(f.overrides.m)) {
    throw Error(ErrorCode::kInvalidArgument, "m must be a power of two");
  }
  const Dataset ds = ReadDatasetFile(f.data);
  if (f.n > 0 && f.n != ds.n()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset has n=" +
                                                 std::to_string(ds.n()));
  }
  if (f.domain_bits > 0 && f.domain_bits != ds.domain_bits) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset has D=" + std::to_string(ds.domain_bits));
  }
  ExperimentConfig config;
  config.protocol = f.protocol;
  config.epsilon = f.epsilon;
  config.beta = f.beta;
  config.seed = f.seed;
  config.repetitions = f.repetitions;
  config.overrides = f.overrides;
  const ExperimentReport report = RunExperiment(config, ds);

  WriteTextFile(f.out, RunDocument(RunConfigJson(f, ds), report.results).dump(2) + "\n");
  Json timings = Json::array();
  for (const HeavyHittersResult& r : report.results) {
    timings.push_back(TimingsToJson(r.timings));
  }
  WriteTextFile(f.out + ".timings.json", timings.dump(2) + "\n");

  std::cout << "protocol=" << f.protocol << " epsilon=" << FormatEpsilon(f.epsilon)
            << " n=" << ds.n() << " D=" << ds.domain_bits
            << " runs=" << report.results.size()
            << " listed=" << report.results.front().items.size() << "\n";
  std::cout << "wrote " << f.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalFlags {
  std::string result;
  std::string data;
  double threshold = 0;
  int64_t tracked = 100;
  std::string out;
  std::string csv;
};

void AddEval(CLI::App& app, EvalFlags& f) {
  CLI::App* cmd = app.add_subcommand("eval", "Score a result against its dataset");
  cmd->add_option("--result", f.result, "Result JSON from `run`")->required();
  cmd->add_option("--data", f.data, "Dataset file")->required();
  cmd->add_option("--threshold", f.threshold, "Heavy threshold (default 15 sqrt(n))");
  cmd->add_option("--tracked", f.tracked, "Top true items tracked per rank");
  cmd->add_option("--out", f.out, "Evaluation JSON")->required();
  cmd->add_option("--csv", f.csv, "CSV of run,item,true_f,est_f");
}

int Eval(const EvalFlags& f) {
  if (f.threshold < 0) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be > 0");
  }
  const Json doc = ReadJsonFile(f.result);
  const Dataset ds = ReadDatasetFile(f.data);
  const GroundTruth gt = ExactCounts(ds);
  ExperimentReport report;
  report.results = ResultsFromRunDocument(doc);
  for (const HeavyHittersResult& r : report.results) {
    if (r.domain_bits != ds.domain_bits) {
      throw Error(ErrorCode::kInvalidInput, "result and dataset widths differ");
    }
  }
  report.config.threshold =
      f.threshold > 0 ? f.threshold : DefaultHeavyThreshold(ds.n());
  report.config.tracked_items = f.tracked;
  EvaluateRuns(gt, ds.domain_bits, report);

  Json j;
  j["schema"] = kEvalSchema;
  j["version"] = kSchemaVersion;
  j["config"] = doc.value("config", Json::object());
  j["threshold"] = report.config.threshold;
  Json runs = Json::array();
  for (const EvalReport& e : report.runs) runs.push_back(EvalToJson(e));
  j["runs"] = runs;
  Json metrics = Json::object();
  for (const auto& [name, s] : report.metrics) metrics[name] = SummaryToJson(s);
  j["metrics"] = metrics;
  Json ranks = Json::array();
  for (const PercentileRow& p : report.percentiles) {
    ranks.push_back({{"rank", p.rank},
                     {"item", ItemToHex(p.item)},
                     {"true_f", p.true_f},
                     {"estimate", SummaryToJson(p.estimate)}});
  }
  j["ranks"] = ranks;
  WriteTextFile(f.out, j.dump(2) + "\n");
  if (!f.csv.empty()) {
    std::ostringstream csv;
    WriteEvalCsv(report.runs, csv);
    WriteTextFile(f.csv, csv.str());
  }
  const MetricSummary& p = report.metrics.at("precision");
  const MetricSummary& r = report.metrics.at("recall");
  std::cout << "precision=" << p.mean << " recall=" << r.mean
            << " threshold=" << report.config.threshold << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ParamsFlags {
  int64_t n = 0;
  double epsilon = 2;
  double beta = 0.05;
  int domain_bits = 0;
  std::string code = "repetition-5";
};

void AddParams(CLI::App& app, ParamsFlags& f) {
  CLI::App* cmd = app.add_subcommand("params", "Print derived protocol parameters");
  cmd->add_option("--n", f.n, "Number of users")->required();
  cmd->add_option("--epsilon", f.epsilon, "Privacy parameter (> 0)");
  cmd->add_option("--beta", f.beta, "Failure probability in (0, 1)");
  cmd->add_option("--domain-bits", f.domain_bits, "log2 of the domain size")
      ->required();
  cmd->add_option("--code", f.code, "Bitstogram code");
}

int Params(const ParamsFlags& f) {
  const ProtocolParams t =
      MakeTreeHistParamsForBits(f.n, f.domain_bits, f.epsilon, f.beta);
  const BitstogramParams b =
      MakeBitstogramParams(f.n, f.domain_bits, f.epsilon, f.beta, f.code);
  Json j;
  j["n"] = f.n;
  j["domain_bits"] = f.domain_bits;
  j["epsilon"] = FormatEpsilon(f.epsilon);
  j["beta"] = f.beta;
  j["treehist"] = {{"t", t.t},
                   {"m", t.m},
                   {"eta", t.eta},
                   {"a_eps", t.a_eps},
                   {"below_triviality_bound", t.below_triviality_bound}};
  j["bitstogram"] = {
      {"R", b.R},
      {"T", b.T},
      {"code", b.code->name()},
      {"code_bits", b.code->code_bits()},
      {"inner", b.inner.kind == InnerOracleConfig::Kind::kExplicit ? "explicit"
                                                                   : "hashtogram"},
      {"outer_R", b.outer.R},
      {"outer_T", b.outer.T},
      {"drop_threshold", b.drop_threshold},
      {"notes", b.notes}};
  j["succinct_hist"] = {
      {"w", SuccinctHistThreshold(f.n, f.domain_bits, f.epsilon)},
      {"T", SuccinctHistCells(f.n, f.domain_bits, f.epsilon)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = ExpandConfig(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  std::vector<char*> cargs;
  for (std::string& a : args) cargs.push_back(a.data());

  CLI::App app{"Locally private heavy hitters simulator"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  GenDataFlags gen;
  RunFlags run;
  EvalFlags eval;
  ParamsFlags params;
  AddGenData(app, gen);
  AddRun(app, run);
  AddEval(app, eval);
  AddParams(app, params);
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }
  try {
    if (app.got_subcommand("gen-data")) return GenData(gen);
    if (app.got_subcommand("run")) return Run(run);
    if (app.got_subcommand("eval")) return Eval(eval);
    return Params(params);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIo ? 1 : kUsageError;
  }
}

}  // namespace
}  // namespace ldp_hh

int main(int argc, char** argv) { return ldp_hh::Main(argc, argv); }
