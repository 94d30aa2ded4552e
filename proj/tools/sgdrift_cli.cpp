/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

// sgdrift: generate drift-injected bipartite streams, run the detectors, score signals.
//
//   sgdrift generate --pattern gradual --delta 100000 --n 1000000 --seed 7
//   sgdrift detect --mode both --input G_1.sgr --output G_1.signals
//   sgdrift eval --signals G_1.signals --truth G_1.truth

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sgdrift/sgdrift.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Failure in the data or the filesystem; maps to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Fnv1a64 {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001B3ULL;
    }
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::optional<json> read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  try {
    return json::parse(is);
  } catch (const std::exception& e) {
    throw DataError("unreadable manifest " + path.string() + ": " + e.what());
  }
}

json base_manifest(const std::string& subcommand, const std::vector<std::string>& argv) {
  return {{"tool", "sgdrift"}, {"version", sgdrift::kVersion}, {"subcommand", subcommand}, {"argv", argv}};
}

// --- detector options shared by detect and eval --repeat -----------------------------------

struct DetectorOptions {
  double x = 0.25;
  double sigma = 1.0;
  double h = 0.01;
  std::uint64_t seed = 1;
  std::string fSchedule = "0.3";
  std::string suffixVariant = "alternating";
  std::string sprime = "decreasing";

  void attach(CLI::App* cmd) {
    cmd->add_option("--x", x, "Young-butterfly timestamp fraction")->envname("SGDRIFT_X")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Std of sampled oscillator frequencies")
        ->envname("SGDRIFT_SIGMA")
        ->capture_default_str();
    cmd->add_option("--step", h, "RK4 step size h")->envname("SGDRIFT_H")->capture_default_str();
    cmd->add_option("--seed", seed, "Frequency sampling seed")->envname("SGDRIFT_SEED")->capture_default_str();
    cmd->add_option("--f-schedule", fSchedule, "Threshold factors: comma list, or 'full'")
        ->envname("SGDRIFT_F_SCHEDULE")
        ->capture_default_str();
    cmd->add_option("--suffix-variant", suffixVariant, "Suffix-size exponent: alternating | flipped")
        ->envname("SGDRIFT_SUFFIX_VARIANT")
        ->check(CLI::IsMember({"alternating", "flipped"}))
        ->capture_default_str();
    cmd->add_option("--sprime", sprime, "O1 averaging length rule: decreasing | literal")
        ->envname("SGDRIFT_SPRIME")
        ->check(CLI::IsMember({"decreasing", "literal"}))
        ->capture_default_str();
  }

  sgdrift::SgdpConfig sgdp() const {
    sgdrift::SgdpConfig cfg;
    cfg.variant = sgdrift::parse_suffix_variant(suffixVariant);
    if (fSchedule == "full") {
      cfg.fSchedule = sgdrift::kFullFSchedule;
    } else {
      cfg.fSchedule.clear();
      std::stringstream ss(fSchedule);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto v = sgdrift::detail::parse_double(sgdrift::detail::trim(item));
        if (!v || !(*v > 0.0 && *v <= 1.0)) throw CLI::ValidationError("--f-schedule", "bad factor '" + item + "'");
        cfg.fSchedule.push_back(*v);
      }
      if (cfg.fSchedule.empty()) throw CLI::ValidationError("--f-schedule", "empty schedule");
    }
    return cfg;
  }

  sgdrift::SgddConfig sgdd() const {
    sgdrift::SgddConfig cfg;
    cfg.youngFraction = x;
    cfg.sigma = sigma;
    cfg.h = h;
    cfg.seed = seed;
    cfg.variant = sgdrift::parse_suffix_variant(suffixVariant);
    cfg.sprime = sgdrift::parse_sprime_strategy(sprime);
    return cfg;
  }

  json to_json() const {
    return {{"x", x},       {"sigma", sigma},          {"h", h},          {"seed", seed},
            {"f_schedule", fSchedule}, {"suffix_variant", suffixVariant}, {"sprime", sprime}};
  }
};

// --- stream reading ------------------------------------------------------------------------

struct ReadOptions {
  char delimiter = ',';
  bool skipMalformed = false;
};

/// Reads records in chunks; hashes the raw bytes so runs can be tied to a generated stream.
class RecordReader {
 public:
  RecordReader(std::istream& is, ReadOptions opt) : is_(is), opt_(opt) {}

  /// Fills `out` with up to `max` records; returns false at end of input.
  bool next_chunk(std::vector<sgdrift::Sgr>& out, std::size_t max) {
    out.clear();
    std::string line;
    while (out.size() < max && std::getline(is_, line)) {
      ++lineNo_;
      hash_.update(line);
      hash_.update("\n");
      try {
        auto r = sgdrift::parse_sgr(line, opt_.delimiter);
        if (!r) continue;
        r->t = ++t_;
        out.push_back(std::move(*r));
      } catch (const sgdrift::ParseError& e) {
        if (!opt_.skipMalformed) throw DataError("line " + std::to_string(lineNo_) + ": " + e.what());
        ++skipped_;
      }
    }
    return !out.empty();
  }

  std::string stream_id() const { return hash_.hex(); }
  std::size_t skipped() const { return skipped_; }
  std::uint64_t records() const { return t_; }

 private:
  std::istream& is_;
  ReadOptions opt_;
  Fnv1a64 hash_;
  std::size_t lineNo_ = 0;
  std::size_t skipped_ = 0;
  std::uint64_t t_ = 0;
};

std::vector<sgdrift::Sgr> read_all(const std::string& path, ReadOptions opt, std::string* streamId) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot read " + path);
  RecordReader reader(file, opt);
  std::vector<sgdrift::Sgr> all, chunk;
  while (reader.next_chunk(chunk, 1 << 16)) all.insert(all.end(), chunk.begin(), chunk.end());
  if (streamId) *streamId = reader.stream_id();
  return all;
}

sgdrift::GroundTruth load_truth(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read " + path);
  sgdrift::GroundTruth truth;
  try {
    truth = sgdrift::read_truth(is);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  if (truth.cdIndices.empty()) throw DataError("truth file " + path + " lists no CDs; nothing to score");
  return truth;
}

/// Manifest written by `generate` next to a truth file: <stem>.manifest.json, else <path>.manifest.json.
std::optional<json> truth_manifest(const std::string& truthPath) {
  fs::path p(truthPath);
  fs::path sibling = p;
  sibling.replace_extension(".manifest.json");
  if (auto m = read_manifest(sibling)) return m;
  return read_manifest(manifest_path_for(truthPath));
}

std::optional<std::string> stream_id_of(const std::optional<json>& manifest) {
  if (!manifest || !manifest->contains("stream_id")) return std::nullopt;
  return manifest->at("stream_id").get<std::string>();
}

// --- generate ------------------------------------------------------------------------------

struct GenerateOptions {
  std::string pattern;
  std::uint64_t delta = 100000;
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t prefix = 1000;
  double rho = 0.3;
  std::uint32_t lmin = 1, lmax = 2, beta = 5, m = 10;
  std::string outDir = ".";
  std::string name;
  bool batch = false;
  unsigned instances = 5;
};

std::string default_name(sgdrift::DriftPattern pattern, std::uint64_t delta) {
  std::string prefix = pattern == sgdrift::DriftPattern::gradual ? "G_" : "R_";
  if (delta % 100000 == 0) return prefix + std::to_string(delta / 100000);
  return prefix + "d" + std::to_string(delta);
}

json write_stream_files(const fs::path& dir, const std::string& name, const sgdrift::GeneratorConfig& cfg,
                        const sgdrift::DriftSchedule& schedule, std::uint64_t n, const std::vector<std::string>& argv) {
  fs::create_directories(dir);
  fs::path streamPath = dir / (name + ".sgr");
  fs::path truthPath = dir / (name + ".truth");
  std::ofstream stream(streamPath);
  if (!stream) throw DataError("cannot write " + streamPath.string());

  Fnv1a64 hash;
  std::string line;
  auto truth = sgdrift::generate_to(cfg, schedule, n, [&](const sgdrift::Sgr& r) {
    std::ostringstream os;
    sgdrift::write_sgr(os, r);
    line = os.str();
    hash.update(line);
    stream << line;
  });
  stream.close();
  if (!stream) throw DataError("write failed for " + streamPath.string());

  std::ofstream truthFile(truthPath);
  if (!truthFile) throw DataError("cannot write " + truthPath.string());
  sgdrift::write_truth(truthFile, truth);

  json m = base_manifest("generate", argv);
  m["name"] = name;
  m["stream_id"] = hash.hex();
  m["outputs"] = {{"stream", streamPath.string()}, {"truth", truthPath.string()}};
  m["seed"] = cfg.seed;
  m["config"] = {{"pattern", std::string(sgdrift::to_string(schedule.pattern))},
                 {"delta", schedule.deltaR},
                 {"n", n},
                 {"prefix", cfg.prefixLen},
                 {"rho", cfg.rho},
                 {"lmin", cfg.Lmin},
                 {"lmax", cfg.Lmax},
                 {"beta", cfg.beta},
                 {"m", cfg.M}};
  m["cd_indices"] = truth.cdIndices;
  write_json_file(dir / (name + ".manifest.json"), m);
  return m;
}

int run_generate(const GenerateOptions& o, const std::vector<std::string>& argv) {
  sgdrift::GeneratorConfig cfg;
  cfg.rho = o.rho;
  cfg.Lmin = o.lmin;
  cfg.Lmax = o.lmax;
  cfg.beta = o.beta;
  cfg.M = o.m;
  cfg.prefixLen = o.prefix;
  cfg.seed = o.seed;
  if (o.delta == 0) throw CLI::ValidationError("--delta", "must be positive");
  if (o.n <= o.prefix) throw CLI::ValidationError("--n", "must exceed --prefix");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("generator", e.what());
  }

  if (!o.batch) {
    if (o.pattern.empty()) throw CLI::RequiredError("--pattern");
    auto pattern = sgdrift::parse_pattern(o.pattern);
    std::string name = o.name.empty() ? default_name(pattern, o.delta) : o.name;
    write_stream_files(o.outDir, name, cfg, {pattern, o.delta}, o.n, argv);
    std::cerr << "wrote " << (fs::path(o.outDir) / name).string() << ".{sgr,truth,manifest.json}\n";
    return 0;
  }

  std::vector<sgdrift::DriftPattern> patterns;
  if (o.pattern.empty()) {
    patterns = {sgdrift::DriftPattern::gradual, sgdrift::DriftPattern::recurring};
  } else {
    patterns = {sgdrift::parse_pattern(o.pattern)};
  }
  for (auto pattern : patterns) {
    for (unsigned a = 1; a <= 2; ++a) {
      for (unsigned b = 1; b <= o.instances; ++b) {
        sgdrift::GeneratorConfig c = cfg;
        std::uint64_t salt = (pattern == sgdrift::DriftPattern::gradual ? 0x100u : 0x200u) + a * 16 + b;
        c.seed = sgdrift::detail::splitmix64(o.seed ^ (salt << 32));
        auto name = sgdrift::stream_name(pattern, a, b);
        write_stream_files(o.outDir, name, c, {pattern, a * o.delta}, o.n, argv);
        std::cerr << "wrote " << (fs::path(o.outDir) / name).string() << '\n';
      }
    }
  }
  return 0;
}

// --- detect --------------------------------------------------------------------------------

struct DetectOptions {
  std::string mode = "both";
  std::string input;
  std::string output = "-";
  std::string manifest;
  std::string delimiter = ",";
  std::string onError = "abort";
  DetectorOptions detector;
};

bool signal_order(const sgdrift::DriftSignal& a, const sgdrift::DriftSignal& b) {
  if (a.t != b.t) return a.t < b.t;
  return static_cast<int>(a.mode) < static_cast<int>(b.mode);
}

int run_detect(const DetectOptions& o, const std::vector<std::string>& argv) {
  if (o.delimiter.size() != 1) throw CLI::ValidationError("--delimiter", "must be a single character");
  const bool useSgdp = o.mode == "sgdp" || o.mode == "both";
  const bool useSgdd = o.mode == "sgdd" || o.mode == "both";
  std::optional<sgdrift::SgdpDetector> sgdp;
  std::optional<sgdrift::SgddDetector> sgdd;
  if (useSgdp) sgdp.emplace(o.detector.sgdp());
  if (useSgdd) sgdd.emplace(o.detector.sgdd());

  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file.open(o.input);
    if (!file) throw DataError("cannot read " + o.input);
    in = &file;
  }
  std::ofstream outFile;
  std::ostream* out = &std::cout;
  if (o.output != "-") {
    outFile.open(o.output);
    if (!outFile) throw DataError("cannot write " + o.output);
    out = &outFile;
  }

  RecordReader reader(*in, {o.delimiter[0], o.onError == "skip"});
  std::vector<sgdrift::Sgr> chunk;
  std::vector<sgdrift::DriftSignal> fromSgdp, fromSgdd, merged;
  std::size_t count = 0;

  auto feed_sgdp = [&] {
    for (const auto& r : chunk) {
      for (auto& s : sgdp->step(r.tau)) fromSgdp.push_back(std::move(s));
    }
  };
  auto feed_sgdd = [&] {
    for (const auto& r : chunk) {
      if (auto s = sgdd->step(r)) fromSgdd.push_back(std::move(*s));
    }
  };

  while (reader.next_chunk(chunk, 4096)) {
    fromSgdp.clear();
    fromSgdd.clear();
    if (useSgdp && useSgdd) {
      std::jthread worker(feed_sgdd);
      feed_sgdp();
    } else if (useSgdp) {
      feed_sgdp();
    } else {
      feed_sgdd();
    }
    merged.clear();
    std::merge(fromSgdp.begin(), fromSgdp.end(), fromSgdd.begin(), fromSgdd.end(), std::back_inserter(merged),
               signal_order);
    for (const auto& s : merged) *out << sgdrift::to_json_line(s) << '\n';
    out->flush();
    count += merged.size();
  }

  std::string manifestPath = o.manifest;
  if (manifestPath.empty() && o.output != "-") manifestPath = manifest_path_for(o.output);
  if (!manifestPath.empty()) {
    json m = base_manifest("detect", argv);
    m["mode"] = o.mode;
    m["seed"] = o.detector.seed;
    m["stream_id"] = reader.stream_id();
    m["inputs"] = {{"stream", o.input}};
    m["outputs"] = {{"signals", o.output}};
    m["config"] = o.detector.to_json();
    m["config"]["delimiter"] = o.delimiter;
    m["config"]["on_error"] = o.onError;
    m["records"] = reader.records();
    m["skipped_lines"] = reader.skipped();
    m["signals"] = count;
    write_json_file(manifestPath, m);
  }
  return 0;
}

// --- eval ----------------------------------------------------------------------------------

struct EvalOptions {
  std::string signals;
  std::string truth;
  std::string stream;
  std::string mode;
  std::string out = "-";
  std::string jsonOut;
  std::size_t repeat = 0;
  std::size_t batches = 10;
  DetectorOptions detector;
};

void check_same_stream(const std::optional<std::string>& a, const std::optional<std::string>& b,
                       const std::string& what) {
  if (a && b && *a != *b) {
    throw DataError("stream identity mismatch: " + what + " (" + *a + " vs " + *b + ")");
  }
}

int run_eval(const EvalOptions& o, const std::vector<std::string>& argv) {
  auto truth = load_truth(o.truth);
  auto truthStream = stream_id_of(truth_manifest(o.truth));

  std::vector<std::pair<std::string, sgdrift::EvalReport>> reports;
  if (o.repeat > 0) {
    if (o.stream.empty()) throw CLI::RequiredError("--stream (required with --repeat)");
    if (o.mode != "sgdp" && o.mode != "sgdd") throw CLI::ValidationError("--mode", "--repeat needs sgdp or sgdd");
    std::string streamId;
    auto records = read_all(o.stream, {}, &streamId);
    check_same_stream(truthStream, streamId, o.stream + " vs truth manifest");
    std::function<sgdrift::RunRecord()> runner;
    if (o.mode == "sgdp") {
      auto cfg = o.detector.sgdp();
      runner = [&, cfg] {
        sgdrift::SgdpDetector det(cfg);
        return sgdrift::run_detector(det, records, truth);
      };
    } else {
      auto cfg = o.detector.sgdd();
      runner = [&, cfg] {
        sgdrift::SgddDetector det(cfg);
        return sgdrift::run_detector(det, records, truth);
      };
    }
    try {
      reports.emplace_back(o.mode, sgdrift::repeated_timing(runner, truth, o.repeat, o.batches));
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--repeat/--batches", e.what());
    } catch (const sgdrift::DeterminismError& e) {
      throw DataError(std::string("determinism failure: ") + e.what());
    }
  } else {
    if (o.signals.empty()) throw CLI::RequiredError("--signals (or --repeat with --stream)");
    std::ifstream is(o.signals);
    if (!is) throw DataError("cannot read " + o.signals);
    std::vector<sgdrift::DriftSignal> signals;
    try {
      signals = sgdrift::read_signals(is);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
    check_same_stream(truthStream, stream_id_of(read_manifest(manifest_path_for(o.signals))),
                      o.signals + " vs " + o.truth);
    std::vector<std::string> modes;
    if (!o.mode.empty()) {
      modes = {o.mode};
    } else {
      for (auto m : {sgdrift::DetectorMode::sgdp, sgdrift::DetectorMode::sgdd}) {
        if (std::any_of(signals.begin(), signals.end(), [&](const auto& s) { return s.mode == m; })) {
          modes.emplace_back(sgdrift::to_string(m));
        }
      }
      if (modes.empty()) modes = {"all"};
    }
    for (const auto& m : modes) {
      std::vector<sgdrift::DriftSignal> picked;
      for (const auto& s : signals) {
        if (m == "all" || sgdrift::to_string(s.mode) == m) picked.push_back(s);
      }
      std::stable_sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
      reports.emplace_back(m, sgdrift::distances(picked, truth));
    }
  }

  std::ofstream outFile;
  std::ostream* out = &std::cout;
  if (o.out != "-") {
    outFile.open(o.out);
    if (!outFile) throw DataError("cannot write " + o.out);
    out = &outFile;
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (k > 0) *out << '\n';
    sgdrift::write_table(*out, reports[k].second, reports[k].first);
  }

  json all = json::object();
  for (const auto& [m, rep] : reports) all[m] = sgdrift::to_json(rep);
  if (!o.jsonOut.empty()) write_json_file(o.jsonOut, all);

  std::string anchor = !o.jsonOut.empty() ? o.jsonOut : (o.out != "-" ? o.out : "");
  if (!anchor.empty()) {
    json m = base_manifest("eval", argv);
    m["inputs"] = {{"signals", o.signals}, {"truth", o.truth}, {"stream", o.stream}};
    m["outputs"] = {{"table", o.out}, {"json", o.jsonOut}};
    m["mode"] = o.mode;
    m["repeat"] = o.repeat;
    m["batches"] = o.batches;
    if (truthStream) m["stream_id"] = *truthStream;
    if (o.repeat > 0) {
      m["seed"] = o.detector.seed;
      m["config"] = o.detector.to_json();
    }
    write_json_file(manifest_path_for(anchor), m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Concept-drift prediction and detection for streaming bipartite graphs"};
  app.set_version_flag("--version", std::string(sgdrift::kVersion));
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a drift-injected synthetic stream and its ground truth");
  g->add_option("--pattern", gen.pattern, "gradual | recurring")
      ->check(CLI::IsMember({"gradual", "recurring"}));
  g->add_option("--delta", gen.delta, "Drift interval in SGRs (batch mode: unit for a=1,2)")
      ->envname("SGDRIFT_DELTA")
      ->capture_default_str();
  g->add_option("--n", gen.n, "Total SGRs")->envname("SGDRIFT_N")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->envname("SGDRIFT_SEED")->capture_default_str();
  g->add_option("--prefix", gen.prefix, "Length of the regime-0 prefix")->capture_default_str();
  g->add_option("--rho", gen.rho, "Prefix burst connection probability")->capture_default_str();
  g->add_option("--lmin", gen.lmin, "Prefix minimum walk length")->capture_default_str();
  g->add_option("--lmax", gen.lmax, "Prefix maximum walk length")->capture_default_str();
  g->add_option("--beta", gen.beta, "Recency horizon in batches")->capture_default_str();
  g->add_option("--m", gen.m, "Edges per generation batch")->capture_default_str();
  g->add_option("--out-dir", gen.outDir, "Output directory")->capture_default_str();
  g->add_option("--name", gen.name, "Output file stem (default G_<a> / R_<a>)");
  g->add_flag("--batch", gen.batch, "Emit the G_ab / R_ab family (a in {1,2}, b in 1..instances)");
  g->add_option("--instances", gen.instances, "Instances per pattern and interval in batch mode")
      ->capture_default_str();

  DetectOptions det;
  auto* d = app.add_subcommand("detect", "Run SGDP and/or SGDD over a stream; print JSON-lines signals");
  d->add_option("--mode", det.mode, "sgdp | sgdd | both")
      ->check(CLI::IsMember({"sgdp", "sgdd", "both"}))
      ->envname("SGDRIFT_MODE")
      ->capture_default_str();
  d->add_option("--input", det.input, "Stream file, or - for stdin")->required();
  d->add_option("--output", det.output, "Signal file, or - for stdout")->capture_default_str();
  d->add_option("--manifest", det.manifest, "Manifest path (default <output>.manifest.json)");
  d->add_option("--delimiter", det.delimiter, "Field delimiter")->capture_default_str();
  d->add_option("--on-error", det.onError, "Malformed lines: abort | skip")
      ->check(CLI::IsMember({"abort", "skip"}))
      ->envname("SGDRIFT_ON_ERROR")
      ->capture_default_str();
  det.detector.attach(d);

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Score signals against ground truth (ms / SGR distances)");
  e->add_option("--signals", ev.signals, "JSON-lines signal file");
  e->add_option("--truth", ev.truth, "Ground-truth file")->required();
  e->add_option("--stream", ev.stream, "Stream file for the --repeat timing protocol");
  e->add_option("--mode", ev.mode, "Restrict to one detector (required with --repeat)")
      ->check(CLI::IsMember({"sgdp", "sgdd"}));
  e->add_option("--out", ev.out, "Table output, or - for stdout")->capture_default_str();
  e->add_option("--json", ev.jsonOut, "Machine-readable report path");
  e->add_option("--repeat", ev.repeat, "Executions for the timing protocol (e.g. 100)");
  e->add_option("--batches", ev.batches, "Batches the executions are split into")->capture_default_str();
  ev.detector.attach(e);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen, args);
    if (*d) return run_detect(det, args);
    if (*e) return run_eval(ev, args);
  } catch (const CLI::Error& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const DataError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
