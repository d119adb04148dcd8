#pragma once

// Pipeline stages behind the command-line tool. Every stage reads files,
// writes files and a manifest; nothing is carried between stages in memory.
//
// Output layout under the run directory:
//   corpus/        validated corpus, lexicons, workforce table, match audit
//   probes/        probes.jsonl
//   translations/  <backend>.jsonl
//   analysis/      detections.jsonl, report.json
//   report/        report.json, summary.md, tables/*.csv, figures/*.svg
//   manifests/     <stage>.json (input/output hashes, tool version, timestamp)

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mtbias/analysis.hpp"
#include "mtbias/corpus.hpp"
#include "mtbias/detections.hpp"
#include "mtbias/errors.hpp"
#include "mtbias/matching.hpp"
#include "mtbias/mock.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/remote.hpp"
#include "mtbias/report.hpp"
#include "mtbias/translate.hpp"
#include "mtbias/util/clock.hpp"
#include "mtbias/util/config.hpp"
#include "mtbias/util/hash.hpp"

#ifndef MTBIAS_VERSION
#define MTBIAS_VERSION "0.0.0"
#endif

namespace mtbias::pipeline {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataValidation = 2, kBackendFailure = 3, kInternal = 4 };

/// A stage failure carrying the exit code it maps to.
class StageError : public std::runtime_error {
 public:
  StageError(ExitCode code, const std::string& message) : std::runtime_error(message), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

enum class Mode { Mock, Live, CacheOnly };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Mock: return "mock";
    case Mode::Live: return "live";
    case Mode::CacheOnly: return "cache-only";
  }
  return "?";
}

struct RunConfig {
  fs::path config_path;
  // corpus inputs
  std::optional<fs::path> tr_titles;
  std::optional<fs::path> us_titles;
  std::optional<fs::path> match_rules;
  std::optional<fs::path> occupations;  // used when raw title lists are not configured
  fs::path adjectives;
  fs::path subjects;
  fs::path predicates;
  fs::path workforce;
  // run
  fs::path out_dir;
  Mode mode = Mode::Mock;
  std::optional<std::uint64_t> seed;
  std::size_t parallelism = 1;
  stats::Denominator denominator = stats::Denominator::GenderedOnly;
  std::optional<fs::path> cache;
  bool resume = false;
  // backends
  std::vector<std::string> mock_backends;
  std::optional<fs::path> mock_policy;
  std::vector<fs::path> endpoints;
};

/// Command-line values that override the configuration file.
struct Overrides {
  bool mock = false;
  bool cache_only = false;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> cache;
  std::optional<std::size_t> parallelism;
  std::optional<fs::path> out;
  bool resume = false;
  std::optional<std::string> denominator;
};

/// Run configuration file:
///
///   [inputs]  tr_titles, us_titles, match_rules | occupations,
///             adjectives, subjects, predicates, workforce
///   [run]     out, mode = mock|live|cache-only, seed, parallelism,
///             denominator = gendered|all, cache
///   [mock]    backends = a, b, c   policy = mock_policy.ini
///   [live]    endpoints = vendor-a.ini, vendor-b.ini
inline RunConfig load_run_config(const fs::path& path, const Overrides& ov) {
  const auto cfg = KeyValueConfig::load(path);
  static const std::set<std::string> sections{"inputs", "run", "mock", "live"};
  for (const auto& name : cfg.section_names())
    if (!sections.count(name)) throw ConfigError(cfg.source() + ": unknown section [" + name + "]");

  RunConfig rc;
  rc.config_path = path;
  auto opt_path = [&](const std::string& section, const std::string& key) -> std::optional<fs::path> {
    if (!cfg.get(section, key)) return std::nullopt;
    return cfg.path(section, key);
  };
  rc.tr_titles = opt_path("inputs", "tr_titles");
  rc.us_titles = opt_path("inputs", "us_titles");
  rc.match_rules = opt_path("inputs", "match_rules");
  rc.occupations = opt_path("inputs", "occupations");
  if (rc.tr_titles.has_value() != rc.us_titles.has_value() || rc.tr_titles.has_value() != rc.match_rules.has_value())
    throw ConfigError(cfg.source() + ": tr_titles, us_titles and match_rules must be given together");
  if (!rc.tr_titles && !rc.occupations)
    throw ConfigError(cfg.source() + ": [inputs] needs either raw title lists or an occupations file");
  rc.adjectives = cfg.path("inputs", "adjectives");
  rc.subjects = cfg.path("inputs", "subjects");
  rc.predicates = cfg.path("inputs", "predicates");
  rc.workforce = cfg.path("inputs", "workforce");

  rc.out_dir = ov.out ? *ov.out : (cfg.get("run", "out") ? cfg.path("run", "out") : fs::path("out"));

  const auto mode_text = cfg.get_or("run", "mode", "mock");
  if (mode_text == "mock") rc.mode = Mode::Mock;
  else if (mode_text == "live") rc.mode = Mode::Live;
  else if (mode_text == "cache-only") rc.mode = Mode::CacheOnly;
  else throw ConfigError(cfg.source() + ": [run] mode must be mock, live or cache-only");
  if (ov.mock && ov.cache_only) throw ConfigError("--mock and --cache-only are mutually exclusive");
  if (ov.mock) rc.mode = Mode::Mock;
  if (ov.cache_only) rc.mode = Mode::CacheOnly;

  if (auto s = cfg.get("run", "seed")) rc.seed = static_cast<std::uint64_t>(cfg.get_int("run", "seed", 0));
  if (ov.seed) rc.seed = ov.seed;
  const auto par = ov.parallelism ? static_cast<long long>(*ov.parallelism) : cfg.get_int("run", "parallelism", 1);
  if (par < 1) throw ConfigError("parallelism must be >= 1");
  rc.parallelism = static_cast<std::size_t>(par);
  const auto denom = ov.denominator ? *ov.denominator : cfg.get_or("run", "denominator", "gendered");
  auto d = stats::parse_denominator(denom);
  if (!d) throw ConfigError("denominator must be gendered or all, got " + denom);
  rc.denominator = *d;
  rc.cache = ov.cache ? ov.cache : opt_path("run", "cache");
  rc.resume = ov.resume;

  for (const auto& b : text::split_list(cfg.get_or("mock", "backends", "mock"))) rc.mock_backends.push_back(b);
  rc.mock_policy = opt_path("mock", "policy");
  for (const auto& e : text::split_list(cfg.get_or("live", "endpoints", ""))) {
    fs::path p = e;
    rc.endpoints.push_back(p.is_absolute() ? p : cfg.base_dir() / p);
  }

  if (rc.mode == Mode::Mock && !rc.seed) throw ConfigError("mock runs require a seed (--seed N or [run] seed)");
  if (rc.mode == Mode::Mock && rc.mock_backends.empty()) throw ConfigError("[mock] backends is empty");
  if (rc.mode != Mode::Mock && rc.endpoints.empty())
    throw ConfigError(std::string(to_string(rc.mode)) + " runs require [live] endpoints");
  return rc;
}

// ---------------------------------------------------------------------------
// Layout and manifests

struct Layout {
  fs::path root;
  fs::path corpus() const { return root / "corpus"; }
  fs::path occupations() const { return corpus() / "occupations.csv"; }
  fs::path adjectives() const { return corpus() / "adjectives.csv"; }
  fs::path subjects() const { return corpus() / "asymmetry_subjects.csv"; }
  fs::path predicates() const { return corpus() / "asymmetry_predicates.csv"; }
  fs::path workforce() const { return corpus() / "workforce.csv"; }
  fs::path audit() const { return corpus() / "match_audit.jsonl"; }
  fs::path probes() const { return root / "probes" / "probes.jsonl"; }
  fs::path translations() const { return root / "translations"; }
  fs::path translation(const std::string& backend) const { return translations() / (backend + ".jsonl"); }
  fs::path detections() const { return root / "analysis" / "detections.jsonl"; }
  fs::path analysis_report() const { return root / "analysis" / "report.json"; }
  fs::path report_dir() const { return root / "report"; }
  fs::path manifest(const std::string& stage) const { return root / "manifests" / (stage + ".json"); }

  std::vector<fs::path> corpus_files() const { return {occupations(), adjectives(), subjects(), predicates(), workforce()}; }
};

inline std::string relative_name(const fs::path& p, const fs::path& root) {
  auto rel = p.lexically_relative(root);
  return rel.empty() || rel.native().starts_with("..") ? p.generic_string() : rel.generic_string();
}

/// Hashes of the given files keyed by their path relative to `root`.
inline std::map<std::string, std::string> hash_files(const std::vector<fs::path>& files, const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& f : files) {
    if (!fs::exists(f)) throw StageError(kDataValidation, "missing input file " + f.string());
    out[relative_name(f, root)] = sha256_file(f);
  }
  return out;
}

struct Manifest {
  std::string stage;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::map<std::string, std::string> params;
};

inline void write_manifest(const Layout& layout, const Manifest& m) {
  nlohmann::ordered_json j;
  j["stage"] = m.stage;
  j["tool_version"] = MTBIAS_VERSION;
  j["created_at"] = format_utc(SystemClock().now());
  j["params"] = m.params;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  mtbias::detail::write_file(layout.manifest(m.stage), j.dump(2) + "\n");
}

inline std::optional<Manifest> read_manifest(const Layout& layout, const std::string& stage) {
  const auto path = layout.manifest(stage);
  if (!fs::exists(path)) return std::nullopt;
  try {
    std::ifstream in(path, std::ios::binary);
    const auto j = nlohmann::json::parse(in);
    Manifest m;
    m.stage = j.at("stage").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    if (j.at("tool_version").get<std::string>() != MTBIAS_VERSION) return std::nullopt;
    return m;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// True when a previous run of the stage saw the same inputs and parameters
/// and its outputs are still intact.
inline bool up_to_date(const Layout& layout, const Manifest& current) {
  auto prev = read_manifest(layout, current.stage);
  if (!prev || prev->inputs != current.inputs || prev->params != current.params) return false;
  for (const auto& [name, hash] : prev->outputs) {
    const fs::path p = layout.root / name;
    if (!fs::exists(p) || sha256_file(p) != hash) return false;
  }
  return true;
}

struct StageContext {
  RunConfig config;
  Layout layout;
  std::ostream* log = &std::clog;

  void say(const std::string& msg) const {
    if (log) *log << msg << '\n';
  }
};

inline StageContext make_context(RunConfig rc) {
  StageContext ctx{std::move(rc), {}, &std::clog};
  ctx.layout.root = ctx.config.out_dir;
  return ctx;
}

// ---------------------------------------------------------------------------
// Stages

inline void cmd_corpus_build(const StageContext& ctx) {
  const auto& rc = ctx.config;
  const auto& L = ctx.layout;
  std::vector<fs::path> inputs{rc.adjectives, rc.subjects, rc.predicates, rc.workforce};
  if (rc.tr_titles) inputs.insert(inputs.end(), {*rc.tr_titles, *rc.us_titles, *rc.match_rules});
  else inputs.push_back(*rc.occupations);
  Manifest m{"corpus-build", hash_files(inputs, rc.config_path.parent_path()), {}, {}};
  if (rc.resume && up_to_date(L, m)) {
    ctx.say("corpus-build: up to date, skipped");
    return;
  }

  OccupationCorpus corpus;
  if (rc.tr_titles) {
    auto result = match_occupations(load_tr_titles(*rc.tr_titles), load_us_titles(*rc.us_titles),
                                    load_match_rules(*rc.match_rules));
    corpus = std::move(result.corpus);
    mtbias::detail::write_file(L.audit(), format_audit(result.audit));
  } else {
    corpus = load_occupation_corpus(*rc.occupations);
    mtbias::detail::write_file(L.audit(), "");
  }
  const auto adjectives = load_adjective_lexicon(rc.adjectives);
  const auto asym = load_asymmetry_lexicon(rc.subjects, rc.predicates);
  const auto workforce = load_workforce_stats(rc.workforce);

  std::vector<Issue> issues;
  for (const auto& o : corpus.occupations)
    for (auto t : {Taxonomy::ISCO, Taxonomy::SOC})
      if (!workforce.find(t, o.group(t)))
        issues.push_back({rc.workforce.string(), 0, std::string(to_string(t)),
                          "no workforce share for group '" + o.group(t) + "' used by occupation " + o.id});
  if (!issues.empty()) throw ValidationError(std::move(issues));

  save_occupation_corpus(corpus, L.occupations());
  mtbias::detail::write_file(L.adjectives(), format_adjective_lexicon(adjectives));
  mtbias::detail::write_file(L.subjects(), format_subject_words(asym.subjects));
  mtbias::detail::write_file(L.predicates(), format_predicates(asym.predicates));
  mtbias::detail::write_file(L.workforce(), format_workforce_stats(workforce));

  auto outputs = L.corpus_files();
  outputs.push_back(L.audit());
  m.outputs = hash_files(outputs, L.root);
  write_manifest(L, m);
  ctx.say(fmt::format("corpus-build: {} occupations, {} adjectives, {} subject words, {} predicates",
                      corpus.size(), adjectives.size(), asym.subjects.size(), asym.predicates.size()));
}

inline void cmd_probes(const StageContext& ctx) {
  const auto& L = ctx.layout;
  for (const auto& f : L.corpus_files())
    if (!fs::exists(f)) throw StageError(kDataValidation, "probes: missing corpus file " + f.string() +
                                                              " (run corpus-build first)");
  Manifest m{"probes", hash_files(L.corpus_files(), L.root), {}, {}};
  if (ctx.config.resume && up_to_date(L, m)) {
    ctx.say("probes: up to date, skipped");
    return;
  }
  const auto corpus = load_occupation_corpus(L.occupations());
  const auto adjectives = load_adjective_lexicon(L.adjectives());
  const auto asym = load_asymmetry_lexicon(L.subjects(), L.predicates());

  std::vector<Probe> probes = gen_occupation_probes(corpus);
  auto adj = gen_adjective_probes(adjectives);
  auto asy = gen_asymmetry_probes(asym.subjects, asym.predicates);
  probes.insert(probes.end(), adj.begin(), adj.end());
  probes.insert(probes.end(), asy.begin(), asy.end());
  mtbias::detail::write_file(L.probes(), format_probes(probes));
  m.outputs = hash_files({L.probes()}, L.root);
  write_manifest(L, m);
  ctx.say(fmt::format("probes: {} occupation, {} adjective, {} asymmetry", 5 * corpus.size(), adj.size(), asy.size()));
}

/// Backends for the configured mode. Remote backends share one system clock.
struct BackendSet {
  std::vector<std::unique_ptr<Backend>> backends;
  std::unique_ptr<SystemClock> clock;
  std::vector<std::unique_ptr<RateLimiter>> limiters;
  std::map<std::string, std::string> params;  // recorded in the manifest
};

inline BackendSet make_backends(const StageContext& ctx) {
  const auto& rc = ctx.config;
  const auto& L = ctx.layout;
  BackendSet set;
  set.params["mode"] = std::string(to_string(rc.mode));
  if (rc.mode == Mode::Mock) {
    MockPolicy policy = rc.mock_policy ? MockPolicy::from_config(KeyValueConfig::load(*rc.mock_policy))
                                       : MockPolicy::defaults();
    policy.seed = *rc.seed;
    set.params["seed"] = std::to_string(*rc.seed);
    set.params["mock_policy"] = rc.mock_policy ? sha256_file(*rc.mock_policy) : "defaults";
    auto mctx = std::make_shared<const MockContext>(MockContext::build(
        load_occupation_corpus(L.occupations()), load_adjective_lexicon(L.adjectives()),
        load_asymmetry_lexicon(L.subjects(), L.predicates())));
    for (const auto& id : rc.mock_backends) set.backends.push_back(std::make_unique<MockBackend>(id, policy, mctx));
    set.params["backends"] = text::join(rc.mock_backends, ",");
    return set;
  }

  set.clock = std::make_unique<SystemClock>();
  std::vector<std::string> ids;
  for (const auto& path : rc.endpoints) {
    auto endpoint = EndpointDescriptor::load(path);
    ids.push_back(endpoint.backend_id);
    if (rc.mode == Mode::CacheOnly) {
      set.backends.push_back(std::make_unique<ReplayOnlyBackend>(endpoint.backend_id));
      continue;
    }
    set.limiters.push_back(std::make_unique<RateLimiter>(*set.clock, endpoint.max_requests_per_second));
    RemoteContext rctx;
    rctx.clock = set.clock.get();
    rctx.limiter = set.limiters.back().get();
    auto backend = std::make_unique<RemoteBackend>(std::move(endpoint), rctx);
    try {
      backend->check_credentials();
    } catch (const TranslationError& e) {
      throw StageError(kBackendFailure, std::string("translate: ") + e.what());
    }
    set.backends.push_back(std::move(backend));
  }
  set.params["backends"] = text::join(ids, ",");
  return set;
}

inline void cmd_translate(const StageContext& ctx) {
  const auto& rc = ctx.config;
  const auto& L = ctx.layout;
  if (!fs::exists(L.probes()))
    throw StageError(kDataValidation, "translate: missing " + L.probes().string() + " (run probes first)");
  auto backends = make_backends(ctx);

  Manifest m{"translate", hash_files({L.probes()}, L.root), {}, backends.params};
  if (rc.resume && rc.mode == Mode::Mock && up_to_date(L, m)) {
    ctx.say("translate: up to date, skipped");
    return;
  }
  const auto probes = load_probes(L.probes());

  std::unique_ptr<TranslationCache> cache;
  if (rc.mode != Mode::Mock) {
    if (!rc.cache) throw StageError(kUsage, "translate: live and cache-only runs need --cache or [run] cache");
    cache = std::make_unique<TranslationCache>(*rc.cache);
    if (cache->corrupt_lines() > 0)
      ctx.say(fmt::format("translate: skipped {} corrupt cache lines", cache->corrupt_lines()));
  }

  fs::remove_all(L.translations());
  std::vector<fs::path> outputs;
  std::vector<std::string> fully_failed;
  for (auto& backend : backends.backends) {
    BatchOptions opts;
    opts.parallelism = rc.parallelism;
    opts.cache_only = rc.mode == Mode::CacheOnly;
    opts.clock = backends.clock.get();
    BatchStats stats;
    const auto records = run_batch(probes, *backend, cache.get(), opts, &stats);
    const auto path = L.translation(backend->id());
    mtbias::detail::write_file(path, format_records(records));
    outputs.push_back(path);
    ctx.say(fmt::format("translate: {}: {} records, {} live calls, {} cache hits, {} failures", backend->id(),
                        records.size(), stats.live_calls, stats.cache_hits, stats.failures));
    if (!records.empty() && stats.failures == records.size()) fully_failed.push_back(backend->id());
  }
  m.outputs = hash_files(outputs, L.root);
  write_manifest(L, m);
  if (!fully_failed.empty())
    throw StageError(kBackendFailure, "translate: every request failed for backend(s) " + text::join(fully_failed, ", "));
}

inline void cmd_analyze(const StageContext& ctx) {
  const auto& rc = ctx.config;
  const auto& L = ctx.layout;
  for (const auto& f : L.corpus_files())
    if (!fs::exists(f)) throw StageError(kDataValidation, "analyze: missing corpus file " + f.string());
  if (!fs::exists(L.probes())) throw StageError(kDataValidation, "analyze: missing probe file " + L.probes().string());
  const auto translate_manifest = read_manifest(L, "translate");
  if (!fs::exists(L.translations()) || !translate_manifest || translate_manifest->outputs.empty())
    throw StageError(kDataValidation, "analyze: missing translation records in " + L.translations().string());

  // Hash chain: probes were generated from these corpus files, and the
  // translations from these probes.
  const auto corpus_hashes = hash_files(L.corpus_files(), L.root);
  const auto probe_hashes = hash_files({L.probes()}, L.root);
  const auto probes_manifest = read_manifest(L, "probes");
  if (!probes_manifest || probes_manifest->inputs != corpus_hashes)
    throw StageError(kDataValidation, "analyze: probe set was not generated from the current corpus files");
  if (translate_manifest->inputs != probe_hashes)
    throw StageError(kDataValidation, "analyze: translation records were produced from a different probe set");
  std::vector<fs::path> record_files;
  for (const auto& [name, hash] : translate_manifest->outputs) {
    const fs::path p = L.root / name;
    if (!fs::exists(p)) throw StageError(kDataValidation, "analyze: missing translation records " + p.string());
    if (sha256_file(p) != hash) throw StageError(kDataValidation, "analyze: " + p.string() + " changed since translate");
    record_files.push_back(p);
  }

  std::vector<fs::path> inputs = L.corpus_files();
  inputs.push_back(L.probes());
  inputs.insert(inputs.end(), record_files.begin(), record_files.end());
  Manifest m{"analyze", hash_files(inputs, L.root), {}, {{"denominator", std::string(stats::to_string(rc.denominator))}}};
  if (rc.resume && up_to_date(L, m)) {
    ctx.say("analyze: up to date, skipped");
    return;
  }

  const auto corpus = load_occupation_corpus(L.occupations());
  const auto adjectives = load_adjective_lexicon(L.adjectives());
  const auto asym = load_asymmetry_lexicon(L.subjects(), L.predicates());
  const auto workforce = load_workforce_stats(L.workforce());
  const auto probes = load_probes(L.probes());
  std::vector<TranslationRecord> records;
  for (const auto& f : record_files) {
    auto part = load_records(f);
    records.insert(records.end(), part.begin(), part.end());
  }
  {
    std::set<std::string> known;
    for (const auto& p : probes) known.insert(p.id);
    std::map<std::string, std::size_t> per_backend;
    for (const auto& r : records) {
      if (!known.count(r.probe_id))
        throw StageError(kDataValidation, "analyze: record for unknown probe " + r.probe_id);
      ++per_backend[r.backend_id];
    }
    for (const auto& [b, n] : per_backend)
      if (n != probes.size())
        throw StageError(kDataValidation,
                         fmt::format("analyze: backend {} has {} records for {} probes", b, n, probes.size()));
  }

  const auto detections = detect_records(records, probes, asym.subjects);
  mtbias::detail::write_file(L.detections(), format_detections(detections));

  RunMetadata meta;
  meta.tool_version = MTBIAS_VERSION;
  meta.input_hashes = corpus_hashes;
  meta.input_hashes[relative_name(L.probes(), L.root)] = probe_hashes.begin()->second;
  if (auto it = translate_manifest->params.find("seed"); it != translate_manifest->params.end())
    meta.seed = std::stoull(it->second);
  meta.denominator = rc.denominator;
  AnalysisInputs in{&probes, &records, &detections, &corpus, &adjectives, &workforce};
  const auto report = analyze(in, std::move(meta));
  mtbias::detail::write_file(L.analysis_report(), to_json(report).dump(2) + "\n");

  m.outputs = hash_files({L.detections(), L.analysis_report()}, L.root);
  write_manifest(L, m);
  ctx.say(fmt::format("analyze: {} records, {} detections, {} tests", records.size(), detections.size(),
                      report.tests.size()));
}

inline void cmd_report(const StageContext& ctx) {
  const auto& L = ctx.layout;
  if (!fs::exists(L.analysis_report()))
    throw StageError(kDataValidation, "report: missing " + L.analysis_report().string() + " (run analyze first)");
  Manifest m{"report", hash_files({L.analysis_report()}, L.root), {}, {}};
  if (ctx.config.resume && up_to_date(L, m)) {
    ctx.say("report: up to date, skipped");
    return;
  }
  nlohmann::ordered_json doc;
  try {
    std::ifstream in(L.analysis_report(), std::ios::binary);
    doc = nlohmann::ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw StageError(kDataValidation, std::string("report: cannot parse report.json: ") + e.what());
  }
  fs::remove_all(L.report_dir());
  mtbias::detail::write_file(L.report_dir() / "report.json", doc.dump(2) + "\n");
  auto tables = report::emit_tables(doc, L.report_dir());
  auto figures = report::emit_figures(doc, L.report_dir());
  for (const auto& notice : figures.notices) ctx.say("report: " + notice);

  std::vector<fs::path> outputs{L.report_dir() / "report.json"};
  for (const auto& [name, _] : tables.empty() ? report::FileSet{} : tables) outputs.push_back(L.report_dir() / name);
  for (const auto& [name, _] : figures.files) outputs.push_back(L.report_dir() / name);
  m.outputs = hash_files(outputs, L.root);
  write_manifest(L, m);
  ctx.say(fmt::format("report: {} tables, {} figures in {}", tables.size(), figures.files.size(),
                      L.report_dir().string()));
}

/// Maps an exception from a stage to its exit code.
inline ExitCode classify(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->code();
  if (dynamic_cast<const ConfigError*>(&e)) return kUsage;
  if (dynamic_cast<const ValidationError*>(&e)) return kDataValidation;
  if (dynamic_cast<const TranslationError*>(&e)) return kBackendFailure;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return kDataValidation;
  return kInternal;
}

inline std::string describe(const std::exception& e) {
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    std::string out = "data validation failed:";
    for (const auto& issue : v->issues()) out += "\n  " + issue.to_string();
    return out;
  }
  return e.what();
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"corpus-build", "probes", "translate", "analyze", "report", "run-all"};
  return names;
}

/// Runs one subcommand; returns its exit code. run-all stops at the first
/// failing stage and names it.
inline int run_command(const std::string& command, const fs::path& config, const Overrides& ov,
                       std::ostream& err = std::cerr, std::ostream* log = &std::clog) {
  using Stage = void (*)(const StageContext&);
  static const std::map<std::string, Stage> stages{{"corpus-build", cmd_corpus_build},
                                                   {"probes", cmd_probes},
                                                   {"translate", cmd_translate},
                                                   {"analyze", cmd_analyze},
                                                   {"report", cmd_report}};
  std::vector<std::string> order;
  if (command == "run-all") order = {"corpus-build", "probes", "translate", "analyze", "report"};
  else if (stages.count(command)) order = {command};
  else {
    err << "error: unknown command " << command << '\n';
    return kUsage;
  }

  StageContext ctx;
  try {
    ctx = make_context(load_run_config(config, ov));
    ctx.log = log;
  } catch (const std::exception& e) {
    err << "error: " << describe(e) << '\n';
    return classify(e) == kInternal ? kInternal : kUsage;
  }
  for (const auto& name : order) {
    try {
      stages.at(name)(ctx);
    } catch (const std::exception& e) {
      err << "error: stage '" << name << "' failed: " << describe(e) << '\n';
      return classify(e);
    }
  }
  return kSuccess;
}

}  // namespace mtbias::pipeline
