#pragma once

// Backend abstraction, on-disk replay cache and the order-preserving batch
// runner.

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mtbias/errors.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/util/clock.hpp"
#include "mtbias/util/hash.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

enum class Origin { Live, Cache, Mock };

inline std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Live: return "Live";
    case Origin::Cache: return "Cache";
    case Origin::Mock: return "Mock";
  }
  return "?";
}

inline std::optional<Origin> parse_origin(std::string_view s) {
  if (s == "Live") return Origin::Live;
  if (s == "Cache") return Origin::Cache;
  if (s == "Mock") return Origin::Mock;
  return std::nullopt;
}

enum class FailureKind { Transport, HttpStatus, MalformedResponse, MissingCredential, CacheMiss, SchemaMismatch, Internal };

inline std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::Transport: return "Transport";
    case FailureKind::HttpStatus: return "HttpStatus";
    case FailureKind::MalformedResponse: return "MalformedResponse";
    case FailureKind::MissingCredential: return "MissingCredential";
    case FailureKind::CacheMiss: return "CacheMiss";
    case FailureKind::SchemaMismatch: return "SchemaMismatch";
    case FailureKind::Internal: return "Internal";
  }
  return "?";
}

inline std::optional<FailureKind> parse_failure_kind(std::string_view s) {
  for (auto k : {FailureKind::Transport, FailureKind::HttpStatus, FailureKind::MalformedResponse,
                 FailureKind::MissingCredential, FailureKind::CacheMiss, FailureKind::SchemaMismatch,
                 FailureKind::Internal})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Typed translation failure; the kind ends up in the record stream.
class TranslationError : public std::runtime_error {
 public:
  TranslationError(FailureKind kind, const std::string& message, int http_status = 0)
      : std::runtime_error(message), kind_(kind), http_status_(http_status) {}

  FailureKind kind() const noexcept { return kind_; }
  int http_status() const noexcept { return http_status_; }

 private:
  FailureKind kind_;
  int http_status_;
};

struct Failure {
  FailureKind kind = FailureKind::Internal;
  std::string message;
  bool operator==(const Failure&) const = default;
};

struct TranslationRecord {
  std::string probe_id;
  std::string backend_id;
  Direction direction = Direction::TrToEn;
  std::string source_text;
  std::optional<std::string> target_text;  // present iff the request succeeded
  std::optional<std::string> retrieved_at;  // null for mock output
  Origin origin = Origin::Live;
  std::optional<Failure> failure;

  bool ok() const { return target_text.has_value(); }
  bool operator==(const TranslationRecord&) const = default;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// Live backends are served through the replay cache; mocks bypass it.
  virtual bool is_live() const = 0;
  /// Throws TranslationError on failure. Must be safe to call concurrently.
  virtual std::string translate(const Probe& probe) = 0;
};

/// Stands in for a live backend when only the cache may be consulted.
class ReplayOnlyBackend final : public Backend {
 public:
  explicit ReplayOnlyBackend(std::string id) : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  bool is_live() const override { return true; }
  std::string translate(const Probe& probe) override {
    throw TranslationError(FailureKind::CacheMiss, "no cached translation for probe " + probe.id);
  }

 private:
  std::string id_;
};

// ---------------------------------------------------------------------------
// Replay cache

struct CacheEntry {
  std::string backend;
  Direction direction = Direction::TrToEn;
  std::string source;
  std::string target;
  std::string retrieved_at;
  bool operator==(const CacheEntry&) const = default;
};

inline nlohmann::ordered_json to_json(const CacheEntry& e) {
  nlohmann::ordered_json j;
  j["backend"] = e.backend;
  j["direction"] = to_string(e.direction);
  j["source"] = e.source;
  j["target"] = e.target;
  j["retrieved_at"] = e.retrieved_at;
  return j;
}

/// Append-only JSONL store keyed by (backend, direction, NFC(source)).
/// Concurrent readers; writes are serialized and flushed line by line.
class TranslationCache {
 public:
  TranslationCache() = default;

  explicit TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) load();
  }

  static std::string key(std::string_view backend, Direction direction, std::string_view source) {
    return Sha256()
        .update(backend)
        .update("\x1f")
        .update(to_string(direction))
        .update("\x1f")
        .update(text::nfc(source))
        .hex();
  }

  std::optional<CacheEntry> find(std::string_view backend, Direction direction, std::string_view source) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(key(backend, direction, source));
    if (it == entries_.end()) return std::nullopt;
    if (text::nfc(it->second.source) != text::nfc(source)) {
      ++collisions_;
      return std::nullopt;
    }
    return it->second;
  }

  void insert(const CacheEntry& entry) {
    std::unique_lock lock(mu_);
    entries_[key(entry.backend, entry.direction, entry.source)] = entry;
    if (path_.empty()) return;
    if (!out_.is_open()) {
      if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
      out_.open(path_, std::ios::binary | std::ios::app);
      if (!out_) throw std::runtime_error("cannot open cache " + path_.string() + " for append");
    }
    out_ << to_json(entry).dump() << '\n';
    out_.flush();
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }
  std::size_t corrupt_lines() const { return corrupt_; }
  std::size_t collisions() const { return collisions_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  void load() {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        auto dir = parse_direction(j.at("direction").get<std::string>());
        if (!dir) throw std::invalid_argument("bad direction");
        CacheEntry e{j.at("backend").get<std::string>(), *dir, j.at("source").get<std::string>(),
                     j.at("target").get<std::string>(), j.at("retrieved_at").get<std::string>()};
        entries_[key(e.backend, e.direction, e.source)] = std::move(e);
      } catch (const std::exception& ex) {
        ++corrupt_;
        std::clog << "warning: " << path_.string() << ":" << line_no << ": skipping corrupt cache line (" << ex.what()
                  << ")\n";
      }
    }
  }

  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::map<std::string, CacheEntry> entries_;
  std::ofstream out_;
  std::size_t corrupt_ = 0;
  mutable std::atomic<std::size_t> collisions_{0};
};

// ---------------------------------------------------------------------------
// Batch runner

struct BatchOptions {
  std::size_t parallelism = 1;
  bool cache_only = false;
  Clock* clock = nullptr;  // timestamps for live results; system clock when null
};

struct BatchStats {
  std::size_t live_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t failures = 0;
};

/// Translates every probe; output[i] always corresponds to probes[i]. A failing
/// probe yields a failed record rather than aborting the batch.
inline std::vector<TranslationRecord> run_batch(std::span<const Probe> probes, Backend& backend,
                                                TranslationCache* cache, const BatchOptions& options,
                                                BatchStats* stats = nullptr) {
  if (options.parallelism == 0) throw std::invalid_argument("run_batch: parallelism must be >= 1");

  SystemClock system_clock;
  Clock& clock = options.clock ? *options.clock : system_clock;
  const std::string backend_id = backend.id();
  const bool live = backend.is_live();

  std::vector<TranslationRecord> records(probes.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> live_calls{0}, cache_hits{0}, failures{0};

  auto process = [&](std::size_t i) {
    const Probe& probe = probes[i];
    TranslationRecord& rec = records[i];
    rec.probe_id = probe.id;
    rec.backend_id = backend_id;
    rec.direction = probe.direction;
    rec.source_text = probe.source_text;
    rec.origin = live ? Origin::Live : Origin::Mock;

    if (live && cache) {
      if (auto hit = cache->find(backend_id, probe.direction, probe.source_text)) {
        rec.target_text = hit->target;
        rec.retrieved_at = hit->retrieved_at;
        rec.origin = Origin::Cache;
        ++cache_hits;
        return;
      }
    }
    if (live && options.cache_only) {
      rec.origin = Origin::Cache;
      rec.failure = Failure{FailureKind::CacheMiss, "cache-only mode and no cached translation"};
      ++failures;
      return;
    }
    try {
      if (live) ++live_calls;
      std::string target = backend.translate(probe);
      if (live) {
        rec.retrieved_at = format_utc(clock.now());
        if (cache) cache->insert({backend_id, probe.direction, probe.source_text, target, *rec.retrieved_at});
      }
      rec.target_text = std::move(target);
    } catch (const TranslationError& e) {
      rec.failure = Failure{e.kind(), e.what()};
      ++failures;
    } catch (const std::exception& e) {
      rec.failure = Failure{FailureKind::Internal, e.what()};
      ++failures;
    }
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < probes.size(); i = next++) process(i);
  };

  const std::size_t n_workers = std::min(options.parallelism, probes.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  if (stats) {
    stats->live_calls += live_calls;
    stats->cache_hits += cache_hits;
    stats->failures += failures;
  }
  return records;
}

// ---------------------------------------------------------------------------
// Record JSONL

inline nlohmann::ordered_json to_json(const TranslationRecord& r) {
  nlohmann::ordered_json j;
  j["probe_id"] = r.probe_id;
  j["backend"] = r.backend_id;
  j["direction"] = to_string(r.direction);
  j["source"] = r.source_text;
  j["target"] = r.target_text ? nlohmann::ordered_json(*r.target_text) : nlohmann::ordered_json(nullptr);
  j["retrieved_at"] = r.retrieved_at ? nlohmann::ordered_json(*r.retrieved_at) : nlohmann::ordered_json(nullptr);
  j["origin"] = to_string(r.origin);
  if (r.failure)
    j["error"] = {{"kind", to_string(r.failure->kind)}, {"message", r.failure->message}};
  else
    j["error"] = nullptr;
  return j;
}

inline TranslationRecord record_from_json(const nlohmann::json& j) {
  TranslationRecord r;
  r.probe_id = j.at("probe_id").get<std::string>();
  r.backend_id = j.at("backend").get<std::string>();
  auto dir = parse_direction(j.at("direction").get<std::string>());
  auto origin = parse_origin(j.at("origin").get<std::string>());
  if (!dir || !origin) throw std::invalid_argument("bad direction or origin");
  r.direction = *dir;
  r.origin = *origin;
  r.source_text = j.at("source").get<std::string>();
  if (!j.at("target").is_null()) r.target_text = j.at("target").get<std::string>();
  if (!j.at("retrieved_at").is_null()) r.retrieved_at = j.at("retrieved_at").get<std::string>();
  if (const auto& err = j.at("error"); !err.is_null()) {
    auto kind = parse_failure_kind(err.at("kind").get<std::string>());
    if (!kind) throw std::invalid_argument("bad failure kind");
    r.failure = Failure{*kind, err.at("message").get<std::string>()};
  }
  if (r.target_text.has_value() == r.failure.has_value())
    throw std::invalid_argument("record must carry exactly one of target and error");
  return r;
}

inline std::string format_records(const std::vector<TranslationRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

inline std::vector<TranslationRecord> parse_records(std::string_view content, const std::string& source) {
  std::vector<TranslationRecord> out;
  std::vector<Issue> issues;
  std::size_t line_no = 0;
  for (const auto& line : text::split(content, '\n', false)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      issues.push_back({source, line_no, {}, e.what()});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

inline std::vector<TranslationRecord> load_records(const std::filesystem::path& path) {
  return parse_records(csv::read_text(path), path.string());
}

}  // namespace mtbias
