#pragma once

// Generic HTTP translation adapter driven entirely by an endpoint descriptor.
// No vendor-specific code paths: request and response shapes are mapped
// through dotted JSON paths.
//
// Descriptor (INI):
//
//   [endpoint]
//   backend         = vendor-a
//   url             = https://api.example.com/v2/translate
//   auth_header     = Authorization
//   auth_env        = VENDOR_A_TOKEN        ; credential comes from this variable
//   auth_prefix     = "Bearer "
//   text_field      = q
//   source_field    = source
//   target_field    = target
//   response_path   = data.translations.0.translatedText
//   lang_tr         = tr
//   lang_en         = en
//   max_attempts    = 4
//   backoff_initial_ms = 250
//   backoff_max_ms  = 8000
//   max_requests_per_second = 5
//   timeout_s       = 30
//
//   [request.extra]  format = text

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "mtbias/errors.hpp"
#include "mtbias/translate.hpp"
#include "mtbias/util/clock.hpp"
#include "mtbias/util/config.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

struct EndpointDescriptor {
  std::string backend_id;
  std::string url;
  std::string auth_header;
  std::string auth_env;
  std::string auth_prefix;
  std::string text_field = "text";
  std::string source_field;
  std::string target_field;
  std::map<std::string, std::string> extra_fields;
  std::string response_path;
  std::string lang_tr = "tr";
  std::string lang_en = "en";
  int max_attempts = 4;
  std::chrono::milliseconds backoff_initial{250};
  std::chrono::milliseconds backoff_max{8000};
  int max_requests_per_second = 0;  // 0 = no ceiling
  std::chrono::seconds timeout{30};

  static EndpointDescriptor from_config(const KeyValueConfig& cfg) {
    static const std::set<std::string> known{"backend",      "url",           "auth_header",    "auth_env",
                                             "auth_prefix",  "text_field",    "source_field",   "target_field",
                                             "response_path", "lang_tr",      "lang_en",        "max_attempts",
                                             "backoff_initial_ms", "backoff_max_ms", "max_requests_per_second",
                                             "timeout_s"};
    for (const auto& [key, _] : cfg.section("endpoint")) {
      if (!known.count(key))
        throw ConfigError(cfg.source() + ": unknown endpoint key '" + key +
                          "' (credentials must come from the variable named by auth_env)");
    }
    for (const auto& name : cfg.section_names())
      if (name != "endpoint" && name != "request.extra")
        throw ConfigError(cfg.source() + ": unknown section [" + name + "]");

    EndpointDescriptor d;
    d.backend_id = cfg.require("endpoint", "backend");
    d.url = cfg.require("endpoint", "url");
    d.response_path = cfg.require("endpoint", "response_path");
    d.auth_header = cfg.get_or("endpoint", "auth_header", "");
    d.auth_env = cfg.get_or("endpoint", "auth_env", "");
    d.auth_prefix = unquote(cfg.get_or("endpoint", "auth_prefix", ""));
    d.text_field = cfg.get_or("endpoint", "text_field", d.text_field);
    d.source_field = cfg.get_or("endpoint", "source_field", "");
    d.target_field = cfg.get_or("endpoint", "target_field", "");
    d.lang_tr = cfg.get_or("endpoint", "lang_tr", d.lang_tr);
    d.lang_en = cfg.get_or("endpoint", "lang_en", d.lang_en);
    d.max_attempts = static_cast<int>(cfg.get_int("endpoint", "max_attempts", d.max_attempts));
    d.backoff_initial = std::chrono::milliseconds(cfg.get_int("endpoint", "backoff_initial_ms", 250));
    d.backoff_max = std::chrono::milliseconds(cfg.get_int("endpoint", "backoff_max_ms", 8000));
    d.max_requests_per_second = static_cast<int>(cfg.get_int("endpoint", "max_requests_per_second", 0));
    d.timeout = std::chrono::seconds(cfg.get_int("endpoint", "timeout_s", 30));
    for (const auto& [k, v] : cfg.section("request.extra")) d.extra_fields[k] = v;

    if (!d.auth_header.empty() && d.auth_env.empty())
      throw ConfigError(cfg.source() + ": auth_header requires auth_env");
    if (d.max_attempts < 1) throw ConfigError(cfg.source() + ": max_attempts must be >= 1");
    if (d.max_requests_per_second < 0) throw ConfigError(cfg.source() + ": max_requests_per_second must be >= 0");
    return d;
  }

  static EndpointDescriptor load(const std::filesystem::path& path) { return from_config(KeyValueConfig::load(path)); }

 private:
  static std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }
};

/// Sliding-window limiter: at most `max_per_second` acquisitions in any
/// one-second window of the supplied clock.
class RateLimiter {
 public:
  RateLimiter(Clock& clock, int max_per_second) : clock_(clock), max_(max_per_second) {}

  void acquire() {
    if (max_ <= 0) return;
    std::lock_guard lock(mu_);
    constexpr auto window = std::chrono::seconds(1);
    while (true) {
      const auto now = clock_.now();
      while (!stamps_.empty() && now - stamps_.front() >= window) stamps_.pop_front();
      if (static_cast<int>(stamps_.size()) < max_) {
        stamps_.push_back(now);
        return;
      }
      clock_.sleep_for(stamps_.front() + window - now);
    }
  }

 private:
  Clock& clock_;
  int max_;
  std::mutex mu_;
  std::deque<Clock::time_point> stamps_;
};

struct RemoteContext {
  Clock* clock = nullptr;  // system clock when null
  RateLimiter* limiter = nullptr;
  std::function<std::optional<std::string>(const std::string&)> getenv;  // std::getenv when empty
  std::function<void(const std::string&)> log;                           // std::clog when empty
};

struct RemoteResult {
  std::string text;
  int attempts = 0;
};

namespace detail {

inline nlohmann::json::json_pointer dotted_pointer(std::string_view dotted) {
  std::string ptr;
  for (const auto& part : text::split(dotted, '.')) {
    std::string escaped;
    for (char c : part) {
      if (c == '~') escaped += "~0";
      else if (c == '/') escaped += "~1";
      else escaped.push_back(c);
    }
    ptr += "/" + escaped;
  }
  return nlohmann::json::json_pointer(ptr);
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint url lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

}  // namespace detail

/// Sends one translation request, retrying transport errors, 429 and 5xx with
/// exponential backoff. Other HTTP errors and malformed bodies fail at once.
inline RemoteResult remote_translate(const std::string& text, Direction direction, const EndpointDescriptor& endpoint,
                                     const RemoteContext& ctx = {}) {
  SystemClock system_clock;
  Clock& clock = ctx.clock ? *ctx.clock : system_clock;
  auto log = [&](const std::string& msg) {
    if (ctx.log) ctx.log(msg);
    else std::clog << msg << '\n';
  };

  httplib::Headers headers;
  if (!endpoint.auth_header.empty()) {
    std::optional<std::string> credential;
    if (ctx.getenv) {
      credential = ctx.getenv(endpoint.auth_env);
    } else if (const char* v = std::getenv(endpoint.auth_env.c_str())) {
      credential = v;
    }
    if (!credential || credential->empty())
      throw TranslationError(FailureKind::MissingCredential,
                             "environment variable " + endpoint.auth_env + " is not set for backend " +
                                 endpoint.backend_id);
    headers.emplace(endpoint.auth_header, endpoint.auth_prefix + *credential);
  }

  const auto& [src, tgt] = direction == Direction::TrToEn ? std::pair{endpoint.lang_tr, endpoint.lang_en}
                                                          : std::pair{endpoint.lang_en, endpoint.lang_tr};
  nlohmann::json body = nlohmann::json::object();
  body[detail::dotted_pointer(endpoint.text_field)] = text;
  if (!endpoint.source_field.empty()) body[detail::dotted_pointer(endpoint.source_field)] = src;
  if (!endpoint.target_field.empty()) body[detail::dotted_pointer(endpoint.target_field)] = tgt;
  for (const auto& [k, v] : endpoint.extra_fields) body[detail::dotted_pointer(k)] = v;
  const std::string payload = body.dump();

  std::string url = detail::replace_all(endpoint.url, "{source_lang}", src);
  url = detail::replace_all(url, "{target_lang}", tgt);
  const auto [origin, path] = detail::split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(endpoint.timeout);
  client.set_read_timeout(endpoint.timeout);

  auto backoff = endpoint.backoff_initial;
  std::optional<TranslationError> last_error;
  for (int attempt = 1; attempt <= endpoint.max_attempts; ++attempt) {
    if (ctx.limiter) ctx.limiter->acquire();
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error.emplace(FailureKind::Transport, "transport error: " + httplib::to_string(res.error()));
    } else if (res->status >= 200 && res->status < 300) {
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(res->body);
      } catch (const std::exception& e) {
        throw TranslationError(FailureKind::MalformedResponse, std::string("response is not JSON: ") + e.what());
      }
      const auto ptr = detail::dotted_pointer(endpoint.response_path);
      if (!parsed.contains(ptr) || !parsed.at(ptr).is_string())
        throw TranslationError(FailureKind::MalformedResponse,
                               "response has no string at '" + endpoint.response_path + "'");
      if (attempt > 1) log(endpoint.backend_id + ": succeeded after " + std::to_string(attempt) + " attempts");
      return {parsed.at(ptr).get<std::string>(), attempt};
    } else if (res->status == 429 || res->status >= 500) {
      last_error.emplace(FailureKind::HttpStatus, "HTTP " + std::to_string(res->status), res->status);
    } else {
      throw TranslationError(FailureKind::HttpStatus, "HTTP " + std::to_string(res->status), res->status);
    }

    log(endpoint.backend_id + ": attempt " + std::to_string(attempt) + " failed (" + last_error->what() + ")");
    if (attempt < endpoint.max_attempts) {
      clock.sleep_for(backoff);
      backoff = std::min(backoff * 2, endpoint.backoff_max);
    }
  }
  throw *last_error;
}

class RemoteBackend final : public Backend {
 public:
  RemoteBackend(EndpointDescriptor endpoint, RemoteContext ctx)
      : endpoint_(std::move(endpoint)), ctx_(std::move(ctx)) {}

  std::string id() const override { return endpoint_.backend_id; }
  bool is_live() const override { return true; }
  std::string translate(const Probe& probe) override {
    return remote_translate(probe.source_text, probe.direction, endpoint_, ctx_).text;
  }

  /// Fails fast when the credential variable is absent.
  void check_credentials() const {
    if (endpoint_.auth_header.empty()) return;
    std::optional<std::string> value;
    if (ctx_.getenv) value = ctx_.getenv(endpoint_.auth_env);
    else if (const char* v = std::getenv(endpoint_.auth_env.c_str())) value = v;
    if (!value || value->empty())
      throw TranslationError(FailureKind::MissingCredential,
                             "environment variable " + endpoint_.auth_env + " is not set for backend " +
                                 endpoint_.backend_id);
  }

 private:
  EndpointDescriptor endpoint_;
  RemoteContext ctx_;
};

}  // namespace mtbias
