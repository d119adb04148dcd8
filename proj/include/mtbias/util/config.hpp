#pragma once

// Key-value configuration files in INI syntax:
//
//   ; comment
//   [section]
//   key = value
//
// Keys are kept verbatim (they may contain spaces, dots and non-ASCII text).

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtbias/errors.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

class KeyValueConfig {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static KeyValueConfig parse(const std::string& text, const std::string& source = "<config>") {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    KeyValueConfig cfg;
    cfg.source_ = source;
    for (const auto& [name, node] : tree) {
      if (node.empty() && !node.data().empty()) {
        // top-level key outside any section
        cfg.sections_[""].emplace_back(name, node.data());
        continue;
      }
      auto& section = cfg.sections_[name];
      for (const auto& [key, value] : node) section.emplace_back(key, std::string(text::trim(value.data())));
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = parse(ss.str(), path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
  }

  const std::string& source() const { return source_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  const Section& section(const std::string& name) const {
    static const Section empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
  }

  std::vector<std::string> section_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : sections_) out.push_back(name);
    return out;
  }

  std::optional<std::string> get(const std::string& section_name, const std::string& key) const {
    for (const auto& [k, v] : section(section_name))
      if (k == key) return v;
    return std::nullopt;
  }

  std::string get_or(const std::string& section_name, const std::string& key, std::string fallback) const {
    auto v = get(section_name, key);
    return v ? *v : std::move(fallback);
  }

  std::string require(const std::string& section_name, const std::string& key) const {
    auto v = get(section_name, key);
    if (!v) throw ConfigError(source_ + ": missing [" + section_name + "] " + key);
    return *v;
  }

  double get_double(const std::string& section_name, const std::string& key, double fallback) const {
    auto v = get(section_name, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ConfigError(source_ + ": [" + section_name + "] " + key + " is not a number: " + *v);
    }
  }

  long long get_int(const std::string& section_name, const std::string& key, long long fallback) const {
    auto v = get(section_name, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      long long n = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument("trailing");
      return n;
    } catch (const std::exception&) {
      throw ConfigError(source_ + ": [" + section_name + "] " + key + " is not an integer: " + *v);
    }
  }

  /// Resolves a path value relative to the config file's directory.
  std::filesystem::path path(const std::string& section_name, const std::string& key) const {
    std::filesystem::path p = require(section_name, key);
    return p.is_absolute() ? p : base_dir_ / p;
  }

 private:
  std::string source_;
  std::filesystem::path base_dir_;
  std::map<std::string, Section> sections_;
};

}  // namespace mtbias
