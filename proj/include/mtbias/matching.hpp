#pragma once

// Deterministic rule engine that pairs Turkish occupation titles with US
// titles. Similarity judgements are supplied as curated maps; nothing here
// is fuzzy.
//
// Rule configuration (INI):
//
//   [rules]
//   admit   = exact, broader_narrower, retitle, education_level
//   modify  = punctuation_detail, split, detail_strip
//   exclude = religious, gendered, military
//
//   [exclude.religious]            terms = imam, priest, ...
//   [admit.broader_narrower]       <tr english gloss> = <us title>
//   [admit.retitle]                <tr english gloss> = <us title>
//   [admit.education_level]        <tr english gloss> = <us title>
//   [modify.punctuation_detail]    <gloss> = <rewritten gloss>
//   [modify.detail_strip]          <gloss> = <gloss without the detail>
//   [modify.split]                 <title_tr> = <tr part>=<en part> | <tr part>=<en part>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/errors.hpp"
#include "mtbias/util/config.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

/// One row of the Turkish agency list. `title_en` is the English (ISCO) gloss.
struct TrTitle {
  std::string title_tr;
  std::string title_en;
  std::string isco_major;
  double female_pct_tr = 0;
  std::size_t line = 0;
};

struct UsTitle {
  std::string title;
  std::string soc_major;
  double female_pct_us = 0;
  std::size_t line = 0;
};

inline constexpr std::array<std::string_view, 4> kAdmissionRules{"exact", "broader_narrower", "retitle",
                                                                 "education_level"};
inline constexpr std::array<std::string_view, 3> kModificationRules{"punctuation_detail", "split", "detail_strip"};
// Order matters: the position is the exclusion rule number reported in audits.
inline constexpr std::array<std::string_view, 3> kExclusionRules{"religious", "gendered", "military"};

struct SplitPart {
  std::string title_tr;
  std::string title_en;
};

struct MatchRules {
  std::vector<std::string> admit{kAdmissionRules.begin(), kAdmissionRules.end()};
  std::vector<std::string> modify{kModificationRules.begin(), kModificationRules.end()};
  std::vector<std::string> exclude{kExclusionRules.begin(), kExclusionRules.end()};

  // keyed by normalized title
  std::map<std::string, std::string> broader_narrower;
  std::map<std::string, std::string> retitle;
  std::map<std::string, std::string> education_level;
  std::map<std::string, std::string> punctuation_detail;
  std::map<std::string, std::string> detail_strip;
  std::map<std::string, std::vector<SplitPart>> split;

  std::map<std::string, std::vector<std::string>> exclusion_terms;  // rule -> folded terms

  bool enabled(const std::vector<std::string>& list, std::string_view id) const {
    return std::find(list.begin(), list.end(), id) != list.end();
  }

  static MatchRules from_config(const KeyValueConfig& cfg);
};

/// Case- and spacing-insensitive comparison key for titles.
inline std::string normalize_title(std::string_view title) { return text::squeeze_spaces(text::fold_turkish(title)); }

namespace detail {

template <std::size_t N>
bool known_rule(const std::array<std::string_view, N>& rules, std::string_view id) {
  return std::find(rules.begin(), rules.end(), id) != rules.end();
}

template <std::size_t N>
std::vector<std::string> rule_list(const KeyValueConfig& cfg, const std::string& key,
                                   const std::array<std::string_view, N>& known) {
  auto value = cfg.get("rules", key);
  if (!value) return {known.begin(), known.end()};
  auto ids = text::split_list(*value);
  for (const auto& id : ids)
    if (!known_rule(known, id)) throw ConfigError(cfg.source() + ": unknown " + key + " rule identifier '" + id + "'");
  return ids;
}

/// Splits a folded title into letter/digit tokens.
inline std::vector<std::string> title_tokens(std::string_view folded) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : text::code_points(folded)) {
    if (u_isalnum(static_cast<UChar32>(cp))) {
      text::append_utf8(current, cp);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// True when the term's tokens occur contiguously in the title, each term
/// token being a prefix of the corresponding title token (tolerates Turkish
/// suffixes such as imam -> imamı).
inline bool contains_term(const std::vector<std::string>& title, const std::vector<std::string>& term) {
  if (term.empty() || term.size() > title.size()) return false;
  for (std::size_t start = 0; start + term.size() <= title.size(); ++start) {
    bool all = true;
    for (std::size_t k = 0; k < term.size() && all; ++k) all = title[start + k].starts_with(term[k]);
    if (all) return true;
  }
  return false;
}

}  // namespace detail

inline MatchRules MatchRules::from_config(const KeyValueConfig& cfg) {
  MatchRules rules;
  rules.admit = detail::rule_list(cfg, "admit", kAdmissionRules);
  rules.modify = detail::rule_list(cfg, "modify", kModificationRules);
  rules.exclude = detail::rule_list(cfg, "exclude", kExclusionRules);

  for (const auto& [key, _] : cfg.section("rules"))
    if (key != "admit" && key != "modify" && key != "exclude")
      throw ConfigError(cfg.source() + ": unknown key in [rules]: " + key);

  auto load_map = [&](const std::string& section, std::map<std::string, std::string>& out) {
    for (const auto& [from, to] : cfg.section(section)) {
      if (to.empty()) throw ConfigError(cfg.source() + ": empty mapping for '" + from + "' in [" + section + "]");
      out[normalize_title(from)] = to;
    }
  };

  for (const auto& name : cfg.section_names()) {
    if (name == "rules") continue;
    const auto dot = name.find('.');
    const std::string kind = name.substr(0, dot);
    const std::string id = dot == std::string::npos ? std::string{} : name.substr(dot + 1);
    const bool known = (kind == "admit" && id != "exact" && detail::known_rule(kAdmissionRules, id)) ||
                       (kind == "modify" && detail::known_rule(kModificationRules, id)) ||
                       (kind == "exclude" && detail::known_rule(kExclusionRules, id));
    if (!known) throw ConfigError(cfg.source() + ": unknown rule identifier in section [" + name + "]");
  }

  load_map("admit.broader_narrower", rules.broader_narrower);
  load_map("admit.retitle", rules.retitle);
  load_map("admit.education_level", rules.education_level);
  load_map("modify.punctuation_detail", rules.punctuation_detail);
  load_map("modify.detail_strip", rules.detail_strip);

  for (const auto& [title_tr, value] : cfg.section("modify.split")) {
    std::vector<SplitPart> parts;
    for (const auto& part : text::split_list(value, '|')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos)
        throw ConfigError(cfg.source() + ": split part '" + part + "' must be '<tr title>=<en title>'");
      parts.push_back({std::string(text::trim(part.substr(0, eq))), std::string(text::trim(part.substr(eq + 1)))});
      if (parts.back().title_tr.empty() || parts.back().title_en.empty())
        throw ConfigError(cfg.source() + ": split part '" + part + "' has an empty side");
    }
    if (parts.size() < 2) throw ConfigError(cfg.source() + ": split of '" + title_tr + "' needs at least two parts");
    rules.split[normalize_title(title_tr)] = std::move(parts);
  }

  for (auto id : kExclusionRules) {
    const std::string section = "exclude." + std::string(id);
    for (const auto& [key, value] : cfg.section(section)) {
      if (key != "terms") throw ConfigError(cfg.source() + ": unknown key in [" + section + "]: " + key);
      for (const auto& term : text::split_list(value)) rules.exclusion_terms[std::string(id)].push_back(term);
    }
  }
  return rules;
}

inline MatchRules load_match_rules(const std::filesystem::path& path) {
  return MatchRules::from_config(KeyValueConfig::load(path));
}

/// What happened to one input title.
struct AuditEntry {
  std::string list;  // "tr" or "us"
  std::size_t line = 0;
  std::string title;
  std::string outcome;  // admitted | excluded | unmatched
  std::string rule;     // admitting or excluding rule, e.g. "exact", "exclude.religious"
  int exclusion_number = 0;  // 1-based exclusion rule number when excluded
  std::vector<std::string> modifications;
  std::vector<std::string> occupation_ids;
  std::vector<std::string> pair_rules;  // admitting rule per occupation id
  std::string detail;

  bool operator==(const AuditEntry&) const = default;
};

struct MatchResult {
  OccupationCorpus corpus;
  std::vector<AuditEntry> audit;
};

inline nlohmann::ordered_json to_json(const AuditEntry& e) {
  nlohmann::ordered_json j;
  j["list"] = e.list;
  j["line"] = e.line;
  j["title"] = e.title;
  j["outcome"] = e.outcome;
  j["rule"] = e.rule;
  if (e.exclusion_number) j["exclusion_rule"] = e.exclusion_number;
  j["modifications"] = e.modifications;
  j["occupation_ids"] = e.occupation_ids;
  j["pair_rules"] = e.pair_rules;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

inline std::string format_audit(const std::vector<AuditEntry>& audit) {
  std::string out;
  for (const auto& e : audit) out += to_json(e).dump() + "\n";
  return out;
}

namespace detail {

struct Exclusion {
  std::string rule;
  int number = 0;
  std::string term;
};

inline std::optional<Exclusion> find_exclusion(const MatchRules& rules, std::initializer_list<std::string_view> titles) {
  for (std::size_t i = 0; i < kExclusionRules.size(); ++i) {
    const std::string id(kExclusionRules[i]);
    if (!rules.enabled(rules.exclude, id)) continue;
    auto it = rules.exclusion_terms.find(id);
    if (it == rules.exclusion_terms.end()) continue;
    for (auto title : titles) {
      const auto tokens = title_tokens(text::fold_turkish(title));
      for (const auto& term : it->second)
        if (contains_term(tokens, title_tokens(text::fold_turkish(term))))
          return Exclusion{"exclude." + id, static_cast<int>(i) + 1, term};
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline std::vector<TrTitle> parse_tr_titles(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  std::vector<TrTitle> out;
  if (table.header.empty()) return out;
  const auto cols =
      detail::Columns::resolve(table, {"title_tr", "title_en", "isco_major", "female_pct_tr"}, {}, source, issues);
  detail::throw_if_any(issues);
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    TrTitle t{cols.get(row, "title_tr"), cols.get(row, "title_en"), cols.get(row, "isco_major"), 0, row.line};
    bool ok = detail::require_non_empty(t.title_tr, "title_tr", row, source, issues);
    ok &= detail::require_non_empty(t.title_en, "title_en", row, source, issues);
    if (!is_major_group(Taxonomy::ISCO, t.isco_major)) {
      issues.push_back({source, row.line, "isco_major", "unknown ISCO-08 major group '" + t.isco_major + "'"});
      ok = false;
    }
    auto pct = detail::percentage_field(cols, row, "female_pct_tr", source, issues);
    if (!ok || !pct) continue;
    t.female_pct_tr = *pct;
    out.push_back(std::move(t));
  }
  detail::throw_if_any(issues);
  return out;
}

inline std::vector<UsTitle> parse_us_titles(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  std::vector<UsTitle> out;
  if (table.header.empty()) return out;
  const auto cols = detail::Columns::resolve(table, {"title", "soc_major", "female_pct_us"}, {}, source, issues);
  detail::throw_if_any(issues);
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    UsTitle u{cols.get(row, "title"), cols.get(row, "soc_major"), 0, row.line};
    bool ok = detail::require_non_empty(u.title, "title", row, source, issues);
    if (!is_major_group(Taxonomy::SOC, u.soc_major)) {
      issues.push_back({source, row.line, "soc_major", "unknown SOC major group '" + u.soc_major + "'"});
      ok = false;
    }
    auto pct = detail::percentage_field(cols, row, "female_pct_us", source, issues);
    if (!ok || !pct) continue;
    u.female_pct_us = *pct;
    out.push_back(std::move(u));
  }
  detail::throw_if_any(issues);
  return out;
}

inline std::vector<TrTitle> load_tr_titles(const std::filesystem::path& p) {
  return parse_tr_titles(csv::read_text(p), p.string());
}
inline std::vector<UsTitle> load_us_titles(const std::filesystem::path& p) {
  return parse_us_titles(csv::read_text(p), p.string());
}

/// Pairs Turkish and US titles. Exclusions are checked first on the Turkish
/// side and again on the admitted US title, and always win over admission.
/// Each admitted pair is justified by the first admitting rule in the order
/// exact, broader_narrower, retitle, education_level.
inline MatchResult match_occupations(const std::vector<TrTitle>& tr_list, const std::vector<UsTitle>& us_list,
                                     const MatchRules& rules) {
  if (tr_list.empty() || us_list.empty())
    throw std::invalid_argument("match_occupations: both title lists must be non-empty");

  MatchResult result;
  std::map<std::string, std::size_t> us_index;
  for (std::size_t i = 0; i < us_list.size(); ++i) us_index.emplace(normalize_title(us_list[i].title), i);

  std::vector<std::optional<detail::Exclusion>> us_excluded(us_list.size());
  for (std::size_t i = 0; i < us_list.size(); ++i) us_excluded[i] = detail::find_exclusion(rules, {us_list[i].title});

  std::vector<std::vector<std::string>> us_ids(us_list.size());
  std::vector<std::string> us_rule(us_list.size());
  std::map<std::string, std::vector<std::string>> titles_by_id;  // id -> "tr title -> us title"

  auto lookup = [&](const std::map<std::string, std::string>& map, const std::string& key) -> std::optional<std::size_t> {
    auto it = map.find(key);
    if (it == map.end()) return std::nullopt;
    auto us = us_index.find(normalize_title(it->second));
    if (us == us_index.end()) return std::nullopt;
    return us->second;
  };

  for (const auto& tr : tr_list) {
    AuditEntry entry{"tr", tr.line, tr.title_tr, "unmatched", {}, 0, {}, {}, {}, {}};
    if (auto ex = detail::find_exclusion(rules, {tr.title_tr, tr.title_en})) {
      entry.outcome = "excluded";
      entry.rule = ex->rule;
      entry.exclusion_number = ex->number;
      entry.detail = "matched term '" + ex->term + "'";
      result.audit.push_back(std::move(entry));
      continue;
    }

    std::vector<SplitPart> parts{{tr.title_tr, tr.title_en}};
    if (rules.enabled(rules.modify, "split")) {
      if (auto it = rules.split.find(normalize_title(tr.title_tr)); it != rules.split.end()) {
        parts = it->second;
        entry.modifications.push_back("split");
      }
    }

    std::vector<std::string> part_notes;
    for (auto part : parts) {
      std::string key = normalize_title(part.title_en);
      if (rules.enabled(rules.modify, "detail_strip")) {
        if (auto it = rules.detail_strip.find(key); it != rules.detail_strip.end()) {
          part.title_en = it->second;
          key = normalize_title(part.title_en);
          entry.modifications.push_back("detail_strip");
        }
      }
      if (rules.enabled(rules.modify, "punctuation_detail")) {
        if (auto it = rules.punctuation_detail.find(key); it != rules.punctuation_detail.end()) {
          part.title_en = it->second;
          key = normalize_title(part.title_en);
          entry.modifications.push_back("punctuation_detail");
        }
      }

      std::optional<std::size_t> us;
      std::string admitted_by;
      for (const auto& rule : rules.admit) {
        if (rule == "exact") {
          if (auto it = us_index.find(key); it != us_index.end()) us = it->second;
        } else if (rule == "broader_narrower") {
          us = lookup(rules.broader_narrower, key);
        } else if (rule == "retitle") {
          us = lookup(rules.retitle, key);
        } else if (rule == "education_level") {
          us = lookup(rules.education_level, key);
        }
        if (us) {
          admitted_by = rule;
          break;
        }
      }
      if (!us) {
        part_notes.push_back("no admitting rule for '" + part.title_en + "'");
        continue;
      }

      const auto& us_title = us_list[*us];
      if (const auto& ex = us_excluded[*us]) {
        // exclusion on the US side overrides the admission
        entry.outcome = "excluded";
        entry.rule = ex->rule;
        entry.exclusion_number = ex->number;
        entry.detail = "US title '" + us_title.title + "' matched term '" + ex->term + "'";
        continue;
      }

      Occupation occ;
      occ.id = text::slug(us_title.title);
      occ.title_en = us_title.title;
      occ.title_tr = part.title_tr;
      occ.isco_major = tr.isco_major;
      occ.soc_major = us_title.soc_major;
      occ.female_pct_tr = tr.female_pct_tr;
      occ.female_pct_us = us_title.female_pct_us;
      titles_by_id[occ.id].push_back("'" + part.title_tr + "' -> '" + us_title.title + "'");
      entry.occupation_ids.push_back(occ.id);
      entry.pair_rules.push_back(admitted_by);
      if (entry.outcome != "admitted") {
        entry.outcome = "admitted";
        entry.rule = admitted_by;
      } else if (entry.rule != admitted_by) {
        entry.rule += "+" + admitted_by;
      }
      us_ids[*us].push_back(occ.id);
      if (us_rule[*us].empty()) us_rule[*us] = admitted_by;
      result.corpus.occupations.push_back(std::move(occ));
    }
    if (entry.outcome == "unmatched") entry.detail = text::join(part_notes, "; ");
    result.audit.push_back(std::move(entry));
  }

  std::vector<Issue> collisions;
  for (const auto& [id, titles] : titles_by_id)
    if (titles.size() > 1)
      collisions.push_back({"match_occupations", 0, "id", "duplicate occupation id '" + id + "' from " +
                                                              text::join(titles, ", ")});
  if (!collisions.empty()) throw ValidationError(std::move(collisions));

  for (std::size_t i = 0; i < us_list.size(); ++i) {
    AuditEntry entry{"us", us_list[i].line, us_list[i].title, "unmatched", {}, 0, {}, us_ids[i], {}, {}};
    if (const auto& ex = us_excluded[i]) {
      entry.outcome = "excluded";
      entry.rule = ex->rule;
      entry.exclusion_number = ex->number;
      entry.detail = "matched term '" + ex->term + "'";
    } else if (!us_ids[i].empty()) {
      entry.outcome = "admitted";
      entry.rule = us_rule[i];
    }
    result.audit.push_back(std::move(entry));
  }
  return result;
}

}  // namespace mtbias
