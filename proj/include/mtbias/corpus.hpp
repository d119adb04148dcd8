#pragma once

// Occupation corpus, adjective lexicon, asymmetry lexicon and workforce
// statistics: domain types, validation and CSV persistence.

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtbias/errors.hpp"
#include "mtbias/util/csv.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

enum class Coding { Masculine, Feminine, Neutral };
enum class Gender { Male, Female };
enum class Stereotype { Masculine, Feminine };
enum class PredicateCategory { Occupation, Description, Activity };
enum class Taxonomy { ISCO, SOC };
enum class SubjectScheme { Singular, Plural };

inline std::string_view to_string(Coding c) {
  switch (c) {
    case Coding::Masculine: return "Masculine";
    case Coding::Feminine: return "Feminine";
    case Coding::Neutral: return "Neutral";
  }
  return "?";
}
inline std::string_view to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }
inline std::string_view to_string(Stereotype s) { return s == Stereotype::Masculine ? "Masculine" : "Feminine"; }
inline std::string_view to_string(PredicateCategory c) {
  switch (c) {
    case PredicateCategory::Occupation: return "Occupation";
    case PredicateCategory::Description: return "Description";
    case PredicateCategory::Activity: return "Activity";
  }
  return "?";
}
inline std::string_view to_string(Taxonomy t) { return t == Taxonomy::ISCO ? "ISCO" : "SOC"; }

inline std::optional<Coding> parse_coding(std::string_view s) {
  if (s == "Masculine") return Coding::Masculine;
  if (s == "Feminine") return Coding::Feminine;
  if (s == "Neutral") return Coding::Neutral;
  return std::nullopt;
}
inline std::optional<Gender> parse_gender(std::string_view s) {
  if (s == "male") return Gender::Male;
  if (s == "female") return Gender::Female;
  return std::nullopt;
}
inline std::optional<Stereotype> parse_stereotype(std::string_view s) {
  if (s == "Masculine") return Stereotype::Masculine;
  if (s == "Feminine") return Stereotype::Feminine;
  return std::nullopt;
}
inline std::optional<PredicateCategory> parse_category(std::string_view s) {
  if (s == "Occupation") return PredicateCategory::Occupation;
  if (s == "Description") return PredicateCategory::Description;
  if (s == "Activity") return PredicateCategory::Activity;
  return std::nullopt;
}
inline std::optional<Taxonomy> parse_taxonomy(std::string_view s) {
  if (s == "ISCO") return Taxonomy::ISCO;
  if (s == "SOC") return Taxonomy::SOC;
  return std::nullopt;
}

inline Gender opposite(Gender g) { return g == Gender::Male ? Gender::Female : Gender::Male; }

// ---------------------------------------------------------------------------
// Taxonomy vocabularies

struct GroupName {
  std::string_view title;
  std::string_view abbreviation;
};

/// ISCO-08 major groups, in ISCO code order (1..9, then 0 for armed forces).
inline constexpr std::array<GroupName, 10> kIscoMajorGroups{{
    {"Managers", "Managers"},
    {"Professionals", "Professionals"},
    {"Technicians and Associate Professionals", "Technicians"},
    {"Clerical Support Workers", "Clerical"},
    {"Service and Sales Workers", "Service"},
    {"Skilled Agricultural, Forestry, and Fishery Workers", "Agricultural"},
    {"Craft and Related Workers", "Trades"},
    {"Plant Machine Operators and Assemblers", "Machine Operators"},
    {"Elementary Operators", "Elementary"},
    {"Armed Forces Occupations", "Armed Forces"},
}};

/// SOC 2018 major groups as grouped for the workforce comparison.
inline constexpr std::array<GroupName, 21> kSocMajorGroups{{
    {"Management", "Man."},
    {"Business and Financial Operations", "Bus."},
    {"Computer and Mathematical", "Comp."},
    {"Architecture and Engineering", "Arch."},
    {"Life and Physical Engineering", "Eng."},
    {"Community and Social Service", "Soc."},
    {"Legal", "Leg."},
    {"Education Training and Library", "Edu."},
    {"Arts, Design, Entertainment, Sports and Media", "Art."},
    {"Healthcare Practitioners and Technical", "Hea."},
    {"Health Practitioner Support Technologists and Technicians", "Hea. Sup."},
    {"Service", "Ser."},
    {"Food Preparation", "Food"},
    {"Building and Grounds Cleaning and Management", "Bui."},
    {"Personal Care and Service", "Per."},
    {"Sales and Office", "Sal."},
    {"Office Administration Support", "Off."},
    {"Farming, Fishing and Forestry", "Far."},
    {"Transportation and Material Moving", "Trans."},
    {"Construction and Extraction", "Cons."},
    {"Installation, Maintenance, and Repair", "Main."},
}};

inline std::span<const GroupName> major_groups(Taxonomy t) {
  if (t == Taxonomy::ISCO) return kIscoMajorGroups;
  return kSocMajorGroups;
}

inline bool is_major_group(Taxonomy t, std::string_view name) {
  const auto groups = major_groups(t);
  return std::any_of(groups.begin(), groups.end(), [&](const GroupName& g) { return g.title == name; });
}

inline std::string_view group_abbreviation(Taxonomy t, std::string_view name) {
  for (const auto& g : major_groups(t))
    if (g.title == name) return g.abbreviation;
  return name;
}

// ---------------------------------------------------------------------------
// Domain types

struct Occupation {
  std::string id;
  std::string title_en;
  std::string title_tr;
  std::string isco_major;
  std::string soc_major;
  double female_pct_tr = 0;
  double female_pct_us = 0;

  const std::string& group(Taxonomy t) const { return t == Taxonomy::ISCO ? isco_major : soc_major; }
  bool operator==(const Occupation&) const = default;
};

struct OccupationCorpus {
  std::vector<Occupation> occupations;

  std::size_t size() const { return occupations.size(); }
  bool empty() const { return occupations.empty(); }

  const Occupation* find(std::string_view id) const {
    for (const auto& o : occupations)
      if (o.id == id) return &o;
    return nullptr;
  }
  bool operator==(const OccupationCorpus&) const = default;
};

/// Id lookup for repeated queries against a corpus that outlives the index.
class OccupationIndex {
 public:
  explicit OccupationIndex(const OccupationCorpus& corpus) {
    for (const auto& o : corpus.occupations) by_id_.emplace(o.id, &o);
  }
  const Occupation* find(std::string_view id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : it->second;
  }

 private:
  std::map<std::string_view, const Occupation*, std::less<>> by_id_;
};

struct Adjective {
  std::string surface_tr;
  std::string gloss_en;
  double pct_male = 0;
  double pct_female = 0;
  Coding coding = Coding::Neutral;

  bool operator==(const Adjective&) const = default;
};

struct SubjectWord {
  std::string lemma_tr;
  std::string surface_en_male;
  std::string surface_en_female;
  std::string marker_male;
  std::string marker_female;
  SubjectScheme scheme = SubjectScheme::Singular;

  const std::string& surface_en(Gender g) const { return g == Gender::Male ? surface_en_male : surface_en_female; }
  const std::string& marker(Gender g) const { return g == Gender::Male ? marker_male : marker_female; }
  bool operator==(const SubjectWord&) const = default;
};

struct Predicate {
  PredicateCategory category = PredicateCategory::Occupation;
  Stereotype stereotype = Stereotype::Masculine;
  std::string surface_en;
  std::string surface_tr;  // optional; used by the mock backend for EN->TR output

  bool operator==(const Predicate&) const = default;
};

struct AsymmetryLexicon {
  std::vector<SubjectWord> subjects;
  std::vector<Predicate> predicates;
  bool operator==(const AsymmetryLexicon&) const = default;
};

struct WorkforceTable {
  std::map<std::pair<Taxonomy, std::string>, double> groups;
  double national_tr = 0;
  double national_us = 0;

  std::optional<double> find(Taxonomy t, const std::string& group) const {
    auto it = groups.find({t, group});
    if (it == groups.end()) return std::nullopt;
    return it->second;
  }
  bool operator==(const WorkforceTable&) const = default;
};

// ---------------------------------------------------------------------------
// Adjective coding

/// Labels an adjective by the share of stereotype-study uses describing each
/// gender. Strictly more than 60% is required; exactly 60 stays Neutral.
inline Coding code_adjective(double pct_male, double pct_female) {
  auto in_range = [](double p) { return p >= 0.0 && p <= 100.0; };
  if (!in_range(pct_male) || !in_range(pct_female))
    throw std::invalid_argument(fmt::format("adjective percentages must be in [0,100], got ({}, {})", pct_male,
                                            pct_female));
  if (pct_male > 60.0) return Coding::Masculine;
  if (pct_female > 60.0) return Coding::Feminine;
  return Coding::Neutral;
}

// ---------------------------------------------------------------------------
// CSV loading

namespace detail {

inline std::optional<double> parse_number(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::string format_number(double d) { return fmt::format("{}", d); }

/// Maps required (and optional) column names onto indices; reports missing or
/// unexpected columns.
struct Columns {
  std::map<std::string, std::size_t, std::less<>> index;

  static Columns resolve(const csv::Table& table, std::initializer_list<std::string_view> required,
                         std::initializer_list<std::string_view> optional, const std::string& source,
                         std::vector<Issue>& issues) {
    Columns cols;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      const std::string name(text::trim(table.header[i]));
      const bool known = std::find(required.begin(), required.end(), name) != required.end() ||
                         std::find(optional.begin(), optional.end(), name) != optional.end();
      if (!known) issues.push_back({source, 1, name, "unexpected column"});
      if (!cols.index.emplace(name, i).second) issues.push_back({source, 1, name, "duplicate column"});
    }
    for (auto name : required)
      if (!cols.index.count(name)) issues.push_back({source, 1, std::string(name), "missing required column"});
    return cols;
  }

  bool has(std::string_view name) const { return index.find(name) != index.end(); }

  std::string get(const csv::Row& row, std::string_view name) const {
    auto it = index.find(name);
    if (it == index.end() || it->second >= row.fields.size()) return {};
    return std::string(text::trim(row.fields[it->second]));
  }
};

/// Reads a numeric percentage field, recording an issue if it is missing or
/// outside [0,100].
inline std::optional<double> percentage_field(const Columns& cols, const csv::Row& row, std::string_view name,
                                              const std::string& source, std::vector<Issue>& issues) {
  const auto raw = cols.get(row, name);
  auto value = parse_number(raw);
  if (!value) {
    issues.push_back({source, row.line, std::string(name), "not a number: '" + raw + "'"});
    return std::nullopt;
  }
  if (*value < 0.0 || *value > 100.0) {
    issues.push_back({source, row.line, std::string(name),
                      "percentage out of range [0,100]: " + format_number(*value)});
    return std::nullopt;
  }
  return value;
}

inline bool require_non_empty(const std::string& value, std::string_view name, const csv::Row& row,
                              const std::string& source, std::vector<Issue>& issues) {
  if (!value.empty()) return true;
  issues.push_back({source, row.line, std::string(name), "must be non-empty"});
  return false;
}

inline bool check_arity(const csv::Table& table, const csv::Row& row, const std::string& source,
                        std::vector<Issue>& issues) {
  if (row.fields.size() == table.header.size()) return true;
  issues.push_back({source, row.line, {},
                    fmt::format("expected {} fields, found {}", table.header.size(), row.fields.size())});
  return false;
}

inline void throw_if_any(std::vector<Issue>& issues) {
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

inline OccupationCorpus parse_occupation_corpus(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  OccupationCorpus corpus;
  if (table.header.empty()) return corpus;

  const auto cols = detail::Columns::resolve(
      table, {"id", "title_en", "title_tr", "isco_major", "soc_major", "female_pct_tr", "female_pct_us"}, {}, source,
      issues);
  detail::throw_if_any(issues);

  std::map<std::string, std::size_t> seen;
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    Occupation o;
    o.id = cols.get(row, "id");
    o.title_en = cols.get(row, "title_en");
    o.title_tr = cols.get(row, "title_tr");
    o.isco_major = cols.get(row, "isco_major");
    o.soc_major = cols.get(row, "soc_major");
    bool ok = detail::require_non_empty(o.id, "id", row, source, issues);
    ok &= detail::require_non_empty(o.title_en, "title_en", row, source, issues);
    ok &= detail::require_non_empty(o.title_tr, "title_tr", row, source, issues);
    if (!is_major_group(Taxonomy::ISCO, o.isco_major)) {
      issues.push_back({source, row.line, "isco_major", "unknown ISCO-08 major group '" + o.isco_major + "'"});
      ok = false;
    }
    if (!is_major_group(Taxonomy::SOC, o.soc_major)) {
      issues.push_back({source, row.line, "soc_major", "unknown SOC major group '" + o.soc_major + "'"});
      ok = false;
    }
    auto tr = detail::percentage_field(cols, row, "female_pct_tr", source, issues);
    auto us = detail::percentage_field(cols, row, "female_pct_us", source, issues);
    if (!o.id.empty()) {
      auto [it, inserted] = seen.emplace(o.id, row.line);
      if (!inserted) {
        issues.push_back({source, row.line, "id",
                          fmt::format("duplicate id '{}' (first seen on line {})", o.id, it->second)});
        ok = false;
      }
    }
    if (!ok || !tr || !us) continue;
    o.female_pct_tr = *tr;
    o.female_pct_us = *us;
    corpus.occupations.push_back(std::move(o));
  }
  detail::throw_if_any(issues);
  return corpus;
}

inline OccupationCorpus load_occupation_corpus(const std::filesystem::path& path) {
  return parse_occupation_corpus(csv::read_text(path), path.string());
}

inline std::string format_occupation_corpus(const OccupationCorpus& corpus) {
  std::string out =
      csv::format_row({"id", "title_en", "title_tr", "isco_major", "soc_major", "female_pct_tr", "female_pct_us"});
  for (const auto& o : corpus.occupations)
    out += csv::format_row({o.id, o.title_en, o.title_tr, o.isco_major, o.soc_major,
                            detail::format_number(o.female_pct_tr), detail::format_number(o.female_pct_us)});
  return out;
}

inline void save_occupation_corpus(const OccupationCorpus& corpus, const std::filesystem::path& path) {
  detail::write_file(path, format_occupation_corpus(corpus));
}

inline std::vector<Adjective> parse_adjective_lexicon(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  std::vector<Adjective> lexicon;
  if (table.header.empty()) return lexicon;

  const auto cols =
      detail::Columns::resolve(table, {"surface_tr", "gloss_en", "pct_male", "pct_female"}, {}, source, issues);
  detail::throw_if_any(issues);

  std::map<std::string, std::size_t> seen;
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    Adjective a;
    a.surface_tr = cols.get(row, "surface_tr");
    a.gloss_en = cols.get(row, "gloss_en");
    bool ok = detail::require_non_empty(a.surface_tr, "surface_tr", row, source, issues);
    ok &= detail::require_non_empty(a.gloss_en, "gloss_en", row, source, issues);
    auto male = detail::percentage_field(cols, row, "pct_male", source, issues);
    auto female = detail::percentage_field(cols, row, "pct_female", source, issues);
    if (male && female && *male + *female > 100.0) {
      issues.push_back({source, row.line, "pct_male+pct_female",
                        fmt::format("shares sum to {} > 100", *male + *female)});
      ok = false;
    }
    if (!a.surface_tr.empty()) {
      auto [it, inserted] = seen.emplace(a.surface_tr, row.line);
      if (!inserted) {
        issues.push_back({source, row.line, "surface_tr",
                          fmt::format("duplicate adjective '{}' (first seen on line {})", a.surface_tr, it->second)});
        ok = false;
      }
    }
    if (!ok || !male || !female) continue;
    a.pct_male = *male;
    a.pct_female = *female;
    a.coding = code_adjective(a.pct_male, a.pct_female);
    lexicon.push_back(std::move(a));
  }
  detail::throw_if_any(issues);
  return lexicon;
}

inline std::vector<Adjective> load_adjective_lexicon(const std::filesystem::path& path) {
  return parse_adjective_lexicon(csv::read_text(path), path.string());
}

inline std::string format_adjective_lexicon(const std::vector<Adjective>& lexicon) {
  std::string out = csv::format_row({"surface_tr", "gloss_en", "pct_male", "pct_female"});
  for (const auto& a : lexicon)
    out += csv::format_row(
        {a.surface_tr, a.gloss_en, detail::format_number(a.pct_male), detail::format_number(a.pct_female)});
  return out;
}

/// Each predicate category must hold exactly five masculine and five feminine
/// entries.
inline std::vector<std::string> predicate_balance_problems(const std::vector<Predicate>& predicates) {
  std::vector<std::string> problems;
  for (auto category : {PredicateCategory::Occupation, PredicateCategory::Description, PredicateCategory::Activity}) {
    for (auto stereotype : {Stereotype::Masculine, Stereotype::Feminine}) {
      const auto n = std::count_if(predicates.begin(), predicates.end(), [&](const Predicate& p) {
        return p.category == category && p.stereotype == stereotype;
      });
      if (n != 5)
        problems.push_back(fmt::format("category {} has {} {} predicates, expected 5", to_string(category), n,
                                       to_string(stereotype)));
    }
  }
  return problems;
}

inline std::vector<SubjectWord> parse_subject_words(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  std::vector<SubjectWord> subjects;
  if (table.header.empty()) return subjects;

  const auto cols = detail::Columns::resolve(
      table, {"lemma_tr", "surface_en_male", "surface_en_female", "marker_male", "marker_female"}, {"scheme"}, source,
      issues);
  detail::throw_if_any(issues);

  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    SubjectWord s;
    s.lemma_tr = cols.get(row, "lemma_tr");
    s.surface_en_male = cols.get(row, "surface_en_male");
    s.surface_en_female = cols.get(row, "surface_en_female");
    s.marker_male = cols.get(row, "marker_male");
    s.marker_female = cols.get(row, "marker_female");
    bool ok = true;
    for (auto [value, name] : {std::pair{&s.lemma_tr, "lemma_tr"}, {&s.surface_en_male, "surface_en_male"},
                               {&s.surface_en_female, "surface_en_female"}, {&s.marker_male, "marker_male"},
                               {&s.marker_female, "marker_female"}})
      ok &= detail::require_non_empty(*value, name, row, source, issues);
    if (ok && text::fold_turkish(s.marker_male) == text::fold_turkish(s.marker_female)) {
      issues.push_back({source, row.line, "marker_female", "marker_male and marker_female must differ"});
      ok = false;
    }
    const auto scheme = cols.get(row, "scheme");
    if (scheme == "plural") {
      s.scheme = SubjectScheme::Plural;
    } else if (!scheme.empty() && scheme != "singular") {
      issues.push_back({source, row.line, "scheme", "expected 'singular' or 'plural', got '" + scheme + "'"});
      ok = false;
    }
    if (!s.lemma_tr.empty() && !seen.insert(s.lemma_tr).second) {
      issues.push_back({source, row.line, "lemma_tr", "duplicate subject lemma '" + s.lemma_tr + "'"});
      ok = false;
    }
    if (ok) subjects.push_back(std::move(s));
  }
  detail::throw_if_any(issues);
  return subjects;
}

inline std::vector<Predicate> parse_predicates(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  std::vector<Predicate> predicates;
  if (table.header.empty()) return predicates;

  const auto cols =
      detail::Columns::resolve(table, {"category", "stereotype", "surface_en"}, {"surface_tr"}, source, issues);
  detail::throw_if_any(issues);

  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    Predicate p;
    const auto category = parse_category(cols.get(row, "category"));
    const auto stereotype = parse_stereotype(cols.get(row, "stereotype"));
    p.surface_en = cols.get(row, "surface_en");
    p.surface_tr = cols.get(row, "surface_tr");
    bool ok = detail::require_non_empty(p.surface_en, "surface_en", row, source, issues);
    if (!category) {
      issues.push_back({source, row.line, "category", "expected Occupation, Description or Activity"});
      ok = false;
    }
    if (!stereotype) {
      issues.push_back({source, row.line, "stereotype", "expected Masculine or Feminine"});
      ok = false;
    }
    if (!ok) continue;
    p.category = *category;
    p.stereotype = *stereotype;
    predicates.push_back(std::move(p));
  }
  if (issues.empty() && !predicates.empty())
    for (auto& problem : predicate_balance_problems(predicates)) issues.push_back({source, 0, {}, problem});
  detail::throw_if_any(issues);
  return predicates;
}

inline AsymmetryLexicon load_asymmetry_lexicon(const std::filesystem::path& subjects_path,
                                               const std::filesystem::path& predicates_path) {
  std::vector<Issue> issues;
  AsymmetryLexicon lex;
  try {
    lex.subjects = parse_subject_words(csv::read_text(subjects_path), subjects_path.string());
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  try {
    lex.predicates = parse_predicates(csv::read_text(predicates_path), predicates_path.string());
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  detail::throw_if_any(issues);
  return lex;
}

inline std::string format_subject_words(const std::vector<SubjectWord>& subjects) {
  std::string out =
      csv::format_row({"lemma_tr", "surface_en_male", "surface_en_female", "marker_male", "marker_female", "scheme"});
  for (const auto& s : subjects)
    out += csv::format_row({s.lemma_tr, s.surface_en_male, s.surface_en_female, s.marker_male, s.marker_female,
                            s.scheme == SubjectScheme::Plural ? "plural" : "singular"});
  return out;
}

inline std::string format_predicates(const std::vector<Predicate>& predicates) {
  std::string out = csv::format_row({"category", "stereotype", "surface_en", "surface_tr"});
  for (const auto& p : predicates)
    out += csv::format_row(
        {std::string(to_string(p.category)), std::string(to_string(p.stereotype)), p.surface_en, p.surface_tr});
  return out;
}

inline constexpr std::string_view kNationalTaxonomy = "NATIONAL";
inline constexpr std::string_view kNationalTurkey = "Turkey";
inline constexpr std::string_view kNationalUS = "US";

inline WorkforceTable parse_workforce_stats(std::string_view content, const std::string& source) {
  std::vector<Issue> issues;
  const auto table = csv::parse(content, source);
  WorkforceTable wf;
  if (table.header.empty()) return wf;

  const auto cols = detail::Columns::resolve(table, {"taxonomy", "group", "female_pct"}, {}, source, issues);
  detail::throw_if_any(issues);

  bool have_tr = false;
  bool have_us = false;
  for (const auto& row : table.rows) {
    if (!detail::check_arity(table, row, source, issues)) continue;
    const auto taxonomy = cols.get(row, "taxonomy");
    const auto group = cols.get(row, "group");
    auto pct = detail::percentage_field(cols, row, "female_pct", source, issues);
    if (!pct) continue;
    if (taxonomy == kNationalTaxonomy) {
      bool& seen = group == kNationalTurkey ? have_tr : have_us;
      double& slot = group == kNationalTurkey ? wf.national_tr : wf.national_us;
      if (group != kNationalTurkey && group != kNationalUS) {
        issues.push_back({source, row.line, "group", "national rows must be 'Turkey' or 'US'"});
        continue;
      }
      if (seen) {
        issues.push_back({source, row.line, "group", "duplicate national total for " + group});
        continue;
      }
      seen = true;
      slot = *pct;
      continue;
    }
    const auto tax = parse_taxonomy(taxonomy);
    if (!tax) {
      issues.push_back({source, row.line, "taxonomy", "expected ISCO, SOC or NATIONAL"});
      continue;
    }
    if (!is_major_group(*tax, group)) {
      issues.push_back({source, row.line, "group", fmt::format("unknown {} major group '{}'", taxonomy, group)});
      continue;
    }
    if (!wf.groups.emplace(std::pair{*tax, group}, *pct).second)
      issues.push_back({source, row.line, "group", "duplicate group row '" + group + "'"});
  }
  if (!table.rows.empty()) {
    if (!have_tr) issues.push_back({source, 0, "NATIONAL", "missing national total for Turkey"});
    if (!have_us) issues.push_back({source, 0, "NATIONAL", "missing national total for US"});
  }
  detail::throw_if_any(issues);
  return wf;
}

inline WorkforceTable load_workforce_stats(const std::filesystem::path& path) {
  return parse_workforce_stats(csv::read_text(path), path.string());
}

inline std::string format_workforce_stats(const WorkforceTable& wf) {
  std::string out = csv::format_row({"taxonomy", "group", "female_pct"});
  out += csv::format_row({std::string(kNationalTaxonomy), std::string(kNationalTurkey),
                          detail::format_number(wf.national_tr)});
  out += csv::format_row({std::string(kNationalTaxonomy), std::string(kNationalUS),
                          detail::format_number(wf.national_us)});
  for (const auto& [key, pct] : wf.groups)
    out += csv::format_row({std::string(to_string(key.first)), key.second, detail::format_number(pct)});
  return out;
}

}  // namespace mtbias
