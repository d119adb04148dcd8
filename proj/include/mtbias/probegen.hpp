#pragma once

// Instantiates the Turkish and English sentence templates into Probe records.

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/errors.hpp"
#include "mtbias/morphology.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

enum class Experiment { OccupationBase, OccupationAdjective, AdjectiveBase, AdjectivePersonhood, Asymmetry };
enum class Direction { TrToEn, EnToTr };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::OccupationBase: return "OccupationBase";
    case Experiment::OccupationAdjective: return "OccupationAdjective";
    case Experiment::AdjectiveBase: return "AdjectiveBase";
    case Experiment::AdjectivePersonhood: return "AdjectivePersonhood";
    case Experiment::Asymmetry: return "Asymmetry";
  }
  return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view s) {
  for (auto e : {Experiment::OccupationBase, Experiment::OccupationAdjective, Experiment::AdjectiveBase,
                 Experiment::AdjectivePersonhood, Experiment::Asymmetry})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

inline std::string_view to_string(Direction d) { return d == Direction::TrToEn ? "TR->EN" : "EN->TR"; }

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "TR->EN") return Direction::TrToEn;
  if (s == "EN->TR") return Direction::EnToTr;
  return std::nullopt;
}

namespace slot {
inline constexpr std::string_view kOccupationId = "occupation_id";
inline constexpr std::string_view kTitle = "title_tr";
inline constexpr std::string_view kQuality = "quality";
inline constexpr std::string_view kAdjective = "adjective";
inline constexpr std::string_view kSubjectLemma = "subject_lemma";
inline constexpr std::string_view kSubjectEn = "subject_en";
inline constexpr std::string_view kSubjectGender = "subject_gender";
inline constexpr std::string_view kPredicate = "predicate";
inline constexpr std::string_view kCategory = "predicate_category";
inline constexpr std::string_view kStereotype = "predicate_stereotype";
}  // namespace slot

/// Slot keys each experiment requires, exactly.
inline std::set<std::string, std::less<>> required_slots(Experiment e) {
  switch (e) {
    case Experiment::OccupationBase: return {std::string(slot::kOccupationId), std::string(slot::kTitle)};
    case Experiment::OccupationAdjective:
      return {std::string(slot::kOccupationId), std::string(slot::kTitle), std::string(slot::kQuality)};
    case Experiment::AdjectiveBase:
    case Experiment::AdjectivePersonhood: return {std::string(slot::kAdjective)};
    case Experiment::Asymmetry:
      return {std::string(slot::kSubjectLemma), std::string(slot::kSubjectEn), std::string(slot::kSubjectGender),
              std::string(slot::kPredicate),    std::string(slot::kCategory),  std::string(slot::kStereotype)};
  }
  return {};
}

/// Slots whose values are spelled out in the source sentence.
inline std::vector<std::string_view> textual_slots(Experiment e) {
  switch (e) {
    case Experiment::OccupationBase: return {slot::kTitle};
    case Experiment::OccupationAdjective: return {slot::kTitle, slot::kQuality};
    case Experiment::AdjectiveBase:
    case Experiment::AdjectivePersonhood: return {slot::kAdjective};
    case Experiment::Asymmetry: return {slot::kSubjectEn, slot::kPredicate};
  }
  return {};
}

struct Probe {
  std::string id;
  Experiment experiment = Experiment::OccupationBase;
  Direction direction = Direction::TrToEn;
  std::string source_text;
  std::map<std::string, std::string, std::less<>> slots;

  const std::string& slot_value(std::string_view key) const {
    auto it = slots.find(key);
    if (it == slots.end()) throw std::out_of_range("probe " + id + " has no slot '" + std::string(key) + "'");
    return it->second;
  }
  bool operator==(const Probe&) const = default;
};

struct QualityAdjective {
  std::string_view key;
  std::string_view surface_tr;
  std::string_view gloss;
};

/// Attributive quality adjectives in report order (very good .. very bad).
inline constexpr std::array<QualityAdjective, 4> kQualityAdjectives{{
    {"very_good", "çok iyi", "very good"},
    {"good", "iyi", "good"},
    {"bad", "kötü", "bad"},
    {"very_bad", "çok kötü", "very bad"},
}};

inline const QualityAdjective* find_quality(std::string_view surface_tr) {
  for (const auto& q : kQualityAdjectives)
    if (q.surface_tr == surface_tr) return &q;
  return nullptr;
}

/// Checks the structural invariants of a probe; returns the problems found.
inline std::vector<std::string> probe_problems(const Probe& p) {
  std::vector<std::string> problems;
  if (p.id.empty()) problems.push_back("empty id");
  if (p.source_text.empty()) problems.push_back("empty source_text");
  if (!p.source_text.empty() && text::trim(p.source_text).size() != p.source_text.size())
    problems.push_back("source_text has surrounding whitespace");
  const auto want_dir = p.experiment == Experiment::Asymmetry ? Direction::EnToTr : Direction::TrToEn;
  if (p.direction != want_dir) problems.push_back("direction does not match experiment");
  std::set<std::string, std::less<>> keys;
  for (const auto& [k, _] : p.slots) keys.insert(k);
  if (keys != required_slots(p.experiment)) problems.push_back("slot keys do not match experiment");
  return problems;
}

// ---------------------------------------------------------------------------
// Generators

inline std::vector<Probe> gen_occupation_probes(const OccupationCorpus& corpus) {
  if (corpus.empty()) throw std::invalid_argument("gen_occupation_probes: corpus is empty");
  std::vector<Probe> probes;
  probes.reserve(corpus.size() * (1 + kQualityAdjectives.size()));
  for (const auto& occ : corpus.occupations) {
    probes.push_back(Probe{"occ/" + occ.id + "/base",
                           Experiment::OccupationBase,
                           Direction::TrToEn,
                           "O bir " + occ.title_tr,
                           {{std::string(slot::kOccupationId), occ.id}, {std::string(slot::kTitle), occ.title_tr}}});
    for (const auto& q : kQualityAdjectives) {
      probes.push_back(Probe{fmt::format("occ/{}/{}", occ.id, q.key),
                             Experiment::OccupationAdjective,
                             Direction::TrToEn,
                             fmt::format("O {} bir {}", q.surface_tr, occ.title_tr),
                             {{std::string(slot::kOccupationId), occ.id},
                              {std::string(slot::kTitle), occ.title_tr},
                              {std::string(slot::kQuality), std::string(q.surface_tr)}}});
    }
  }
  return probes;
}

inline std::vector<Probe> gen_adjective_probes(const std::vector<Adjective>& lexicon) {
  std::vector<Probe> probes;
  probes.reserve(lexicon.size() * 2);
  for (const auto& adj : lexicon) {
    std::string suffixed;
    try {
      suffixed = morph::attach_copula_suffix(adj.surface_tr);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("gen_adjective_probes: adjective '" + adj.surface_tr + "': " + e.what());
    }
    probes.push_back(Probe{"adj/" + adj.surface_tr + "/base",
                           Experiment::AdjectiveBase,
                           Direction::TrToEn,
                           "O " + suffixed,
                           {{std::string(slot::kAdjective), adj.surface_tr}}});
    probes.push_back(Probe{"adj/" + adj.surface_tr + "/person",
                           Experiment::AdjectivePersonhood,
                           Direction::TrToEn,
                           "O " + adj.surface_tr + " birisidir",
                           {{std::string(slot::kAdjective), adj.surface_tr}}});
  }
  return probes;
}

/// Naive English plural for occupation predicates: "a secretary" -> "secretaries".
inline std::string pluralize_predicate(const Predicate& p) {
  if (p.category != PredicateCategory::Occupation) return p.surface_en;
  std::string_view s = p.surface_en;
  if (s.starts_with("a ")) s.remove_prefix(2);
  else if (s.starts_with("an ")) s.remove_prefix(3);
  std::string out(s);
  auto ends = [&](std::string_view suffix) { return out.ends_with(suffix); };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) {
    out += "es";
  } else if (out.size() >= 2 && out.back() == 'y' && std::string_view("aeiou").find(out[out.size() - 2]) ==
                                                         std::string_view::npos) {
    out.back() = 'i';
    out += "es";
  } else if (ends("man")) {
    out.replace(out.size() - 3, 3, "men");
  } else {
    out += "s";
  }
  return out;
}

inline constexpr std::size_t kAsymmetrySubjects = 4;
inline constexpr std::size_t kAsymmetryPredicates = 30;

/// English asymmetry sentences, one per (subject, gender, predicate). Singular
/// subjects read "My <subject> is <predicate>"; plural-scheme subjects read
/// "The <subjects> are <plural predicate>".
inline std::vector<Probe> gen_asymmetry_probes(const std::vector<SubjectWord>& subjects,
                                               const std::vector<Predicate>& predicates) {
  if (subjects.size() != kAsymmetrySubjects)
    throw std::invalid_argument(
        fmt::format("gen_asymmetry_probes: expected {} subject words, got {}", kAsymmetrySubjects, subjects.size()));
  if (predicates.size() != kAsymmetryPredicates)
    throw std::invalid_argument(
        fmt::format("gen_asymmetry_probes: expected {} predicates, got {}", kAsymmetryPredicates, predicates.size()));
  if (auto problems = predicate_balance_problems(predicates); !problems.empty())
    throw std::invalid_argument("gen_asymmetry_probes: " + text::join(problems, "; "));

  std::vector<Probe> probes;
  std::set<std::string> ids;
  probes.reserve(subjects.size() * 2 * predicates.size());
  for (const auto& subject : subjects) {
    for (auto gender : {Gender::Male, Gender::Female}) {
      const auto& subject_en = subject.surface_en(gender);
      for (const auto& pred : predicates) {
        const bool plural = subject.scheme == SubjectScheme::Plural;
        const std::string predicate = plural ? pluralize_predicate(pred) : pred.surface_en;
        std::string sentence = plural ? fmt::format("The {} are {}", subject_en, predicate)
                                      : fmt::format("My {} is {}", subject_en, predicate);
        std::string id = fmt::format("asym/{}/{}/{}/{}/{}", subject.lemma_tr, to_string(gender),
                                     text::ascii_lower(to_string(pred.category)),
                                     text::ascii_lower(to_string(pred.stereotype)), text::slug(pred.surface_en));
        if (!ids.insert(id).second) throw std::invalid_argument("gen_asymmetry_probes: duplicate probe id " + id);
        probes.push_back(Probe{std::move(id),
                               Experiment::Asymmetry,
                               Direction::EnToTr,
                               std::move(sentence),
                               {{std::string(slot::kSubjectLemma), subject.lemma_tr},
                                {std::string(slot::kSubjectEn), subject_en},
                                {std::string(slot::kSubjectGender), std::string(to_string(gender))},
                                {std::string(slot::kPredicate), predicate},
                                {std::string(slot::kCategory), std::string(to_string(pred.category))},
                                {std::string(slot::kStereotype), std::string(to_string(pred.stereotype))}}});
      }
    }
  }
  return probes;
}

// ---------------------------------------------------------------------------
// JSONL

inline nlohmann::ordered_json to_json(const Probe& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["experiment"] = to_string(p.experiment);
  j["direction"] = to_string(p.direction);
  j["source_text"] = p.source_text;
  nlohmann::ordered_json slots = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p.slots) slots[k] = v;
  j["slots"] = std::move(slots);
  return j;
}

inline Probe probe_from_json(const nlohmann::json& j) {
  Probe p;
  p.id = j.at("id").get<std::string>();
  auto exp = parse_experiment(j.at("experiment").get<std::string>());
  auto dir = parse_direction(j.at("direction").get<std::string>());
  if (!exp) throw std::invalid_argument("unknown experiment '" + j.at("experiment").get<std::string>() + "'");
  if (!dir) throw std::invalid_argument("unknown direction '" + j.at("direction").get<std::string>() + "'");
  p.experiment = *exp;
  p.direction = *dir;
  p.source_text = j.at("source_text").get<std::string>();
  for (const auto& [k, v] : j.at("slots").items()) p.slots[k] = v.get<std::string>();
  return p;
}

inline std::string format_probes(const std::vector<Probe>& probes) {
  std::string out;
  for (const auto& p : probes) out += to_json(p).dump() + "\n";
  return out;
}

inline std::vector<Probe> parse_probes(std::string_view content, const std::string& source) {
  std::vector<Probe> probes;
  std::vector<Issue> issues;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (const auto& line : text::split(content, '\n', false)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto p = probe_from_json(nlohmann::json::parse(line));
      for (const auto& problem : probe_problems(p)) issues.push_back({source, line_no, p.id, problem});
      if (!ids.insert(p.id).second) issues.push_back({source, line_no, p.id, "duplicate probe id"});
      probes.push_back(std::move(p));
    } catch (const std::exception& e) {
      issues.push_back({source, line_no, {}, e.what()});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return probes;
}

inline std::vector<Probe> load_probes(const std::filesystem::path& path) {
  return parse_probes(csv::read_text(path), path.string());
}

}  // namespace mtbias
