#pragma once

// Aggregate measures over detector output. Inputs are small observation
// structs so the measures stay independent of file formats.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/detect.hpp"
#include "mtbias/probegen.hpp"

namespace mtbias::stats {

/// A ratio that keeps its operands. An empty denominator has no value.
struct Proportion {
  long long num = 0;
  long long den = 0;

  std::optional<double> value() const {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::optional<double> percent() const {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  }
  Proportion& operator+=(const Proportion& o) {
    num += o.num;
    den += o.den;
    return *this;
  }
  bool operator==(const Proportion&) const = default;
};

enum class Denominator { GenderedOnly, AllProbes };

inline std::string_view to_string(Denominator d) { return d == Denominator::GenderedOnly ? "gendered" : "all"; }

inline std::optional<Denominator> parse_denominator(std::string_view s) {
  if (s == "gendered") return Denominator::GenderedOnly;
  if (s == "all") return Denominator::AllProbes;
  return std::nullopt;
}

/// One pronoun decision for an aligned item (occupation id or adjective) on one backend.
struct PronounObservation {
  std::string item;
  std::string backend;
  PronounClass cls = PronounClass::None;
};

inline bool is_gendered(PronounClass c) { return c == PronounClass::Male || c == PronounClass::Female; }

/// Female share; GenderedOnly counts only he/she outputs in the denominator.
inline Proportion female_share(const std::vector<PronounClass>& classes, Denominator policy) {
  if (classes.empty()) throw std::invalid_argument("female_share: empty detection set");
  Proportion p;
  for (auto c : classes) {
    if (c == PronounClass::Female) ++p.num;
    if (policy == Denominator::AllProbes || is_gendered(c)) ++p.den;
  }
  return p;
}

inline Proportion female_share(const std::vector<PronounObservation>& obs, Denominator policy) {
  std::vector<PronounClass> classes;
  classes.reserve(obs.size());
  for (const auto& o : obs) classes.push_back(o.cls);
  return female_share(classes, policy);
}

// ---------------------------------------------------------------------------
// Pronoun transitions

struct Shift {
  Proportion female_to_male;  // among base-Female pairs
  Proportion male_to_female;  // among base-Male pairs
  std::vector<std::string> unmatched;  // "item@backend" keys present on one side only

  bool operator==(const Shift&) const = default;
};

namespace detail {

using AlignKey = std::pair<std::string, std::string>;

inline std::map<AlignKey, PronounClass> index_by_item(const std::vector<PronounObservation>& obs,
                                                      std::string_view what) {
  std::map<AlignKey, PronounClass> out;
  for (const auto& o : obs)
    if (!out.emplace(AlignKey{o.item, o.backend}, o.cls).second)
      throw std::invalid_argument(std::string(what) + ": duplicate observation for " + o.item + "@" + o.backend);
  return out;
}

}  // namespace detail

/// Pairs base and modified observations on (item, backend). Pairs whose base
/// or modified pronoun is not he/she count toward neither direction.
inline Shift pronoun_shift(const std::vector<PronounObservation>& base, const std::vector<PronounObservation>& changed) {
  const auto b = detail::index_by_item(base, "base");
  const auto c = detail::index_by_item(changed, "modified");
  Shift s;
  for (const auto& [key, base_cls] : b) {
    auto it = c.find(key);
    if (it == c.end()) {
      s.unmatched.push_back(key.first + "@" + key.second);
      continue;
    }
    if (base_cls == PronounClass::Female) {
      ++s.female_to_male.den;
      if (it->second == PronounClass::Male) ++s.female_to_male.num;
    } else if (base_cls == PronounClass::Male) {
      ++s.male_to_female.den;
      if (it->second == PronounClass::Female) ++s.male_to_female.num;
    }
  }
  for (const auto& [key, _] : c)
    if (!b.count(key)) s.unmatched.push_back(key.first + "@" + key.second);
  std::sort(s.unmatched.begin(), s.unmatched.end());
  return s;
}

struct TransitionRow {
  std::string quality;  // key from kQualityAdjectives
  Proportion she_to_he;
  Proportion he_to_she;
  bool operator==(const TransitionRow&) const = default;
};

struct TransitionTable {
  std::vector<TransitionRow> rows;
  std::vector<std::string> unmatched;
  bool operator==(const TransitionTable&) const = default;
};

/// Rows follow the fixed quality order; unknown quality keys are rejected.
inline TransitionTable transition_table(const std::vector<PronounObservation>& base,
                                        const std::map<std::string, std::vector<PronounObservation>>& qualified) {
  for (const auto& [key, _] : qualified) {
    bool known = std::any_of(kQualityAdjectives.begin(), kQualityAdjectives.end(),
                             [&](const auto& q) { return q.key == key; });
    if (!known) throw std::invalid_argument("transition_table: unknown quality adjective " + key);
  }
  TransitionTable table;
  for (const auto& q : kQualityAdjectives) {
    auto it = qualified.find(std::string(q.key));
    if (it == qualified.end()) continue;
    auto s = pronoun_shift(base, it->second);
    table.rows.push_back({std::string(q.key), s.female_to_male, s.male_to_female});
    for (auto& u : s.unmatched) table.unmatched.push_back(u + " (" + std::string(q.key) + ")");
  }
  return table;
}

inline Shift personhood_shift(const std::vector<PronounObservation>& base,
                              const std::vector<PronounObservation>& personhood) {
  return pronoun_shift(base, personhood);
}

// ---------------------------------------------------------------------------
// Adjective coding vs assigned pronoun

struct CodingCrosstab {
  // counts[coding][0] = Female-assigned, counts[coding][1] = Male-assigned;
  // coding index follows Coding {Masculine, Feminine, Neutral}.
  std::array<std::array<long long, 2>, 3> counts{};
  long long unassigned = 0;
  Proportion female_with_feminine;  // feminine-coded among Female-assigned
  Proportion male_with_masculine;   // masculine-coded among Male-assigned

  bool operator==(const CodingCrosstab&) const = default;
};

inline CodingCrosstab coding_crosstab(const std::vector<PronounObservation>& adjective_obs,
                                      const std::vector<Adjective>& lexicon) {
  std::map<std::string, Coding, std::less<>> coding;
  for (const auto& a : lexicon) coding.emplace(a.surface_tr, a.coding);
  CodingCrosstab x;
  for (const auto& o : adjective_obs) {
    auto it = coding.find(o.item);
    if (it == coding.end()) throw std::invalid_argument("coding_crosstab: adjective not in lexicon: " + o.item);
    if (!is_gendered(o.cls)) {
      ++x.unassigned;
      continue;
    }
    const int col = o.cls == PronounClass::Female ? 0 : 1;
    ++x.counts[static_cast<std::size_t>(it->second)][col];
  }
  const auto fem = static_cast<std::size_t>(Coding::Feminine);
  const auto masc = static_cast<std::size_t>(Coding::Masculine);
  x.female_with_feminine.num = x.counts[fem][0];
  x.male_with_masculine.num = x.counts[masc][1];
  for (const auto& row : x.counts) {
    x.female_with_feminine.den += row[0];
    x.male_with_masculine.den += row[1];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Asymmetrical gender marking

struct MarkingObservation {
  std::string backend;
  Gender subject_gender = Gender::Male;
  Stereotype stereotype = Stereotype::Masculine;
  MarkingClass cls = MarkingClass::Neutral;
};

/// Shares over every asymmetry detection in the cell (SubjectNotFound counts
/// in the denominator). Marked = any overt marker, matching or not.
struct MarkingCell {
  Proportion neutral;
  Proportion marked;
  Proportion opposite;
  long long subject_not_found = 0;
  bool operator==(const MarkingCell&) const = default;
};

struct MarkingShares {
  std::map<Gender, MarkingCell> by_gender;
  std::map<std::pair<Gender, Stereotype>, MarkingCell> by_gender_stereotype;
  bool operator==(const MarkingShares&) const = default;
};

struct AsymmetryShares {
  std::vector<std::string> backends;
  std::map<std::string, MarkingShares> per_backend;
  MarkingShares pooled;  // summed over backends
  bool operator==(const AsymmetryShares&) const = default;
};

namespace detail {

inline void tally(MarkingCell& cell, MarkingClass c) {
  ++cell.neutral.den;
  ++cell.marked.den;
  ++cell.opposite.den;
  switch (c) {
    case MarkingClass::Neutral: ++cell.neutral.num; break;
    case MarkingClass::MarkedMatching: ++cell.marked.num; break;
    case MarkingClass::MarkedOpposite:
      ++cell.marked.num;
      ++cell.opposite.num;
      break;
    case MarkingClass::SubjectNotFound: ++cell.subject_not_found; break;
  }
}

inline void seed_cells(MarkingShares& s) {
  for (auto g : {Gender::Male, Gender::Female}) {
    s.by_gender[g];
    for (auto st : {Stereotype::Masculine, Stereotype::Feminine}) s.by_gender_stereotype[{g, st}];
  }
}

}  // namespace detail

inline AsymmetryShares asymmetry_shares(const std::vector<MarkingObservation>& obs) {
  AsymmetryShares out;
  detail::seed_cells(out.pooled);
  std::set<std::string> backends;
  for (const auto& o : obs) {
    if (o.backend.empty()) throw std::invalid_argument("asymmetry_shares: observation without backend");
    backends.insert(o.backend);
    auto& per = out.per_backend[o.backend];
    if (per.by_gender.empty()) detail::seed_cells(per);
    for (auto* shares : {&per, &out.pooled}) {
      detail::tally(shares->by_gender[o.subject_gender], o.cls);
      detail::tally(shares->by_gender_stereotype[{o.subject_gender, o.stereotype}], o.cls);
    }
  }
  out.backends.assign(backends.begin(), backends.end());
  return out;
}

// ---------------------------------------------------------------------------
// Female share per taxonomy major group

struct GroupShareRow {
  Taxonomy taxonomy = Taxonomy::ISCO;
  std::string group;
  std::size_t occupations = 0;
  std::map<std::string, Proportion> per_backend;
  Proportion pooled;
  std::optional<double> workforce_female_pct;
  bool operator==(const GroupShareRow&) const = default;
};

struct GroupShares {
  Taxonomy taxonomy = Taxonomy::ISCO;
  std::vector<GroupShareRow> rows;
  std::map<std::string, Proportion> overall_per_backend;
  Proportion overall_pooled;
  double national_workforce_pct = 0;  // Turkey for ISCO, US for SOC
  bool operator==(const GroupShares&) const = default;
};

/// Rows follow the taxonomy's canonical group order; groups with no
/// occupation in the corpus are omitted.
inline GroupShares group_shares(const std::vector<PronounObservation>& occupation_obs, const OccupationCorpus& corpus,
                                const WorkforceTable& workforce, Taxonomy taxonomy, Denominator policy) {
  std::map<std::string, std::size_t> occupations_per_group;
  for (const auto& o : corpus.occupations) ++occupations_per_group[o.group(taxonomy)];

  std::set<std::string> backends;
  std::map<std::string, std::map<std::string, Proportion>> cells;  // group -> backend -> share
  GroupShares out;
  out.taxonomy = taxonomy;
  out.national_workforce_pct = taxonomy == Taxonomy::ISCO ? workforce.national_tr : workforce.national_us;
  const OccupationIndex index(corpus);
  for (const auto& obs : occupation_obs) {
    const Occupation* occ = index.find(obs.item);
    if (!occ) throw std::invalid_argument("group_shares: unknown occupation id " + obs.item);
    backends.insert(obs.backend);
    auto& cell = cells[occ->group(taxonomy)][obs.backend];
    auto& overall = out.overall_per_backend[obs.backend];
    const bool counted = policy == Denominator::AllProbes || is_gendered(obs.cls);
    const long long female = obs.cls == PronounClass::Female ? 1 : 0;
    if (counted) {
      cell.den += 1;
      overall.den += 1;
      out.overall_pooled.den += 1;
    }
    cell.num += female;
    overall.num += female;
    out.overall_pooled.num += female;
  }

  for (const auto& g : major_groups(taxonomy)) {
    const std::string name(g.title);
    auto n = occupations_per_group.find(name);
    if (n == occupations_per_group.end()) continue;
    GroupShareRow row;
    row.taxonomy = taxonomy;
    row.group = name;
    row.occupations = n->second;
    for (const auto& b : backends) {
      Proportion p;
      if (auto c = cells.find(name); c != cells.end())
        if (auto bp = c->second.find(b); bp != c->second.end()) p = bp->second;
      row.per_backend[b] = p;
      row.pooled += p;
    }
    row.workforce_female_pct = workforce.find(taxonomy, name);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mtbias::stats
