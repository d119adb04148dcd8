#pragma once

// Synthetic corpora, planted translation sets and stub backends.

#include <fmt/format.h>

#include <atomic>
#include <map>
#include <string>
#include <vector>

#include "mtbias/analysis.hpp"
#include "mtbias/corpus.hpp"
#include "mtbias/detections.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/translate.hpp"
#include "support.hpp"

namespace mtbias::testing {

/// n occupations cycling through every ISCO and SOC major group.
inline OccupationCorpus synthetic_corpus(std::size_t n) {
  OccupationCorpus c;
  c.occupations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.occupations.push_back({fmt::format("occ-{:05}", i), fmt::format("Worker {}", i), fmt::format("İşçi {}", i),
                             std::string(kIscoMajorGroups[i % kIscoMajorGroups.size()].title),
                             std::string(kSocMajorGroups[i % kSocMajorGroups.size()].title),
                             static_cast<double>(i % 101), static_cast<double>((i * 7) % 101)});
  }
  return c;
}

inline WorkforceTable synthetic_workforce() {
  WorkforceTable wf;
  wf.national_tr = 31.78;
  wf.national_us = 47;
  for (std::size_t i = 0; i < kIscoMajorGroups.size(); ++i)
    wf.groups[{Taxonomy::ISCO, std::string(kIscoMajorGroups[i].title)}] = 10.0 + 5.0 * static_cast<double>(i);
  for (std::size_t i = 0; i < kSocMajorGroups.size(); ++i)
    wf.groups[{Taxonomy::SOC, std::string(kSocMajorGroups[i].title)}] = 20.0 + 2.5 * static_cast<double>(i);
  return wf;
}

inline std::vector<Adjective> sample_adjectives() { return load_adjective_lexicon(sample_data("adjectives.csv")); }

inline AsymmetryLexicon sample_asymmetry() {
  return load_asymmetry_lexicon(sample_data("asymmetry_subjects.csv"), sample_data("asymmetry_predicates.csv"));
}

inline TranslationRecord fixture_record(const Probe& p, const std::string& backend, std::string target) {
  TranslationRecord r;
  r.probe_id = p.id;
  r.backend_id = backend;
  r.direction = p.direction;
  r.source_text = p.source_text;
  r.target_text = std::move(target);
  r.origin = Origin::Mock;
  return r;
}

/// A translation set together with everything analyze() needs.
struct PlantedSet {
  OccupationCorpus corpus;
  WorkforceTable workforce = synthetic_workforce();
  std::vector<Adjective> adjectives;
  AsymmetryLexicon asymmetry;
  std::vector<Probe> probes;
  std::vector<TranslationRecord> records;

  AnalysisReport analyze_set() const {
    const auto detections = detect_records(records, probes, asymmetry.subjects);
    AnalysisInputs in{&probes, &records, &detections, &corpus, &adjectives, &workforce};
    return analyze(in, RunMetadata{"fixture", {}, {}, std::nullopt, stats::Denominator::GenderedOnly});
  }
};

struct PlantedFlips {
  long long female_to_male;
  long long male_to_female;
};

/// Pronoun-change rates per quality adjective, as counts out of 10000.
inline const std::map<std::string, PlantedFlips>& transition_plant() {
  static const std::map<std::string, PlantedFlips> plant{
      {"very_good", {1272, 44}}, {"good", {1503, 39}}, {"bad", {3353, 5}}, {"very_bad", {3815, 10}}};
  return plant;
}

/// 10000 occupations translated female and 10000 male in the base template;
/// the first k of each flip under every quality adjective.
inline PlantedSet planted_transitions() {
  constexpr std::size_t per_gender = 10000;
  PlantedSet s;
  s.corpus = synthetic_corpus(2 * per_gender);
  s.probes = gen_occupation_probes(s.corpus);
  s.records.reserve(s.probes.size());
  for (const auto& p : s.probes) {
    const auto index = static_cast<std::size_t>(std::stoul(p.slot_value(slot::kOccupationId).substr(4)));
    const bool base_female = index < per_gender;
    const auto noun = fmt::format("worker {}", index);
    if (p.experiment == Experiment::OccupationBase) {
      s.records.push_back(fixture_record(p, "fixture", fmt::format("{} is a {}", base_female ? "She" : "He", noun)));
      continue;
    }
    const auto* q = find_quality(p.slot_value(slot::kQuality));
    const auto& flips = transition_plant().at(std::string(q->key));
    const bool flip = base_female ? static_cast<long long>(index) < flips.female_to_male
                                  : static_cast<long long>(index - per_gender) < flips.male_to_female;
    const bool female = base_female != flip;
    s.records.push_back(
        fixture_record(p, "fixture", fmt::format("{} is a {} {}", female ? "She" : "He", q->gloss, noun)));
  }
  return s;
}

inline constexpr long long kPersonhoodFemaleToMale = 7407;  // of 10000
inline constexpr long long kPersonhoodMaleToFemale = 276;   // of 10000

/// 5000 adjectives over 4 backends. Per backend the first 2500 adjectives are
/// translated female in the base template; flips are planted across the pooled
/// (backend, adjective) pairs.
inline PlantedSet planted_personhood() {
  constexpr std::size_t n_adjectives = 5000;
  constexpr std::size_t female_per_backend = 2500;
  const std::vector<std::string> backends{"b1", "b2", "b3", "b4"};
  PlantedSet s;
  for (std::size_t i = 0; i < n_adjectives; ++i)
    s.adjectives.push_back({fmt::format("sıfat{}", i), fmt::format("quality {}", i), 50, 50, Coding::Neutral});
  s.probes = gen_adjective_probes(s.adjectives);
  for (std::size_t b = 0; b < backends.size(); ++b) {
    for (const auto& p : s.probes) {
      const auto index = static_cast<std::size_t>(std::stoul(p.slot_value(slot::kAdjective).substr(std::string("sıfat").size())));
      const bool base_female = index < female_per_backend;
      const auto gloss = fmt::format("quality {}", index);
      if (p.experiment == Experiment::AdjectiveBase) {
        s.records.push_back(fixture_record(p, backends[b], fmt::format("{} is {}", base_female ? "She" : "He", gloss)));
        continue;
      }
      const long long pooled = static_cast<long long>(b * female_per_backend +
                                                      (base_female ? index : index - female_per_backend));
      const bool flip = base_female ? pooled < kPersonhoodFemaleToMale : pooled < kPersonhoodMaleToFemale;
      const bool female = base_female != flip;
      s.records.push_back(
          fixture_record(p, backends[b], fmt::format("{} is someone who is {}", female ? "She" : "He", gloss)));
    }
  }
  return s;
}

inline constexpr std::size_t kAsymmetryBackends = 50;      // 50 x 60 = 3000 probes per cell
inline constexpr long long kMaleMasculineNeutral = 1562;   // 52.07%
inline constexpr long long kMaleFeminineMarked = 1699;     // 56.63%

inline std::string possessive_form(const std::string& lemma) {
  static const std::map<std::string, std::string> forms{
      {"kardeş", "kardeşim"}, {"yeğen", "yeğenim"}, {"çocuk", "çocuğum"}, {"torun", "torunum"}};
  return forms.at(lemma);
}

/// Sample asymmetry probes over 50 backends. Male cells are marked by count;
/// female subjects are always marked except yeğen.
inline PlantedSet planted_asymmetry() {
  PlantedSet s;
  s.asymmetry = sample_asymmetry();
  s.probes = gen_asymmetry_probes(s.asymmetry.subjects, s.asymmetry.predicates);
  std::map<std::string, std::string> predicate_tr;
  for (const auto& p : s.asymmetry.predicates) predicate_tr[p.surface_en] = p.surface_tr;
  std::map<std::string, const SubjectWord*> subjects;
  for (const auto& w : s.asymmetry.subjects) subjects[w.lemma_tr] = &w;

  long long male_masc_seen = 0;
  long long male_fem_seen = 0;
  for (std::size_t b = 0; b < kAsymmetryBackends; ++b) {
    const auto backend = fmt::format("b{:02}", b);
    for (const auto& p : s.probes) {
      const auto& lemma = p.slot_value(slot::kSubjectLemma);
      const auto gender = *parse_gender(p.slot_value(slot::kSubjectGender));
      const auto stereotype = *parse_stereotype(p.slot_value(slot::kStereotype));
      bool marked = false;
      if (gender == Gender::Female) {
        marked = lemma != "yeğen";
      } else if (stereotype == Stereotype::Masculine) {
        marked = male_masc_seen++ >= kMaleMasculineNeutral;
      } else {
        marked = male_fem_seen++ < kMaleFeminineMarked;
      }
      const auto noun = possessive_form(lemma);
      std::string subject = marked ? subjects.at(lemma)->marker(gender) + " " + noun : noun;
      s.records.push_back(fixture_record(
          p, backend, text::capitalize_turkish(subject) + " " + predicate_tr.at(p.slot_value(slot::kPredicate)) + "."));
    }
  }
  return s;
}

/// Live-looking backend that counts calls and echoes the source.
class CountingBackend final : public Backend {
 public:
  explicit CountingBackend(std::string id = "counting") : id_(std::move(id)) {}
  std::string id() const override { return id_; }
  bool is_live() const override { return true; }
  std::string translate(const Probe& probe) override {
    ++calls_;
    return "echo: " + probe.source_text;
  }
  std::size_t calls() const { return calls_; }

 private:
  std::string id_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace mtbias::testing
