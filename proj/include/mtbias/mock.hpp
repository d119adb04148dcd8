#pragma once

// Deterministic stereotype mock. Every random choice is a counter-based draw
// keyed on (seed, backend id, probe key), so outcomes do not depend on batch
// order, subsetting or thread count.

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/errors.hpp"
#include "mtbias/morphology.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/translate.hpp"
#include "mtbias/util/config.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Uniform draw in [0,1) determined entirely by (seed, key, counter).
inline double counter_uniform(std::uint64_t seed, std::string_view key, std::uint64_t counter = 0) {
  const std::uint64_t x = splitmix64(seed ^ splitmix64(fnv1a64(key) + counter * 0x9E3779B97F4A7C15ull));
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

struct FlipRates {
  double female_to_male = 0;
  double male_to_female = 0;
};

/// Parameters that shape the mock's pronoun and marking choices.
struct MockPolicy {
  std::uint64_t seed = 0;

  // Occupation base probes: first rule whose threshold the occupation's female
  // share meets gives P(she). Kept sorted by descending threshold.
  std::vector<std::pair<double, double>> occupation_female_share;
  bool use_us_share = false;

  std::map<std::string, FlipRates> quality_flips;  // keyed by Turkish quality surface
  std::map<Coding, double> adjective_p_female;
  FlipRates personhood;

  std::map<std::pair<Gender, Stereotype>, double> marking;  // P(overt marker)
  std::map<std::string, double> lemma_marking;  // per-lemma override of P(overt marker)

  /// Parameters roughly shaped like the published aggregate findings.
  static MockPolicy defaults() {
    MockPolicy p;
    p.occupation_female_share = {{90, 0.95}, {75, 0.25}, {50, 0.04}, {0, 0.004}};
    p.quality_flips = {{"çok iyi", {0.1272, 0.0044}},
                       {"iyi", {0.1503, 0.0039}},
                       {"kötü", {0.3353, 0.0005}},
                       {"çok kötü", {0.3815, 0.0010}}};
    p.adjective_p_female = {{Coding::Feminine, 0.30}, {Coding::Neutral, 0.04}, {Coding::Masculine, 0.01}};
    p.personhood = {0.7407, 0.0276};
    p.marking = {{{Gender::Male, Stereotype::Masculine}, 0.64},
                 {{Gender::Male, Stereotype::Feminine}, 0.75},
                 {{Gender::Female, Stereotype::Masculine}, 1.0},
                 {{Gender::Female, Stereotype::Feminine}, 1.0}};
    p.lemma_marking = {{"yeğen", 0.0}};
    return p;
  }

  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    auto check = [&](double v, const std::string& what) {
      if (!(v >= 0.0 && v <= 1.0)) out.push_back(fmt::format("{} = {} is not a probability", what, v));
    };
    for (const auto& [threshold, prob] : occupation_female_share) check(prob, fmt::format("occupation[{}]", threshold));
    for (const auto& [q, f] : quality_flips) {
      check(f.female_to_male, "quality[" + q + "].female_to_male");
      check(f.male_to_female, "quality[" + q + "].male_to_female");
    }
    for (const auto& [c, v] : adjective_p_female) check(v, "adjective[" + std::string(to_string(c)) + "]");
    check(personhood.female_to_male, "personhood.female_to_male");
    check(personhood.male_to_female, "personhood.male_to_female");
    for (const auto& [k, v] : marking)
      check(v, fmt::format("marking[{}.{}]", to_string(k.first), to_string(k.second)));
    for (const auto& [lemma, v] : lemma_marking) check(v, "marking.lemma[" + lemma + "]");
    return out;
  }

  /// Reads overrides from an INI file on top of defaults():
  ///
  ///   [mock]                   seed, share_source = tr|us
  ///   [occupation.female_share] <min female pct> = <P(she)>
  ///   [quality.<very_good|good|bad|very_bad>] female_to_male, male_to_female
  ///   [adjective]              Masculine / Feminine / Neutral = P(she)
  ///   [personhood]             female_to_male, male_to_female
  ///   [marking]                <male|female>.<Masculine|Feminine> = P(marker)
  ///   [marking.lemma]          <lemma> = P(marker)
  static MockPolicy from_config(const KeyValueConfig& cfg) {
    MockPolicy p = defaults();
    p.seed = static_cast<std::uint64_t>(cfg.get_int("mock", "seed", 0));
    const auto share_source = cfg.get_or("mock", "share_source", "tr");
    if (share_source != "tr" && share_source != "us") throw ConfigError(cfg.source() + ": share_source must be tr or us");
    p.use_us_share = share_source == "us";

    auto number = [&](const std::string& value, const std::string& where) {
      auto d = detail::parse_number(value);
      if (!d) throw ConfigError(cfg.source() + ": " + where + " is not a number: " + value);
      return *d;
    };

    if (cfg.has_section("occupation.female_share")) {
      p.occupation_female_share.clear();
      for (const auto& [k, v] : cfg.section("occupation.female_share"))
        p.occupation_female_share.emplace_back(number(k, "threshold"), number(v, "occupation." + k));
    }
    for (const auto& q : kQualityAdjectives) {
      const std::string section = "quality." + std::string(q.key);
      auto& rates = p.quality_flips[std::string(q.surface_tr)];
      rates.female_to_male = cfg.get_double(section, "female_to_male", rates.female_to_male);
      rates.male_to_female = cfg.get_double(section, "male_to_female", rates.male_to_female);
    }
    for (auto c : {Coding::Masculine, Coding::Feminine, Coding::Neutral})
      p.adjective_p_female[c] = cfg.get_double("adjective", std::string(to_string(c)), p.adjective_p_female[c]);
    p.personhood.female_to_male = cfg.get_double("personhood", "female_to_male", p.personhood.female_to_male);
    p.personhood.male_to_female = cfg.get_double("personhood", "male_to_female", p.personhood.male_to_female);
    for (auto g : {Gender::Male, Gender::Female})
      for (auto s : {Stereotype::Masculine, Stereotype::Feminine}) {
        const auto key = fmt::format("{}.{}", to_string(g), to_string(s));
        p.marking[{g, s}] = cfg.get_double("marking", key, p.marking[{g, s}]);
      }
    if (cfg.has_section("marking.lemma")) {
      p.lemma_marking.clear();
      for (const auto& [lemma, v] : cfg.section("marking.lemma")) p.lemma_marking[lemma] = number(v, "marking." + lemma);
    }
    p.normalize();
    if (auto problems = p.problems(); !problems.empty())
      throw ConfigError(cfg.source() + ": " + text::join(problems, "; "));
    return p;
  }

  void normalize() {
    std::sort(occupation_female_share.begin(), occupation_female_share.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
  }

  double p_female_for_share(double female_pct) const {
    for (const auto& [threshold, prob] : occupation_female_share)
      if (female_pct >= threshold) return prob;
    return 0.0;
  }
};

/// Lookup tables the mock needs to render English/Turkish output.
struct MockContext {
  std::map<std::string, Occupation, std::less<>> occupations;
  std::map<std::string, Adjective, std::less<>> adjectives;
  std::map<std::string, SubjectWord, std::less<>> subjects;
  std::map<std::string, Predicate, std::less<>> predicates;  // by rendered English predicate

  static MockContext build(const OccupationCorpus& corpus, const std::vector<Adjective>& lexicon,
                           const AsymmetryLexicon& asym) {
    MockContext ctx;
    for (const auto& o : corpus.occupations) ctx.occupations.emplace(o.id, o);
    for (const auto& a : lexicon) ctx.adjectives.emplace(a.surface_tr, a);
    for (const auto& s : asym.subjects) ctx.subjects.emplace(s.lemma_tr, s);
    for (const auto& p : asym.predicates) {
      ctx.predicates.emplace(p.surface_en, p);
      ctx.predicates.emplace(pluralize_predicate(p), p);
    }
    return ctx;
  }
};

namespace detail {

inline std::string english_article(std::string_view next_word) {
  if (next_word.empty()) return "a";
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(next_word.front())));
  return std::string_view("aeiou").find(c) != std::string_view::npos ? "an" : "a";
}

inline std::string pronoun(bool female) { return female ? "She" : "He"; }

[[noreturn]] inline void schema_error(const Probe& probe, const std::string& message) {
  throw TranslationError(FailureKind::SchemaMismatch, "probe " + probe.id + ": " + message);
}

template <class Map>
const auto& lookup(const Map& map, const std::string& key, const Probe& probe, std::string_view what) {
  auto it = map.find(key);
  if (it == map.end()) schema_error(probe, "unknown " + std::string(what) + " '" + key + "'");
  return it->second;
}

}  // namespace detail

/// Renders the mock translation of one probe. `stream` separates the random
/// streams of different mock backends sharing a policy.
inline std::string mock_translate(const Probe& probe, const MockPolicy& policy, const MockContext& ctx,
                                  std::string_view stream = {}) {
  if (auto problems = probe_problems(probe); !problems.empty())
    detail::schema_error(probe, text::join(problems, "; "));

  auto draw = [&](const std::string& key) { return counter_uniform(policy.seed, std::string(stream) + "\x1f" + key); };

  switch (probe.experiment) {
    case Experiment::OccupationBase:
    case Experiment::OccupationAdjective: {
      const auto& occ = detail::lookup(ctx.occupations, probe.slot_value(slot::kOccupationId), probe, "occupation");
      const double share = policy.use_us_share ? occ.female_pct_us : occ.female_pct_tr;
      bool female = draw("occ/" + occ.id + "/base") < policy.p_female_for_share(share);
      std::string noun = text::ascii_lower(occ.title_en);
      if (probe.experiment == Experiment::OccupationAdjective) {
        const auto& quality = probe.slot_value(slot::kQuality);
        const auto* q = find_quality(quality);
        if (!q) detail::schema_error(probe, "unknown quality adjective '" + quality + "'");
        auto it = policy.quality_flips.find(quality);
        const FlipRates rates = it == policy.quality_flips.end() ? FlipRates{} : it->second;
        if (draw(probe.id) < (female ? rates.female_to_male : rates.male_to_female)) female = !female;
        noun = std::string(q->gloss) + " " + noun;
      }
      return fmt::format("{} is {} {}", detail::pronoun(female), detail::english_article(noun), noun);
    }
    case Experiment::AdjectiveBase:
    case Experiment::AdjectivePersonhood: {
      const auto& adj = detail::lookup(ctx.adjectives, probe.slot_value(slot::kAdjective), probe, "adjective");
      auto it = policy.adjective_p_female.find(adj.coding);
      bool female = draw("adj/" + adj.surface_tr + "/base") < (it == policy.adjective_p_female.end() ? 0 : it->second);
      if (probe.experiment == Experiment::AdjectiveBase)
        return fmt::format("{} is {}", detail::pronoun(female), adj.gloss_en);
      if (draw(probe.id) < (female ? policy.personhood.female_to_male : policy.personhood.male_to_female))
        female = !female;
      return fmt::format("{} is someone who is {}", detail::pronoun(female), adj.gloss_en);
    }
    case Experiment::Asymmetry: {
      const auto& subject = detail::lookup(ctx.subjects, probe.slot_value(slot::kSubjectLemma), probe, "subject");
      const auto gender = parse_gender(probe.slot_value(slot::kSubjectGender));
      const auto stereotype = parse_stereotype(probe.slot_value(slot::kStereotype));
      if (!gender || !stereotype) detail::schema_error(probe, "bad subject gender or predicate stereotype slot");
      double p_mark = 0;
      if (auto it = policy.lemma_marking.find(subject.lemma_tr); it != policy.lemma_marking.end())
        p_mark = it->second;
      else if (auto m = policy.marking.find({*gender, *stereotype}); m != policy.marking.end())
        p_mark = m->second;
      const bool marked = draw(probe.id) < p_mark;

      const auto& predicate_en = probe.slot_value(slot::kPredicate);
      auto pred = ctx.predicates.find(predicate_en);
      const std::string predicate_tr =
          pred != ctx.predicates.end() && !pred->second.surface_tr.empty() ? pred->second.surface_tr : predicate_en;
      const std::string noun = subject.scheme == SubjectScheme::Plural ? morph::attach_plural(subject.lemma_tr)
                                                                       : morph::attach_possessive_1sg(subject.lemma_tr);
      std::string sentence = marked ? subject.marker(*gender) + " " + noun : noun;
      return text::capitalize_turkish(sentence) + " " + predicate_tr + ".";
    }
  }
  detail::schema_error(probe, "unsupported experiment");
}

class MockBackend final : public Backend {
 public:
  MockBackend(std::string id, MockPolicy policy, std::shared_ptr<const MockContext> ctx)
      : id_(std::move(id)), policy_(std::move(policy)), ctx_(std::move(ctx)) {}

  std::string id() const override { return id_; }
  bool is_live() const override { return false; }
  std::string translate(const Probe& probe) override { return mock_translate(probe, policy_, *ctx_, id_); }

 private:
  std::string id_;
  MockPolicy policy_;
  std::shared_ptr<const MockContext> ctx_;
};

}  // namespace mtbias
