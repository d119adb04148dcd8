#pragma once

// Builds the full analysis report from probes, records and detections, and
// serializes it to JSON.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/detections.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/stats/measures.hpp"
#include "mtbias/stats/tdist.hpp"
#include "mtbias/translate.hpp"

namespace mtbias {

struct RunMetadata {
  std::string tool_version;
  std::vector<std::string> backends;
  std::map<std::string, std::string> input_hashes;  // logical name -> sha256
  std::optional<std::uint64_t> seed;
  stats::Denominator denominator = stats::Denominator::GenderedOnly;
  bool operator==(const RunMetadata&) const = default;
};

struct RecordCounts {
  long long records = 0;
  long long failures = 0;
  bool operator==(const RecordCounts&) const = default;
};

struct SampleSummary {
  std::string label;
  long long n = 0;
  long long ones = 0;
  bool operator==(const SampleSummary&) const = default;
};

/// One significance test together with how its samples were built.
struct TestReport {
  std::string name;
  std::string construction;
  SampleSummary sample_a;
  SampleSummary sample_b;
  stats::Alternative direction = stats::Alternative::Greater;
  std::optional<stats::TTestResult> result;
  std::string note;  // why result is absent
};

struct ShareByDenominator {
  stats::Proportion gendered;
  stats::Proportion all;
  bool operator==(const ShareByDenominator&) const = default;
};

struct OccupationSection {
  std::map<std::string, ShareByDenominator> female_share;  // per backend, base template
  stats::GroupShares isco;
  stats::GroupShares soc;
  stats::TransitionTable transitions;
};

struct AdjectiveSection {
  std::map<std::string, ShareByDenominator> female_share;  // per backend, base template
  stats::CodingCrosstab crosstab;
  stats::Shift personhood;
};

struct AnalysisReport {
  RunMetadata meta;
  std::map<std::string, RecordCounts> record_counts;
  std::optional<OccupationSection> occupations;
  std::optional<AdjectiveSection> adjectives;
  std::optional<stats::AsymmetryShares> asymmetry;
  std::vector<TestReport> tests;
};

struct AnalysisInputs {
  const std::vector<Probe>* probes = nullptr;
  const std::vector<TranslationRecord>* records = nullptr;
  const std::vector<Detection>* detections = nullptr;
  const OccupationCorpus* corpus = nullptr;
  const std::vector<Adjective>* adjectives = nullptr;
  const WorkforceTable* workforce = nullptr;
};

namespace detail {

struct Observations {
  std::vector<stats::PronounObservation> occ_base;
  std::map<std::string, std::vector<stats::PronounObservation>> occ_qualified;
  std::vector<stats::PronounObservation> adj_base;
  std::vector<stats::PronounObservation> adj_person;
  std::vector<stats::MarkingObservation> marking;
};

inline Observations collect(const std::vector<Probe>& probes, const std::vector<Detection>& detections) {
  std::map<std::string, const Probe*, std::less<>> by_id;
  for (const auto& p : probes) by_id.emplace(p.id, &p);
  Observations o;
  for (const auto& d : detections) {
    auto it = by_id.find(d.probe_id);
    if (it == by_id.end()) throw ValidationError("detections", "unknown probe id " + d.probe_id);
    const Probe& p = *it->second;
    if (const auto* pc = std::get_if<PronounClass>(&d.signal)) {
      switch (p.experiment) {
        case Experiment::OccupationBase:
          o.occ_base.push_back({p.slot_value(slot::kOccupationId), d.backend_id, *pc});
          break;
        case Experiment::OccupationAdjective: {
          const auto* q = find_quality(p.slot_value(slot::kQuality));
          if (!q) throw ValidationError("detections", "probe " + p.id + " has an unknown quality adjective");
          o.occ_qualified[std::string(q->key)].push_back({p.slot_value(slot::kOccupationId), d.backend_id, *pc});
          break;
        }
        case Experiment::AdjectiveBase:
          o.adj_base.push_back({p.slot_value(slot::kAdjective), d.backend_id, *pc});
          break;
        case Experiment::AdjectivePersonhood:
          o.adj_person.push_back({p.slot_value(slot::kAdjective), d.backend_id, *pc});
          break;
        case Experiment::Asymmetry:
          throw ValidationError("detections", "asymmetry probe " + p.id + " carries a pronoun detection");
      }
    } else {
      if (p.experiment != Experiment::Asymmetry)
        throw ValidationError("detections", "probe " + p.id + " carries a marking detection");
      const auto gender = parse_gender(p.slot_value(slot::kSubjectGender));
      const auto stereotype = parse_stereotype(p.slot_value(slot::kStereotype));
      if (!gender || !stereotype) throw ValidationError("detections", "probe " + p.id + " has malformed slots");
      o.marking.push_back({d.backend_id, *gender, *stereotype, std::get<MarkingClass>(d.signal)});
    }
  }
  return o;
}

inline std::map<std::string, ShareByDenominator> shares_per_backend(const std::vector<stats::PronounObservation>& obs) {
  std::map<std::string, std::vector<PronounClass>> by_backend;
  for (const auto& o : obs) by_backend[o.backend].push_back(o.cls);
  std::map<std::string, ShareByDenominator> out;
  for (const auto& [b, classes] : by_backend)
    out[b] = {stats::female_share(classes, stats::Denominator::GenderedOnly),
              stats::female_share(classes, stats::Denominator::AllProbes)};
  return out;
}

inline stats::BinarySample indicator_sample(std::string label, const std::vector<stats::PronounObservation>& obs,
                                            PronounClass target) {
  stats::BinarySample s{std::move(label), {}};
  for (const auto& o : obs) s.values.push_back(o.cls == target ? 1 : 0);
  return s;
}

inline TestReport run_test(std::string name, std::string construction, const stats::BinarySample& a,
                           const stats::BinarySample& b, stats::Alternative direction) {
  TestReport r;
  r.name = std::move(name);
  r.construction = std::move(construction);
  r.sample_a = {a.label, static_cast<long long>(a.size()), static_cast<long long>(a.ones())};
  r.sample_b = {b.label, static_cast<long long>(b.size()), static_cast<long long>(b.ones())};
  r.direction = direction;
  try {
    r.result = stats::t_test_one_sided(a, b, direction);
  } catch (const std::exception& e) {
    r.note = e.what();
  }
  return r;
}

// Expected-indicator sample: for each group, round(pct * n / 100) ones among
// the n observations falling in that group.
inline stats::BinarySample workforce_sample(std::string label, const std::vector<stats::PronounObservation>& obs,
                                            const OccupationCorpus& corpus, const WorkforceTable& workforce,
                                            Taxonomy taxonomy) {
  const OccupationIndex index(corpus);
  std::map<std::string, long long> per_group;
  for (const auto& o : obs)
    if (const auto* occ = index.find(o.item)) ++per_group[occ->group(taxonomy)];
  stats::BinarySample s{std::move(label), {}};
  for (const auto& [group, n] : per_group) {
    auto pct = workforce.find(taxonomy, group);
    if (!pct) continue;
    const auto ones = std::llround(*pct * static_cast<double>(n) / 100.0);
    for (long long i = 0; i < n; ++i) s.values.push_back(i < ones ? 1 : 0);
  }
  return s;
}

inline std::vector<stats::PronounObservation> within_workforce_groups(
    const std::vector<stats::PronounObservation>& obs, const OccupationCorpus& corpus, const WorkforceTable& workforce,
    Taxonomy taxonomy) {
  const OccupationIndex index(corpus);
  std::vector<stats::PronounObservation> out;
  for (const auto& o : obs)
    if (const auto* occ = index.find(o.item); occ && workforce.find(taxonomy, occ->group(taxonomy)))
      out.push_back(o);
  return out;
}

}  // namespace detail

inline AnalysisReport analyze(const AnalysisInputs& in, RunMetadata meta) {
  AnalysisReport report;
  report.meta = std::move(meta);
  for (const auto& r : *in.records) {
    auto& c = report.record_counts[r.backend_id];
    ++c.records;
    if (!r.ok()) ++c.failures;
  }
  std::set<std::string> backends(report.meta.backends.begin(), report.meta.backends.end());
  for (const auto& [b, _] : report.record_counts) backends.insert(b);
  report.meta.backends.assign(backends.begin(), backends.end());

  auto obs = detail::collect(*in.probes, *in.detections);
  const auto policy = report.meta.denominator;
  using stats::Alternative;

  if (!obs.occ_base.empty()) {
    if (!in.corpus || !in.workforce) throw std::invalid_argument("analyze: occupation data missing");
    OccupationSection s;
    s.female_share = detail::shares_per_backend(obs.occ_base);
    s.isco = stats::group_shares(obs.occ_base, *in.corpus, *in.workforce, Taxonomy::ISCO, policy);
    s.soc = stats::group_shares(obs.occ_base, *in.corpus, *in.workforce, Taxonomy::SOC, policy);
    s.transitions = stats::transition_table(obs.occ_base, obs.occ_qualified);
    report.occupations = std::move(s);

    for (auto [taxonomy, country] : {std::pair{Taxonomy::ISCO, "Turkey"}, std::pair{Taxonomy::SOC, "US"}}) {
      const auto in_groups = detail::within_workforce_groups(obs.occ_base, *in.corpus, *in.workforce, taxonomy);
      const std::string tax(to_string(taxonomy));
      report.tests.push_back(detail::run_test(
          "occupation_female_vs_workforce_" + text::ascii_lower(tax),
          "a: 1 per base occupation probe translated Female (all backends); b: per " + tax +
              " major group with n probes, round(workforce_pct*n/100) ones, " + country + " workforce shares",
          detail::indicator_sample("translated female", in_groups, PronounClass::Female),
          detail::workforce_sample("workforce expectation", in_groups, *in.corpus, *in.workforce, taxonomy),
          Alternative::Less));
    }
    for (const auto& q : kQualityAdjectives) {
      auto it = obs.occ_qualified.find(std::string(q.key));
      if (it == obs.occ_qualified.end()) continue;
      report.tests.push_back(detail::run_test(
          "quality_" + std::string(q.key) + "_male_vs_base",
          "a: 1 per '" + std::string(q.surface_tr) + "' occupation probe translated Male; b: 1 per base occupation "
              "probe translated Male (all backends)",
          detail::indicator_sample("qualified male", it->second, PronounClass::Male),
          detail::indicator_sample("base male", obs.occ_base, PronounClass::Male), Alternative::Greater));
    }
  }

  if (!obs.adj_base.empty() || !obs.adj_person.empty()) {
    if (!in.adjectives) throw std::invalid_argument("analyze: adjective lexicon missing");
    AdjectiveSection s;
    s.female_share = detail::shares_per_backend(obs.adj_base);
    s.crosstab = stats::coding_crosstab(obs.adj_base, *in.adjectives);
    s.personhood = stats::personhood_shift(obs.adj_base, obs.adj_person);
    report.adjectives = std::move(s);

    std::map<std::string, Coding, std::less<>> coding;
    for (const auto& a : *in.adjectives) coding.emplace(a.surface_tr, a.coding);
    std::vector<stats::PronounObservation> fem, masc;
    for (const auto& o : obs.adj_base) {
      auto c = coding.at(o.item);
      if (c == Coding::Feminine) fem.push_back(o);
      else if (c == Coding::Masculine) masc.push_back(o);
    }
    report.tests.push_back(detail::run_test(
        "feminine_coded_female_vs_masculine_coded",
        "a: 1 per feminine-coded base adjective probe translated Female; b: same over masculine-coded adjectives",
        detail::indicator_sample("feminine-coded female", fem, PronounClass::Female),
        detail::indicator_sample("masculine-coded female", masc, PronounClass::Female), Alternative::Greater));
    report.tests.push_back(detail::run_test(
        "personhood_male_vs_base",
        "a: 1 per personhood adjective probe translated Male; b: 1 per base adjective probe translated Male",
        detail::indicator_sample("personhood male", obs.adj_person, PronounClass::Male),
        detail::indicator_sample("base male", obs.adj_base, PronounClass::Male), Alternative::Greater));
  }

  if (!obs.marking.empty()) {
    report.asymmetry = stats::asymmetry_shares(obs.marking);
    auto marked_sample = [&](std::string label, auto keep) {
      stats::BinarySample s{std::move(label), {}};
      for (const auto& m : obs.marking)
        if (keep(m))
          s.values.push_back(m.cls == MarkingClass::MarkedMatching || m.cls == MarkingClass::MarkedOpposite ? 1 : 0);
      return s;
    };
    report.tests.push_back(detail::run_test(
        "female_subject_marked_vs_male_subject",
        "a: 1 per female-subject asymmetry translation with an overt gender marker; b: same for male subjects",
        marked_sample("female subject marked", [](const auto& m) { return m.subject_gender == Gender::Female; }),
        marked_sample("male subject marked", [](const auto& m) { return m.subject_gender == Gender::Male; }),
        Alternative::Greater));
    report.tests.push_back(detail::run_test(
        "male_subject_marked_feminine_vs_masculine_predicate",
        "a: 1 per male-subject translation with a feminine predicate carrying a marker; b: same with masculine "
        "predicates",
        marked_sample("male subject, feminine predicate",
                      [](const auto& m) {
                        return m.subject_gender == Gender::Male && m.stereotype == Stereotype::Feminine;
                      }),
        marked_sample("male subject, masculine predicate",
                      [](const auto& m) {
                        return m.subject_gender == Gender::Male && m.stereotype == Stereotype::Masculine;
                      }),
        Alternative::Greater));
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson number_or_null(std::optional<double> v) { return v ? ojson(*v) : ojson(nullptr); }

inline ojson to_json(const stats::Proportion& p) {
  ojson j;
  j["num"] = p.num;
  j["den"] = p.den;
  j["value"] = number_or_null(p.value());
  return j;
}

inline ojson to_json(const ShareByDenominator& s) {
  ojson j;
  j["gendered"] = to_json(s.gendered);
  j["all"] = to_json(s.all);
  return j;
}

inline ojson to_json(const std::map<std::string, ShareByDenominator>& m) {
  ojson j = ojson::object();
  for (const auto& [k, v] : m) j[k] = to_json(v);
  return j;
}

inline ojson to_json(const stats::GroupShares& g) {
  ojson j;
  j["taxonomy"] = to_string(g.taxonomy);
  j["national_workforce_pct"] = g.national_workforce_pct;
  ojson overall = ojson::object();
  for (const auto& [b, p] : g.overall_per_backend) overall[b] = to_json(p);
  j["overall_per_backend"] = overall;
  j["overall_pooled"] = to_json(g.overall_pooled);
  ojson rows = ojson::array();
  for (const auto& r : g.rows) {
    ojson row;
    row["group"] = r.group;
    row["abbreviation"] = group_abbreviation(r.taxonomy, r.group);
    row["occupations"] = r.occupations;
    ojson per = ojson::object();
    for (const auto& [b, p] : r.per_backend) per[b] = to_json(p);
    row["per_backend"] = per;
    row["pooled"] = to_json(r.pooled);
    row["workforce_female_pct"] = number_or_null(r.workforce_female_pct);
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

inline ojson to_json(const stats::Shift& s) {
  ojson j;
  j["female_to_male"] = to_json(s.female_to_male);
  j["male_to_female"] = to_json(s.male_to_female);
  j["unmatched"] = s.unmatched;
  return j;
}

inline ojson to_json(const stats::MarkingCell& c) {
  ojson j;
  j["neutral"] = to_json(c.neutral);
  j["marked"] = to_json(c.marked);
  j["marked_opposite"] = to_json(c.opposite);
  j["subject_not_found"] = c.subject_not_found;
  return j;
}

inline ojson to_json(const stats::MarkingShares& s) {
  ojson j;
  ojson by_gender = ojson::object();
  for (const auto& [g, c] : s.by_gender) by_gender[std::string(to_string(g))] = to_json(c);
  j["by_gender"] = by_gender;
  ojson cells = ojson::array();
  for (const auto& [key, c] : s.by_gender_stereotype) {
    ojson cell = to_json(c);
    cell["subject_gender"] = to_string(key.first);
    cell["stereotype"] = to_string(key.second);
    cells.push_back(cell);
  }
  j["by_gender_stereotype"] = cells;
  return j;
}

inline ojson to_json(const TestReport& t) {
  ojson j;
  j["name"] = t.name;
  j["construction"] = t.construction;
  for (const auto& [key, s] : {std::pair{"sample_a", &t.sample_a}, std::pair{"sample_b", &t.sample_b}}) {
    ojson sj;
    sj["label"] = s->label;
    sj["n"] = s->n;
    sj["ones"] = s->ones;
    j[key] = sj;
  }
  j["direction"] = stats::to_string(t.direction);
  if (t.result) {
    j["t"] = t.result->t_statistic;
    j["df"] = t.result->degrees_of_freedom;
    j["p"] = t.result->p_value;
  } else {
    j["t"] = nullptr;
    j["df"] = nullptr;
    j["p"] = nullptr;
  }
  j["note"] = t.note.empty() ? ojson(nullptr) : ojson(t.note);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const AnalysisReport& r) {
  using detail::ojson;
  ojson j;
  ojson meta;
  meta["tool_version"] = r.meta.tool_version;
  meta["backends"] = r.meta.backends;
  ojson hashes = ojson::object();
  for (const auto& [k, v] : r.meta.input_hashes) hashes[k] = v;
  meta["input_hashes"] = hashes;
  meta["seed"] = r.meta.seed ? ojson(*r.meta.seed) : ojson(nullptr);
  meta["denominator"] = stats::to_string(r.meta.denominator);
  j["metadata"] = meta;

  ojson counts = ojson::object();
  for (const auto& [b, c] : r.record_counts) counts[b] = {{"records", c.records}, {"failures", c.failures}};
  j["record_counts"] = counts;

  if (r.occupations) {
    ojson s;
    s["female_share"] = detail::to_json(r.occupations->female_share);
    s["group_shares"] = {detail::to_json(r.occupations->isco), detail::to_json(r.occupations->soc)};
    ojson rows = ojson::array();
    for (const auto& row : r.occupations->transitions.rows) {
      ojson rj;
      rj["quality"] = row.quality;
      rj["she_to_he"] = detail::to_json(row.she_to_he);
      rj["he_to_she"] = detail::to_json(row.he_to_she);
      rows.push_back(rj);
    }
    s["transitions"] = {{"rows", rows}, {"unmatched", r.occupations->transitions.unmatched}};
    j["occupations"] = s;
  } else {
    j["occupations"] = nullptr;
  }

  if (r.adjectives) {
    ojson s;
    s["female_share"] = detail::to_json(r.adjectives->female_share);
    const auto& x = r.adjectives->crosstab;
    ojson counts_j = ojson::object();
    for (auto c : {Coding::Masculine, Coding::Feminine, Coding::Neutral}) {
      const auto& row = x.counts[static_cast<std::size_t>(c)];
      counts_j[std::string(to_string(c))] = {{"female", row[0]}, {"male", row[1]}};
    }
    s["coding_crosstab"] = {{"counts", counts_j},
                            {"unassigned", x.unassigned},
                            {"female_with_feminine", detail::to_json(x.female_with_feminine)},
                            {"male_with_masculine", detail::to_json(x.male_with_masculine)}};
    s["personhood_shift"] = detail::to_json(r.adjectives->personhood);
    j["adjectives"] = s;
  } else {
    j["adjectives"] = nullptr;
  }

  if (r.asymmetry) {
    ojson s;
    s["backends"] = r.asymmetry->backends;
    ojson per = ojson::object();
    for (const auto& [b, shares] : r.asymmetry->per_backend) per[b] = detail::to_json(shares);
    s["per_backend"] = per;
    s["pooled"] = detail::to_json(r.asymmetry->pooled);
    j["asymmetry"] = s;
  } else {
    j["asymmetry"] = nullptr;
  }

  ojson tests = ojson::array();
  for (const auto& t : r.tests) tests.push_back(detail::to_json(t));
  j["tests"] = tests;
  return j;
}

}  // namespace mtbias
