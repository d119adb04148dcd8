// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "mtbias/detect.hpp"
#include "mtbias/morphology.hpp"
#include "mtbias/pipeline.hpp"
#include "mtbias/stats/tdist.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace mtbias;
using namespace mtbias::testing;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Outcome probe_cardinalities() {
  Outcome o;
  const auto start = Clock::now();
  const auto occ = gen_occupation_probes(synthetic_corpus(1617));
  o.check(occ.size() == 8085, fmt::format("1617 occupations gave {} probes", occ.size()));
  const auto adjectives = sample_adjectives();
  o.check(adjectives.size() == 97, fmt::format("lexicon holds {} adjectives", adjectives.size()));
  const auto adj = gen_adjective_probes(adjectives);
  o.check(adj.size() == 194, fmt::format("{} adjective probes", adj.size()));
  const auto lex = sample_asymmetry();
  const auto asym = gen_asymmetry_probes(lex.subjects, lex.predicates);
  std::size_t female = 0;
  for (const auto& p : asym) female += p.slot_value(slot::kSubjectGender) == "female";
  o.check(asym.size() == 240 && female == 120, fmt::format("{} asymmetry probes, {} female", asym.size(), female));
  const auto sample = load_occupation_corpus(sample_data("occupations_sample.csv"));
  o.check(gen_occupation_probes(sample).size() == 5 * sample.size(), "sample corpus does not give 5 probes each");
  const double elapsed = seconds_since(start);
  o.check(elapsed < 1.0, fmt::format("took {:.3f}s", elapsed));
  if (o.pass) o.detail = fmt::format("8085 / 194 / 240 (120 per gender), {:.3f}s", elapsed);
  return o;
}

Outcome morphology_gold() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t copula = 0, fold = 0;
  for (const auto& row : read_tsv(test_data("copula_gold.tsv"))) {
    const auto got = morph::attach_copula_suffix(row.at(0));
    o.check(got == row.at(1), "copula " + row.at(0) + " -> " + got + ", expected " + row.at(1));
    ++copula;
  }
  for (const auto& row : read_tsv(test_data("fold_gold.tsv"))) {
    const auto got = text::fold_turkish(row.at(0));
    o.check(got == row.at(1), "fold " + row.at(0) + " -> " + got);
    ++fold;
  }
  o.check(copula >= 30 && fold >= 20, "gold tables too small");
  const double elapsed = seconds_since(start);
  o.check(elapsed < 1.0, fmt::format("took {:.3f}s", elapsed));
  if (o.pass) o.detail = fmt::format("{} copula and {} fold cases, {:.3f}s", copula, fold, elapsed);
  return o;
}

Outcome detector_gold() {
  Outcome o;
  std::size_t pronoun = 0, marking = 0;
  for (const auto& row : read_tsv(test_data("pronoun_gold.tsv"))) {
    const auto got = to_string(classify_pronoun(row.at(0)));
    o.check(got == row.at(1), "pronoun '" + row.at(0) + "' -> " + std::string(got));
    ++pronoun;
  }
  const auto lex = sample_asymmetry();
  for (const auto& row : read_tsv(test_data("marking_gold.tsv"))) {
    const SubjectWord* subject = nullptr;
    for (const auto& s : lex.subjects)
      if (s.lemma_tr == row.at(0)) subject = &s;
    if (!subject) {
      o.check(false, "unknown lemma " + row.at(0));
      continue;
    }
    const auto got = to_string(detect_gender_marking(row.at(2), *subject, *parse_gender(row.at(1))));
    o.check(got == row.at(3), "marking '" + row.at(2) + "' -> " + std::string(got));
    ++marking;
  }
  o.check(pronoun >= 60 && marking >= 60, "detector fixtures too small");
  if (o.pass) o.detail = fmt::format("{} pronoun and {} marking sentences", pronoun, marking);
  return o;
}

double t_cdf_by_quadrature(double t, double df) {
  const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * std::numbers::pi);
  auto pdf = [&](double x) { return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df)); };
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, 0.0, std::fabs(t), 20, 1e-15);
  return t >= 0 ? 0.5 + half : 0.5 - half;
}

Outcome numerics() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0, worst_sym = 0, worst_cauchy = 0;
  for (double df : {1.0, 2.0, 5.0, 30.0, 100.0, 1000.0})
    for (double t : {-5.0, -2.5, -1.0, 0.0, 1.0, 2.5, 5.0}) {
      worst = std::max(worst, std::fabs(stats::t_cdf(t, df) - t_cdf_by_quadrature(t, df)));
      worst_sym = std::max(worst_sym, std::fabs(stats::t_cdf(t, df) + stats::t_cdf(-t, df) - 1.0));
      if (df == 1.0)
        worst_cauchy = std::max(worst_cauchy, std::fabs(stats::t_cdf(t, 1) - (0.5 + std::atan(t) / std::numbers::pi)));
    }
  o.check(worst < 1e-8, fmt::format("max deviation from quadrature {:.3g}", worst));
  o.check(worst_cauchy < 1e-12, fmt::format("df=1 deviation from arctan form {:.3g}", worst_cauchy));
  o.check(worst_sym < 1e-12, fmt::format("symmetry deviation {:.3g}", worst_sym));
  const double elapsed = seconds_since(start);
  o.check(elapsed < 5.0, fmt::format("took {:.3f}s", elapsed));
  if (o.pass)
    o.detail = fmt::format("quadrature {:.2g}, arctan {:.2g}, symmetry {:.2g}, {:.3f}s", worst, worst_cauchy,
                           worst_sym, elapsed);
  return o;
}

Outcome transition_round_trip() {
  Outcome o;
  const auto report = planted_transitions().analyze_set();
  const auto& rows = report.occupations->transitions.rows;
  const std::vector<std::pair<double, double>> expected{{0.1272, 0.0044}, {0.1503, 0.0039}, {0.3353, 0.0005},
                                                        {0.3815, 0.0010}};
  o.check(rows.size() == 4, fmt::format("{} transition rows", rows.size()));
  std::ostringstream got;
  for (std::size_t i = 0; i < rows.size() && i < expected.size(); ++i) {
    const double f2m = rows[i].she_to_he.value().value_or(-1);
    const double m2f = rows[i].he_to_she.value().value_or(-1);
    got << fmt::format("{}={:.4f}/{:.4f} ", rows[i].quality, f2m, m2f);
    o.check(std::fabs(f2m - expected[i].first) <= 0.00005 && std::fabs(m2f - expected[i].second) <= 0.00005,
            "row " + rows[i].quality + " off: " + got.str());
  }
  if (o.pass) o.detail = got.str();
  return o;
}

Outcome neutral_case_round_trip() {
  Outcome o;
  const auto person = planted_personhood().analyze_set().adjectives->personhood;
  const double f2m = *person.female_to_male.percent();
  const double m2f = *person.male_to_female.percent();
  o.check(std::fabs(f2m - 74.07) <= 0.05 && std::fabs(m2f - 2.76) <= 0.05,
          fmt::format("personhood {:.2f}/{:.2f}", f2m, m2f));

  const auto asym = *planted_asymmetry().analyze_set().asymmetry;
  const auto& pooled = asym.pooled;
  const double male_neutral = *pooled.by_gender.at(Gender::Male).neutral.percent();
  const double female_neutral = *pooled.by_gender.at(Gender::Female).neutral.percent();
  const double mm_neutral = *pooled.by_gender_stereotype.at({Gender::Male, Stereotype::Masculine}).neutral.percent();
  const double mf_marked = *pooled.by_gender_stereotype.at({Gender::Male, Stereotype::Feminine}).marked.percent();
  const auto near = [](double got, double want) { return std::fabs(got - want) <= 0.05; };
  o.check(near(male_neutral, 47.7) && near(female_neutral, 25.0),
          fmt::format("neutral case {:.2f}/{:.2f}", male_neutral, female_neutral));
  o.check(near(mm_neutral, 52.1) && near(mf_marked, 56.6),
          fmt::format("stereotype-conditioned {:.2f}/{:.2f}", mm_neutral, mf_marked));
  if (o.pass)
    o.detail = fmt::format("personhood {:.2f}/{:.2f}, neutral {:.2f}/{:.2f}, conditioned {:.2f}/{:.2f}", f2m, m2f,
                           male_neutral, female_neutral, mm_neutral, mf_marked);
  return o;
}

Outcome significance() {
  Outcome o;
  stats::BinarySample a{"60%", {}}, b{"40%", {}};
  for (int i = 0; i < 100; ++i) {
    a.values.push_back(i < 60 ? 1 : 0);
    b.values.push_back(i < 40 ? 1 : 0);
  }
  const auto r = stats::t_test_one_sided(a, b, stats::Alternative::Greater);
  o.check(r.p_value < 0.01, fmt::format("60 vs 40 gave p={:.3g}", r.p_value));
  const auto same = stats::t_test_one_sided(a, a, stats::Alternative::Greater);
  o.check(std::fabs(same.p_value - 0.5) <= 1e-12, fmt::format("identical samples gave p={:.15f}", same.p_value));
  if (o.pass) o.detail = fmt::format("p={:.3g} (t={:.3f}, df={}), identical p={}", r.p_value, r.t_statistic,
                                     r.degrees_of_freedom, same.p_value);
  return o;
}

Outcome determinism() {
  Outcome o;
  TempDir tmp("mtbias-accept");
  const auto start = Clock::now();
  std::ostringstream err, log;
  for (const auto* name : {"run1", "run2"}) {
    pipeline::Overrides ov;
    ov.mock = true;
    ov.seed = 7;
    ov.out = tmp / name;
    const int rc = pipeline::run_command("run-all", sample_data("sample_run.ini"), ov, err, &log);
    o.check(rc == 0, fmt::format("run-all exited {}: {}", rc, err.str()));
  }
  const double elapsed = seconds_since(start);
  for (const auto* dir : {"report", "analysis"}) {
    const auto diff = compare_trees(tmp / "run1" / dir, tmp / "run2" / dir);
    o.check(diff.empty(), diff);
  }
  o.check(elapsed < 10.0, fmt::format("two runs took {:.2f}s", elapsed));
  if (o.pass)
    o.detail = fmt::format("{} report files byte-identical, two runs in {:.2f}s",
                           list_files(tmp / "run1" / "report").size(), elapsed);
  return o;
}

Outcome cache_contract() {
  Outcome o;
  TempDir tmp("mtbias-cache");
  const auto lex = sample_asymmetry();
  const auto probes = gen_adjective_probes(sample_adjectives());
  CountingBackend backend;
  BatchStats first, second;
  {
    TranslationCache cache(tmp / "cache.jsonl");
    run_batch(probes, backend, &cache, BatchOptions{4, false, nullptr}, &first);
  }
  const auto after_first = backend.calls();
  TranslationCache reopened(tmp / "cache.jsonl");
  run_batch(probes, backend, &reopened, BatchOptions{4, false, nullptr}, &second);
  o.check(first.live_calls == probes.size(), fmt::format("first pass made {} live calls", first.live_calls));
  o.check(second.live_calls == 0 && backend.calls() == after_first,
          fmt::format("second pass made {} live calls", backend.calls() - after_first));
  o.check(second.cache_hits == probes.size(), fmt::format("second pass had {} cache hits", second.cache_hits));
  if (o.pass) o.detail = fmt::format("{} probes: {} live calls, then 0 ({} cache hits)", probes.size(), after_first,
                                     second.cache_hits);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"probe cardinalities", probe_cardinalities},
      {"morphology gold suite", morphology_gold},
      {"detector gold suite", detector_gold},
      {"t distribution numerics", numerics},
      {"transition table round trip", transition_round_trip},
      {"personhood and neutral-case round trip", neutral_case_round_trip},
      {"significance behaviour", significance},
      {"pipeline determinism", determinism},
      {"cache contract", cache_contract},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
