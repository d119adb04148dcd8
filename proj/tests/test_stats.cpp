#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "mtbias/stats/measures.hpp"
#include "mtbias/stats/tdist.hpp"
#include "support/fixtures.hpp"

using namespace mtbias;
using namespace mtbias::stats;
namespace mt = mtbias::testing;

namespace {

double t_pdf(double x, double df) {
  const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df));
}

// P(T <= t) by adaptive Gauss-Kronrod quadrature of the density.
double quadrature_cdf(double t, double df) {
  using boost::math::quadrature::gauss_kronrod;
  const double mass = gauss_kronrod<double, 61>::integrate([df](double x) { return t_pdf(x, df); }, 0.0,
                                                           std::fabs(t), 15, 1e-13);
  return t >= 0 ? 0.5 + mass : 0.5 - mass;
}

BinarySample sample(std::string label, std::size_t ones, std::size_t n) {
  BinarySample s{std::move(label), std::vector<std::uint8_t>(n, 0)};
  std::fill_n(s.values.begin(), ones, 1);
  return s;
}

PronounObservation obs(std::string item, std::string backend, PronounClass c) {
  return {std::move(item), std::move(backend), c};
}

PronounClass swap_gender(PronounClass c) {
  if (c == PronounClass::Male) return PronounClass::Female;
  if (c == PronounClass::Female) return PronounClass::Male;
  return c;
}

}  // namespace

TEST(TCdf, MatchesQuadratureOracle) {
  for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0})
    for (double t : {-6.0, -3.2, -1.5, -0.4, 0.0, 0.3, 1.0, 2.2, 4.0, 8.0})
      EXPECT_NEAR(t_cdf(t, df), quadrature_cdf(t, df), 1e-10) << "t=" << t << " df=" << df;
}

TEST(TCdf, CauchyClosedForm) {
  for (double t = -20; t <= 20; t += 0.75)
    EXPECT_NEAR(t_cdf(t, 1), 0.5 + std::atan(t) / std::numbers::pi, 1e-12) << t;
}

TEST(TCdf, TwoDegreesClosedForm) {
  for (double t = -10; t <= 10; t += 0.5) EXPECT_NEAR(t_cdf(t, 2), 0.5 + t / (2 * std::sqrt(2 + t * t)), 1e-12) << t;
}

TEST(TCdf, SymmetricAndMonotone) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ts(-15, 15);
  std::uniform_real_distribution<double> dfs(1, 5000);
  for (int i = 0; i < 2000; ++i) {
    const double t = ts(rng);
    const double df = dfs(rng);
    EXPECT_NEAR(t_cdf(t, df) + t_cdf(-t, df), 1.0, 1e-12);
    EXPECT_LE(t_cdf(t, df), t_cdf(t + 0.01, df) + 1e-15);
  }
  EXPECT_DOUBLE_EQ(t_cdf(0, 17), 0.5);
  EXPECT_EQ(t_cdf(INFINITY, 3), 1.0);
  EXPECT_EQ(t_cdf(-INFINITY, 3), 0.0);
  EXPECT_THROW(t_cdf(1, 0.5), std::domain_error);
}

TEST(TCdf, ApproachesNormalForLargeDf) {
  for (double t : {-2.0, -1.0, 0.5, 1.96})
    EXPECT_NEAR(t_cdf(t, 1e6), 0.5 * std::erfc(-t / std::numbers::sqrt2), 1e-6);
}

TEST(TTest, MatchesClosedFormForBinarySamples) {
  // binary data: sum of squares around the mean is ones*(n-ones)/n
  const auto a = sample("a", 30, 100);
  const auto b = sample("b", 12, 80);
  const double ma = 0.3, mb = 0.15;
  const double ss = 30.0 * 70 / 100 + 12.0 * 68 / 80;
  const double df = 178;
  const double t = (ma - mb) / std::sqrt(ss / df * (1.0 / 100 + 1.0 / 80));
  const auto r = t_test_one_sided(a, b, Alternative::Greater);
  EXPECT_NEAR(r.t_statistic, t, 1e-12);
  EXPECT_EQ(r.degrees_of_freedom, 178);
  EXPECT_NEAR(r.p_value, quadrature_cdf(-t, df), 1e-10);
  const auto less = t_test_one_sided(a, b, Alternative::Less);
  EXPECT_NEAR(less.p_value, 1.0 - r.p_value, 1e-12);
}

TEST(TTest, SwappingSamplesNegatesT) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::size_t na = 2 + rng() % 300, nb = 2 + rng() % 300;
    const auto a = sample("a", rng() % (na + 1), na);
    const auto b = sample("b", rng() % (nb + 1), nb);
    try {
      const auto ab = t_test_one_sided(a, b, Alternative::Greater);
      const auto ba = t_test_one_sided(b, a, Alternative::Less);
      EXPECT_NEAR(ab.t_statistic, -ba.t_statistic, 1e-12);
      EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
      EXPECT_GE(ab.p_value, 0.0);
      EXPECT_LE(ab.p_value, 1.0);
    } catch (const DegenerateSampleError&) {
      EXPECT_TRUE((a.ones() == 0 || a.ones() == na) && (b.ones() == 0 || b.ones() == nb));
    }
  }
}

TEST(TTest, RejectsTinyOrNonBinarySamples) {
  EXPECT_THROW(t_test_one_sided(sample("a", 1, 1), sample("b", 1, 5), Alternative::Greater), std::invalid_argument);
  auto bad = sample("a", 1, 5);
  bad.values[4] = 2;
  EXPECT_THROW(t_test_one_sided(bad, sample("b", 1, 5), Alternative::Greater), std::invalid_argument);
  EXPECT_THROW(t_test_one_sided(sample("a", 0, 5), sample("b", 0, 5), Alternative::Greater), DegenerateSampleError);
}

TEST(Proportion, EmptyDenominatorHasNoValue) {
  EXPECT_FALSE(Proportion{}.value());
  EXPECT_DOUBLE_EQ(*Proportion(1, 4).percent(), 25.0);
  Proportion p{1, 2};
  p += {2, 6};
  EXPECT_EQ(p, (Proportion{3, 8}));
}

TEST(FemaleShare, DenominatorPolicies) {
  const std::vector<PronounClass> c{PronounClass::Female, PronounClass::Male, PronounClass::NeutralThey,
                                    PronounClass::None, PronounClass::Female};
  EXPECT_EQ(female_share(c, Denominator::GenderedOnly), (Proportion{2, 3}));
  EXPECT_EQ(female_share(c, Denominator::AllProbes), (Proportion{2, 5}));
  EXPECT_THROW(female_share(std::vector<PronounClass>{}, Denominator::AllProbes), std::invalid_argument);
}

TEST(PronounShift, CountsOnlyGenderedPairsAndReportsUnmatched) {
  const std::vector<PronounObservation> base{obs("a", "x", PronounClass::Female), obs("b", "x", PronounClass::Female),
                                             obs("c", "x", PronounClass::Male), obs("d", "x", PronounClass::None),
                                             obs("e", "x", PronounClass::Male)};
  const std::vector<PronounObservation> changed{obs("a", "x", PronounClass::Male), obs("b", "x", PronounClass::NeutralThey),
                                                obs("c", "x", PronounClass::Female), obs("d", "x", PronounClass::Male),
                                                obs("f", "x", PronounClass::Male)};
  const auto s = pronoun_shift(base, changed);
  EXPECT_EQ(s.female_to_male, (Proportion{1, 2}));
  EXPECT_EQ(s.male_to_female, (Proportion{1, 1}));
  EXPECT_EQ(s.unmatched, (std::vector<std::string>{"e@x", "f@x"}));
  EXPECT_THROW(pronoun_shift({obs("a", "x", PronounClass::Male), obs("a", "x", PronounClass::Male)}, {}),
               std::invalid_argument);
}

TEST(PronounShift, GenderSwapExchangesDirections) {
  std::mt19937_64 rng(9);
  const std::array classes{PronounClass::Male, PronounClass::Female, PronounClass::NeutralThey, PronounClass::None};
  for (int round = 0; round < 50; ++round) {
    std::vector<PronounObservation> base, changed, base_sw, changed_sw;
    for (int i = 0; i < 200; ++i) {
      const auto b = classes[rng() % 4], c = classes[rng() % 4];
      base.push_back(obs(std::to_string(i), "x", b));
      changed.push_back(obs(std::to_string(i), "x", c));
      base_sw.push_back(obs(std::to_string(i), "x", swap_gender(b)));
      changed_sw.push_back(obs(std::to_string(i), "x", swap_gender(c)));
    }
    const auto s = pronoun_shift(base, changed);
    const auto w = pronoun_shift(base_sw, changed_sw);
    EXPECT_EQ(s.female_to_male, w.male_to_female);
    EXPECT_EQ(s.male_to_female, w.female_to_male);
  }
}

TEST(TransitionTable, FixedRowOrderAndUnknownQuality) {
  const std::vector<PronounObservation> base{obs("a", "x", PronounClass::Female)};
  const std::map<std::string, std::vector<PronounObservation>> q{{"very_bad", {obs("a", "x", PronounClass::Male)}},
                                                                 {"good", {obs("a", "x", PronounClass::Female)}}};
  const auto t = transition_table(base, q);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].quality, "good");
  EXPECT_EQ(t.rows[1].she_to_he, (Proportion{1, 1}));
  EXPECT_THROW(transition_table(base, {{"great", {}}}), std::invalid_argument);
}

TEST(CodingCrosstab, CountsByCodingAndPronoun) {
  const std::vector<Adjective> lex{{"güçlü", "strong", 80, 10, Coding::Masculine},
                                   {"narin", "delicate", 5, 80, Coding::Feminine},
                                   {"iyi", "good", 30, 30, Coding::Neutral}};
  const std::vector<PronounObservation> o{obs("güçlü", "x", PronounClass::Male), obs("narin", "x", PronounClass::Female),
                                          obs("narin", "y", PronounClass::Male), obs("iyi", "x", PronounClass::Male),
                                          obs("iyi", "y", PronounClass::None)};
  const auto x = coding_crosstab(o, lex);
  EXPECT_EQ(x.unassigned, 1);
  EXPECT_EQ(x.female_with_feminine, (Proportion{1, 1}));
  EXPECT_EQ(x.male_with_masculine, (Proportion{1, 3}));
  EXPECT_THROW(coding_crosstab({obs("yok", "x", PronounClass::Male)}, lex), std::invalid_argument);
}

TEST(AsymmetryShares, NotFoundStaysInDenominatorAndPoolingSums) {
  const std::vector<MarkingObservation> o{{"a", Gender::Male, Stereotype::Masculine, MarkingClass::Neutral},
                                          {"a", Gender::Male, Stereotype::Feminine, MarkingClass::MarkedOpposite},
                                          {"b", Gender::Male, Stereotype::Feminine, MarkingClass::MarkedMatching},
                                          {"b", Gender::Male, Stereotype::Masculine, MarkingClass::SubjectNotFound},
                                          {"b", Gender::Female, Stereotype::Masculine, MarkingClass::MarkedMatching}};
  const auto s = asymmetry_shares(o);
  EXPECT_EQ(s.backends, (std::vector<std::string>{"a", "b"}));
  const auto& male = s.pooled.by_gender.at(Gender::Male);
  EXPECT_EQ(male.neutral, (Proportion{1, 4}));
  EXPECT_EQ(male.marked, (Proportion{2, 4}));
  EXPECT_EQ(male.opposite, (Proportion{1, 4}));
  EXPECT_EQ(male.subject_not_found, 1);
  EXPECT_EQ(s.pooled.by_gender.at(Gender::Female).marked, (Proportion{1, 1}));
  EXPECT_EQ(s.per_backend.at("a").by_gender.at(Gender::Female).marked, (Proportion{0, 0}));
  for (const auto& [key, cell] : s.pooled.by_gender_stereotype) {
    Proportion sum;
    for (const auto& b : s.backends) sum += s.per_backend.at(b).by_gender_stereotype.at(key).marked;
    EXPECT_EQ(sum, cell.marked);
  }
}

TEST(GroupShares, RowsPoolBackendsAndFollowCanonicalOrder) {
  const auto corpus = mt::synthetic_corpus(84);
  std::vector<PronounObservation> o;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    o.push_back(obs(corpus.occupations[i].id, "b1", i % 3 == 0 ? PronounClass::Female : PronounClass::Male));
    o.push_back(obs(corpus.occupations[i].id, "b2", i % 4 == 0 ? PronounClass::NeutralThey : PronounClass::Female));
  }
  const auto wf = mt::synthetic_workforce();
  for (auto tax : {Taxonomy::ISCO, Taxonomy::SOC}) {
    const auto g = group_shares(o, corpus, wf, tax, Denominator::GenderedOnly);
    ASSERT_EQ(g.rows.size(), major_groups(tax).size());
    Proportion total;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      EXPECT_EQ(g.rows[r].group, major_groups(tax)[r].title);
      Proportion sum;
      for (const auto& [_, p] : g.rows[r].per_backend) sum += p;
      EXPECT_EQ(sum, g.rows[r].pooled);
      total += g.rows[r].pooled;
      EXPECT_TRUE(g.rows[r].workforce_female_pct);
    }
    EXPECT_EQ(total, g.overall_pooled);
    EXPECT_EQ(g.overall_pooled.den, 84 + 63);
  }
  EXPECT_THROW(group_shares({obs("ghost", "b1", PronounClass::Male)}, corpus, wf, Taxonomy::ISCO,
                            Denominator::AllProbes),
               std::invalid_argument);
}
