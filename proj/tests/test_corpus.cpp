#include <gtest/gtest.h>

#include "mtbias/corpus.hpp"
#include "support/fixtures.hpp"

using namespace mtbias;
namespace mt = mtbias::testing;

TEST(CodeAdjective, ExhaustiveIntegerGrid) {
  for (int male = 0; male <= 100; ++male)
    for (int female = 0; male + female <= 100; ++female) {
      const Coding expected = male > 60 ? Coding::Masculine : female > 60 ? Coding::Feminine : Coding::Neutral;
      ASSERT_EQ(code_adjective(male, female), expected) << male << "/" << female;
    }
}

TEST(CodeAdjective, SixtyIsNeutral) {
  EXPECT_EQ(code_adjective(60, 40), Coding::Neutral);
  EXPECT_EQ(code_adjective(40, 60), Coding::Neutral);
  EXPECT_EQ(code_adjective(60.01, 39.99), Coding::Masculine);
  EXPECT_EQ(code_adjective(39.99, 60.01), Coding::Feminine);
}

TEST(CodeAdjective, RejectsOutOfRange) {
  EXPECT_THROW(code_adjective(-1, 10), std::invalid_argument);
  EXPECT_THROW(code_adjective(10, 100.5), std::invalid_argument);
}

TEST(Vocabularies, SizesAndLookup) {
  EXPECT_EQ(major_groups(Taxonomy::ISCO).size(), 10u);
  EXPECT_EQ(major_groups(Taxonomy::SOC).size(), 21u);
  EXPECT_TRUE(is_major_group(Taxonomy::SOC, "Arts, Design, Entertainment, Sports and Media"));
  EXPECT_FALSE(is_major_group(Taxonomy::ISCO, "Management"));
}

TEST(OccupationCorpus, SampleRoundTrips) {
  const auto corpus = load_occupation_corpus(mt::sample_data("occupations_sample.csv"));
  ASSERT_GE(corpus.size(), 40u);
  const auto text = format_occupation_corpus(corpus);
  EXPECT_EQ(parse_occupation_corpus(text, "rt"), corpus);
  EXPECT_EQ(text, mt::read_file(mt::sample_data("occupations_sample.csv")));
}

TEST(OccupationCorpus, SaveThenLoad) {
  mt::TempDir tmp;
  const auto corpus = mt::synthetic_corpus(64);
  save_occupation_corpus(corpus, tmp / "nested/occupations.csv");
  EXPECT_EQ(load_occupation_corpus(tmp / "nested/occupations.csv"), corpus);
}

TEST(OccupationCorpus, EmptyFileGivesEmptyCorpus) {
  EXPECT_TRUE(parse_occupation_corpus("", "empty").empty());
  const auto header_only = parse_occupation_corpus(
      "id,title_en,title_tr,isco_major,soc_major,female_pct_tr,female_pct_us\n", "header");
  EXPECT_TRUE(header_only.empty());
}

TEST(OccupationCorpus, ReportsEveryBadRowWithLine) {
  const std::string csv =
      "id,title_en,title_tr,isco_major,soc_major,female_pct_tr,female_pct_us\n"
      "a,A,A,Managers,Management,10,20\n"
      "b,B,B,Wizards,Management,10,20\n"
      "a,C,C,Managers,Legal,10,20\n"
      "d,D,D,Managers,Legal,140,20\n";
  try {
    parse_occupation_corpus(csv, "bad.csv");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 3u);
    EXPECT_EQ(e.issues()[0].line, 3u);
    EXPECT_EQ(e.issues()[1].line, 4u);
    EXPECT_EQ(e.issues()[2].line, 5u);
  }
}

TEST(OccupationCorpus, MissingColumnIsRejected) {
  EXPECT_THROW(parse_occupation_corpus("id,title_en\nx,y\n", "short"), ValidationError);
}

TEST(AdjectiveLexicon, SampleHasNinetySevenCodedEntries) {
  const auto lex = mt::sample_adjectives();
  ASSERT_EQ(lex.size(), 97u);
  for (const auto& a : lex) EXPECT_EQ(a.coding, code_adjective(a.pct_male, a.pct_female)) << a.surface_tr;
  auto find = [&](std::string_view s) {
    return std::find_if(lex.begin(), lex.end(), [&](const Adjective& a) { return a.surface_tr == s; });
  };
  ASSERT_NE(find("agresif"), lex.end());
  EXPECT_EQ(find("agresif")->coding, Coding::Masculine);
  ASSERT_NE(find("güçsüz"), lex.end());
  EXPECT_EQ(find("güçsüz")->coding, Coding::Feminine);
  EXPECT_EQ(parse_adjective_lexicon(format_adjective_lexicon(lex), "rt"), lex);
}

TEST(AdjectiveLexicon, RejectsSharesAboveHundredAndDuplicates) {
  EXPECT_THROW(parse_adjective_lexicon("surface_tr,gloss_en,pct_male,pct_female\niyi,good,70,40\n", "x"),
               ValidationError);
  EXPECT_THROW(parse_adjective_lexicon("surface_tr,gloss_en,pct_male,pct_female\niyi,good,1,1\niyi,good,1,1\n", "x"),
               ValidationError);
}

TEST(AsymmetryLexicon, SampleIsBalancedAndRoundTrips) {
  const auto lex = mt::sample_asymmetry();
  ASSERT_EQ(lex.subjects.size(), 4u);
  ASSERT_EQ(lex.predicates.size(), 30u);
  EXPECT_TRUE(predicate_balance_problems(lex.predicates).empty());
  EXPECT_EQ(parse_subject_words(format_subject_words(lex.subjects), "rt"), lex.subjects);
  EXPECT_EQ(parse_predicates(format_predicates(lex.predicates), "rt"), lex.predicates);
}

TEST(AsymmetryLexicon, ImbalanceIsReported) {
  auto preds = mt::sample_asymmetry().predicates;
  preds[0].stereotype = Stereotype::Feminine;
  EXPECT_EQ(predicate_balance_problems(preds).size(), 2u);
}

TEST(AsymmetryLexicon, MarkersMustDiffer) {
  EXPECT_THROW(parse_subject_words("lemma_tr,surface_en_male,surface_en_female,marker_male,marker_female\n"
                                   "kardeş,brother,sister,kız,KIZ\n",
                                   "x"),
               ValidationError);
}

TEST(WorkforceTable, SampleCoversEveryGroupWithNationalTotals) {
  const auto wf = load_workforce_stats(mt::sample_data("workforce.csv"));
  EXPECT_DOUBLE_EQ(wf.national_tr, 31.78);
  EXPECT_DOUBLE_EQ(wf.national_us, 47);
  for (auto t : {Taxonomy::ISCO, Taxonomy::SOC})
    for (const auto& g : major_groups(t)) EXPECT_TRUE(wf.find(t, std::string(g.title))) << g.title;
  EXPECT_EQ(parse_workforce_stats(format_workforce_stats(wf), "rt"), wf);
}

TEST(WorkforceTable, MissingNationalTotalIsRejected) {
  EXPECT_THROW(parse_workforce_stats("taxonomy,group,female_pct\nISCO,Managers,20\nNATIONAL,Turkey,31\n", "x"),
               ValidationError);
}
