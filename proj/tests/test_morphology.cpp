#include <gtest/gtest.h>

#include "mtbias/morphology.hpp"
#include "support/support.hpp"

using namespace mtbias;
namespace mt = mtbias::testing;

TEST(Copula, GoldTableCoversEveryHarmonyAndVoicing) {
  const auto rows = mt::read_tsv(mt::test_data("copula_gold.tsv"));
  ASSERT_GE(rows.size(), 30u);
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& row : rows) {
    EXPECT_EQ(morph::attach_copula_suffix(row.at(0)), row.at(1)) << row.at(0);
    cells.emplace(row.at(2), row.at(3));
  }
  EXPECT_EQ(cells.size(), 8u);
}

TEST(Copula, SuffixIsAlwaysThreeLetters) {
  for (const auto& row : mt::read_tsv(mt::test_data("copula_gold.tsv"))) {
    const auto out = morph::attach_copula_suffix(row.at(0));
    ASSERT_TRUE(out.starts_with(row.at(0)));
    EXPECT_EQ(text::code_points(out).size(), text::code_points(row.at(0)).size() + 3) << row.at(0);
    EXPECT_TRUE(out.ends_with("r"));
  }
}

TEST(Copula, RejectsWordsWithoutVowels) {
  EXPECT_THROW(morph::attach_copula_suffix("krt"), std::invalid_argument);
  EXPECT_THROW(morph::attach_copula_suffix("   "), std::invalid_argument);
}

TEST(Possessive, FirstPersonSingular) {
  EXPECT_EQ(morph::attach_possessive_1sg("kardeş"), "kardeşim");
  EXPECT_EQ(morph::attach_possessive_1sg("çocuk"), "çocuğum");
  EXPECT_EQ(morph::attach_possessive_1sg("yeğen"), "yeğenim");
  EXPECT_EQ(morph::attach_possessive_1sg("torun"), "torunum");
  EXPECT_EQ(morph::attach_possessive_1sg("teyze"), "teyzem");
  EXPECT_EQ(morph::attach_possessive_1sg("kitap"), "kitabım");
  EXPECT_EQ(morph::attach_possessive_1sg("ahenk"), "ahengim");
  EXPECT_EQ(morph::attach_possessive_1sg("top"), "topum");  // monosyllable keeps p
}

TEST(Plural, FollowsTwoWayHarmony) {
  EXPECT_EQ(morph::attach_plural("kardeş"), "kardeşler");
  EXPECT_EQ(morph::attach_plural("çocuk"), "çocuklar");
  EXPECT_EQ(morph::attach_plural("göz"), "gözler");
  EXPECT_EQ(morph::attach_plural("kol"), "kollar");
}
