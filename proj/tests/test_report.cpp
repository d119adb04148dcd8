#include <gtest/gtest.h>

#include <regex>

#include "mtbias/report.hpp"
#include "support/fixtures.hpp"

using namespace mtbias;
namespace mt = mtbias::testing;

namespace {

report::ojson planted_report() {
  static const auto json = [] {
    auto occ = mt::planted_transitions();
    auto asym = mt::planted_asymmetry();
    // a small, two-backend asymmetry set keeps the figures readable
    asym.records.resize(asym.probes.size() * 2);
    mt::PlantedSet merged;
    merged.corpus = occ.corpus;
    merged.asymmetry = asym.asymmetry;
    merged.probes = occ.probes;
    merged.probes.insert(merged.probes.end(), asym.probes.begin(), asym.probes.end());
    merged.records = occ.records;
    merged.records.insert(merged.records.end(), asym.records.begin(), asym.records.end());
    return report::ojson(to_json(merged.analyze_set()));
  }();
  return json;
}

std::string content_of(const report::FileSet& files, std::string_view name) {
  for (const auto& [n, c] : files)
    if (n == name) return c;
  throw std::out_of_range(std::string(name));
}

std::vector<std::string> data_values(const std::string& svg, std::string_view series) {
  std::vector<std::string> out;
  const std::regex rect("data-series=\"([^\"]*)\" data-value=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect); it != std::sregex_iterator(); ++it)
    if ((*it)[1].str() == series) out.push_back((*it)[2]);
  return out;
}

}  // namespace

TEST(Report, RenderingIsDeterministic) {
  const auto j = planted_report();
  EXPECT_EQ(report::render_tables(j), report::render_tables(j));
  EXPECT_EQ(report::render_summary(j), report::render_summary(j));
  EXPECT_EQ(report::render_figures(j).files, report::render_figures(j).files);
}

TEST(Report, TransitionTableCarriesCounts) {
  const auto files = report::render_tables(planted_report());
  const auto table = csv::parse(content_of(files, "tables/transitions.csv"));
  ASSERT_EQ(table.rows.size(), 4u);
  const auto& very_bad = table.rows[3].fields;
  EXPECT_EQ(very_bad.front(), "very-bad");
  EXPECT_NE(std::find(very_bad.begin(), very_bad.end(), "3815"), very_bad.end());
  EXPECT_NE(std::find(very_bad.begin(), very_bad.end(), "0.3815"), very_bad.end());
}

TEST(Report, SvgBarsCarryTheReportedValues) {
  const auto figures = report::render_figures(planted_report());
  EXPECT_TRUE(figures.notices.empty());
  const auto svg = content_of(figures.files, "figures/neutral_case.svg");
  EXPECT_EQ(data_values(svg, "b00"), (std::vector<std::string>{"50.00", "25.00"}));
  EXPECT_EQ(data_values(svg, "average").size(), 2u);
  const auto groups = content_of(figures.files, "figures/group_shares_isco.svg");
  const auto workforce = data_values(groups, "workforce");
  ASSERT_EQ(workforce.size(), kIscoMajorGroups.size() + 1);
  EXPECT_EQ(workforce.back(), "31.78");
}

TEST(Report, MissingSectionsAreSkippedWithNotices) {
  auto j = planted_report();
  j["asymmetry"] = nullptr;
  j["occupations"] = nullptr;
  const auto figures = report::render_figures(j);
  EXPECT_TRUE(figures.files.empty());
  EXPECT_EQ(figures.notices.size(), 2u);
}

TEST(RenderSvg, EscapesAndClampsAndMarksMissingValues) {
  report::BarChart chart{"c", "A & B", {"x<y", "z"}, {{"s\"1", {150.0, std::nullopt}}}};
  const auto svg = report::render_svg(chart);
  EXPECT_NE(svg.find("A &amp; B"), std::string::npos);
  EXPECT_NE(svg.find("x&lt;y"), std::string::npos);
  EXPECT_EQ(data_values(svg, "s&quot;1"), (std::vector<std::string>{"150.00", "null"}));
  EXPECT_EQ(svg.find("height=\"360.00\""), std::string::npos);  // clamped to the plot
}

TEST(Report, EmitWritesTablesSummaryAndFigures) {
  mt::TempDir tmp;
  const auto j = planted_report();
  const auto tables = report::emit_tables(j, tmp.path());
  const auto figures = report::emit_figures(j, tmp.path());
  for (const auto& [name, content] : tables) EXPECT_EQ(mt::read_file(tmp / name), content) << name;
  for (const auto& [name, content] : figures.files) EXPECT_EQ(mt::read_file(tmp / name), content) << name;
  EXPECT_TRUE(std::filesystem::exists(tmp / "summary.md"));
}
