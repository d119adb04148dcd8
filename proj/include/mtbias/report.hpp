#pragma once

// Renders a report.json document into CSV tables, a Markdown summary and SVG
// bar charts. Rendering only formats values already present in the report.

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/util/csv.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias::report {

using ojson = nlohmann::ordered_json;

namespace detail {

inline std::optional<double> value_of(const ojson& proportion) {
  const auto& v = proportion.at("value");
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

inline std::string fixed(std::optional<double> v, int decimals) {
  if (!v) return "";
  return fmt::format("{:.{}f}", *v, decimals);
}

inline std::string prop4(const ojson& p) { return fixed(value_of(p), 4); }

inline std::string pct2(const ojson& p) {
  auto v = value_of(p);
  return fixed(v ? std::optional<double>(*v * 100.0) : std::nullopt, 2);
}

inline std::string num(const ojson& p) { return std::to_string(p.at("num").get<long long>()); }
inline std::string den(const ojson& p) { return std::to_string(p.at("den").get<long long>()); }

inline std::string dashed(std::string s) {
  for (auto& c : s)
    if (c == '_') c = '-';
  return s;
}

inline std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) out += csv::format_row(r);
  return out;
}

inline std::vector<std::string> backends_of(const ojson& report) {
  return report.at("metadata").at("backends").get<std::vector<std::string>>();
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Named output file and its content, in emission order.
using FileSet = std::vector<std::pair<std::string, std::string>>;

inline FileSet render_tables(const ojson& report) {
  using namespace detail;
  FileSet files;

  if (const auto& occ = report.at("occupations"); !occ.is_null()) {
    std::vector<std::vector<std::string>> share{{"backend", "female_pct_gendered", "num", "den_gendered",
                                                 "female_pct_all", "num", "den_all"}};
    for (const auto& [b, s] : occ.at("female_share").items())
      share.push_back({b, pct2(s.at("gendered")), num(s.at("gendered")), den(s.at("gendered")), pct2(s.at("all")),
                       num(s.at("all")), den(s.at("all"))});
    files.emplace_back("tables/occupation_female_share.csv", csv_text(share));

    for (const auto& g : occ.at("group_shares")) {
      const auto tax = g.at("taxonomy").get<std::string>();
      std::vector<std::string> header{"group", "abbreviation", "occupations"};
      const auto backends = backends_of(report);
      for (const auto& b : backends) {
        header.push_back(b + "_female_pct");
        header.push_back(b + "_num");
        header.push_back(b + "_den");
      }
      for (const auto* h : {"average_female_pct", "average_num", "average_den", "workforce_female_pct"})
        header.emplace_back(h);
      std::vector<std::vector<std::string>> rows{header};
      for (const auto& row : g.at("rows")) {
        std::vector<std::string> r{row.at("group").get<std::string>(), row.at("abbreviation").get<std::string>(),
                                   std::to_string(row.at("occupations").get<long long>())};
        for (const auto& b : backends) {
          if (row.at("per_backend").contains(b)) {
            const auto& p = row.at("per_backend").at(b);
            r.insert(r.end(), {pct2(p), num(p), den(p)});
          } else {
            r.insert(r.end(), {"", "", ""});
          }
        }
        const auto& pooled = row.at("pooled");
        r.insert(r.end(), {pct2(pooled), num(pooled), den(pooled)});
        const auto& wf = row.at("workforce_female_pct");
        r.push_back(wf.is_null() ? "" : fixed(wf.get<double>(), 2));
        rows.push_back(std::move(r));
      }
      std::vector<std::string> national{"NATIONAL", "", ""};
      for (const auto& b : backends) {
        if (g.at("overall_per_backend").contains(b)) {
          const auto& p = g.at("overall_per_backend").at(b);
          national.insert(national.end(), {pct2(p), num(p), den(p)});
        } else {
          national.insert(national.end(), {"", "", ""});
        }
      }
      const auto& op = g.at("overall_pooled");
      national.insert(national.end(), {pct2(op), num(op), den(op), fixed(g.at("national_workforce_pct").get<double>(), 2)});
      rows.push_back(std::move(national));
      files.emplace_back("tables/group_shares_" + text::ascii_lower(tax) + ".csv", csv_text(rows));
    }

    std::vector<std::vector<std::string>> tr{
        {"adjective", "she_to_he", "she_to_he_num", "she_to_he_den", "he_to_she", "he_to_she_num", "he_to_she_den"}};
    for (const auto& row : occ.at("transitions").at("rows")) {
      const auto& sh = row.at("she_to_he");
      const auto& hs = row.at("he_to_she");
      tr.push_back({dashed(row.at("quality").get<std::string>()), prop4(sh), num(sh), den(sh), prop4(hs), num(hs),
                    den(hs)});
    }
    files.emplace_back("tables/transitions.csv", csv_text(tr));
  }

  if (const auto& adj = report.at("adjectives"); !adj.is_null()) {
    std::vector<std::vector<std::string>> share{{"backend", "female_pct_gendered", "num", "den_gendered",
                                                 "female_pct_all", "num", "den_all"}};
    for (const auto& [b, s] : adj.at("female_share").items())
      share.push_back({b, pct2(s.at("gendered")), num(s.at("gendered")), den(s.at("gendered")), pct2(s.at("all")),
                       num(s.at("all")), den(s.at("all"))});
    files.emplace_back("tables/adjective_female_share.csv", csv_text(share));

    const auto& x = adj.at("coding_crosstab");
    std::vector<std::vector<std::string>> cross{{"coding", "female", "male"}};
    for (const auto& [coding, c] : x.at("counts").items())
      cross.push_back({coding, std::to_string(c.at("female").get<long long>()),
                       std::to_string(c.at("male").get<long long>())});
    cross.push_back({"unassigned", std::to_string(x.at("unassigned").get<long long>()), ""});
    files.emplace_back("tables/coding_crosstab.csv", csv_text(cross));

    std::vector<std::vector<std::string>> coded{{"measure", "pct", "num", "den"}};
    for (const auto* key : {"female_with_feminine", "male_with_masculine"}) {
      const auto& p = x.at(key);
      coded.push_back({key, pct2(p), num(p), den(p)});
    }
    files.emplace_back("tables/coding_shares.csv", csv_text(coded));

    const auto& ph = adj.at("personhood_shift");
    std::vector<std::vector<std::string>> person{{"direction", "proportion", "pct", "num", "den"}};
    for (const auto* key : {"female_to_male", "male_to_female"}) {
      const auto& p = ph.at(key);
      person.push_back({key, prop4(p), pct2(p), num(p), den(p)});
    }
    files.emplace_back("tables/personhood_shift.csv", csv_text(person));
  }

  if (const auto& asym = report.at("asymmetry"); !asym.is_null()) {
    std::vector<std::vector<std::string>> by_gender{
        {"backend", "subject_gender", "neutral_pct", "neutral_num", "den", "marked_pct", "marked_num"}};
    std::vector<std::vector<std::string>> by_cell{{"backend", "subject_gender", "stereotype", "neutral_pct",
                                                   "neutral_num", "den", "marked_pct", "marked_num"}};
    auto add = [&](const std::string& name, const ojson& shares) {
      for (const auto& [g, c] : shares.at("by_gender").items())
        by_gender.push_back({name, g, pct2(c.at("neutral")), num(c.at("neutral")), den(c.at("neutral")),
                             pct2(c.at("marked")), num(c.at("marked"))});
      for (const auto& c : shares.at("by_gender_stereotype"))
        by_cell.push_back({name, c.at("subject_gender").get<std::string>(), c.at("stereotype").get<std::string>(),
                           pct2(c.at("neutral")), num(c.at("neutral")), den(c.at("neutral")), pct2(c.at("marked")),
                           num(c.at("marked"))});
    };
    for (const auto& [b, shares] : asym.at("per_backend").items()) add(b, shares);
    add("average", asym.at("pooled"));
    files.emplace_back("tables/asymmetry_by_gender.csv", csv_text(by_gender));
    files.emplace_back("tables/asymmetry_by_stereotype.csv", csv_text(by_cell));
  }

  if (const auto& tests = report.at("tests"); !tests.empty()) {
    std::vector<std::vector<std::string>> rows{
        {"name", "direction", "n_a", "ones_a", "n_b", "ones_b", "t", "df", "p", "note"}};
    for (const auto& t : tests) {
      const auto& a = t.at("sample_a");
      const auto& b = t.at("sample_b");
      rows.push_back({t.at("name").get<std::string>(), t.at("direction").get<std::string>(),
                      std::to_string(a.at("n").get<long long>()), std::to_string(a.at("ones").get<long long>()),
                      std::to_string(b.at("n").get<long long>()), std::to_string(b.at("ones").get<long long>()),
                      t.at("t").is_null() ? "" : fmt::format("{:.6f}", t.at("t").get<double>()),
                      t.at("df").is_null() ? "" : std::to_string(t.at("df").get<long long>()),
                      t.at("p").is_null() ? "" : fmt::format("{:.6g}", t.at("p").get<double>()),
                      t.at("note").is_null() ? "" : t.at("note").get<std::string>()});
    }
    files.emplace_back("tables/tests.csv", csv_text(rows));
  }
  return files;
}

inline std::string render_summary(const ojson& report) {
  using namespace detail;
  const auto& meta = report.at("metadata");
  std::string md = "# Analysis summary\n\n";
  md += fmt::format("- tool version: {}\n", meta.at("tool_version").get<std::string>());
  md += fmt::format("- backends: {}\n", text::join(meta.at("backends").get<std::vector<std::string>>(), ", "));
  md += fmt::format("- seed: {}\n", meta.at("seed").is_null() ? "none" : meta.at("seed").dump());
  md += fmt::format("- denominator: {}\n", meta.at("denominator").get<std::string>());
  for (const auto& [k, v] : meta.at("input_hashes").items()) md += fmt::format("- {}: `{}`\n", k, v.get<std::string>());

  auto cell = [](const std::string& formatted, const ojson& p) {
    if (formatted.empty()) return std::string("n/a");
    return fmt::format("{} ({}/{})", formatted, num(p), den(p));
  };

  if (const auto& occ = report.at("occupations"); !occ.is_null()) {
    md += "\n## Occupations: female pronoun share (base template)\n\n";
    md += "| Backend | Gendered only | All probes |\n|---|---|---|\n";
    for (const auto& [b, s] : occ.at("female_share").items())
      md += fmt::format("| {} | {} | {} |\n", b, cell(pct2(s.at("gendered")), s.at("gendered")),
                        cell(pct2(s.at("all")), s.at("all")));
    for (const auto& g : occ.at("group_shares")) {
      md += fmt::format("\n### {} major groups\n\n", g.at("taxonomy").get<std::string>());
      md += "| Group | Female % (average) | Workforce % |\n|---|---|---|\n";
      for (const auto& row : g.at("rows")) {
        const auto& wf = row.at("workforce_female_pct");
        md += fmt::format("| {} | {} | {} |\n", row.at("group").get<std::string>(),
                          cell(pct2(row.at("pooled")), row.at("pooled")),
                          wf.is_null() ? "n/a" : fixed(wf.get<double>(), 2));
      }
      md += fmt::format("| National | {} | {} |\n", cell(pct2(g.at("overall_pooled")), g.at("overall_pooled")),
                        fixed(g.at("national_workforce_pct").get<double>(), 2));
    }
    md += "\n## Pronoun changes under quality adjectives\n\n| Adjective | She→He | He→She |\n|---|---|---|\n";
    for (const auto& row : occ.at("transitions").at("rows"))
      md += fmt::format("| {} | {} | {} |\n", dashed(row.at("quality").get<std::string>()),
                        cell(prop4(row.at("she_to_he")), row.at("she_to_he")),
                        cell(prop4(row.at("he_to_she")), row.at("he_to_she")));
  }

  if (const auto& adj = report.at("adjectives"); !adj.is_null()) {
    const auto& x = adj.at("coding_crosstab");
    md += "\n## Adjective coding vs assigned pronoun\n\n| Coding | Female | Male |\n|---|---|---|\n";
    for (const auto& [coding, c] : x.at("counts").items())
      md += fmt::format("| {} | {} | {} |\n", coding, c.at("female").get<long long>(), c.at("male").get<long long>());
    md += fmt::format("\nFemale-assigned with feminine-coded adjective: {}\n",
                      cell(pct2(x.at("female_with_feminine")), x.at("female_with_feminine")));
    md += fmt::format("Male-assigned with masculine-coded adjective: {}\n",
                      cell(pct2(x.at("male_with_masculine")), x.at("male_with_masculine")));
    const auto& ph = adj.at("personhood_shift");
    md += "\n## Personhood shift\n\n";
    md += fmt::format("- female to male: {}\n", cell(pct2(ph.at("female_to_male")), ph.at("female_to_male")));
    md += fmt::format("- male to female: {}\n", cell(pct2(ph.at("male_to_female")), ph.at("male_to_female")));
  }

  if (const auto& asym = report.at("asymmetry"); !asym.is_null()) {
    const auto& pooled = asym.at("pooled");
    md += "\n## Asymmetrical gender marking (average over backends)\n\n";
    md += "| Subject | Neutral case % | Marked % |\n|---|---|---|\n";
    for (const auto& [g, c] : pooled.at("by_gender").items())
      md += fmt::format("| {} | {} | {} |\n", g, cell(pct2(c.at("neutral")), c.at("neutral")),
                        cell(pct2(c.at("marked")), c.at("marked")));
    md += "\n| Subject | Predicate | Neutral case % | Marked % |\n|---|---|---|---|\n";
    for (const auto& c : pooled.at("by_gender_stereotype"))
      md += fmt::format("| {} | {} | {} | {} |\n", c.at("subject_gender").get<std::string>(),
                        c.at("stereotype").get<std::string>(), cell(pct2(c.at("neutral")), c.at("neutral")),
                        cell(pct2(c.at("marked")), c.at("marked")));
  }

  if (const auto& tests = report.at("tests"); !tests.empty()) {
    md += "\n## One-sided pooled t-tests\n\n| Test | Direction | t | df | p |\n|---|---|---|---|---|\n";
    for (const auto& t : tests) {
      if (t.at("p").is_null()) {
        md += fmt::format("| {} | {} | n/a | n/a | n/a ({}) |\n", t.at("name").get<std::string>(),
                          t.at("direction").get<std::string>(), t.at("note").get<std::string>());
      } else {
        md += fmt::format("| {} | {} | {:.4f} | {} | {:.4g} |\n", t.at("name").get<std::string>(),
                          t.at("direction").get<std::string>(), t.at("t").get<double>(), t.at("df").get<long long>(),
                          t.at("p").get<double>());
      }
    }
    md += "\nSample constructions:\n\n";
    for (const auto& t : tests)
      md += fmt::format("- {}: {}\n", t.at("name").get<std::string>(), t.at("construction").get<std::string>());
  }
  return md;
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::string name;
  std::vector<std::optional<double>> values;  // one per category, percent
};

struct BarChart {
  std::string id;
  std::string title;
  std::vector<std::string> categories;
  std::vector<Series> series;
};

inline std::string render_svg(const BarChart& chart) {
  using detail::xml_escape;
  constexpr int bar_w = 18, gap = 24, left = 60, top = 40, plot_h = 240, bottom = 110;
  static constexpr const char* palette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948",
                                            "#b07aa1", "#9c755f"};
  const int group_w = static_cast<int>(chart.series.size()) * bar_w;
  const int plot_w = static_cast<int>(chart.categories.size()) * (group_w + gap) + gap;
  const int width = left + plot_w + 160;
  const int height = top + plot_h + bottom;

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "data-chart=\"{}\">\n",
      width, height, width, height, xml_escape(chart.id));
  s += fmt::format("<title>{}</title>\n", xml_escape(chart.title));
  s += fmt::format("<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", left,
                   xml_escape(chart.title));
  for (int tick = 0; tick <= 100; tick += 25) {
    const int y = top + plot_h - tick * plot_h / 100;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ddd\"/>\n", left, y, left + plot_w, y);
    s += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}%</text>\n",
        left - 4, y + 3, tick);
  }
  for (std::size_t c = 0; c < chart.categories.size(); ++c) {
    const int gx = left + gap + static_cast<int>(c) * (group_w + gap);
    s += fmt::format("<g data-category=\"{}\">\n", xml_escape(chart.categories[c]));
    for (std::size_t k = 0; k < chart.series.size(); ++k) {
      const auto& v = chart.series[k].values.at(c);
      const double pct = v ? std::clamp(*v, 0.0, 100.0) : 0.0;
      const double h = pct * plot_h / 100.0;
      s += fmt::format(
          "<rect x=\"{}\" y=\"{:.2f}\" width=\"{}\" height=\"{:.2f}\" fill=\"{}\" data-series=\"{}\" "
          "data-value=\"{}\"/>\n",
          gx + static_cast<int>(k) * bar_w, top + plot_h - h, bar_w - 2, h, palette[k % std::size(palette)],
          xml_escape(chart.series[k].name), v ? fmt::format("{:.2f}", *v) : std::string("null"));
    }
    s += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" "
        "transform=\"rotate(40 {} {})\">{}</text>\n",
        gx, top + plot_h + 14, gx, top + plot_h + 14, xml_escape(chart.categories[c]));
    s += "</g>\n";
  }
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const int y = top + 10 + static_cast<int>(k) * 16;
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", left + plot_w + 12, y,
                     palette[k % std::size(palette)]);
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                     left + plot_w + 26, y + 9, xml_escape(chart.series[k].name));
  }
  s += "</svg>\n";
  return s;
}

namespace detail {

inline std::optional<double> pct_of(const ojson& p) {
  auto v = value_of(p);
  if (!v) return std::nullopt;
  return *v * 100.0;
}

// Per-backend series, plus an average series when there is more than one backend.
inline std::vector<Series> backend_series(const std::vector<std::string>& backends, std::size_t categories) {
  std::vector<Series> out;
  for (const auto& b : backends) out.push_back({b, std::vector<std::optional<double>>(categories)});
  if (backends.size() > 1) out.push_back({"average", std::vector<std::optional<double>>(categories)});
  return out;
}

}  // namespace detail

struct FigureOutput {
  FileSet files;
  std::vector<std::string> notices;  // figures skipped and why
};

inline FigureOutput render_figures(const ojson& report) {
  using namespace detail;
  FigureOutput out;

  const auto& occ = report.at("occupations");
  if (occ.is_null()) {
    out.notices.push_back("group-share figures skipped: report has no occupation section");
  } else {
    for (const auto& g : occ.at("group_shares")) {
      const auto tax = g.at("taxonomy").get<std::string>();
      std::vector<std::string> backends;
      for (const auto& [b, _] : g.at("overall_per_backend").items()) backends.push_back(b);
      BarChart chart;
      chart.id = "group_shares_" + text::ascii_lower(tax);
      chart.title = "Female pronoun share vs workforce by " + tax + " major group";
      const auto& rows = g.at("rows");
      for (const auto& row : rows) chart.categories.push_back(row.at("abbreviation").get<std::string>());
      chart.categories.push_back("National");
      chart.series = backend_series(backends, chart.categories.size());
      chart.series.push_back({"workforce", std::vector<std::optional<double>>(chart.categories.size())});
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        for (std::size_t k = 0; k < backends.size(); ++k)
          chart.series[k].values[i] = pct_of(row.at("per_backend").at(backends[k]));
        if (backends.size() > 1) chart.series[backends.size()].values[i] = pct_of(row.at("pooled"));
        const auto& wf = row.at("workforce_female_pct");
        if (!wf.is_null()) chart.series.back().values[i] = wf.get<double>();
      }
      const std::size_t nat = rows.size();
      for (std::size_t k = 0; k < backends.size(); ++k)
        chart.series[k].values[nat] = pct_of(g.at("overall_per_backend").at(backends[k]));
      if (backends.size() > 1) chart.series[backends.size()].values[nat] = pct_of(g.at("overall_pooled"));
      chart.series.back().values[nat] = g.at("national_workforce_pct").get<double>();
      out.files.emplace_back("figures/group_shares_" + text::ascii_lower(tax) + ".svg", render_svg(chart));
    }
  }

  const auto& asym = report.at("asymmetry");
  if (asym.is_null()) {
    out.notices.push_back("asymmetry figures skipped: report has no asymmetry section");
  } else {
    const auto backends = asym.at("backends").get<std::vector<std::string>>();
    auto fill = [&](BarChart& chart, auto&& pick) {
      chart.series = backend_series(backends, chart.categories.size());
      for (std::size_t i = 0; i < chart.categories.size(); ++i) {
        for (std::size_t k = 0; k < backends.size(); ++k)
          chart.series[k].values[i] = pct_of(pick(asym.at("per_backend").at(backends[k]), i));
        if (backends.size() > 1) chart.series[backends.size()].values[i] = pct_of(pick(asym.at("pooled"), i));
      }
    };

    BarChart neutral;
    neutral.id = "neutral_case";
    neutral.title = "Translations using the neutral case, by subject gender";
    neutral.categories = {"male", "female"};
    fill(neutral, [&](const ojson& shares, std::size_t i) -> const ojson& {
      return shares.at("by_gender").at(neutral.categories[i]).at("neutral");
    });
    out.files.emplace_back("figures/neutral_case.svg", render_svg(neutral));

    BarChart unpreserved;
    unpreserved.id = "unpreserved";
    unpreserved.title = "Neutral case (gender not preserved) by subject gender and predicate stereotype";
    const auto& cells = asym.at("pooled").at("by_gender_stereotype");
    for (const auto& c : cells)
      unpreserved.categories.push_back(c.at("subject_gender").get<std::string>() + " / " +
                                       c.at("stereotype").get<std::string>());
    fill(unpreserved, [&](const ojson& shares, std::size_t i) -> const ojson& {
      return shares.at("by_gender_stereotype").at(i).at("neutral");
    });
    out.files.emplace_back("figures/unpreserved.svg", render_svg(unpreserved));
  }
  return out;
}

inline void write_files(const FileSet& files, const std::filesystem::path& out_dir) {
  for (const auto& [name, content] : files) mtbias::detail::write_file(out_dir / name, content);
}

/// Writes tables/*.csv and summary.md.
inline FileSet emit_tables(const ojson& report, const std::filesystem::path& out_dir) {
  auto files = render_tables(report);
  files.emplace_back("summary.md", render_summary(report));
  write_files(files, out_dir);
  return files;
}

inline FigureOutput emit_figures(const ojson& report, const std::filesystem::path& out_dir) {
  auto figures = render_figures(report);
  write_files(figures.files, out_dir);
  return figures;
}

}  // namespace mtbias::report
