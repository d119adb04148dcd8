#pragma once

// Gender-signal extraction: English subject pronouns in TR->EN output and
// overt Turkish gender markers in EN->TR output.

#include <unicode/uchar.h>

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

enum class PronounClass { Male, Female, NeutralThey, None };
enum class MarkingClass { Neutral, MarkedMatching, MarkedOpposite, SubjectNotFound };

inline std::string_view to_string(PronounClass c) {
  switch (c) {
    case PronounClass::Male: return "Male";
    case PronounClass::Female: return "Female";
    case PronounClass::NeutralThey: return "NeutralThey";
    case PronounClass::None: return "None";
  }
  return "?";
}

inline std::string_view to_string(MarkingClass c) {
  switch (c) {
    case MarkingClass::Neutral: return "Neutral";
    case MarkingClass::MarkedMatching: return "MarkedMatching";
    case MarkingClass::MarkedOpposite: return "MarkedOpposite";
    case MarkingClass::SubjectNotFound: return "SubjectNotFound";
  }
  return "?";
}

inline std::optional<PronounClass> parse_pronoun_class(std::string_view s) {
  for (auto c : {PronounClass::Male, PronounClass::Female, PronounClass::NeutralThey, PronounClass::None})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

inline std::optional<MarkingClass> parse_marking_class(std::string_view s) {
  for (auto c : {MarkingClass::Neutral, MarkingClass::MarkedMatching, MarkingClass::MarkedOpposite,
                 MarkingClass::SubjectNotFound})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

using text::fold_turkish;

/// Splits on whitespace and punctuation. Letters, digits and combining marks
/// stay inside words.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : text::code_points(s)) {
    const auto c = static_cast<UChar32>(cp);
    if (u_isalnum(c) || u_getCombiningClass(c) != 0 || u_charType(c) == U_NON_SPACING_MARK) {
      text::append_utf8(current, cp);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct PronounDetection {
  PronounClass cls = PronounClass::None;
  std::optional<std::string> token;
};

/// First subject pronoun wins: he -> Male, she -> Female, they -> NeutralThey.
inline PronounDetection classify_pronoun_detailed(std::string_view english_text) {
  for (const auto& token : tokenize(english_text)) {
    const auto lower = text::ascii_lower(token);
    if (lower == "he") return {PronounClass::Male, token};
    if (lower == "she") return {PronounClass::Female, token};
    if (lower == "they") return {PronounClass::NeutralThey, token};
  }
  return {};
}

inline PronounClass classify_pronoun(std::string_view english_text) {
  return classify_pronoun_detailed(english_text).cls;
}

struct MarkerWord {
  std::string_view word;
  Gender gender;
};

/// Gender words recognized in front of any subject, beyond the subject's own markers.
inline constexpr std::array<MarkerWord, 7> kGlobalMarkers{{
    {"kız", Gender::Female},
    {"erkek", Gender::Male},
    {"kadın", Gender::Female},
    {"adam", Gender::Male},
    {"bayan", Gender::Female},
    {"bay", Gender::Male},
    {"hanım", Gender::Female},
}};

/// Tokens inspected in front of the subject; 2 tolerates an intervening determiner.
inline constexpr std::size_t kMarkerWindow = 2;

struct MarkingDetection {
  MarkingClass cls = MarkingClass::SubjectNotFound;
  std::optional<std::string> matched_token;
  std::optional<std::string> marker_token;
};

namespace detail {

inline std::optional<Gender> marker_gender(const std::string& folded, const SubjectWord& subject) {
  if (folded == fold_turkish(subject.marker_female)) return Gender::Female;
  if (folded == fold_turkish(subject.marker_male)) return Gender::Male;
  for (const auto& m : kGlobalMarkers)
    if (folded == m.word) return m.gender;
  return std::nullopt;
}

/// The lemma plus its softened stem: suffixed forms such as çocuğum or kitabım
/// replace a final p/ç/t/k with b/c/d/ğ (g after n).
inline std::vector<std::string> subject_stems(const std::string& folded_lemma) {
  std::vector<std::string> stems{folded_lemma};
  auto cps = text::code_points(folded_lemma);
  if (cps.size() < 2) return stems;
  const bool after_n = cps[cps.size() - 2] == U'n';
  char32_t& last = cps.back();
  switch (last) {
    case U'p': last = U'b'; break;
    case U'ç': last = U'c'; break;
    case U't': last = U'd'; break;
    case U'k': last = after_n ? U'g' : U'ğ'; break;
    default: return stems;
  }
  stems.push_back(text::to_utf8(cps));
  return stems;
}

}  // namespace detail

inline MarkingDetection detect_gender_marking_detailed(std::string_view turkish_text, const SubjectWord& subject,
                                                       Gender subject_gender) {
  if (subject.lemma_tr.empty()) throw std::invalid_argument("detect_gender_marking: empty subject lemma");
  const auto stems = detail::subject_stems(fold_turkish(subject.lemma_tr));
  const auto tokens = tokenize(turkish_text);

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto folded = fold_turkish(tokens[i]);
    if (std::none_of(stems.begin(), stems.end(), [&](const auto& s) { return folded.starts_with(s); })) continue;
    MarkingDetection result{MarkingClass::Neutral, tokens[i], std::nullopt};
    for (std::size_t back = 1; back <= kMarkerWindow && back <= i; ++back) {
      const auto& candidate = tokens[i - back];
      if (auto g = detail::marker_gender(fold_turkish(candidate), subject)) {
        result.cls = *g == subject_gender ? MarkingClass::MarkedMatching : MarkingClass::MarkedOpposite;
        result.marker_token = candidate;
        break;
      }
    }
    return result;
  }
  return {};
}

inline MarkingClass detect_gender_marking(std::string_view turkish_text, const SubjectWord& subject,
                                          Gender subject_gender) {
  return detect_gender_marking_detailed(turkish_text, subject, subject_gender).cls;
}

}  // namespace mtbias
