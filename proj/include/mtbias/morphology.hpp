#pragma once

// The small slice of Turkish suffix morphology the probe templates and the
// mock backend need: the -DIr copula, the 1sg possessive and the -lAr plural.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtbias/util/text.hpp"

namespace mtbias::morph {

enum class Harmony { BackUnrounded, FrontUnrounded, BackRounded, FrontRounded };

inline std::optional<Harmony> vowel_class(char32_t c) {
  switch (c) {
    case U'a': case U'ı': case U'â': return Harmony::BackUnrounded;
    case U'e': case U'i': case U'î': return Harmony::FrontUnrounded;
    case U'o': case U'u': case U'û': return Harmony::BackRounded;
    case U'ö': case U'ü': return Harmony::FrontRounded;
    default: return std::nullopt;
  }
}

inline bool is_vowel(char32_t c) { return vowel_class(c).has_value(); }

/// The voiceless consonants that devoice a following D (f s t k ç ş h p).
inline bool is_voiceless(char32_t c) {
  switch (c) {
    case U'f': case U's': case U't': case U'k': case U'ç': case U'ş': case U'h': case U'p': return true;
    default: return false;
  }
}

/// High vowel selected by four-way harmony: a,ı -> ı; e,i -> i; o,u -> u; ö,ü -> ü.
inline char32_t high_vowel(Harmony h) {
  switch (h) {
    case Harmony::BackUnrounded: return U'ı';
    case Harmony::FrontUnrounded: return U'i';
    case Harmony::BackRounded: return U'u';
    case Harmony::FrontRounded: return U'ü';
  }
  return U'i';
}

inline bool is_back(Harmony h) { return h == Harmony::BackUnrounded || h == Harmony::BackRounded; }

namespace detail {

struct Word {
  std::vector<char32_t> cps;
  Harmony last_vowel;
  std::size_t vowel_count;
};

inline Word analyze(std::string_view word, std::string_view what) {
  const auto trimmed = text::trim(word);
  Word w{text::code_points(trimmed), Harmony::FrontUnrounded, 0};
  std::optional<Harmony> last;
  for (char32_t c : w.cps) {
    if (auto h = vowel_class(c)) {
      last = h;
      ++w.vowel_count;
    }
  }
  if (!last) throw std::invalid_argument(std::string(what) + ": '" + std::string(word) + "' contains no vowel");
  w.last_vowel = *last;
  return w;
}

}  // namespace detail

/// Appends the -DIr copula: "agresif" -> "agresiftir", "iyi" -> "iyidir".
inline std::string attach_copula_suffix(std::string_view adjective) {
  auto w = detail::analyze(adjective, "attach_copula_suffix");
  const char32_t last = w.cps.back();
  w.cps.push_back(is_voiceless(last) ? U't' : U'd');
  w.cps.push_back(high_vowel(w.last_vowel));
  w.cps.push_back(U'r');
  return text::to_utf8(w.cps);
}

/// First person singular possessive ("my X"): kardeş -> kardeşim,
/// çocuk -> çocuğum, teyze -> teyzem. Final p/ç/t/k soften in polysyllabic stems.
inline std::string attach_possessive_1sg(std::string_view noun) {
  auto w = detail::analyze(noun, "attach_possessive_1sg");
  char32_t& last = w.cps.back();
  if (is_vowel(last)) {
    w.cps.push_back(U'm');
    return text::to_utf8(w.cps);
  }
  if (w.vowel_count > 1) {
    const bool after_n = w.cps.size() >= 2 && w.cps[w.cps.size() - 2] == U'n';
    switch (last) {
      case U'p': last = U'b'; break;
      case U'ç': last = U'c'; break;
      case U't': last = U'd'; break;
      case U'k': last = after_n ? U'g' : U'ğ'; break;
      default: break;
    }
  }
  w.cps.push_back(high_vowel(w.last_vowel));
  w.cps.push_back(U'm');
  return text::to_utf8(w.cps);
}

/// -lAr plural: kardeş -> kardeşler, çocuk -> çocuklar.
inline std::string attach_plural(std::string_view noun) {
  auto w = detail::analyze(noun, "attach_plural");
  w.cps.push_back(U'l');
  w.cps.push_back(is_back(w.last_vowel) ? U'a' : U'e');
  w.cps.push_back(U'r');
  return text::to_utf8(w.cps);
}

}  // namespace mtbias::morph
