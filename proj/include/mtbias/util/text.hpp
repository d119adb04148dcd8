#pragma once

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mtbias::text {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep, bool trim_parts = true) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto part = s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    out.emplace_back(trim_parts ? trim(part) : part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Comma-separated list with empty items dropped.
inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  for (auto& item : split(s, sep))
    if (!item.empty()) out.push_back(std::move(item));
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c); });
  return out;
}

/// Decodes UTF-8 into code points. Ill-formed bytes decode as U+FFFD.
inline std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(p, i, length, c);
    out.push_back(c < 0 ? 0xFFFD : static_cast<char32_t>(c));
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline std::string to_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

/// Lowercasing with the Turkish dotted/dotless I rules: U+0130 -> i, I -> U+0131.
/// Every other code point takes its default Unicode simple lowercase mapping.
inline std::string fold_turkish(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : code_points(s)) {
    if (cp == U'I')
      append_utf8(out, U'ı');
    else if (cp == U'İ')
      append_utf8(out, U'i');
    else
      append_utf8(out, static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp))));
  }
  return out;
}

/// Uppercases the first code point using the Turkish i/ı rules.
inline std::string capitalize_turkish(std::string_view s) {
  auto cps = code_points(s);
  if (cps.empty()) return {};
  if (cps[0] == U'i')
    cps[0] = U'İ';
  else if (cps[0] == U'ı')
    cps[0] = U'I';
  else
    cps[0] = static_cast<char32_t>(u_toupper(static_cast<UChar32>(cps[0])));
  return to_utf8(cps);
}

/// Unicode NFC normalization.
inline std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  const auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  const auto normalized = normalizer->normalize(input, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

/// Collapses internal whitespace runs and trims; used for title comparison.
inline std::string squeeze_spaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : trim(s)) {
    if (c == ' ' || c == '\t') {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

/// Lowercase ASCII slug: runs of anything but [a-z0-9] become '-'. Non-ASCII
/// Turkish letters are transliterated first so slugs stay readable.
inline std::string slug(std::string_view s) {
  std::string out;
  bool dash = false;
  for (char32_t cp : code_points(fold_turkish(s))) {
    char mapped = 0;
    switch (cp) {
      case U'ç': mapped = 'c'; break;  // ç
      case U'ğ': mapped = 'g'; break;  // ğ
      case U'ı': mapped = 'i'; break;  // ı
      case U'ö': mapped = 'o'; break;  // ö
      case U'ş': mapped = 's'; break;  // ş
      case U'ü': mapped = 'u'; break;  // ü
      case U'â': mapped = 'a'; break;
      case U'î': mapped = 'i'; break;
      case U'û': mapped = 'u'; break;
      default:
        if ((cp >= U'a' && cp <= U'z') || (cp >= U'0' && cp <= U'9')) mapped = static_cast<char>(cp);
    }
    if (mapped) {
      if (dash && !out.empty()) out.push_back('-');
      dash = false;
      out.push_back(mapped);
    } else {
      dash = true;
    }
  }
  return out;
}

}  // namespace mtbias::text
