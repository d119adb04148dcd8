#pragma once

// Applies the detectors to translation records and (de)serializes the result.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtbias/corpus.hpp"
#include "mtbias/detect.hpp"
#include "mtbias/errors.hpp"
#include "mtbias/probegen.hpp"
#include "mtbias/translate.hpp"
#include "mtbias/util/text.hpp"

namespace mtbias {

using Signal = std::variant<PronounClass, MarkingClass>;

struct Detection {
  std::string probe_id;
  std::string backend_id;
  Signal signal;
  std::optional<std::string> matched_token;
  std::optional<std::string> marker_token;

  bool operator==(const Detection&) const = default;
};

inline std::string_view signal_name(const Signal& s) {
  return std::visit([](auto c) { return to_string(c); }, s);
}

/// Runs the matching detector on every successful record. Failed records
/// yield no detection; their count stays visible in the record stream.
inline std::vector<Detection> detect_records(const std::vector<TranslationRecord>& records,
                                             const std::vector<Probe>& probes,
                                             const std::vector<SubjectWord>& subjects) {
  std::map<std::string, const Probe*, std::less<>> by_id;
  for (const auto& p : probes) by_id.emplace(p.id, &p);
  std::map<std::string, const SubjectWord*, std::less<>> subject_by_lemma;
  for (const auto& s : subjects) subject_by_lemma.emplace(s.lemma_tr, &s);

  std::vector<Issue> issues;
  std::vector<Detection> out;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    auto it = by_id.find(r.probe_id);
    if (it == by_id.end()) {
      issues.push_back({"records", 0, "probe_id", "record references unknown probe " + r.probe_id});
      continue;
    }
    const Probe& probe = *it->second;
    Detection d{r.probe_id, r.backend_id, PronounClass::None, std::nullopt, std::nullopt};
    if (probe.experiment == Experiment::Asymmetry) {
      const auto& lemma = probe.slot_value(slot::kSubjectLemma);
      auto sit = subject_by_lemma.find(lemma);
      if (sit == subject_by_lemma.end()) {
        issues.push_back({"records", 0, "subject_lemma", "probe " + probe.id + " uses unknown subject " + lemma});
        continue;
      }
      const auto gender = parse_gender(probe.slot_value(slot::kSubjectGender));
      if (!gender) {
        issues.push_back({"records", 0, "subject_gender", "probe " + probe.id + " has a bad subject gender"});
        continue;
      }
      auto m = detect_gender_marking_detailed(*r.target_text, *sit->second, *gender);
      d.signal = m.cls;
      d.matched_token = std::move(m.matched_token);
      d.marker_token = std::move(m.marker_token);
    } else {
      auto p = classify_pronoun_detailed(*r.target_text);
      d.signal = p.cls;
      d.matched_token = std::move(p.token);
    }
    out.push_back(std::move(d));
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

inline nlohmann::ordered_json to_json(const Detection& d) {
  nlohmann::ordered_json j;
  j["probe_id"] = d.probe_id;
  j["backend"] = d.backend_id;
  j["class"] = signal_name(d.signal);
  j["matched_token"] = d.matched_token ? nlohmann::ordered_json(*d.matched_token) : nlohmann::ordered_json(nullptr);
  j["marker_token"] = d.marker_token ? nlohmann::ordered_json(*d.marker_token) : nlohmann::ordered_json(nullptr);
  return j;
}

inline Detection detection_from_json(const nlohmann::json& j) {
  Detection d;
  d.probe_id = j.at("probe_id").get<std::string>();
  d.backend_id = j.at("backend").get<std::string>();
  const auto cls = j.at("class").get<std::string>();
  if (auto p = parse_pronoun_class(cls)) d.signal = *p;
  else if (auto m = parse_marking_class(cls)) d.signal = *m;
  else throw std::invalid_argument("unknown detection class " + cls);
  if (!j.at("matched_token").is_null()) d.matched_token = j.at("matched_token").get<std::string>();
  if (!j.at("marker_token").is_null()) d.marker_token = j.at("marker_token").get<std::string>();
  return d;
}

inline std::string format_detections(const std::vector<Detection>& detections) {
  std::string out;
  for (const auto& d : detections) out += to_json(d).dump() + "\n";
  return out;
}

inline std::vector<Detection> parse_detections(std::string_view content, const std::string& source) {
  std::vector<Detection> out;
  std::vector<Issue> issues;
  std::size_t line_no = 0;
  for (const auto& line : text::split(content, '\n', false)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(detection_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      issues.push_back({source, line_no, "", e.what()});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

}  // namespace mtbias
