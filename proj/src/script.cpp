#include "lrmt/script.hpp"

#include <unicode/uchar.h>

#include <cstdio>

#include "lrmt/error.hpp"
#include "lrmt/utf8.hpp"

namespace lrmt {

std::size_t ScriptProfile::total_letters() const {
  std::size_t n = 0;
  for (const auto& [_, c] : letter_counts) n += c;
  return n;
}

double ScriptProfile::ratio(std::string_view block) const {
  const std::size_t total = total_letters();
  if (total == 0) return 0.0;
  auto it = letter_counts.find(std::string(block));
  return it == letter_counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

bool is_letter(char32_t cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_L_MASK) != 0;
}

std::string block_name(char32_t cp) {
  if (cp >= 0x0C80 && cp <= 0x0CFF) return "Kannada";
  const auto code = static_cast<UBlockCode>(
      u_getIntPropertyValue(static_cast<UChar32>(cp), UCHAR_BLOCK));
  if (code == UBLOCK_BASIC_LATIN) return "Latin";
  const char* name = u_getPropertyValueName(UCHAR_BLOCK, code, U_LONG_PROPERTY_NAME);
  return name ? name : "No_Block";
}

ScriptProfile script_profile(std::string_view text) {
  ScriptProfile p;
  for (char32_t cp : utf8::decode(text))
    if (is_letter(cp)) ++p.letter_counts[block_name(cp)];
  const std::size_t total = p.total_letters();
  if (total == 0) return p;
  std::size_t best = 0;
  // std::map iterates in name order, so the first maximum is the tie winner.
  for (const auto& [name, count] : p.letter_counts) {
    if (count > best) {
      best = count;
      p.dominant_block = name;
    }
  }
  p.dominant_ratio = static_cast<double>(best) / static_cast<double>(total);
  return p;
}

nlohmann::json ScriptValidationReport::to_json() const {
  nlohmann::json issues_json = nlohmann::json::array();
  for (const auto& i : issues) issues_json.push_back({{"index", i.index}, {"reason", i.reason}});
  return {{"expected_block", expected_block},
          {"min_ratio", min_ratio},
          {"checked", checked},
          {"passed", passed()},
          {"issues", std::move(issues_json)}};
}

ScriptValidationReport validate_corpus_script(const MonolingualCorpus& corpus,
                                              std::string_view expected_block, double min_ratio) {
  if (!(min_ratio >= 0.0 && min_ratio <= 1.0))
    throw ConfigError("min_ratio must lie in [0, 1]");
  ScriptValidationReport report{std::string(expected_block), min_ratio, corpus.size(), {}};
  for (const auto& s : corpus.sentences) {
    const ScriptProfile p = script_profile(s);
    if (p.dominant_block.empty()) {
      report.issues.push_back({s.index, "no letters"});
    } else if (p.dominant_block != expected_block) {
      report.issues.push_back({s.index, "dominant block " + p.dominant_block});
    } else if (p.dominant_ratio < min_ratio) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "dominant ratio %.3f below %.3f", p.dominant_ratio, min_ratio);
      report.issues.push_back({s.index, buf});
    }
  }
  return report;
}

}  // namespace lrmt
