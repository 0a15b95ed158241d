#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrmt/corpus.hpp"

namespace lrmt {

/// Letter counts per Unicode block. Only general-category L* code points are
/// counted. U+0C80..U+0CFF reports as "Kannada", Basic Latin as "Latin", and
/// every other block under its long Unicode property name.
struct ScriptProfile {
  std::map<std::string, std::size_t> letter_counts;
  std::string dominant_block;
  double dominant_ratio = 0.0;

  std::size_t total_letters() const;
  double ratio(std::string_view block) const;
};

/// Block name for one code point, using the naming above.
std::string block_name(char32_t cp);
bool is_letter(char32_t cp);

/// Ties on the dominant block go to the lexicographically smallest name.
ScriptProfile script_profile(std::string_view text);
inline ScriptProfile script_profile(const SentenceRecord& s) { return script_profile(s.text); }

struct ScriptIssue {
  std::size_t index = 0;
  std::string reason;
};

struct ScriptValidationReport {
  std::string expected_block;
  double min_ratio = 0.0;
  std::size_t checked = 0;
  std::vector<ScriptIssue> issues;

  bool passed() const noexcept { return issues.empty(); }
  nlohmann::json to_json() const;
};

inline constexpr double kDefaultScriptRatio = 0.8;

/// Flags sentences whose dominant block differs from `expected_block` or whose
/// dominant ratio is below `min_ratio`. Throws ConfigError if min_ratio is
/// outside [0, 1].
ScriptValidationReport validate_corpus_script(const MonolingualCorpus& corpus,
                                              std::string_view expected_block,
                                              double min_ratio = kDefaultScriptRatio);

}  // namespace lrmt
