#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrmt/backend.hpp"
#include "lrmt/corpus.hpp"

namespace lrmt {

/// mteval-v13a tokenization, applied in order:
///   1. &quot; &amp; &lt; &gt; unescaped (one pass each, in that order);
///      CR and LF become spaces.
///   2. Every ASCII char in {-~, [-`, space-&, (-+, :-@, / is padded with
///      spaces.
///   3. ([^0-9])([.,]) -> "\1 \2 ", then ([.,])([^0-9]) -> " \1 \2".
///   4. ([0-9])(-) -> "\1 \2 ".
///   5. Whitespace runs collapse; result is trimmed and split on spaces.
/// Each regex rule is a left-to-right, non-overlapping scan, matching Perl
/// and Python substitution semantics. All patterns are ASCII, so scanning
/// bytes of UTF-8 text gives the same result as scanning code points.
std::vector<std::string> tokenize_13a(std::string_view s);

struct BleuScore {
  double score = 0.0;              // [0, 100]
  std::vector<double> precisions;  // p_1..p_N in [0, 1], smoothed
  double brevity_penalty = 1.0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  std::vector<std::size_t> matches;  // clipped matches per order
  std::vector<std::size_t> totals;   // hypothesis n-grams per order

  std::string formatted() const;  // two decimals
  nlohmann::json to_json() const;
  static BleuScore from_json(const nlohmann::json& j);
  friend bool operator==(const BleuScore&, const BleuScore&) = default;
};

/// Corpus BLEU, single reference per hypothesis. Matches and totals are
/// pooled over the corpus; BP = min(1, exp(1 - ref_len / hyp_len)). The k-th
/// order with zero matches (k = 1, 2, ...) gets p_n = 1 / (2^k * t_n). An
/// order with no hypothesis n-grams at all has p_n = 0, as does BP when the
/// hypotheses are empty.
/// Throws SizeError on a length mismatch or an empty hypothesis list.
BleuScore corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      std::size_t max_n = 4);
BleuScore sentence_bleu(const std::string& hyp, const std::string& ref, std::size_t max_n = 4);

/// Translates the source side with `model` and scores it against the target
/// side. Throws LanguageMismatchError if the model's source language is not
/// the corpus source language.
BleuScore evaluate_model(const TranslationBackend& backend, const ModelHandle& model,
                         const ParallelCorpus& test);

}  // namespace lrmt
