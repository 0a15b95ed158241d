#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lrmt {

/// One sentence. `text` is trimmed, non-empty and free of CR/LF; `index` is
/// the 0-based position the sentence had in its source (line number for
/// ingested files, ordinal for generated corpora).
struct SentenceRecord {
  std::string text;
  std::size_t index = 0;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct MonolingualCorpus {
  std::string lang_tag;
  std::vector<SentenceRecord> sentences;
  bool deduplicated = false;

  std::size_t size() const noexcept { return sentences.size(); }
  bool empty() const noexcept { return sentences.empty(); }
  friend bool operator==(const MonolingualCorpus&, const MonolingualCorpus&) = default;
};

struct SentencePair {
  SentenceRecord source;
  SentenceRecord target;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

struct ParallelCorpus {
  std::string src_lang;
  std::string tgt_lang;
  std::vector<SentencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  MonolingualCorpus source_side() const;
  MonolingualCorpus target_side() const;
  /// Same pairs with source and target exchanged.
  ParallelCorpus swapped() const;

  friend bool operator==(const ParallelCorpus&, const ParallelCorpus&) = default;
};

/// Builds a record after trimming. Throws FormatError if the trimmed text is
/// empty or still contains a line break, DecodeError on invalid UTF-8.
SentenceRecord make_sentence(std::string_view text, std::size_t index);

/// One sentence per non-empty trimmed line. With `dedup`, the first
/// occurrence of a text wins.
MonolingualCorpus ingest_lines(const std::filesystem::path& path, std::string lang_tag,
                               bool dedup = false);
MonolingualCorpus parse_lines(std::string_view content, std::string lang_tag, bool dedup = false);

/// `source<TAB>target` per line, no header. Blank lines are skipped; any
/// other line must contain exactly one tab with non-empty sides.
ParallelCorpus ingest_parallel(const std::filesystem::path& path, std::string src_lang,
                               std::string tgt_lang);
ParallelCorpus parse_parallel(std::string_view content, std::string src_lang,
                              std::string tgt_lang);

std::string format_lines(const MonolingualCorpus& corpus);
std::string format_parallel(const ParallelCorpus& corpus);
void write_lines(const MonolingualCorpus& corpus, const std::filesystem::path& path);
void write_parallel(const ParallelCorpus& corpus, const std::filesystem::path& path);

inline const std::set<char32_t>& default_delimiters() {
  static const std::set<char32_t> d{U'.', U'?', U'!', U'।', U'॥'};
  return d;
}

/// Splits `raw` after every delimiter code point. Delimiters stay attached to
/// the sentence they end; pieces are trimmed and empty pieces dropped. Line
/// breaks inside a piece are folded to spaces.
std::vector<SentenceRecord> segment_text(std::string_view raw,
                                         const std::set<char32_t>& delimiters = default_delimiters());

template <class Corpus>
struct Split {
  Corpus dev;
  Corpus test;
};

/// Without a seed: dev is the first dev_n items and test the next test_n.
/// With a seed the items are permuted first (Fisher-Yates on Rng) and sliced
/// the same way; each part keeps the original relative order.
Split<MonolingualCorpus> make_split(const MonolingualCorpus& corpus, std::size_t dev_n,
                                    std::size_t test_n,
                                    std::optional<std::uint64_t> shuffle_seed = std::nullopt);
Split<ParallelCorpus> make_split(const ParallelCorpus& corpus, std::size_t dev_n,
                                 std::size_t test_n,
                                 std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Positional alignment. Throws AlignmentError carrying both lengths.
ParallelCorpus pair(const MonolingualCorpus& src, const MonolingualCorpus& tgt);

}  // namespace lrmt
