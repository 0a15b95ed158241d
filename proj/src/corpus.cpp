#include "lrmt/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/rng.hpp"
#include "lrmt/utf8.hpp"

namespace lrmt {

MonolingualCorpus ParallelCorpus::source_side() const {
  MonolingualCorpus out{src_lang, {}, false};
  out.sentences.reserve(pairs.size());
  for (const auto& p : pairs) out.sentences.push_back(p.source);
  return out;
}

MonolingualCorpus ParallelCorpus::target_side() const {
  MonolingualCorpus out{tgt_lang, {}, false};
  out.sentences.reserve(pairs.size());
  for (const auto& p : pairs) out.sentences.push_back(p.target);
  return out;
}

ParallelCorpus ParallelCorpus::swapped() const {
  ParallelCorpus out{tgt_lang, src_lang, {}};
  out.pairs.reserve(pairs.size());
  for (const auto& p : pairs) out.pairs.push_back({p.target, p.source});
  return out;
}

SentenceRecord make_sentence(std::string_view text, std::size_t index) {
  utf8::validate(text);
  std::string_view t = utf8::trim(text);
  if (t.empty()) throw FormatError("empty sentence at index " + std::to_string(index));
  if (t.find_first_of("\r\n") != std::string_view::npos)
    throw FormatError("sentence " + std::to_string(index) + " contains a line break");
  return SentenceRecord{std::string(t), index};
}

namespace {

// Calls fn(line, line_number) for every LF-separated line. A trailing CR on a
// line is dropped.
template <class Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    std::size_t end = nl == std::string_view::npos ? content.size() : nl;
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no++);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

MonolingualCorpus parse_lines(std::string_view content, std::string lang_tag, bool dedup) {
  utf8::validate(content);
  MonolingualCorpus corpus{std::move(lang_tag), {}, dedup};
  std::unordered_set<std::string> seen;
  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    std::string_view t = utf8::trim(line);
    if (t.empty()) return;
    if (dedup && !seen.insert(std::string(t)).second) return;
    corpus.sentences.push_back(SentenceRecord{std::string(t), line_no});
  });
  if (corpus.sentences.empty()) throw EmptyCorpusError("corpus '" + corpus.lang_tag + "' is empty");
  return corpus;
}

MonolingualCorpus ingest_lines(const std::filesystem::path& path, std::string lang_tag, bool dedup) {
  std::string content = io::read_file(path);
  try {
    return parse_lines(content, std::move(lang_tag), dedup);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": invalid UTF-8", e.byte_offset());
  } catch (const EmptyCorpusError&) {
    throw EmptyCorpusError(path.string() + ": no sentences");
  }
}

ParallelCorpus parse_parallel(std::string_view content, std::string src_lang, std::string tgt_lang) {
  utf8::validate(content);
  ParallelCorpus corpus{std::move(src_lang), std::move(tgt_lang), {}};
  for_each_line(content, [&](std::string_view line, std::size_t line_no) {
    if (utf8::trim(line).empty()) return;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
      throw FormatError("line " + std::to_string(line_no + 1) + ": expected exactly one tab");
    std::string_view src = utf8::trim(line.substr(0, tab));
    std::string_view tgt = utf8::trim(line.substr(tab + 1));
    if (src.empty() || tgt.empty())
      throw FormatError("line " + std::to_string(line_no + 1) + ": empty side");
    const std::size_t idx = corpus.pairs.size();
    corpus.pairs.push_back({SentenceRecord{std::string(src), idx}, SentenceRecord{std::string(tgt), idx}});
  });
  if (corpus.pairs.empty())
    throw EmptyCorpusError("parallel corpus " + corpus.src_lang + "-" + corpus.tgt_lang + " is empty");
  return corpus;
}

ParallelCorpus ingest_parallel(const std::filesystem::path& path, std::string src_lang,
                               std::string tgt_lang) {
  std::string content = io::read_file(path);
  try {
    return parse_parallel(content, std::move(src_lang), std::move(tgt_lang));
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": invalid UTF-8", e.byte_offset());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const EmptyCorpusError&) {
    throw EmptyCorpusError(path.string() + ": no sentence pairs");
  }
}

std::string format_lines(const MonolingualCorpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    out += s.text;
    out += '\n';
  }
  return out;
}

std::string format_parallel(const ParallelCorpus& corpus) {
  std::string out;
  for (const auto& p : corpus.pairs) {
    if (p.source.text.find('\t') != std::string::npos || p.target.text.find('\t') != std::string::npos)
      throw FormatError("sentence contains a tab and cannot be written as TSV");
    out += p.source.text;
    out += '\t';
    out += p.target.text;
    out += '\n';
  }
  return out;
}

void write_lines(const MonolingualCorpus& corpus, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_lines(corpus));
}

void write_parallel(const ParallelCorpus& corpus, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_parallel(corpus));
}

std::vector<SentenceRecord> segment_text(std::string_view raw, const std::set<char32_t>& delimiters) {
  if (delimiters.empty()) throw ConfigError("segment_text needs at least one delimiter");
  const std::vector<char32_t> cps = utf8::decode(raw);
  std::vector<SentenceRecord> out;
  std::string current;
  auto flush = [&] {
    for (char& c : current)
      if (c == '\n' || c == '\r') c = ' ';
    std::string_view t = utf8::trim(current);
    if (!t.empty()) out.push_back(SentenceRecord{std::string(t), out.size()});
    current.clear();
  };
  for (char32_t cp : cps) {
    current += utf8::encode(cp);
    if (delimiters.count(cp)) flush();
  }
  flush();
  // Trimming is ASCII-only, so a piece made of delimiters alone ("...") is
  // non-empty; drop pieces that hold nothing but delimiters.
  std::erase_if(out, [&](const SentenceRecord& s) {
    for (char32_t cp : utf8::decode(s.text))
      if (!delimiters.count(cp) && cp != U' ' && cp != U'\t') return false;
    return true;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = i;
  return out;
}

namespace {

struct SplitPositions {
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

SplitPositions split_positions(std::size_t size, std::size_t dev_n, std::size_t test_n,
                               std::optional<std::uint64_t> seed) {
  if (dev_n + test_n > size)
    throw SizeError("split needs " + std::to_string(dev_n) + " + " + std::to_string(test_n) +
                    " items but the corpus has " + std::to_string(size));
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (seed) {
    Rng rng(*seed);
    for (std::size_t i = size; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  SplitPositions out;
  out.dev.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(dev_n));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(dev_n),
                  order.begin() + static_cast<std::ptrdiff_t>(dev_n + test_n));
  std::sort(out.dev.begin(), out.dev.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace

Split<MonolingualCorpus> make_split(const MonolingualCorpus& corpus, std::size_t dev_n,
                                    std::size_t test_n, std::optional<std::uint64_t> shuffle_seed) {
  auto pos = split_positions(corpus.size(), dev_n, test_n, shuffle_seed);
  Split<MonolingualCorpus> out{{corpus.lang_tag, {}, corpus.deduplicated},
                               {corpus.lang_tag, {}, corpus.deduplicated}};
  for (auto i : pos.dev) out.dev.sentences.push_back(corpus.sentences[i]);
  for (auto i : pos.test) out.test.sentences.push_back(corpus.sentences[i]);
  return out;
}

Split<ParallelCorpus> make_split(const ParallelCorpus& corpus, std::size_t dev_n, std::size_t test_n,
                                 std::optional<std::uint64_t> shuffle_seed) {
  auto pos = split_positions(corpus.size(), dev_n, test_n, shuffle_seed);
  Split<ParallelCorpus> out{{corpus.src_lang, corpus.tgt_lang, {}},
                            {corpus.src_lang, corpus.tgt_lang, {}}};
  for (auto i : pos.dev) out.dev.pairs.push_back(corpus.pairs[i]);
  for (auto i : pos.test) out.test.pairs.push_back(corpus.pairs[i]);
  return out;
}

ParallelCorpus pair(const MonolingualCorpus& src, const MonolingualCorpus& tgt) {
  if (src.size() != tgt.size()) throw AlignmentError(src.size(), tgt.size());
  ParallelCorpus out{src.lang_tag, tgt.lang_tag, {}};
  out.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out.pairs.push_back({src.sentences[i], tgt.sentences[i]});
  return out;
}

}  // namespace lrmt
