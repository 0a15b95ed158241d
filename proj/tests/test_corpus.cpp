#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lrmt/corpus.hpp"
#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/rng.hpp"
#include "tmpdir.hpp"

using namespace lrmt;

namespace {

std::vector<std::string> texts(const MonolingualCorpus& c) {
  std::vector<std::string> out;
  for (const auto& s : c.sentences) out.push_back(s.text);
  return out;
}

std::string numbered_lines(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "sentence " + std::to_string(i) + "\n";
  return s;
}

}  // namespace

TEST_CASE("empty lines are dropped and indices are line numbers") {
  const auto c = parse_lines("a\n\nb\n", "tcy");
  CHECK(texts(c) == std::vector<std::string>{"a", "b"});
  CHECK(c.sentences[0].index == 0);
  CHECK(c.sentences[1].index == 2);
  CHECK(c.lang_tag == "tcy");
}

TEST_CASE("dedup keeps the first occurrence") {
  const auto c = parse_lines("x\nx\ny\n", "tcy", true);
  CHECK(texts(c) == std::vector<std::string>{"x", "y"});
  CHECK(c.deduplicated);
  CHECK(parse_lines("x\nx\ny\n", "tcy").size() == 3);
}

TEST_CASE("lines are trimmed and CRLF is accepted") {
  const auto c = parse_lines("  a b \r\n\tc\r\n", "en");
  CHECK(texts(c) == std::vector<std::string>{"a b", "c"});
}

TEST_CASE("invalid UTF-8 reports the byte offset") {
  const std::string bad = std::string("ok\nab") + '\xff' + "\n";
  try {
    parse_lines(bad, "en");
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(e.byte_offset() == 5);
  }
}

TEST_CASE("a corpus with no sentences is an error") {
  CHECK_THROWS_AS(parse_lines("\n  \n", "en"), EmptyCorpusError);
  CHECK_THROWS_AS(parse_parallel("\n", "en", "tcy"), EmptyCorpusError);
}

TEST_CASE("1,300 line file gives 1,300 sentences") {
  TempDir dir("corpus");
  io::write_file_atomic(dir / "flores.txt", numbered_lines(1300));
  CHECK(ingest_lines(dir / "flores.txt", "tcy").size() == 1300);
}

TEST_CASE("parallel TSV needs exactly one tab") {
  const auto p = parse_parallel("a b\tx y\n\nc\tz\n", "kn", "en");
  REQUIRE(p.size() == 2);
  CHECK(p.pairs[1].source.text == "c");
  CHECK(p.pairs[1].target.text == "z");
  CHECK(p.pairs[1].source.index == 1);
  CHECK_THROWS_AS(parse_parallel("a\tb\tc\n", "kn", "en"), FormatError);
  CHECK_THROWS_AS(parse_parallel("no tab here\n", "kn", "en"), FormatError);
  CHECK_THROWS_AS(parse_parallel(" \tb\n", "kn", "en"), FormatError);
}

TEST_CASE("format and parse round-trip") {
  const auto p = parse_parallel("a\tb\nc d\te f\n", "kn", "en");
  CHECK(parse_parallel(format_parallel(p), "kn", "en").pairs == p.pairs);
  const auto m = parse_lines("one\ntwo\n", "en");
  CHECK(format_lines(m) == "one\ntwo\n");
  CHECK(p.swapped().src_lang == "en");
  CHECK(p.swapped().pairs[0].source.text == "b");
}

TEST_CASE("segment_text") {
  SUBCASE("delimiters stay with their sentence") {
    const auto s = segment_text("A. B? C", {U'.', U'?'});
    REQUIRE(s.size() == 3);
    CHECK(s[0].text == "A.");
    CHECK(s[1].text == "B?");
    CHECK(s[2].text == "C");
    CHECK(s[2].index == 2);
  }
  SUBCASE("only delimiters gives nothing") { CHECK(segment_text("...", {U'.'}).empty()); }
  SUBCASE("danda is a default delimiter") {
    const auto s = segment_text("ಒಂದು। ಎರಡು॥ ಮೂರು");
    REQUIRE(s.size() == 3);
    CHECK(s[0].text == "ಒಂದು।");
  }
  SUBCASE("line breaks fold to spaces") {
    const auto s = segment_text("first\nline. second");
    REQUIRE(s.size() == 2);
    CHECK(s[0].text == "first line.");
  }
}

TEST_CASE("segmenting a 1,894-article dump") {
  // Article k has (k % 37) + 3 sentences of varying length, some ending in
  // a danda, joined by blank lines as a dump would be.
  std::string dump;
  std::size_t expected = 0;
  Rng rng(1894);
  for (std::size_t k = 0; k < 1894; ++k) {
    const std::size_t n = k % 37 + 3;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t words = 2 + rng.below(10);
      for (std::size_t w = 0; w < words; ++w) dump += (w ? " ಪದ" : "ಪದ") + std::to_string(rng.below(50));
      dump += rng.below(4) == 0 ? "। " : ". ";
    }
    expected += n;
    dump += "\n\n";
  }
  const auto s = segment_text(dump);
  CHECK(s.size() == expected);
  CHECK(s.size() == 39669);
}

TEST_CASE("make_split") {
  const auto c = parse_lines(numbered_lines(1300), "tcy");

  SUBCASE("647 + 653 disjoint") {
    const auto s = make_split(c, 647, 653);
    CHECK(s.dev.size() == 647);
    CHECK(s.test.size() == 653);
    std::set<std::size_t> seen;
    for (const auto& r : s.dev.sentences) seen.insert(r.index);
    for (const auto& r : s.test.sentences) CHECK(seen.insert(r.index).second);
    CHECK(seen.size() == 1300);
    CHECK(s.dev.sentences.front().text == "sentence 0");
    CHECK(s.test.sentences.front().text == "sentence 647");
  }
  SUBCASE("dev_n = 0") {
    const auto s = make_split(c, 0, 10);
    CHECK(s.dev.size() == 0);
    CHECK(s.test.sentences.back().text == "sentence 9");
  }
  SUBCASE("seeded split is deterministic and ordered") {
    const auto a = make_split(c, 647, 653, 42);
    const auto b = make_split(c, 647, 653, 42);
    CHECK(a.dev.sentences == b.dev.sentences);
    CHECK(a.test.sentences == b.test.sentences);
    CHECK(a.dev.sentences != make_split(c, 647, 653).dev.sentences);
    for (std::size_t i = 1; i < a.dev.size(); ++i) CHECK(a.dev.sentences[i - 1].index < a.dev.sentences[i].index);
  }
  SUBCASE("too large") { CHECK_THROWS_AS(make_split(c, 1000, 301), SizeError); }
  SUBCASE("parallel corpora split the same way") {
    const auto p = pair(c, c);
    const auto s = make_split(p, 647, 653, 7);
    const auto m = make_split(c, 647, 653, 7);
    REQUIRE(s.dev.size() == 647);
    for (std::size_t i = 0; i < 647; ++i) CHECK(s.dev.pairs[i].source.text == m.dev.sentences[i].text);
  }
}

TEST_CASE("pair") {
  const auto a = parse_lines("1\n2\n3\n", "kn");
  const auto b = parse_lines("x\ny\nz\n", "en");
  const auto p = pair(a, b);
  REQUIRE(p.size() == 3);
  CHECK(p.src_lang == "kn");
  CHECK(p.pairs[2].target.text == "z");
  try {
    pair(a, parse_lines("x\ny\n", "en"));
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    CHECK(e.source_length() == 3);
    CHECK(e.target_length() == 2);
  }
}

TEST_CASE("atomic write leaves no temp files") {
  TempDir dir("atomic");
  write_lines(parse_lines("a\n", "en"), dir / "out.txt");
  write_lines(parse_lines("b\n", "en"), dir / "out.txt");
  CHECK(io::read_file(dir / "out.txt") == "b\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  CHECK(files == 1);
}
