#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrmt/corpus.hpp"

namespace lrmt {

enum class Alphabet { Latin, Kannada };

std::string to_string(Alphabet a);
Alphabet alphabet_from_string(const std::string& s);

/// A synthetic language: concept id i (0-based, also its Zipf rank) is
/// written as lexicon[i]. Tokens are distinct syllable strings.
struct LanguageSpec {
  std::string lang_tag;
  std::vector<std::string> lexicon;
  Alphabet alphabet = Alphabet::Latin;
  std::uint64_t seed = 0;

  std::size_t vocab_size() const noexcept { return lexicon.size(); }
  nlohmann::json to_json() const;
  friend bool operator==(const LanguageSpec&, const LanguageSpec&) = default;
};

struct SynthConfig {
  std::size_t vocab_size = 2000;
  double overlap = 0.7;
  std::size_t len_min = 5;
  std::size_t len_max = 15;
  double zipf_s = 1.1;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

/// N distinct tokens drawn deterministically from `seed`, none of them in
/// `avoid`.
LanguageSpec gen_language(std::uint64_t seed, std::size_t vocab_size, std::string lang_tag = "syn",
                          Alphabet alphabet = Alphabet::Latin, const std::set<std::string>& avoid = {});

/// Exactly round(overlap * N) concepts, picked by a seeded partial
/// Fisher-Yates, keep the base token; the rest get fresh tokens outside the
/// base vocabulary and outside `avoid`.
LanguageSpec derive_related(const LanguageSpec& base, double overlap, std::uint64_t seed,
                            std::string lang_tag, const std::set<std::string>& avoid = {});

/// Concept sequence of one sentence: length uniform in [len_min, len_max],
/// concepts Zipf(zipf_s) over [0, vocab_size).
std::vector<std::size_t> sample_concepts(std::size_t vocab_size, const SynthConfig& cfg, std::uint64_t seed);

std::string render(const LanguageSpec& spec, const std::vector<std::size_t>& concepts);

/// Sentence i uses stream derive_seed(cfg.seed, {i}); corpora drawn with the
/// same seed share their concept sequences.
ParallelCorpus sample_parallel(const LanguageSpec& src, const LanguageSpec& tgt, std::size_t n,
                               const SynthConfig& cfg);
MonolingualCorpus sample_monolingual(const LanguageSpec& spec, std::size_t n, const SynthConfig& cfg);

/// Number of surface tokens the two lexicons have in common.
std::size_t shared_token_count(const LanguageSpec& a, const LanguageSpec& b);

}  // namespace lrmt
