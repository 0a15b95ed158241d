#include "lrmt/synthlang.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "lrmt/error.hpp"
#include "lrmt/rng.hpp"

namespace lrmt {

std::string to_string(Alphabet a) { return a == Alphabet::Kannada ? "kannada" : "latin"; }

Alphabet alphabet_from_string(const std::string& s) {
  if (s == "latin") return Alphabet::Latin;
  if (s == "kannada") return Alphabet::Kannada;
  throw ConfigError("unknown alphabet '" + s + "' (expected latin or kannada)");
}

nlohmann::json LanguageSpec::to_json() const {
  return {{"lang_tag", lang_tag}, {"vocab_size", vocab_size()}, {"alphabet", to_string(alphabet)}, {"seed", seed}};
}

void SynthConfig::validate() const {
  if (vocab_size < 1) throw ConfigError("vocab_size must be at least 1");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw ConfigError("overlap must lie in [0, 1]");
  if (len_min < 1 || len_min > len_max) throw ConfigError("need 1 <= len_min <= len_max");
  if (!(zipf_s >= 0.0)) throw ConfigError("zipf_s must be non-negative");
}

nlohmann::json SynthConfig::to_json() const {
  return {{"vocab_size", vocab_size}, {"overlap", overlap}, {"len_min", len_min},
          {"len_max", len_max},       {"zipf_s", zipf_s},   {"seed", seed}};
}

namespace {

const std::vector<std::string>& syllables(Alphabet a) {
  static const std::vector<std::string> latin = [] {
    std::vector<std::string> out;
    for (char c : std::string("bdghjklmnprstvz"))
      for (char v : std::string("aeiou")) out.push_back(std::string{c, v});
    return out;
  }();
  // Consonant letter, optionally followed by a dependent vowel sign.
  static const std::vector<std::string> kannada = [] {
    const std::vector<std::string> consonants{"ಕ", "ಗ", "ಚ", "ಜ", "ಟ", "ಡ", "ತ", "ದ", "ನ",
                                              "ಪ", "ಬ", "ಮ", "ಯ", "ರ", "ಲ", "ವ", "ಸ", "ಹ"};
    const std::vector<std::string> signs{"", "ಾ", "ಿ", "ು", "ೆ", "ೊ"};
    std::vector<std::string> out;
    for (const auto& c : consonants)
      for (const auto& s : signs) out.push_back(c + s);
    return out;
  }();
  return a == Alphabet::Kannada ? kannada : latin;
}

// Two to four syllables.
std::string make_token(Rng& rng, Alphabet a) {
  const auto& syl = syllables(a);
  const auto n = static_cast<std::size_t>(rng.between(2, 4));
  std::string tok;
  for (std::size_t i = 0; i < n; ++i) tok += syl[rng.below(syl.size())];
  return tok;
}

std::vector<std::string> fresh_tokens(Rng& rng, Alphabet a, std::size_t n,
                                      std::unordered_set<std::string>& taken) {
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string tok = make_token(rng, a);
    if (taken.insert(tok).second) out.push_back(std::move(tok));
  }
  return out;
}

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double s) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += std::pow(static_cast<double>(r + 1), -s);
      cdf_[r] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }
  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

LanguageSpec gen_language(std::uint64_t seed, std::size_t vocab_size, std::string lang_tag, Alphabet alphabet,
                          const std::set<std::string>& avoid) {
  if (vocab_size < 1) throw ConfigError("vocab_size must be at least 1");
  Rng rng(derive_seed(seed, {0x6c616e67}));
  std::unordered_set<std::string> taken(avoid.begin(), avoid.end());
  return LanguageSpec{std::move(lang_tag), fresh_tokens(rng, alphabet, vocab_size, taken), alphabet, seed};
}

LanguageSpec derive_related(const LanguageSpec& base, double overlap, std::uint64_t seed, std::string lang_tag,
                            const std::set<std::string>& avoid) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw ConfigError("overlap must lie in [0, 1]");
  const std::size_t n = base.vocab_size();
  const auto shared = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(n)));
  Rng rng(derive_seed(seed, {0x72656c61}));
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < shared; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);

  std::unordered_set<std::string> taken(base.lexicon.begin(), base.lexicon.end());
  taken.insert(avoid.begin(), avoid.end());
  std::vector<char> is_cognate(n, 0);
  for (std::size_t i = 0; i < shared; ++i) is_cognate[ids[i]] = 1;
  auto fresh = fresh_tokens(rng, base.alphabet, n - shared, taken);

  LanguageSpec out{std::move(lang_tag), {}, base.alphabet, seed};
  out.lexicon.reserve(n);
  std::size_t next = 0;
  for (std::size_t c = 0; c < n; ++c) out.lexicon.push_back(is_cognate[c] ? base.lexicon[c] : fresh[next++]);
  return out;
}

namespace {

std::vector<std::size_t> draw_sentence(const ZipfSampler& sampler, const SynthConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const auto len = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(cfg.len_min), static_cast<std::int64_t>(cfg.len_max)));
  std::vector<std::size_t> out(len);
  for (auto& c : out) c = sampler(rng);
  return out;
}

}  // namespace

std::vector<std::size_t> sample_concepts(std::size_t vocab_size, const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return draw_sentence(ZipfSampler(vocab_size, cfg.zipf_s), cfg, seed);
}

std::string render(const LanguageSpec& spec, const std::vector<std::size_t>& concepts) {
  std::string out;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    if (i) out += ' ';
    out += spec.lexicon.at(concepts[i]);
  }
  return out;
}

ParallelCorpus sample_parallel(const LanguageSpec& src, const LanguageSpec& tgt, std::size_t n,
                               const SynthConfig& cfg) {
  if (src.vocab_size() != tgt.vocab_size())
    throw ConfigError("languages " + src.lang_tag + " and " + tgt.lang_tag + " do not share a concept space");
  cfg.validate();
  const ZipfSampler sampler(src.vocab_size(), cfg.zipf_s);
  ParallelCorpus out{src.lang_tag, tgt.lang_tag, {}};
  out.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto concepts = draw_sentence(sampler, cfg, derive_seed(cfg.seed, {i}));
    out.pairs.push_back({SentenceRecord{render(src, concepts), i}, SentenceRecord{render(tgt, concepts), i}});
  }
  return out;
}

MonolingualCorpus sample_monolingual(const LanguageSpec& spec, std::size_t n, const SynthConfig& cfg) {
  cfg.validate();
  const ZipfSampler sampler(spec.vocab_size(), cfg.zipf_s);
  MonolingualCorpus out{spec.lang_tag, {}, false};
  out.sentences.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto concepts = draw_sentence(sampler, cfg, derive_seed(cfg.seed, {i}));
    out.sentences.push_back(SentenceRecord{render(spec, concepts), i});
  }
  return out;
}

std::size_t shared_token_count(const LanguageSpec& a, const LanguageSpec& b) {
  std::unordered_set<std::string> sa(a.lexicon.begin(), a.lexicon.end());
  std::size_t n = 0;
  for (const auto& t : std::unordered_set<std::string>(b.lexicon.begin(), b.lexicon.end())) n += sa.count(t);
  return n;
}

}  // namespace lrmt
