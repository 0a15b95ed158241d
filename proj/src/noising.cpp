#include "lrmt/noising.hpp"

#include <algorithm>
#include <numeric>

#include "lrmt/error.hpp"
#include "lrmt/utf8.hpp"

namespace lrmt {

void NoiseConfig::validate() const {
  if (!(mask_prob >= 0.0 && mask_prob <= 1.0)) throw ConfigError("mask_prob must lie in [0, 1]");
  if (mask_token.empty()) throw ConfigError("mask_token must be non-empty");
}

std::vector<std::string> shuffle_local(const std::vector<std::string>& tokens, std::size_t max_shift,
                                       Rng& rng) {
  const std::size_t n = tokens.size();
  std::vector<double> keys(n);
  const double width = static_cast<double>(max_shift) + 1.0;
  for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<double>(i) + rng.uniform() * width;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i : order) out.push_back(tokens[i]);
  return out;
}

std::vector<std::string> mask_words(const std::vector<std::string>& tokens, double mask_prob,
                                    const std::string& mask_token, Rng& rng) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(rng.uniform() < mask_prob ? mask_token : t);
  return out;
}

std::vector<std::string> noise_tokens(const std::vector<std::string>& tokens, const NoiseConfig& cfg,
                                      Rng& rng) {
  return mask_words(shuffle_local(tokens, cfg.max_shift, rng), cfg.mask_prob, cfg.mask_token, rng);
}

ParallelCorpus make_dae_pairs(const MonolingualCorpus& corpus, const NoiseConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw EmptyCorpusError("cannot noise an empty corpus");
  ParallelCorpus out{corpus.lang_tag + kNoiseSuffix, corpus.lang_tag, {}};
  out.pairs.reserve(corpus.size());
  for (const auto& s : corpus.sentences) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(s.index)}));
    auto noised = noise_tokens(utf8::split_whitespace(s.text), cfg, rng);
    out.pairs.push_back({SentenceRecord{utf8::join(noised), s.index}, s});
  }
  return out;
}

bool is_denoising_pair(const std::string& src_lang, const std::string& tgt_lang) {
  return src_lang == tgt_lang + kNoiseSuffix;
}

}  // namespace lrmt
