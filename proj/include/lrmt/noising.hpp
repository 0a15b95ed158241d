#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrmt/corpus.hpp"
#include "lrmt/rng.hpp"

namespace lrmt {

inline constexpr const char* kUnknownToken = "<unk>";

struct NoiseConfig {
  std::size_t max_shift = 3;
  double mask_prob = 0.1;
  std::string mask_token = kUnknownToken;
  std::uint64_t seed = 0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Local shuffle by perturbed-key sort: token i gets key i + u_i with u_i
/// uniform on [0, max_shift + 1), then tokens are stable-sorted by key. A
/// token can only be overtaken by neighbours fewer than max_shift + 1
/// positions away, so no token moves further than max_shift.
std::vector<std::string> shuffle_local(const std::vector<std::string>& tokens, std::size_t max_shift,
                                       Rng& rng);

/// Replaces each position independently with `mask_token` with probability
/// `mask_prob`. Draws exactly one uniform per token.
std::vector<std::string> mask_words(const std::vector<std::string>& tokens, double mask_prob,
                                    const std::string& mask_token, Rng& rng);

/// shuffle_local followed by mask_words on one whitespace-tokenized sentence.
std::vector<std::string> noise_tokens(const std::vector<std::string>& tokens, const NoiseConfig& cfg,
                                      Rng& rng);

/// Denoising pairs: source = noised sentence, target = the original record.
/// Sentence i draws from its own stream derive_seed(cfg.seed, {index}), so the
/// result does not depend on processing order. Language tags are
/// (lang + "+noise", lang).
ParallelCorpus make_dae_pairs(const MonolingualCorpus& corpus, const NoiseConfig& cfg);

inline constexpr const char* kNoiseSuffix = "+noise";

/// True for tag pairs produced by make_dae_pairs.
bool is_denoising_pair(const std::string& src_lang, const std::string& tgt_lang);

}  // namespace lrmt
