#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lrmt/corpus.hpp"

namespace lrmt {

inline constexpr const char* kNullToken = "<null>";
inline constexpr char kCheckpointMagic[4] = {'L', 'R', 'M', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainConfig {
  std::size_t em_epochs = 5;
  // Entries below this probability are pruned after the last EM epoch and the
  // row renormalized.
  double smoothing_epsilon = 1e-6;
  // Weight of the existing model in continue_train.
  double continue_weight = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Caller-supplied labels recorded in the model history.
struct TrainLabel {
  std::string corpus_id;
  std::string stage_id;
};

struct TrainingEvent {
  std::string kind;  // "train", "continue" or "adopt"
  std::string corpus_id;
  std::string stage_id;
  std::uint64_t epochs = 0;
  double weight = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingEvent&, const TrainingEvent&) = default;
};

struct LexEntry {
  std::string target;
  double prob = 0.0;

  friend bool operator==(const LexEntry&, const LexEntry&) = default;
};

/// Translation distribution of one source token, sorted by target token.
using LexRow = std::vector<LexEntry>;
using Lexicon = std::map<std::string, LexRow>;

/// Base interface for anything a backend can produce.
class TranslationModel {
 public:
  virtual ~TranslationModel() = default;
  virtual const std::string& src_lang() const = 0;
  virtual const std::string& tgt_lang() const = 0;
  virtual const std::vector<TrainingEvent>& history() const = 0;
};

/// Lexical translation table t(target | source) with a NULL source row.
/// Immutable once built; translation is safe from many threads.
class LexicalModel final : public TranslationModel {
 public:
  /// Rows must be distributions; vocabularies are derived from the table.
  LexicalModel(std::string src_lang, std::string tgt_lang, Lexicon lexicon,
               std::vector<TrainingEvent> history);

  const std::string& src_lang() const override { return src_lang_; }
  const std::string& tgt_lang() const override { return tgt_lang_; }
  const std::vector<TrainingEvent>& history() const override { return history_; }
  const Lexicon& lexicon() const noexcept { return lexicon_; }
  const std::set<std::string>& vocab_src() const noexcept { return vocab_src_; }
  const std::set<std::string>& vocab_tgt() const noexcept { return vocab_tgt_; }

  /// Highest-probability target, ties to the smallest token; null if the
  /// token has no row.
  const std::string* best_translation(std::string_view source_token) const;
  double prob(std::string_view source_token, std::string_view target_token) const;

  friend bool operator==(const LexicalModel& a, const LexicalModel& b) {
    return a.src_lang_ == b.src_lang_ && a.tgt_lang_ == b.tgt_lang_ && a.lexicon_ == b.lexicon_ &&
           a.history_ == b.history_;
  }

 private:
  std::string src_lang_;
  std::string tgt_lang_;
  Lexicon lexicon_;
  std::vector<TrainingEvent> history_;
  std::set<std::string> vocab_src_;
  std::set<std::string> vocab_tgt_;
  std::unordered_map<std::string, std::string> best_;
};

/// Corpus log-likelihood of the model after each EM epoch; entry 0 is the
/// uniform initialization, so there are em_epochs + 1 values.
struct EmTrace {
  std::vector<double> log_likelihood;
};

/// IBM Model 1 EM with a NULL source position, uniform initialization and
/// `em_epochs` iterations. Deterministic in (corpus, cfg).
LexicalModel train(const ParallelCorpus& parallel, const TrainConfig& cfg, const TrainLabel& label = {},
                   EmTrace* trace = nullptr);

/// Trains on `parallel` and interpolates row by row:
///   row = w * old + (1 - w) * new, renormalized, with w = cfg.continue_weight.
/// A row present in only one model keeps that model's row unless its weight is
/// zero, in which case the row is dropped. Denoising corpora (tags X+noise, X)
/// are accepted by any model; otherwise the language pair must match.
LexicalModel continue_train(const LexicalModel& model, const ParallelCorpus& parallel,
                            const TrainConfig& cfg, const TrainLabel& label = {});

/// Same table under new language tags, recorded as an "adopt" event. Used to
/// put a model trained on a related language into service for another.
LexicalModel adopt_languages(const LexicalModel& model, std::string src_lang, std::string tgt_lang);

/// Token-by-token argmax; tokens without a row are copied through.
std::string translate_sentence(const LexicalModel& model, std::string_view sentence);
std::vector<SentenceRecord> translate_batch(const LexicalModel& model,
                                            std::span<const SentenceRecord> sentences);

/// Canonical checkpoint bytes: magic "LRMT", u32 version, language tags,
/// history, target-token table, rows in key order, trailing FNV-1a checksum.
/// Integers are little-endian; probabilities are raw IEEE-754 bits.
std::string serialize(const LexicalModel& model);
LexicalModel deserialize(std::string_view bytes);
void save(const LexicalModel& model, const std::filesystem::path& path);
LexicalModel load_model(const std::filesystem::path& path);

nlohmann::json to_json(const LexicalModel& model);
nlohmann::json to_json(const TrainingEvent& event);

}  // namespace lrmt
