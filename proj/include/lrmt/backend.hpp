#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lrmt/corpus.hpp"
#include "lrmt/noising.hpp"
#include "lrmt/translator.hpp"

namespace lrmt {

using ModelHandle = std::shared_ptr<const TranslationModel>;

/// The contract every pipeline stage trains and queries through. Pipeline
/// code only sees ModelHandle; what a model contains is the backend's
/// business.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;

  virtual std::string name() const = 0;
  /// Symbol the backend uses for unknown words; the default mask token.
  virtual std::string unknown_token() const = 0;

  virtual ModelHandle train(const ParallelCorpus& parallel, const TrainConfig& cfg,
                            const TrainLabel& label) const = 0;
  virtual ModelHandle continue_train(const ModelHandle& model, const ParallelCorpus& parallel,
                                     const TrainConfig& cfg, const TrainLabel& label) const = 0;
  /// Puts a model into service for a different (related) language pair.
  virtual ModelHandle adopt_languages(const ModelHandle& model, std::string src_lang,
                                      std::string tgt_lang) const = 0;
  virtual std::vector<SentenceRecord> translate_batch(const ModelHandle& model,
                                                      std::span<const SentenceRecord> sentences) const = 0;
  virtual void save(const ModelHandle& model, const std::filesystem::path& path) const = 0;
  virtual ModelHandle load(const std::filesystem::path& path) const = 0;
};

/// Built-in lexical EM backend.
class LexicalBackend final : public TranslationBackend {
 public:
  std::string name() const override { return "lexical-em"; }
  std::string unknown_token() const override { return kUnknownToken; }
  ModelHandle train(const ParallelCorpus& parallel, const TrainConfig& cfg,
                    const TrainLabel& label) const override;
  ModelHandle continue_train(const ModelHandle& model, const ParallelCorpus& parallel,
                             const TrainConfig& cfg, const TrainLabel& label) const override;
  ModelHandle adopt_languages(const ModelHandle& model, std::string src_lang,
                              std::string tgt_lang) const override;
  std::vector<SentenceRecord> translate_batch(const ModelHandle& model,
                                              std::span<const SentenceRecord> sentences) const override;
  void save(const ModelHandle& model, const std::filesystem::path& path) const override;
  ModelHandle load(const std::filesystem::path& path) const override;

 private:
  static const LexicalModel& unwrap(const ModelHandle& model);
};

}  // namespace lrmt
