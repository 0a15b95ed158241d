#include "lrmt/backend.hpp"

#include "lrmt/error.hpp"

namespace lrmt {

const LexicalModel& LexicalBackend::unwrap(const ModelHandle& model) {
  if (!model) throw ConfigError("null model handle");
  const auto* lex = dynamic_cast<const LexicalModel*>(model.get());
  if (!lex) throw ConfigError("model was not produced by the lexical backend");
  return *lex;
}

ModelHandle LexicalBackend::train(const ParallelCorpus& parallel, const TrainConfig& cfg,
                                  const TrainLabel& label) const {
  return std::make_shared<const LexicalModel>(lrmt::train(parallel, cfg, label));
}

ModelHandle LexicalBackend::continue_train(const ModelHandle& model, const ParallelCorpus& parallel,
                                           const TrainConfig& cfg, const TrainLabel& label) const {
  return std::make_shared<const LexicalModel>(lrmt::continue_train(unwrap(model), parallel, cfg, label));
}

ModelHandle LexicalBackend::adopt_languages(const ModelHandle& model, std::string src_lang,
                                            std::string tgt_lang) const {
  return std::make_shared<const LexicalModel>(
      lrmt::adopt_languages(unwrap(model), std::move(src_lang), std::move(tgt_lang)));
}

std::vector<SentenceRecord> LexicalBackend::translate_batch(const ModelHandle& model,
                                                            std::span<const SentenceRecord> sentences) const {
  return lrmt::translate_batch(unwrap(model), sentences);
}

void LexicalBackend::save(const ModelHandle& model, const std::filesystem::path& path) const {
  lrmt::save(unwrap(model), path);
}

ModelHandle LexicalBackend::load(const std::filesystem::path& path) const {
  return std::make_shared<const LexicalModel>(load_model(path));
}

}  // namespace lrmt
