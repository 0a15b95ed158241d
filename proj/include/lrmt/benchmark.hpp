#pragma once

#include <cstddef>
#include <filesystem>

#include <json.hpp>

#include "lrmt/pipeline.hpp"
#include "lrmt/synthlang.hpp"

namespace lrmt {

struct BenchmarkSizes {
  std::size_t hr_pivot = 20000;
  std::size_t lr_mono = 2000;
  std::size_t hr_mono = 2000;
  std::size_t lr_dev = 300;
  std::size_t lr_test = 300;
  std::size_t lr_hr = 500;  // 0 disables the lr-hr corpus

  nlohmann::json to_json() const;
};

/// Three synthetic languages: a Latin-script pivot, a Kannada-script HR
/// language, and an LR language sharing round(overlap * N) words with HR.
struct SyntheticLanguages {
  LanguageSpec pivot;
  LanguageSpec hr;
  LanguageSpec lr;
};

SyntheticLanguages make_languages(const SynthConfig& cfg, const LanguageTags& tags = {});

/// Writes every corpus the pipeline reads into `dir`, plus manifest.json
/// (seeds and sizes) and config.json. Returns the pipeline config, whose
/// output_dir is dir/run.
PipelineConfig write_benchmark(const std::filesystem::path& dir, const SynthConfig& cfg,
                               const BenchmarkSizes& sizes = {}, const LanguageTags& tags = {});

}  // namespace lrmt
