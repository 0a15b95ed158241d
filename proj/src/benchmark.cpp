#include "lrmt/benchmark.hpp"

#include "lrmt/io.hpp"
#include "lrmt/rng.hpp"

namespace lrmt {

namespace fs = std::filesystem;

namespace {

// Independent streams for every language and corpus.
enum Stream : std::uint64_t { kPivot = 1, kHr, kLr, kHrPivot, kLrMono, kHrMono, kLrDev, kLrTest, kLrHr };

SynthConfig with_seed(const SynthConfig& cfg, Stream s) {
  SynthConfig c = cfg;
  c.seed = derive_seed(cfg.seed, {s});
  return c;
}

}  // namespace

nlohmann::json BenchmarkSizes::to_json() const {
  return {{"hr_pivot", hr_pivot}, {"lr_mono", lr_mono}, {"hr_mono", hr_mono},
          {"lr_dev", lr_dev},     {"lr_test", lr_test}, {"lr_hr", lr_hr}};
}

SyntheticLanguages make_languages(const SynthConfig& cfg, const LanguageTags& tags) {
  cfg.validate();
  SyntheticLanguages l;
  l.pivot = gen_language(derive_seed(cfg.seed, {kPivot}), cfg.vocab_size, tags.pivot, Alphabet::Latin);
  l.hr = gen_language(derive_seed(cfg.seed, {kHr}), cfg.vocab_size, tags.hr, Alphabet::Kannada);
  l.lr = derive_related(l.hr, cfg.overlap, derive_seed(cfg.seed, {kLr}), tags.lr);
  return l;
}

PipelineConfig write_benchmark(const fs::path& dir, const SynthConfig& cfg, const BenchmarkSizes& sizes,
                               const LanguageTags& tags) {
  const SyntheticLanguages l = make_languages(cfg, tags);
  fs::create_directories(dir);
  const fs::path root = fs::absolute(dir).lexically_normal();

  PipelineConfig pc;
  pc.languages = tags;
  pc.seed = cfg.seed;
  pc.output_dir = root / "run";
  pc.corpora.hr_pivot = root / "hr_pivot.tsv";
  pc.corpora.lr_mono = root / "lr_mono.txt";
  pc.corpora.hr_mono = root / "hr_mono.txt";
  pc.corpora.lr_dev = root / "lr_dev.tsv";

  write_parallel(sample_parallel(l.hr, l.pivot, sizes.hr_pivot, with_seed(cfg, kHrPivot)), pc.corpora.hr_pivot);
  write_lines(sample_monolingual(l.lr, sizes.lr_mono, with_seed(cfg, kLrMono)), pc.corpora.lr_mono);
  write_lines(sample_monolingual(l.hr, sizes.hr_mono, with_seed(cfg, kHrMono)), pc.corpora.hr_mono);
  write_parallel(sample_parallel(l.pivot, l.lr, sizes.lr_dev, with_seed(cfg, kLrDev)), pc.corpora.lr_dev);
  if (sizes.lr_test > 0) {
    pc.corpora.lr_test = root / "lr_test.tsv";
    write_parallel(sample_parallel(l.pivot, l.lr, sizes.lr_test, with_seed(cfg, kLrTest)), *pc.corpora.lr_test);
  }
  if (sizes.lr_hr > 0) {
    pc.corpora.lr_hr = root / "lr_hr.tsv";
    write_parallel(sample_parallel(l.lr, l.hr, sizes.lr_hr, with_seed(cfg, kLrHr)), *pc.corpora.lr_hr);
  }

  nlohmann::json manifest{{"synth", cfg.to_json()},
                          {"sizes", sizes.to_json()},
                          {"languages", {{"pivot", tags.pivot}, {"hr", tags.hr}, {"lr", tags.lr}}},
                          {"language_seeds",
                           {{"pivot", l.pivot.seed}, {"hr", l.hr.seed}, {"lr", l.lr.seed}}},
                          {"shared_hr_lr_tokens", shared_token_count(l.hr, l.lr)},
                          {"tool", kToolVersion}};
  io::write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  io::write_file_atomic(root / "config.json", pc.to_json().dump(2) + "\n");
  return pc;
}

}  // namespace lrmt
