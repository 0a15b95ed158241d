#include "lrmt/cli.hpp"

#include <CLI11.hpp>
#include <optional>
#include <sstream>

#include "lrmt/benchmark.hpp"
#include "lrmt/bleu.hpp"
#include "lrmt/corpus.hpp"
#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/noising.hpp"
#include "lrmt/pipeline.hpp"
#include "lrmt/script.hpp"
#include "lrmt/translator.hpp"

namespace lrmt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Lines of a plain text file, keeping empty ones; a final newline does not
// start another line.
std::vector<std::string> raw_lines(const fs::path& path) {
  const std::string text = io::read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

// Option storage for every subcommand; CLI11 writes into it during parsing.
struct Args {
  bool json = false;
  std::uint64_t seed = 0;
  fs::path in, out, dev_out, test_out, src, tgt, model, init, hyp, ref, config, dir;
  std::string lang, src_lang = "src", tgt_lang = "tgt", block;
  bool segment = false, dedup = false, shuffle = false, parallel = false, sft = false;
  std::size_t dev_n = 0, test_n = 0;
  double min_ratio = kDefaultScriptRatio;
  NoiseConfig noise;
  SynthConfig synth;
  BenchmarkSizes sizes;
  LanguageTags tags;
  TrainConfig train;
  std::optional<double> weight;
  std::optional<std::size_t> max_stages;
  std::optional<std::uint64_t> seed_override;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) { build(); }

  int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"lrmt"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app_.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      std::ostringstream o, d;
      const int code = app_.exit(e, o, d);
      out_ << o.str();
      err_ << d.str();
      return code == 0 ? kExitOk : kExitUsage;
    }
    try {
      if (action_) action_();
    } catch (const PipelineError& e) {
      err_ << "lrmt: " << e.what() << "\n";
      return kExitPipeline;
    } catch (const std::exception& e) {
      err_ << "lrmt: " << e.what() << "\n";
      return kExitData;
    }
    return rc_;
  }

 private:
  void emit(const json& j, const std::string& human) {
    if (a_.json)
      out_ << j.dump() << "\n";
    else
      out_ << human << "\n";
  }

  CLI::App* sub(CLI::App* parent, const std::string& name, const std::string& help, std::function<void()> body,
                bool json_flag = true) {
    CLI::App* cmd = parent->add_subcommand(name, help);
    if (json_flag) cmd->add_flag("--json", a_.json, "Machine-readable output");
    cmd->callback([this, body = std::move(body)] { action_ = body; });
    return cmd;
  }

  void seed_option(CLI::App* cmd) { cmd->add_option("--seed", a_.seed, "RNG seed")->envname("LRMT_SEED"); }

  void build();
  void print_ledger(const std::vector<StageRecord>& recs);

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Transfer-learning MT pipeline harness", "lrmt"};
  Args a_;
  LexicalBackend backend_;
  std::function<void()> action_;
  int rc_ = kExitOk;
};

void Cli::print_ledger(const std::vector<StageRecord>& recs) {
  if (a_.json) {
    json arr = json::array();
    for (const auto& r : recs) arr.push_back(r.to_json());
    out_ << arr.dump() << "\n";
    return;
  }
  for (const auto& r : recs) {
    out_ << r.step << "\t" << r.iteration << "\t" << to_string(r.direction) << "\t" << to_string(r.stage);
    if (r.bleu) out_ << "\t" << r.bleu->formatted();
    out_ << "\n";
  }
}

void Cli::build() {
  app_.require_subcommand(1);
  Args& a = a_;

  auto* ingest = sub(&app_, "ingest", "Normalize text to one sentence per line", [this, &a] {
    MonolingualCorpus corpus;
    if (a.segment) {
      const MonolingualCorpus pieces{a.lang, segment_text(io::read_file(a.in)), false};
      corpus = parse_lines(format_lines(pieces), a.lang, a.dedup);
    } else {
      corpus = ingest_lines(a.in, a.lang, a.dedup);
    }
    write_lines(corpus, a.out);
    emit({{"lang", a.lang}, {"sentences", corpus.size()}, {"output", a.out.string()}},
         std::to_string(corpus.size()) + " sentences");
  });
  ingest->add_option("--input", a.in)->required()->check(CLI::ExistingFile);
  ingest->add_option("--output", a.out)->required();
  ingest->add_option("--lang", a.lang)->required();
  ingest->add_flag("--segment", a.segment, "Split running text at sentence delimiters");
  ingest->add_flag("--dedup", a.dedup, "Drop repeated sentences");

  auto* split = sub(&app_, "split", "Cut a corpus into dev and test parts", [this, &a] {
    if (a.dev_out.empty()) a.dev_out = fs::path(a.in).concat(".dev");
    if (a.test_out.empty()) a.test_out = fs::path(a.in).concat(".test");
    std::optional<std::uint64_t> seed;
    if (a.shuffle) seed = a.seed;
    std::size_t nd = 0, nt = 0;
    if (a.parallel) {
      const auto s = make_split(ingest_parallel(a.in, "src", "tgt"), a.dev_n, a.test_n, seed);
      write_parallel(s.dev, a.dev_out);
      write_parallel(s.test, a.test_out);
      nd = s.dev.size();
      nt = s.test.size();
    } else {
      const auto s = make_split(ingest_lines(a.in, "und"), a.dev_n, a.test_n, seed);
      write_lines(s.dev, a.dev_out);
      write_lines(s.test, a.test_out);
      nd = s.dev.size();
      nt = s.test.size();
    }
    emit({{"dev", nd}, {"test", nt}, {"dev_out", a.dev_out.string()}, {"test_out", a.test_out.string()}},
         "dev " + std::to_string(nd) + ", test " + std::to_string(nt));
  });
  split->add_option("--input", a.in)->required()->check(CLI::ExistingFile);
  split->add_option("--dev", a.dev_n)->required();
  split->add_option("--test", a.test_n)->required();
  split->add_option("--dev-out", a.dev_out);
  split->add_option("--test-out", a.test_out);
  split->add_flag("--shuffle", a.shuffle, "Permute with --seed before slicing");
  split->add_flag("--parallel", a.parallel, "Input is a TSV parallel corpus");
  seed_option(split);

  auto* pair_cmd = sub(&app_, "pair", "Align two line files into a TSV parallel corpus", [this, &a] {
    const ParallelCorpus p = pair(ingest_lines(a.src, a.src_lang), ingest_lines(a.tgt, a.tgt_lang));
    write_parallel(p, a.out);
    emit({{"pairs", p.size()}, {"output", a.out.string()}}, std::to_string(p.size()) + " pairs");
  });
  pair_cmd->add_option("--src", a.src)->required()->check(CLI::ExistingFile);
  pair_cmd->add_option("--tgt", a.tgt)->required()->check(CLI::ExistingFile);
  pair_cmd->add_option("--src-lang", a.src_lang);
  pair_cmd->add_option("--tgt-lang", a.tgt_lang);
  pair_cmd->add_option("--output", a.out)->required();

  auto* vs = sub(&app_, "validate-script", "Check that sentences use the expected script", [this, &a] {
    const auto report = validate_corpus_script(ingest_lines(a.in, "und"), a.block, a.min_ratio);
    std::string human =
        std::to_string(report.checked) + " checked, " + std::to_string(report.issues.size()) + " flagged";
    for (const auto& i : report.issues) human += "\n" + std::to_string(i.index) + "\t" + i.reason;
    emit(report.to_json(), human);
    if (!report.passed()) {
      err_ << "lrmt: " << report.issues.size() << " sentences failed script validation\n";
      rc_ = kExitData;
    }
  });
  vs->add_option("--input", a.in)->required()->check(CLI::ExistingFile);
  vs->add_option("--block", a.block, "Expected Unicode block, e.g. Kannada")->required();
  vs->add_option("--min-ratio", a.min_ratio);

  auto* noise = sub(&app_, "noise", "Build denoising pairs from a monolingual corpus", [this, &a] {
    a.noise.seed = a.seed;
    const ParallelCorpus p = make_dae_pairs(ingest_lines(a.in, a.lang), a.noise);
    write_parallel(p, a.out);
    emit({{"pairs", p.size()}, {"output", a.out.string()}}, std::to_string(p.size()) + " pairs");
  });
  noise->add_option("--input", a.in)->required()->check(CLI::ExistingFile);
  noise->add_option("--output", a.out)->required();
  noise->add_option("--lang", a.lang)->required();
  noise->add_option("--max-shift", a.noise.max_shift);
  noise->add_option("--mask-prob", a.noise.mask_prob);
  noise->add_option("--mask-token", a.noise.mask_token);
  seed_option(noise);

  auto* synth = sub(&app_, "synth", "Generate a synthetic three-language benchmark", [this, &a] {
    a.synth.seed = a.seed;
    PipelineConfig pc = write_benchmark(a.out, a.synth, a.sizes, a.tags);
    const std::string cfg = (fs::absolute(a.out) / "config.json").lexically_normal().string();
    if (a.sft) {
      pc.supervised_finetune = true;
      io::write_file_atomic(cfg, pc.to_json().dump(2) + "\n");
    }
    emit({{"config", cfg}, {"seed", a.seed}}, "wrote " + cfg);
  });
  synth->add_option("--out", a.out)->required();
  synth->add_option("--vocab", a.synth.vocab_size);
  synth->add_option("--overlap", a.synth.overlap);
  synth->add_option("--len-min", a.synth.len_min);
  synth->add_option("--len-max", a.synth.len_max);
  synth->add_option("--zipf", a.synth.zipf_s);
  synth->add_option("--hr-pivot", a.sizes.hr_pivot);
  synth->add_option("--lr-mono", a.sizes.lr_mono);
  synth->add_option("--hr-mono", a.sizes.hr_mono);
  synth->add_option("--lr-dev", a.sizes.lr_dev);
  synth->add_option("--lr-test", a.sizes.lr_test);
  synth->add_option("--lr-hr", a.sizes.lr_hr);
  synth->add_option("--pivot-lang", a.tags.pivot);
  synth->add_option("--hr-lang", a.tags.hr);
  synth->add_option("--lr-lang", a.tags.lr);
  synth->add_flag("--supervised-finetune", a.sft, "Enable the supervised fine-tuning stage in config.json");
  seed_option(synth);

  auto* train_cmd = sub(&app_, "train", "Train or continue a lexical translation model", [this, &a] {
    a.train.seed = a.seed;
    if (a.weight) a.train.continue_weight = *a.weight;
    const ParallelCorpus p = ingest_parallel(a.in, a.src_lang, a.tgt_lang);
    const TrainLabel label{a.in.filename().string(), a.out.filename().string()};
    EmTrace trace;
    const LexicalModel m =
        a.init.empty() ? train(p, a.train, label, &trace) : continue_train(load_model(a.init), p, a.train, label);
    save(m, a.out);
    json j{{"output", a.out.string()},
           {"source_tokens", m.vocab_src().size()},
           {"target_tokens", m.vocab_tgt().size()}};
    if (!trace.log_likelihood.empty()) j["log_likelihood"] = trace.log_likelihood;
    emit(j, "saved " + a.out.string());
  });
  train_cmd->add_option("--corpus", a.in)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--src-lang", a.src_lang)->required();
  train_cmd->add_option("--tgt-lang", a.tgt_lang)->required();
  train_cmd->add_option("--output", a.out)->required();
  train_cmd->add_option("--epochs", a.train.em_epochs);
  train_cmd->add_option("--epsilon", a.train.smoothing_epsilon);
  train_cmd->add_option("--init", a.init, "Continue from this checkpoint")->check(CLI::ExistingFile);
  train_cmd->add_option("--weight", a.weight, "Weight kept from the --init model");
  seed_option(train_cmd);

  auto* translate = sub(&app_, "translate", "Translate one sentence per line", [this, &a] {
    const LexicalModel m = load_model(a.model);
    const MonolingualCorpus src = ingest_lines(a.in, m.src_lang());
    const MonolingualCorpus hyp{m.tgt_lang(), translate_batch(m, src.sentences), false};
    write_lines(hyp, a.out);
    emit({{"sentences", hyp.size()}, {"output", a.out.string()}}, std::to_string(hyp.size()) + " sentences");
  });
  translate->add_option("--model", a.model)->required()->check(CLI::ExistingFile);
  translate->add_option("--input", a.in)->required()->check(CLI::ExistingFile);
  translate->add_option("--output", a.out)->required();

  auto* bleu = sub(&app_, "bleu", "Corpus BLEU of a hypothesis file against a reference file", [this, &a] {
    const BleuScore s = corpus_bleu(raw_lines(a.hyp), raw_lines(a.ref));
    emit(s.to_json(), s.formatted());
  });
  bleu->add_option("--hyp", a.hyp)->required()->check(CLI::ExistingFile);
  bleu->add_option("--ref", a.ref)->required()->check(CLI::ExistingFile);

  auto* inspect = sub(
      &app_, "inspect", "Dump a checkpoint as JSON",
      [this, &a] { out_ << to_json(load_model(a.model)).dump(2) << "\n"; }, false);
  inspect->add_option("--model", a.model)->required()->check(CLI::ExistingFile);

  CLI::App* pipeline = app_.add_subcommand("pipeline", "Run or resume the iterative training schedule");
  pipeline->require_subcommand(1);

  auto* run = sub(pipeline, "run", "Execute the schedule from scratch", [this, &a] {
    PipelineConfig pc = PipelineConfig::load(a.config);
    if (!a.dir.empty()) pc.output_dir = fs::absolute(a.dir).lexically_normal();
    if (a.seed_override) pc.seed = *a.seed_override;
    RunOptions opts;
    opts.max_steps = a.max_stages;
    print_ledger(run_pipeline(pc, backend_, opts));
  });
  run->add_option("--config", a.config)->required()->check(CLI::ExistingFile);
  run->add_option("--output", a.dir, "Overrides output_dir of the config");
  run->add_option("--max-stages", a.max_stages, "Stop after this many steps");
  run->add_option("--seed", a.seed_override)->envname("LRMT_SEED");

  auto* res = sub(pipeline, "resume", "Continue an interrupted run", [this, &a] {
    std::optional<PipelineConfig> want;
    if (!a.config.empty()) {
      want = PipelineConfig::load(a.config);
      if (a.seed_override) want->seed = *a.seed_override;
    }
    RunOptions opts;
    opts.max_steps = a.max_stages;
    print_ledger(resume(a.dir, backend_, want, opts));
  });
  res->add_option("--dir", a.dir)->required()->check(CLI::ExistingDirectory);
  res->add_option("--config", a.config, "Refuse to resume unless this config matches")->check(CLI::ExistingFile);
  res->add_option("--max-stages", a.max_stages);
  res->add_option("--seed", a.seed_override, "Seed the --config run used")->envname("LRMT_SEED");

  auto* report = sub(&app_, "report", "Render a run's ledger as a table", [this, &a] {
    const LedgerFile ledger = read_ledger(a.dir / "ledger.jsonl");
    LanguageTags tags;
    if (fs::exists(a.dir / "config.json")) tags = PipelineConfig::load(a.dir / "config.json").languages;
    const auto rows = report_rows(ledger, tags);
    if (!a.json) {
      out_ << render_markdown(rows);
      return;
    }
    std::optional<json> final_eval;
    if (fs::exists(a.dir / "final_eval.json")) final_eval = json::parse(io::read_file(a.dir / "final_eval.json"));
    out_ << render_json(ledger, rows, final_eval).dump(2) << "\n";
  });
  report->add_option("--dir", a.dir)->required()->check(CLI::ExistingDirectory);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace lrmt
