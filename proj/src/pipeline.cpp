#include "lrmt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/rng.hpp"

namespace lrmt {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLedgerFile = "ledger.jsonl";
constexpr const char* kTimingsFile = "timings.jsonl";
constexpr const char* kConfigFile = "config.json";
constexpr const char* kFinalEvalFile = "final_eval.json";
constexpr const char* kDerivedId = "derived-pivot-lr";

std::string slug(Direction d) { return d == Direction::LrToPivot ? "lr2pivot" : "pivot2lr"; }

std::string task_slug(StageId s) {
  switch (s) {
    case StageId::SupervisedFineTune: return "sft";
    case StageId::GenerateBT: return "bt";
    default: return "t" + task_number(s);
  }
}

}  // namespace

std::vector<ScheduleStep> build_schedule(const PipelineConfig& cfg) {
  using D = Direction;
  using S = StageId;
  std::vector<ScheduleStep> steps;
  const std::size_t n = cfg.iterations;
  const std::size_t last_lr_block = std::max<std::size_t>(1, n - 1);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == 1) {
      steps.push_back({1, D::LrToPivot, S::FineTuneBase});
      steps.push_back({1, D::LrToPivot, S::GenerateBT});
    }
    for (S s : {S::TrainBT, S::TrainHRParallel, S::DaeHR, S::DaeLR, S::FineTuneBT})
      steps.push_back({k, D::PivotToLr, s});
    if (k <= last_lr_block) {
      steps.push_back({k, D::PivotToLr, S::GenerateBT});
      steps.push_back({k, D::LrToPivot, S::TrainBT});
      if (cfg.lr_to_pivot_task3) steps.push_back({k, D::LrToPivot, S::TrainHRParallel});
      for (S s : {S::DaeHR, S::DaeLR, S::FineTuneBT}) steps.push_back({k, D::LrToPivot, s});
      if (cfg.supervised_finetune) {
        steps.push_back({k, D::PivotToLr, S::SupervisedFineTune});
        steps.push_back({k, D::LrToPivot, S::SupervisedFineTune});
      }
      if (k < n) steps.push_back({k, D::LrToPivot, S::GenerateBT});
    } else if (cfg.supervised_finetune) {
      steps.push_back({k, D::PivotToLr, S::SupervisedFineTune});
    }
  }
  return steps;
}

std::uint64_t stage_seed(std::uint64_t pipeline_seed, std::size_t iteration, Direction d, StageId s) {
  return derive_seed(pipeline_seed, {static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(d),
                                     static_cast<std::uint64_t>(s)});
}

std::string checkpoint_id(std::size_t iteration, Direction d, StageId s) {
  return "it" + std::to_string(iteration) + "-" + slug(d) + "-" + task_slug(s);
}

PipelineState PipelineState::open(const PipelineConfig& cfg, const TranslationBackend& backend) {
  cfg.validate();
  const auto& l = cfg.languages;
  PipelineState st;
  st.config = cfg;
  st.backend = &backend;
  st.hr_pivot = ingest_parallel(cfg.corpora.hr_pivot, l.hr, l.pivot);
  st.lr_mono = ingest_lines(cfg.corpora.lr_mono, l.lr);
  st.hr_mono = ingest_lines(cfg.corpora.hr_mono, l.hr);
  st.lr_dev = ingest_parallel(cfg.corpora.lr_dev, l.pivot, l.lr);
  st.lr_dev_reversed = st.lr_dev.swapped();
  if (cfg.corpora.lr_test) st.lr_test = ingest_parallel(*cfg.corpora.lr_test, l.pivot, l.lr);
  if (cfg.corpora.lr_hr) st.lr_hr = ingest_parallel(*cfg.corpora.lr_hr, l.lr, l.hr);
  return st;
}

const ParallelCorpus& PipelineState::dev_for(Direction d) const {
  return d == Direction::PivotToLr ? lr_dev : lr_dev_reversed;
}

fs::path PipelineState::checkpoint_path(const std::string& id) const {
  return config.output_dir / "checkpoints" / (id + ".lrmt");
}

fs::path PipelineState::corpus_path(const std::string& id) const {
  return config.output_dir / "corpora" / (id + ".tsv");
}

ParallelCorpus generate_bt(const TranslationBackend& backend, const ModelHandle& model,
                           const MonolingualCorpus& source) {
  if (model->src_lang() != source.lang_tag)
    throw LanguageMismatchError("back-translation model reads " + model->src_lang() + " but the corpus is " +
                                source.lang_tag);
  const auto translated = backend.translate_batch(model, source.sentences);
  ParallelCorpus out{model->tgt_lang(), source.lang_tag, {}};
  out.pairs.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) out.pairs.push_back({translated[i], source.sentences[i]});
  return out;
}

ParallelCorpus regenerate_bt_for_other_direction(const PipelineState& state, Direction from) {
  auto it = state.latest.find(from);
  if (it == state.latest.end() || it->second.stage != StageId::FineTuneBT)
    throw SequencingError("regenerating back-translations needs a finished FineTuneBT model for " +
                          to_string(from));
  const TranslationBackend& be = *state.backend;
  if (from == Direction::LrToPivot) return generate_bt(be, it->second.model, state.lr_mono);

  auto bt = state.bt.find(Direction::PivotToLr);
  if (bt == state.bt.end())
    throw SequencingError("no PivotToLr back-translation set to regenerate from");
  // Translate the pivot side into LR; the pivot side becomes the target.
  return generate_bt(be, it->second.model, bt->second.source_side());
}

ParallelCorpus derive_parallel_via_pivot(const TranslationBackend& backend, const ParallelCorpus& lr_hr,
                                         const ModelHandle& hr_to_pivot) {
  if (hr_to_pivot->src_lang() != lr_hr.tgt_lang)
    throw LanguageMismatchError("pivot model reads " + hr_to_pivot->src_lang() + " but the HR side is " +
                                lr_hr.tgt_lang);
  const MonolingualCorpus hr_side = lr_hr.target_side();
  const auto pivot = backend.translate_batch(hr_to_pivot, hr_side.sentences);
  ParallelCorpus out{hr_to_pivot->tgt_lang(), lr_hr.src_lang, {}};
  out.pairs.reserve(lr_hr.size());
  for (std::size_t i = 0; i < lr_hr.size(); ++i) out.pairs.push_back({pivot[i], lr_hr.pairs[i].source});
  return out;
}

StageRecord run_stage(PipelineState& st, std::size_t iteration, StageId stage, Direction d) {
  const auto started = std::chrono::steady_clock::now();
  const PipelineConfig& cfg = st.config;
  const TranslationBackend& be = *st.backend;
  const LanguageTags& tags = cfg.languages;

  StageRecord rec;
  rec.step = st.ledger.size();
  rec.iteration = iteration;
  rec.direction = d;
  rec.stage = stage;
  rec.seed = stage_seed(cfg.seed, iteration, d, stage);

  const std::string id = checkpoint_id(iteration, d, stage);
  TrainConfig tc = cfg.train_for(stage);
  tc.seed = rec.seed;
  const std::string where = to_string(stage) + " (" + to_string(d) + ", iteration " + std::to_string(iteration) + ")";

  auto need_latest = [&]() -> const ModelSlot& {
    auto it = st.latest.find(d);
    if (it == st.latest.end())
      throw StagePreconditionError(where + ": missing input model for " + to_string(d));
    return it->second;
  };
  auto need_bt = [&]() -> const ParallelCorpus& {
    auto it = st.bt.find(d);
    if (it == st.bt.end())
      throw StagePreconditionError(where + ": missing back-translation set for " + to_string(d));
    return it->second;
  };

  ModelHandle out;
  switch (stage) {
    case StageId::FineTuneBase: {
      if (d != Direction::LrToPivot)
        throw StagePreconditionError(where + ": FineTuneBase runs in the LrToPivot direction only");
      rec.input_model = kPretrainedBase;
      rec.corpora = {"hr_pivot"};
      const ModelHandle hr_model = be.train(st.hr_pivot, tc, {"hr_pivot", id});
      out = be.adopt_languages(hr_model, tags.lr, tags.pivot);
      break;
    }
    case StageId::TrainBT:
    case StageId::FineTuneBT: {
      const ParallelCorpus& bt = need_bt();
      rec.corpora = {st.bt_id.at(d)};
      auto it = st.latest.find(d);
      if (it == st.latest.end()) {
        if (stage == StageId::FineTuneBT)
          throw StagePreconditionError(where + ": missing input model for " + to_string(d));
        rec.input_model = kPretrainedBase;
        out = be.train(bt, tc, {rec.corpora[0], id});
      } else {
        rec.input_model = it->second.id;
        out = be.continue_train(it->second.model, bt, tc, {rec.corpora[0], id});
      }
      break;
    }
    case StageId::TrainHRParallel: {
      const ModelSlot& slot = need_latest();
      rec.input_model = slot.id;
      const bool reversed = d == Direction::PivotToLr;
      const ParallelCorpus corpus = reversed ? st.hr_pivot.swapped() : st.hr_pivot;
      rec.corpora = {reversed ? "hr_pivot.reversed" : "hr_pivot"};
      // Train on the related-language pair, then return to the model's own pair.
      const ModelHandle as_hr = be.adopt_languages(slot.model, corpus.src_lang, corpus.tgt_lang);
      const ModelHandle trained = be.continue_train(as_hr, corpus, tc, {rec.corpora[0], id});
      out = be.adopt_languages(trained, slot.model->src_lang(), slot.model->tgt_lang());
      break;
    }
    case StageId::DaeHR:
    case StageId::DaeLR: {
      const ModelSlot& slot = need_latest();
      rec.input_model = slot.id;
      NoiseConfig nc = cfg.noise;
      nc.seed = rec.seed;
      const bool hr = stage == StageId::DaeHR;
      rec.corpora = {hr ? "dae:hr_mono" : "dae:lr_mono"};
      const ParallelCorpus dae = make_dae_pairs(hr ? st.hr_mono : st.lr_mono, nc);
      out = be.continue_train(slot.model, dae, tc, {rec.corpora[0], id});
      break;
    }
    case StageId::SupervisedFineTune: {
      const ModelSlot& slot = need_latest();
      rec.input_model = slot.id;
      if (!st.lr_hr) throw StagePreconditionError(where + ": missing artifact lr_hr parallel corpus");
      if (!st.base) throw StagePreconditionError(where + ": missing artifact task-1 model");
      if (!st.derived) {
        const ModelHandle hr_to_pivot = be.adopt_languages(st.base->model, tags.hr, tags.pivot);
        st.derived = derive_parallel_via_pivot(be, *st.lr_hr, hr_to_pivot);
        write_parallel(*st.derived, st.corpus_path(kDerivedId));
      }
      rec.corpora = {kDerivedId};
      const ParallelCorpus corpus = d == Direction::PivotToLr ? *st.derived : st.derived->swapped();
      out = be.continue_train(slot.model, corpus, tc, {kDerivedId, id});
      break;
    }
    case StageId::GenerateBT: {
      const ModelSlot& slot = need_latest();
      rec.input_model = slot.id;
      ParallelCorpus bt;
      std::size_t consumer_iteration = iteration;
      if (d == Direction::LrToPivot && slot.stage == StageId::FineTuneBase) {
        rec.corpora = {"lr_mono"};
        bt = generate_bt(be, slot.model, st.lr_mono);
      } else {
        bt = regenerate_bt_for_other_direction(st, d);
        if (d == Direction::LrToPivot) {
          rec.corpora = {"lr_mono"};
          consumer_iteration = iteration + 1;
        } else {
          rec.corpora = {st.bt_id.at(Direction::PivotToLr)};
        }
      }
      const Direction target = opposite(d);
      const std::string cid = "bt-it" + std::to_string(consumer_iteration) + "-" + slug(target);
      write_parallel(bt, st.corpus_path(cid));
      st.bt[target] = std::move(bt);
      st.bt_id[target] = cid;
      rec.output_corpus = cid;
      break;
    }
  }

  if (out) {
    be.save(out, st.checkpoint_path(id));
    rec.output_model = id;
    rec.bleu = evaluate_model(be, out, st.dev_for(d));
    ModelSlot slot{id, out, iteration, stage};
    if (stage == StageId::FineTuneBase) st.base = slot;
    if (stage != StageId::SupervisedFineTune) st.latest[d] = std::move(slot);
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  st.ledger.push_back(rec);
  return rec;
}

namespace {

void append_line(const fs::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw PipelineError("cannot append to " + path.string());
  out << line;
  out.flush();
  if (!out) throw PipelineError("write failed for " + path.string());
}

void write_final_eval(const PipelineState& st) {
  if (!st.lr_test) return;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : st.ledger) {
    if (r.stage != StageId::FineTuneBT && r.stage != StageId::SupervisedFineTune) continue;
    const ModelHandle m = st.backend->load(st.checkpoint_path(r.output_model));
    const ParallelCorpus test = r.direction == Direction::PivotToLr ? *st.lr_test : st.lr_test->swapped();
    rows.push_back({{"model", r.output_model},
                    {"iteration", r.iteration},
                    {"direction", to_string(r.direction)},
                    {"stage", to_string(r.stage)},
                    {"bleu", evaluate_model(*st.backend, m, test).to_json()}});
  }
  io::write_file_atomic(st.config.output_dir / kFinalEvalFile, nlohmann::json{{"test", rows}}.dump(2) + "\n");
}

std::vector<StageRecord> execute(PipelineState& st, const std::vector<ScheduleStep>& schedule,
                                 const RunOptions& opts) {
  const fs::path ledger_path = st.config.output_dir / kLedgerFile;
  const fs::path timings_path = st.config.output_dir / kTimingsFile;
  std::size_t committed = 0;
  while (st.ledger.size() < schedule.size()) {
    if (opts.max_steps && committed >= *opts.max_steps) return st.ledger;
    const ScheduleStep& step = schedule[st.ledger.size()];
    StageRecord rec;
    try {
      rec = run_stage(st, step.iteration, step.stage, step.direction);
    } catch (const PipelineError&) {
      throw;
    } catch (const std::exception& e) {
      throw PipelineError("step " + std::to_string(st.ledger.size()) + " " + to_string(step.stage) + " (" +
                          to_string(step.direction) + ", iteration " + std::to_string(step.iteration) +
                          ") failed: " + e.what());
    }
    append_line(ledger_path, ledger_record_line(rec));
    append_line(timings_path, nlohmann::json{{"step", rec.step}, {"wall_time", rec.wall_time}}.dump() + "\n");
    ++committed;
    if (opts.on_commit) opts.on_commit(rec);
  }
  write_final_eval(st);
  return st.ledger;
}

void restore(PipelineState& st, const StageRecord& r) {
  const TranslationBackend& be = *st.backend;
  const auto& tags = st.config.languages;
  auto last = [&] { return "last valid record: step " + std::to_string(r.step == 0 ? 0 : r.step - 1); };
  if (is_trainable(r.stage)) {
    const fs::path p = st.checkpoint_path(r.output_model);
    if (!fs::exists(p)) throw ResumeError("checkpoint " + p.string() + " is missing; " + last());
    ModelHandle m;
    try {
      m = be.load(p);
    } catch (const DataError& e) {
      throw ResumeError(std::string(e.what()) + "; " + last());
    }
    ModelSlot slot{r.output_model, m, r.iteration, r.stage};
    if (r.stage == StageId::FineTuneBase) st.base = slot;
    if (r.stage != StageId::SupervisedFineTune) st.latest[r.direction] = std::move(slot);
    if (r.stage == StageId::SupervisedFineTune && !st.derived) {
      const fs::path dp = st.corpus_path(kDerivedId);
      if (!fs::exists(dp)) throw ResumeError("derived corpus " + dp.string() + " is missing; " + last());
      st.derived = ingest_parallel(dp, tags.pivot, tags.lr);
    }
  } else {
    const Direction target = opposite(r.direction);
    const fs::path p = st.corpus_path(r.output_corpus);
    if (!fs::exists(p)) throw ResumeError("corpus " + p.string() + " is missing; " + last());
    const bool to_lr = target == Direction::PivotToLr;
    try {
      st.bt[target] = ingest_parallel(p, to_lr ? tags.pivot : tags.lr, to_lr ? tags.lr : tags.pivot);
    } catch (const DataError& e) {
      throw ResumeError(std::string(e.what()) + "; " + last());
    }
    st.bt_id[target] = r.output_corpus;
  }
}

}  // namespace

std::vector<StageRecord> run_pipeline(const PipelineConfig& cfg, const TranslationBackend& backend,
                                      const RunOptions& opts) {
  PipelineState st = PipelineState::open(cfg, backend);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir / "checkpoints");
  fs::create_directories(dir / "corpora");
  fs::remove(dir / kLedgerFile);
  fs::remove(dir / kTimingsFile);
  fs::remove(dir / kFinalEvalFile);
  io::write_file_atomic(dir / kConfigFile, cfg.to_json().dump(2) + "\n");
  append_line(dir / kLedgerFile, ledger_header_line({kToolVersion, cfg.hash(), backend.name()}));
  return execute(st, build_schedule(cfg), opts);
}

std::vector<StageRecord> resume(const fs::path& output_dir, const TranslationBackend& backend,
                                const std::optional<PipelineConfig>& expected, const RunOptions& opts) {
  const fs::path cfg_path = output_dir / kConfigFile;
  if (!fs::exists(cfg_path)) throw ResumeError("no pipeline config in " + output_dir.string());
  PipelineConfig cfg;
  try {
    cfg = PipelineConfig::load(cfg_path);
  } catch (const DataError& e) {
    throw ResumeError(std::string("stored config unreadable: ") + e.what());
  }
  cfg.output_dir = fs::absolute(output_dir).lexically_normal();
  const LedgerFile ledger = read_ledger(output_dir / kLedgerFile);
  if (ledger.header.config_hash != cfg.hash())
    throw ConfigMismatchError("stored config hash " + cfg.hash() + " does not match ledger hash " +
                              ledger.header.config_hash);
  if (expected && expected->hash() != ledger.header.config_hash)
    throw ConfigMismatchError("config hash " + expected->hash() + " does not match ledger hash " +
                              ledger.header.config_hash + "; refusing to resume");
  if (ledger.header.backend != backend.name())
    throw ConfigMismatchError("ledger was written by backend " + ledger.header.backend);

  const auto schedule = build_schedule(cfg);
  if (ledger.records.size() > schedule.size())
    throw ResumeError("ledger has more records than the schedule has steps");
  PipelineState st = PipelineState::open(cfg, backend);
  for (const auto& r : ledger.records) {
    const ScheduleStep& want = schedule[r.step];
    if (want != ScheduleStep{r.iteration, r.direction, r.stage})
      throw ResumeError("ledger step " + std::to_string(r.step) + " does not follow the schedule");
    restore(st, r);
  }
  st.ledger = ledger.records;
  return execute(st, schedule, opts);
}

}  // namespace lrmt
