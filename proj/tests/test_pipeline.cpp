#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/pipeline.hpp"
#include "lrmt/translator.hpp"
#include "small_bench.hpp"

using namespace lrmt;
namespace fs = std::filesystem;

namespace {

using D = Direction;
using S = StageId;

std::vector<ScheduleStep> trainable(const std::vector<ScheduleStep>& s) {
  std::vector<ScheduleStep> out;
  std::copy_if(s.begin(), s.end(), std::back_inserter(out), [](const ScheduleStep& x) { return is_trainable(x.stage); });
  return out;
}

std::string ledger_bytes(const fs::path& dir) { return io::read_file(dir / "ledger.jsonl"); }

const LexicalModel& lex(const ModelHandle& m) { return dynamic_cast<const LexicalModel&>(*m); }

}  // namespace

TEST_CASE("two-iteration schedule rows") {
  PipelineConfig cfg;
  const auto rows = trainable(build_schedule(cfg));
  const std::vector<ScheduleStep> expected{
      {1, D::LrToPivot, S::FineTuneBase}, {1, D::PivotToLr, S::TrainBT},    {1, D::PivotToLr, S::TrainHRParallel},
      {1, D::PivotToLr, S::DaeHR},        {1, D::PivotToLr, S::DaeLR},      {1, D::PivotToLr, S::FineTuneBT},
      {1, D::LrToPivot, S::TrainBT},      {1, D::LrToPivot, S::DaeHR},      {1, D::LrToPivot, S::DaeLR},
      {1, D::LrToPivot, S::FineTuneBT},   {2, D::PivotToLr, S::TrainBT},    {2, D::PivotToLr, S::TrainHRParallel},
      {2, D::PivotToLr, S::DaeHR},        {2, D::PivotToLr, S::DaeLR},      {2, D::PivotToLr, S::FineTuneBT}};
  CHECK(rows == expected);

  const auto all = build_schedule(cfg);
  CHECK(all.size() == 18);
  CHECK(all[1] == ScheduleStep{1, D::LrToPivot, S::GenerateBT});
  CHECK(all[7] == ScheduleStep{1, D::PivotToLr, S::GenerateBT});
  CHECK(all[12] == ScheduleStep{1, D::LrToPivot, S::GenerateBT});
}

TEST_CASE("schedule options") {
  PipelineConfig cfg;
  cfg.lr_to_pivot_task3 = true;
  CHECK(trainable(build_schedule(cfg)).size() == 16);

  cfg = PipelineConfig{};
  cfg.supervised_finetune = true;
  const auto rows = trainable(build_schedule(cfg));
  CHECK(rows.size() == 18);
  std::vector<ScheduleStep> sft;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(sft),
               [](const ScheduleStep& s) { return s.stage == S::SupervisedFineTune; });
  CHECK(sft == std::vector<ScheduleStep>{{1, D::PivotToLr, S::SupervisedFineTune},
                                         {1, D::LrToPivot, S::SupervisedFineTune},
                                         {2, D::PivotToLr, S::SupervisedFineTune}});

  cfg = PipelineConfig{};
  cfg.iterations = 1;
  CHECK(trainable(build_schedule(cfg)).size() == 10);
  cfg.iterations = 3;
  CHECK(trainable(build_schedule(cfg)).size() == 24);
}

TEST_CASE("stage seeds and ids") {
  CHECK(stage_seed(1, 1, D::PivotToLr, S::DaeLR) == stage_seed(1, 1, D::PivotToLr, S::DaeLR));
  CHECK(stage_seed(1, 1, D::PivotToLr, S::DaeLR) != stage_seed(1, 2, D::PivotToLr, S::DaeLR));
  CHECK(stage_seed(1, 1, D::PivotToLr, S::DaeLR) != stage_seed(1, 1, D::LrToPivot, S::DaeLR));
  CHECK(checkpoint_id(2, D::PivotToLr, S::DaeHR) == "it2-pivot2lr-t4a");
  CHECK(checkpoint_id(1, D::LrToPivot, S::SupervisedFineTune) == "it1-lr2pivot-sft");
}

TEST_CASE("config json round trip and hash") {
  TempDir dir("cfg");
  const PipelineConfig cfg = small_benchmark(dir);
  const auto again = PipelineConfig::from_json(cfg.to_json(), dir.path());
  CHECK(again.hash() == cfg.hash());
  PipelineConfig moved = cfg;
  moved.output_dir = dir / "elsewhere";
  CHECK(moved.hash() == cfg.hash());
  PipelineConfig reseeded = cfg;
  reseeded.seed = 99;
  CHECK(reseeded.hash() != cfg.hash());

  nlohmann::json j = cfg.to_json();
  j["iterations"] = 0;
  CHECK_THROWS_AS(PipelineConfig::from_json(j, dir.path()).validate(), ConfigError);
  j = cfg.to_json();
  j["corpora"]["lr_mono"] = "missing.txt";
  CHECK_THROWS_AS(PipelineConfig::from_json(j, dir.path()).validate(), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json{{"iterations", "two"}}, dir.path()), ConfigError);
}

TEST_CASE("full run") {
  TempDir dir("run");
  PipelineConfig cfg = small_benchmark(dir);
  LexicalBackend be;
  const auto ledger = run_pipeline(cfg, be);
  REQUIRE(ledger.size() == build_schedule(cfg).size());

  SUBCASE("ledger completeness") {
    std::size_t rows = 0;
    for (const auto& r : ledger) {
      if (!is_trainable(r.stage)) {
        CHECK(!r.output_corpus.empty());
        CHECK(fs::exists(cfg.output_dir / "corpora" / (r.output_corpus + ".tsv")));
        continue;
      }
      ++rows;
      CHECK(!r.input_model.empty());
      CHECK(!r.corpora.empty());
      CHECK(!r.output_model.empty());
      REQUIRE(r.bleu.has_value());
      CHECK(r.bleu->score >= 0.0);
      CHECK(fs::exists(cfg.output_dir / "checkpoints" / (r.output_model + ".lrmt")));
    }
    CHECK(rows == 15);
  }

  SUBCASE("checkpoint lineage") {
    for (const auto& r : ledger) {
      if (!is_trainable(r.stage) || r.input_model == kPretrainedBase) continue;
      const auto in = be.load(cfg.output_dir / "checkpoints" / (r.input_model + ".lrmt"));
      const auto out = be.load(cfg.output_dir / "checkpoints" / (r.output_model + ".lrmt"));
      REQUIRE(out->history().size() > in->history().size());
      CHECK(std::equal(in->history().begin(), in->history().end(), out->history().begin()));
    }
  }

  SUBCASE("no stage consumes a later artifact") {
    std::set<std::string> produced{kPretrainedBase, "hr_pivot", "hr_pivot.reversed", "lr_mono", "dae:lr_mono",
                                   "dae:hr_mono", "derived-pivot-lr"};
    for (const auto& r : ledger) {
      CHECK(produced.count(r.input_model) == 1);
      for (const auto& c : r.corpora) CHECK(produced.count(c) == 1);
      produced.insert(r.output_model);
      produced.insert(r.output_corpus);
    }
  }

  SUBCASE("DaeLR trains on noised LR mapped to clean LR") {
    const auto it = std::find_if(ledger.begin(), ledger.end(), [](const StageRecord& r) { return r.stage == S::DaeLR; });
    REQUIRE(it != ledger.end());
    CHECK(it->corpora == std::vector<std::string>{"dae:lr_mono"});
    const auto m = be.load(cfg.output_dir / "checkpoints" / (it->output_model + ".lrmt"));
    CHECK(m->history().back().corpus_id == "dae:lr_mono");
    CHECK(m->history().back().seed == it->seed);
  }

  SUBCASE("same config twice gives byte-identical ledgers") {
    PipelineConfig other = cfg;
    other.output_dir = dir / "run2";
    run_pipeline(other, be);
    CHECK(ledger_bytes(cfg.output_dir) == ledger_bytes(other.output_dir));
  }

  SUBCASE("report") {
    const auto lf = read_ledger(cfg.output_dir / "ledger.jsonl");
    const auto rows = report_rows(lf, cfg.languages);
    REQUIRE(rows.size() == 15);
    CHECK(rows[0].direction == "TCY–EN");
    CHECK(rows[0].task_no == "1");
    CHECK(rows[0].languages == "KN–EN");
    CHECK(rows[2].task == "training with parallel");
    CHECK(rows[2].languages == "EN–KN");
    CHECK(rows[4].languages == "TCY");
    const std::string md = render_markdown(rows);
    CHECK(md.rfind("| Iteration | Direction | Task no. | Task | Languages | BLEU |\n", 0) == 0);
    const auto j = render_json(lf, rows, std::nullopt);
    CHECK(j["rows"].size() == 15);
    CHECK(j["config_hash"] == cfg.hash());
    CHECK(fs::exists(cfg.output_dir / "final_eval.json"));
  }
}

TEST_CASE("resume") {
  TempDir dir("resume");
  const PipelineConfig cfg = small_benchmark(dir);
  LexicalBackend be;
  run_pipeline(cfg, be);
  const std::string full = ledger_bytes(cfg.output_dir);
  const std::size_t steps = build_schedule(cfg).size();

  SUBCASE("interrupt after every step") {
    for (std::size_t k = 1; k < steps; ++k) {
      PipelineConfig c = cfg;
      c.output_dir = dir / ("cut" + std::to_string(k));
      RunOptions stop;
      stop.max_steps = k;
      CHECK(run_pipeline(c, be, stop).size() == k);
      const auto done = resume(c.output_dir, be);
      CHECK(done.size() == steps);
      CHECK(ledger_bytes(c.output_dir) == full);
    }
  }
  SUBCASE("completed run is a no-op") {
    std::size_t commits = 0;
    RunOptions count;
    count.on_commit = [&](const StageRecord&) { ++commits; };
    resume(cfg.output_dir, be, cfg, count);
    CHECK(commits == 0);
    CHECK(ledger_bytes(cfg.output_dir) == full);
  }
  SUBCASE("altered config is refused") {
    PipelineConfig altered = cfg;
    altered.noise.mask_prob = 0.2;
    CHECK_THROWS_AS(resume(cfg.output_dir, be, altered), ConfigMismatchError);
  }
  SUBCASE("corrupted ledger names the last valid record") {
    std::string bytes = full;
    const auto pos = bytes.find("\n{", bytes.find("\n{") + 1);  // start of the second record
    bytes = bytes.substr(0, pos + 1) + "{not json\n";
    io::write_file_atomic(cfg.output_dir / "ledger.jsonl", bytes);
    try {
      resume(cfg.output_dir, be);
      FAIL("expected ResumeError");
    } catch (const ResumeError& e) {
      const std::string what = e.what();
      CHECK(what.find("line 3") != std::string::npos);
      CHECK(what.find("last valid record: step 0") != std::string::npos);
    }
  }
  SUBCASE("missing checkpoint") {
    fs::remove(cfg.output_dir / "checkpoints" / "it1-pivot2lr-t2.lrmt");
    CHECK_THROWS_AS(resume(cfg.output_dir, be), ResumeError);
  }
  SUBCASE("missing ledger") {
    fs::remove(cfg.output_dir / "ledger.jsonl");
    CHECK_THROWS_AS(resume(cfg.output_dir, be), ResumeError);
  }
}

TEST_CASE("supervised fine-tuning run") {
  TempDir dir("sft");
  PipelineConfig cfg = small_benchmark(dir);
  cfg.supervised_finetune = true;
  LexicalBackend be;
  const auto ledger = run_pipeline(cfg, be);
  std::size_t sft = 0;
  for (const auto& r : ledger) sft += r.stage == S::SupervisedFineTune;
  CHECK(sft == 3);
  const auto derived = ingest_parallel(cfg.output_dir / "corpora" / "derived-pivot-lr.tsv", "en", "tcy");
  CHECK(derived.size() == 80);
  // LR side is the lr_hr corpus verbatim.
  const auto lr_hr = ingest_parallel(*cfg.corpora.lr_hr, "tcy", "kn");
  for (std::size_t i = 0; i < derived.size(); ++i) CHECK(derived.pairs[i].target.text == lr_hr.pairs[i].source.text);

  PipelineConfig no_lr_hr = cfg;
  no_lr_hr.corpora.lr_hr.reset();
  CHECK_THROWS_AS(no_lr_hr.validate(), ConfigError);
}

TEST_CASE("individual stages") {
  TempDir dir("stages");
  PipelineConfig cfg = small_benchmark(dir);
  fs::create_directories(cfg.output_dir / "checkpoints");
  fs::create_directories(cfg.output_dir / "corpora");
  LexicalBackend be;
  PipelineState st = PipelineState::open(cfg, be);

  CHECK_THROWS_AS(run_stage(st, 1, S::FineTuneBT, D::PivotToLr), StagePreconditionError);
  CHECK_THROWS_AS(run_stage(st, 1, S::DaeLR, D::LrToPivot), StagePreconditionError);
  CHECK_THROWS_AS(run_stage(st, 1, S::FineTuneBase, D::PivotToLr), StagePreconditionError);
  CHECK_THROWS_AS(regenerate_bt_for_other_direction(st, D::PivotToLr), SequencingError);

  run_stage(st, 1, S::FineTuneBase, D::LrToPivot);
  run_stage(st, 1, S::GenerateBT, D::LrToPivot);

  SUBCASE("first back-translation set is (pivot synthetic, LR original)") {
    const auto& bt = st.bt.at(D::PivotToLr);
    CHECK(bt.src_lang == "en");
    CHECK(bt.tgt_lang == "tcy");
    CHECK(bt.size() == st.lr_mono.size());
    CHECK(bt.target_side().sentences == st.lr_mono.sentences);
  }

  SUBCASE("regeneration after PivotToLr task 5") {
    for (S s : {S::TrainBT, S::TrainHRParallel, S::DaeHR, S::DaeLR, S::FineTuneBT}) run_stage(st, 1, s, D::PivotToLr);
    const ParallelCorpus fwd = st.bt.at(D::PivotToLr);
    const auto regen = regenerate_bt_for_other_direction(st, D::PivotToLr);
    CHECK(regen.src_lang == "tcy");
    CHECK(regen.tgt_lang == "en");
    CHECK(regen.size() == fwd.size());
    CHECK(regen.target_side().sentences == fwd.source_side().sentences);

    run_stage(st, 1, S::GenerateBT, D::PivotToLr);
    for (S s : {S::TrainBT, S::DaeHR, S::DaeLR, S::FineTuneBT}) run_stage(st, 1, s, D::LrToPivot);
    const auto back = regenerate_bt_for_other_direction(st, D::LrToPivot);
    CHECK(back.src_lang == "en");
    CHECK(back.tgt_lang == "tcy");
    CHECK(back.target_side().sentences == st.lr_mono.sentences);
  }

  SUBCASE("FineTuneBT with weight 1 keeps its input model") {
    for (S s : {S::TrainBT, S::TrainHRParallel, S::DaeHR, S::DaeLR}) run_stage(st, 1, s, D::PivotToLr);
    TrainConfig keep = cfg.train;
    keep.continue_weight = 1.0;
    st.config.stage_train[S::FineTuneBT] = keep;
    const ModelHandle before = st.latest.at(D::PivotToLr).model;
    const auto rec = run_stage(st, 1, S::FineTuneBT, D::PivotToLr);
    CHECK(lex(st.latest.at(D::PivotToLr).model).lexicon() == lex(before).lexicon());
    CHECK(rec.bleu->score == st.ledger[st.ledger.size() - 2].bleu->score);
  }

  SUBCASE("TrainHRParallel leaves the model on its own language pair") {
    run_stage(st, 1, S::TrainBT, D::PivotToLr);
    const auto rec = run_stage(st, 1, S::TrainHRParallel, D::PivotToLr);
    CHECK(rec.corpora == std::vector<std::string>{"hr_pivot.reversed"});
    const auto& m = *st.latest.at(D::PivotToLr).model;
    CHECK(m.src_lang() == "en");
    CHECK(m.tgt_lang() == "tcy");
  }
}

TEST_CASE("back-translation helpers") {
  LexicalBackend be;
  const auto mono = parse_lines("a b\nc\n", "en");
  const ModelHandle id = be.train(parse_parallel("a b\ta b\na\ta\nc\tc\n", "en", "en"), TrainConfig{}, {});

  SUBCASE("identity model gives equal sides") {
    const auto bt = generate_bt(be, id, mono);
    REQUIRE(bt.size() == 2);
    for (const auto& p : bt.pairs) CHECK(p.source.text == p.target.text);
  }
  SUBCASE("language mismatch") {
    CHECK_THROWS_AS(generate_bt(be, id, parse_lines("a\n", "tcy")), LanguageMismatchError);
  }
  SUBCASE("derive via pivot with an identity model copies the HR side") {
    const auto lr_hr = parse_parallel("l1 l2\ta b\nl3\tc\n", "tcy", "en");
    const auto d = derive_parallel_via_pivot(be, lr_hr, id);
    REQUIRE(d.size() == 2);
    CHECK(d.pairs[0].source.text == "a b");
    CHECK(d.pairs[0].target.text == "l1 l2");
    CHECK(d.tgt_lang == "tcy");
  }
  SUBCASE("derive via pivot with an oracle lexicon") {
    const ModelHandle hr_en = be.train(parse_parallel("k1\te1\nk2\te2\nk1 k2\te1 e2\n", "kn", "en"), TrainConfig{}, {});
    const auto lr_hr = parse_parallel("t1 t2\tk2 k1\n", "tcy", "kn");
    const auto d = derive_parallel_via_pivot(be, lr_hr, hr_en);
    CHECK(d.pairs[0].source.text == "e2 e1");
    CHECK(d.src_lang == "en");
    CHECK_THROWS_AS(derive_parallel_via_pivot(be, parse_parallel("t\tk\n", "tcy", "xx"), hr_en),
                    LanguageMismatchError);
  }
}
