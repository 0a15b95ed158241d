#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrmt/backend.hpp"
#include "lrmt/bleu.hpp"
#include "lrmt/corpus.hpp"
#include "lrmt/noising.hpp"
#include "lrmt/translator.hpp"

namespace lrmt {

inline constexpr const char* kToolVersion = "lrmt 1.0.0";
inline constexpr const char* kPretrainedBase = "pretrained-base";

enum class StageId {
  FineTuneBase,        // task 1
  TrainBT,             // task 2
  TrainHRParallel,     // task 3
  DaeHR,               // task 4a
  DaeLR,               // task 4b
  FineTuneBT,          // task 5
  SupervisedFineTune,  // fine-tuning on pivot-derived LR parallel data
  GenerateBT,          // translation step between training blocks
};

enum class Direction { LrToPivot, PivotToLr };

std::string to_string(StageId s);
std::string to_string(Direction d);
StageId stage_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);
/// "1", "2", "3", "4a", "4b", "5", "FT" or "BT".
std::string task_number(StageId s);
bool is_trainable(StageId s);
Direction opposite(Direction d);

struct LanguageTags {
  std::string pivot = "en";
  std::string hr = "kn";
  std::string lr = "tcy";
};

struct CorpusPaths {
  std::filesystem::path hr_pivot;  // TSV hr<TAB>pivot
  std::filesystem::path lr_mono;   // one sentence per line
  std::filesystem::path hr_mono;
  std::filesystem::path lr_dev;    // TSV pivot<TAB>lr
  std::optional<std::filesystem::path> lr_test;  // TSV pivot<TAB>lr
  std::optional<std::filesystem::path> lr_hr;    // TSV lr<TAB>hr
};

struct PipelineConfig {
  LanguageTags languages;
  CorpusPaths corpora;
  NoiseConfig noise;
  TrainConfig train;
  std::map<StageId, TrainConfig> stage_train;
  std::size_t iterations = 2;
  std::uint64_t seed = 0;
  bool supervised_finetune = false;
  bool lr_to_pivot_task3 = false;
  std::filesystem::path output_dir;

  /// Relative corpus paths and output_dir resolve against `base_dir`.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// FNV-1a over the canonical JSON without output_dir.
  std::string hash() const;
  /// Throws ConfigError for missing files or out-of-range values.
  void validate() const;
  TrainConfig train_for(StageId stage) const;
};

struct StageRecord {
  std::size_t step = 0;
  std::size_t iteration = 1;
  Direction direction = Direction::LrToPivot;
  StageId stage = StageId::FineTuneBase;
  std::string input_model;
  std::vector<std::string> corpora;
  std::string output_model;   // checkpoint id, trainable stages
  std::string output_corpus;  // corpus id, GenerateBT
  std::optional<BleuScore> bleu;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds; kept out of the ledger so reruns compare byte-equal

  nlohmann::json to_json() const;
  static StageRecord from_json(const nlohmann::json& j);
};

struct ScheduleStep {
  std::size_t iteration;
  Direction direction;
  StageId stage;
  friend bool operator==(const ScheduleStep&, const ScheduleStep&) = default;
};

/// Iteration 1: LrToPivot task 1, GenerateBT, PivotToLr tasks 2-5,
/// GenerateBT, LrToPivot tasks 2, 4a, 4b, 5. Each later iteration starts
/// with a GenerateBT from the LrToPivot model and repeats PivotToLr tasks
/// 2-5; LrToPivot blocks run in iterations 1..max(1, N-1). SupervisedFineTune
/// steps, when enabled, close each iteration for every direction trained in it.
std::vector<ScheduleStep> build_schedule(const PipelineConfig& cfg);

struct ModelSlot {
  std::string id;
  ModelHandle model;
  std::size_t iteration = 0;
  StageId stage = StageId::FineTuneBase;
};

/// Everything a stage may read. Inputs are loaded once; models and derived
/// corpora accumulate as stages commit.
struct PipelineState {
  PipelineConfig config;
  const TranslationBackend* backend = nullptr;

  ParallelCorpus hr_pivot;  // hr -> pivot
  MonolingualCorpus lr_mono;
  MonolingualCorpus hr_mono;
  ParallelCorpus lr_dev;  // pivot -> lr
  ParallelCorpus lr_dev_reversed;
  std::optional<ParallelCorpus> lr_test;
  std::optional<ParallelCorpus> lr_hr;  // lr -> hr

  std::map<Direction, ModelSlot> latest;
  std::optional<ModelSlot> base;  // task-1 output
  std::map<Direction, ParallelCorpus> bt;  // training set for that direction
  std::map<Direction, std::string> bt_id;
  std::optional<ParallelCorpus> derived;  // pivot -> lr

  std::vector<StageRecord> ledger;

  /// Loads every configured corpus. Throws on missing or malformed inputs.
  static PipelineState open(const PipelineConfig& cfg, const TranslationBackend& backend);

  const ParallelCorpus& dev_for(Direction d) const;
  std::filesystem::path checkpoint_path(const std::string& id) const;
  std::filesystem::path corpus_path(const std::string& id) const;
};

/// Pairs (translation, original): the synthetic side becomes the training
/// source and the original text the training target.
ParallelCorpus generate_bt(const TranslationBackend& backend, const ModelHandle& model,
                           const MonolingualCorpus& source);

/// After a direction's FineTuneBT: PivotToLr re-translates the pivot side of
/// its BT set into LR, giving (LR_synthetic, pivot) pairs; LrToPivot
/// re-translates the LR originals, giving (pivot_synthetic, LR_original).
/// Throws SequencingError if `from` has no finished FineTuneBT model.
ParallelCorpus regenerate_bt_for_other_direction(const PipelineState& state, Direction from);

/// Pivot side = translation of the HR side, LR side verbatim. Result is tagged
/// (pivot, lr).
ParallelCorpus derive_parallel_via_pivot(const TranslationBackend& backend, const ParallelCorpus& lr_hr,
                                         const ModelHandle& hr_to_pivot);

std::uint64_t stage_seed(std::uint64_t pipeline_seed, std::size_t iteration, Direction d, StageId s);
std::string checkpoint_id(std::size_t iteration, Direction d, StageId s);

/// Runs one step, persists its artifact, appends the record to state.ledger
/// and returns it.
StageRecord run_stage(PipelineState& state, std::size_t iteration, StageId stage, Direction direction);

struct RunOptions {
  // Stop after this many newly committed steps (simulated interruption).
  std::optional<std::size_t> max_steps;
  // Called after each committed step.
  std::function<void(const StageRecord&)> on_commit;
};

/// Executes the schedule into cfg.output_dir, starting fresh. The ledger is
/// flushed after every step.
std::vector<StageRecord> run_pipeline(const PipelineConfig& cfg, const TranslationBackend& backend,
                                      const RunOptions& opts = {});

/// Continues a run from its ledger. With `expected`, refuses to continue if
/// its hash differs from the one recorded in the ledger.
std::vector<StageRecord> resume(const std::filesystem::path& output_dir, const TranslationBackend& backend,
                                const std::optional<PipelineConfig>& expected = std::nullopt,
                                const RunOptions& opts = {});

// Ledger file: a header line then one StageRecord per line.
struct LedgerHeader {
  std::string tool;
  std::string config_hash;
  std::string backend;
};

struct LedgerFile {
  LedgerHeader header;
  std::vector<StageRecord> records;
};

std::string ledger_header_line(const LedgerHeader& header);
std::string ledger_record_line(const StageRecord& record);
/// Throws ResumeError naming the last valid record on malformed content.
LedgerFile parse_ledger(std::string_view content);
LedgerFile read_ledger(const std::filesystem::path& path);

// Report rendering.
struct ReportRow {
  std::size_t iteration;
  std::string direction;
  std::string task_no;
  std::string task;
  std::string languages;
  double bleu;
};

std::vector<ReportRow> report_rows(const LedgerFile& ledger, const LanguageTags& tags);
std::string render_markdown(const std::vector<ReportRow>& rows);
nlohmann::json render_json(const LedgerFile& ledger, const std::vector<ReportRow>& rows,
                           const std::optional<nlohmann::json>& final_eval);

}  // namespace lrmt
