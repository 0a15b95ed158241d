#include <fstream>

#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/pipeline.hpp"

namespace lrmt {

namespace {

const std::vector<std::pair<StageId, const char*>>& stage_names() {
  static const std::vector<std::pair<StageId, const char*>> names{
      {StageId::FineTuneBase, "FineTuneBase"}, {StageId::TrainBT, "TrainBT"},
      {StageId::TrainHRParallel, "TrainHRParallel"}, {StageId::DaeHR, "DaeHR"},
      {StageId::DaeLR, "DaeLR"}, {StageId::FineTuneBT, "FineTuneBT"},
      {StageId::SupervisedFineTune, "SupervisedFineTune"}, {StageId::GenerateBT, "GenerateBT"}};
  return names;
}

}  // namespace

std::string to_string(StageId s) {
  for (const auto& [id, name] : stage_names())
    if (id == s) return name;
  return "?";
}

std::string to_string(Direction d) { return d == Direction::LrToPivot ? "LrToPivot" : "PivotToLr"; }

StageId stage_from_string(const std::string& s) {
  for (const auto& [id, name] : stage_names())
    if (s == name) return id;
  throw ConfigError("unknown stage '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
  if (s == "LrToPivot") return Direction::LrToPivot;
  if (s == "PivotToLr") return Direction::PivotToLr;
  throw ConfigError("unknown direction '" + s + "'");
}

std::string task_number(StageId s) {
  switch (s) {
    case StageId::FineTuneBase: return "1";
    case StageId::TrainBT: return "2";
    case StageId::TrainHRParallel: return "3";
    case StageId::DaeHR: return "4a";
    case StageId::DaeLR: return "4b";
    case StageId::FineTuneBT: return "5";
    case StageId::SupervisedFineTune: return "FT";
    case StageId::GenerateBT: return "BT";
  }
  return "?";
}

bool is_trainable(StageId s) { return s != StageId::GenerateBT; }

Direction opposite(Direction d) {
  return d == Direction::LrToPivot ? Direction::PivotToLr : Direction::LrToPivot;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path.lexically_normal() : (base / path).lexically_normal();
}

TrainConfig train_from_json(const nlohmann::json& j, TrainConfig t) {
  if (j.contains("em_epochs")) t.em_epochs = j.at("em_epochs").get<std::size_t>();
  if (j.contains("smoothing_epsilon")) t.smoothing_epsilon = j.at("smoothing_epsilon").get<double>();
  if (j.contains("continue_weight")) t.continue_weight = j.at("continue_weight").get<double>();
  return t;
}

nlohmann::json train_to_json(const TrainConfig& t) {
  return {{"em_epochs", t.em_epochs},
          {"smoothing_epsilon", t.smoothing_epsilon},
          {"continue_weight", t.continue_weight}};
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    PipelineConfig c;
    if (j.contains("languages")) {
      const auto& l = j.at("languages");
      c.languages.pivot = l.value("pivot", c.languages.pivot);
      c.languages.hr = l.value("hr", c.languages.hr);
      c.languages.lr = l.value("lr", c.languages.lr);
    }
    const auto& k = j.at("corpora");
    c.corpora.hr_pivot = resolve(base_dir, k.at("hr_pivot").get<std::string>());
    c.corpora.lr_mono = resolve(base_dir, k.at("lr_mono").get<std::string>());
    c.corpora.hr_mono = resolve(base_dir, k.at("hr_mono").get<std::string>());
    c.corpora.lr_dev = resolve(base_dir, k.at("lr_dev").get<std::string>());
    if (k.contains("lr_test") && !k.at("lr_test").is_null())
      c.corpora.lr_test = resolve(base_dir, k.at("lr_test").get<std::string>());
    if (k.contains("lr_hr") && !k.at("lr_hr").is_null())
      c.corpora.lr_hr = resolve(base_dir, k.at("lr_hr").get<std::string>());
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      c.noise.max_shift = n.value("max_shift", c.noise.max_shift);
      c.noise.mask_prob = n.value("mask_prob", c.noise.mask_prob);
      c.noise.mask_token = n.value("mask_token", c.noise.mask_token);
    }
    if (j.contains("train")) c.train = train_from_json(j.at("train"), c.train);
    if (j.contains("stage_train"))
      for (const auto& [name, override_json] : j.at("stage_train").items())
        c.stage_train[stage_from_string(name)] = train_from_json(override_json, c.train);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
    c.supervised_finetune = j.value("supervised_finetune", c.supervised_finetune);
    c.lr_to_pivot_task3 = j.value("lr_to_pivot_task3", c.lr_to_pivot_task3);
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("lrmt-run")));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid pipeline config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, std::filesystem::absolute(path).parent_path());
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json stage = nlohmann::json::object();
  for (const auto& [id, t] : stage_train) stage[lrmt::to_string(id)] = train_to_json(t);
  nlohmann::json corpora_json{{"hr_pivot", corpora.hr_pivot.string()},
                              {"lr_mono", corpora.lr_mono.string()},
                              {"hr_mono", corpora.hr_mono.string()},
                              {"lr_dev", corpora.lr_dev.string()},
                              {"lr_test", nullptr},
                              {"lr_hr", nullptr}};
  if (corpora.lr_test) corpora_json["lr_test"] = corpora.lr_test->string();
  if (corpora.lr_hr) corpora_json["lr_hr"] = corpora.lr_hr->string();
  return {{"languages", {{"pivot", languages.pivot}, {"hr", languages.hr}, {"lr", languages.lr}}},
          {"corpora", std::move(corpora_json)},
          {"noise",
           {{"max_shift", noise.max_shift}, {"mask_prob", noise.mask_prob}, {"mask_token", noise.mask_token}}},
          {"train", train_to_json(train)},
          {"stage_train", std::move(stage)},
          {"iterations", iterations},
          {"seed", seed},
          {"supervised_finetune", supervised_finetune},
          {"lr_to_pivot_task3", lr_to_pivot_task3},
          {"output_dir", output_dir.string()}};
}

std::string PipelineConfig::hash() const {
  nlohmann::json j = to_json();
  j.erase("output_dir");
  return io::hex64(io::fnv1a64(j.dump()));
}

void PipelineConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  noise.validate();
  train.validate();
  for (const auto& [_, t] : stage_train) t.validate();
  const auto& l = languages;
  if (l.pivot.empty() || l.hr.empty() || l.lr.empty()) throw ConfigError("language tags must be non-empty");
  if (l.pivot == l.hr || l.pivot == l.lr || l.hr == l.lr) throw ConfigError("language tags must be distinct");
  auto require = [](const std::filesystem::path& p, const char* role) {
    if (!std::filesystem::is_regular_file(p))
      throw ConfigError(std::string("corpus '") + role + "' not found: " + p.string());
  };
  require(corpora.hr_pivot, "hr_pivot");
  require(corpora.lr_mono, "lr_mono");
  require(corpora.hr_mono, "hr_mono");
  require(corpora.lr_dev, "lr_dev");
  if (corpora.lr_test) require(*corpora.lr_test, "lr_test");
  if (corpora.lr_hr) require(*corpora.lr_hr, "lr_hr");
  if (supervised_finetune && !corpora.lr_hr)
    throw ConfigError("supervised_finetune needs corpora.lr_hr");
}

TrainConfig PipelineConfig::train_for(StageId stage) const {
  auto it = stage_train.find(stage);
  return it == stage_train.end() ? train : it->second;
}

}  // namespace lrmt
