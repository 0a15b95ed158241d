#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/pipeline.hpp"

namespace lrmt {

nlohmann::json StageRecord::to_json() const {
  return {{"type", "stage"},
          {"step", step},
          {"iteration", iteration},
          {"direction", lrmt::to_string(direction)},
          {"stage", lrmt::to_string(stage)},
          {"task", task_number(stage)},
          {"input_model", input_model},
          {"corpora", corpora},
          {"output_model", output_model},
          {"output_corpus", output_corpus},
          {"bleu", bleu ? bleu->to_json() : nlohmann::json(nullptr)},
          {"seed", seed}};
}

StageRecord StageRecord::from_json(const nlohmann::json& j) {
  if (j.value("type", "") != "stage") throw FormatError("not a stage record");
  StageRecord r;
  r.step = j.at("step").get<std::size_t>();
  r.iteration = j.at("iteration").get<std::size_t>();
  r.direction = direction_from_string(j.at("direction").get<std::string>());
  r.stage = stage_from_string(j.at("stage").get<std::string>());
  r.input_model = j.at("input_model").get<std::string>();
  r.corpora = j.at("corpora").get<std::vector<std::string>>();
  r.output_model = j.at("output_model").get<std::string>();
  r.output_corpus = j.at("output_corpus").get<std::string>();
  if (!j.at("bleu").is_null()) r.bleu = BleuScore::from_json(j.at("bleu"));
  r.seed = j.at("seed").get<std::uint64_t>();
  if (is_trainable(r.stage) && (r.output_model.empty() || !r.bleu))
    throw FormatError("trainable stage record without model or BLEU");
  return r;
}

std::string ledger_header_line(const LedgerHeader& h) {
  nlohmann::json j{{"type", "header"}, {"tool", h.tool}, {"config_hash", h.config_hash}, {"backend", h.backend}};
  return j.dump() + "\n";
}

std::string ledger_record_line(const StageRecord& r) { return r.to_json().dump() + "\n"; }

namespace {

std::string describe(const StageRecord& r) {
  return "step " + std::to_string(r.step) + " (iteration " + std::to_string(r.iteration) + ", " +
         to_string(r.direction) + ", " + to_string(r.stage) + ")";
}

}  // namespace

LedgerFile parse_ledger(std::string_view content) {
  LedgerFile out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& why) -> ResumeError {
    const std::string last = out.records.empty() ? std::string("none") : describe(out.records.back());
    return ResumeError("corrupted ledger at line " + std::to_string(line_no) + ": " + why +
                       "; last valid record: " + last);
  };
  while (pos < content.size()) {
    ++line_no;
    const std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) throw fail("unterminated line");
    const std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw fail("unparseable JSON");
    }
    if (!have_header) {
      if (!j.is_object() || j.value("type", "") != "header") throw fail("missing header");
      out.header.tool = j.value("tool", "");
      out.header.config_hash = j.value("config_hash", "");
      out.header.backend = j.value("backend", "");
      have_header = true;
      continue;
    }
    try {
      StageRecord r = StageRecord::from_json(j);
      if (r.step != out.records.size()) throw fail("step numbers out of sequence");
      out.records.push_back(std::move(r));
    } catch (const ResumeError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(std::string("invalid record: ") + e.what());
    }
  }
  if (!have_header) throw fail("empty ledger");
  return out;
}

LedgerFile read_ledger(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ResumeError("no ledger at " + path.string());
  return parse_ledger(io::read_file(path));
}

}  // namespace lrmt
