#include <cstdio>
#include <sstream>

#include "lrmt/pipeline.hpp"

namespace lrmt {

namespace {

const char* const kDash = "–";

std::string upper(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return s;
}

std::string pair_label(const std::string& a, const std::string& b) { return upper(a) + kDash + upper(b); }

std::string task_name(StageId s) {
  switch (s) {
    case StageId::FineTuneBase: return "fine-tuning with";
    case StageId::TrainBT: return "back-translation with";
    case StageId::TrainHRParallel: return "training with parallel";
    case StageId::DaeHR:
    case StageId::DaeLR: return "denoising autoencoding with";
    case StageId::FineTuneBT: return "fine-tuning with back-translation data";
    case StageId::SupervisedFineTune: return "supervised fine-tuning with";
    case StageId::GenerateBT: return "back-translating";
  }
  return "";
}

std::string languages(StageId s, Direction d, const LanguageTags& t) {
  const bool to_lr = d == Direction::PivotToLr;
  switch (s) {
    case StageId::FineTuneBase: return pair_label(t.hr, t.pivot);
    case StageId::TrainBT:
    case StageId::SupervisedFineTune: return to_lr ? pair_label(t.pivot, t.lr) : pair_label(t.lr, t.pivot);
    case StageId::TrainHRParallel: return to_lr ? pair_label(t.pivot, t.hr) : pair_label(t.hr, t.pivot);
    case StageId::DaeHR: return upper(t.hr);
    case StageId::DaeLR: return upper(t.lr);
    default: return "";
  }
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<ReportRow> report_rows(const LedgerFile& ledger, const LanguageTags& tags) {
  std::vector<ReportRow> rows;
  for (const auto& r : ledger.records) {
    if (!is_trainable(r.stage) || !r.bleu) continue;
    const std::string dir = r.direction == Direction::PivotToLr ? pair_label(tags.pivot, tags.lr)
                                                                : pair_label(tags.lr, tags.pivot);
    rows.push_back({r.iteration, dir, task_number(r.stage), task_name(r.stage), languages(r.stage, r.direction, tags),
                    r.bleu->score});
  }
  return rows;
}

std::string render_markdown(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "| Iteration | Direction | Task no. | Task | Languages | BLEU |\n";
  out << "|---|---|---|---|---|---:|\n";
  for (const auto& r : rows) {
    out << "| " << r.iteration << " | " << r.direction << " | " << r.task_no << " | " << r.task << " | "
        << r.languages << " | " << two_decimals(r.bleu) << " |\n";
  }
  return out.str();
}

nlohmann::json render_json(const LedgerFile& ledger, const std::vector<ReportRow>& rows,
                           const std::optional<nlohmann::json>& final_eval) {
  nlohmann::json j;
  j["tool"] = ledger.header.tool;
  j["config_hash"] = ledger.header.config_hash;
  j["backend"] = ledger.header.backend;
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& r : rows) {
    out_rows.push_back({{"iteration", r.iteration},
                        {"direction", r.direction},
                        {"task_no", r.task_no},
                        {"task", r.task},
                        {"languages", r.languages},
                        {"bleu", r.bleu}});
  }
  j["rows"] = std::move(out_rows);
  j["steps"] = ledger.records.size();
  j["final_eval"] = final_eval ? *final_eval : nlohmann::json(nullptr);
  return j;
}

}  // namespace lrmt
