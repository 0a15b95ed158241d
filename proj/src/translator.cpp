#include "lrmt/translator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "lrmt/error.hpp"
#include "lrmt/io.hpp"
#include "lrmt/noising.hpp"
#include "lrmt/utf8.hpp"

namespace lrmt {

void TrainConfig::validate() const {
  if (em_epochs < 1) throw ConfigError("em_epochs must be at least 1");
  if (!(smoothing_epsilon > 0.0)) throw ConfigError("smoothing_epsilon must be positive");
  if (!(continue_weight >= 0.0 && continue_weight <= 1.0))
    throw ConfigError("continue_weight must lie in [0, 1]");
}

LexicalModel::LexicalModel(std::string src_lang, std::string tgt_lang, Lexicon lexicon,
                           std::vector<TrainingEvent> history)
    : src_lang_(std::move(src_lang)),
      tgt_lang_(std::move(tgt_lang)),
      lexicon_(std::move(lexicon)),
      history_(std::move(history)) {
  for (const auto& [src, row] : lexicon_) {
    vocab_src_.insert(src);
    const LexEntry* best = nullptr;
    for (const auto& e : row) {
      vocab_tgt_.insert(e.target);
      if (!best || e.prob > best->prob) best = &e;
    }
    if (best && src != kNullToken) best_.emplace(src, best->target);
  }
}

const std::string* LexicalModel::best_translation(std::string_view source_token) const {
  auto it = best_.find(std::string(source_token));
  return it == best_.end() ? nullptr : &it->second;
}

double LexicalModel::prob(std::string_view source_token, std::string_view target_token) const {
  auto it = lexicon_.find(std::string(source_token));
  if (it == lexicon_.end()) return 0.0;
  auto e = std::lower_bound(it->second.begin(), it->second.end(), target_token,
                            [](const LexEntry& a, std::string_view t) { return a.target < t; });
  return e != it->second.end() && e->target == target_token ? e->prob : 0.0;
}

namespace {

void normalize(LexRow& row) {
  double sum = 0.0;
  for (const auto& e : row) sum += e.prob;
  for (auto& e : row) e.prob /= sum;
}

// Integer-coded corpus with every (source, target) co-occurrence resolved to
// a slot of the translation table once, up front.
struct EmProblem {
  std::vector<std::string> src_tokens;  // id -> token, id 0 is NULL
  std::vector<std::string> tgt_tokens;
  std::vector<std::uint32_t> slot_src;
  std::vector<std::uint32_t> slot_tgt;
  // For each target position of each pair: (source length + 1) slots.
  std::vector<std::uint32_t> links;
  struct Shape {
    std::uint32_t src_len;  // including NULL
    std::uint32_t tgt_len;
  };
  std::vector<Shape> shapes;
};

EmProblem build_problem(const ParallelCorpus& parallel) {
  EmProblem p;
  std::unordered_map<std::string, std::uint32_t> src_ids{{kNullToken, 0}};
  std::unordered_map<std::string, std::uint32_t> tgt_ids;
  p.src_tokens.push_back(kNullToken);
  std::unordered_map<std::uint64_t, std::uint32_t> slots;
  auto id_of = [](auto& ids, auto& tokens, const std::string& tok) {
    auto [it, inserted] = ids.emplace(tok, static_cast<std::uint32_t>(tokens.size()));
    if (inserted) tokens.push_back(tok);
    return it->second;
  };
  std::vector<std::uint32_t> src, tgt;
  for (const auto& pr : parallel.pairs) {
    src.assign(1, 0);
    for (const auto& t : utf8::split_whitespace(pr.source.text)) src.push_back(id_of(src_ids, p.src_tokens, t));
    tgt.clear();
    for (const auto& t : utf8::split_whitespace(pr.target.text)) tgt.push_back(id_of(tgt_ids, p.tgt_tokens, t));
    p.shapes.push_back({static_cast<std::uint32_t>(src.size()), static_cast<std::uint32_t>(tgt.size())});
    for (std::uint32_t f : tgt) {
      for (std::uint32_t e : src) {
        const std::uint64_t key = (static_cast<std::uint64_t>(e) << 32) | f;
        auto [it, inserted] = slots.emplace(key, static_cast<std::uint32_t>(p.slot_src.size()));
        if (inserted) {
          p.slot_src.push_back(e);
          p.slot_tgt.push_back(f);
        }
        p.links.push_back(it->second);
      }
    }
  }
  return p;
}

// One E-step pass. With `counts` null only the log-likelihood is computed.
double em_pass(const EmProblem& p, const std::vector<double>& t, std::vector<double>* counts,
               std::vector<double>* totals) {
  double ll = 0.0;
  std::size_t pos = 0;
  for (const auto& shape : p.shapes) {
    const double log_norm = std::log(static_cast<double>(shape.src_len));
    for (std::uint32_t j = 0; j < shape.tgt_len; ++j) {
      const std::uint32_t* row = p.links.data() + pos;
      double denom = 0.0;
      for (std::uint32_t i = 0; i < shape.src_len; ++i) denom += t[row[i]];
      ll += std::log(denom) - log_norm;
      if (counts) {
        for (std::uint32_t i = 0; i < shape.src_len; ++i) {
          const double c = t[row[i]] / denom;
          (*counts)[row[i]] += c;
          (*totals)[p.slot_src[row[i]]] += c;
        }
      }
      pos += shape.src_len;
    }
  }
  return ll;
}

}  // namespace

LexicalModel train(const ParallelCorpus& parallel, const TrainConfig& cfg, const TrainLabel& label,
                   EmTrace* trace) {
  cfg.validate();
  if (parallel.empty()) throw TrainingError("cannot train on an empty corpus");
  const EmProblem p = build_problem(parallel);
  const std::size_t n_slots = p.slot_src.size();
  std::vector<double> t(n_slots, 1.0 / static_cast<double>(p.tgt_tokens.size()));
  std::vector<double> counts(n_slots), totals(p.src_tokens.size());
  if (trace) trace->log_likelihood.clear();
  for (std::size_t epoch = 0; epoch < cfg.em_epochs; ++epoch) {
    std::fill(counts.begin(), counts.end(), 0.0);
    std::fill(totals.begin(), totals.end(), 0.0);
    const double ll = em_pass(p, t, &counts, &totals);
    if (trace) trace->log_likelihood.push_back(ll);
    for (std::size_t s = 0; s < n_slots; ++s) t[s] = counts[s] / totals[p.slot_src[s]];
  }
  if (trace) trace->log_likelihood.push_back(em_pass(p, t, nullptr, nullptr));

  Lexicon lexicon;
  for (std::size_t s = 0; s < n_slots; ++s)
    lexicon[p.src_tokens[p.slot_src[s]]].push_back({p.tgt_tokens[p.slot_tgt[s]], t[s]});
  for (auto& [_, row] : lexicon) {
    std::sort(row.begin(), row.end(), [](const LexEntry& a, const LexEntry& b) { return a.target < b.target; });
    const double top = std::max_element(row.begin(), row.end(), [](const LexEntry& a, const LexEntry& b) {
                         return a.prob < b.prob;
                       })->prob;
    std::erase_if(row, [&](const LexEntry& e) { return e.prob < cfg.smoothing_epsilon && e.prob < top; });
    normalize(row);
  }
  TrainingEvent ev{"train", label.corpus_id, label.stage_id, cfg.em_epochs, 1.0, cfg.seed};
  return LexicalModel(parallel.src_lang, parallel.tgt_lang, std::move(lexicon), {std::move(ev)});
}

LexicalModel continue_train(const LexicalModel& model, const ParallelCorpus& parallel,
                            const TrainConfig& cfg, const TrainLabel& label) {
  cfg.validate();
  const bool same_pair = parallel.src_lang == model.src_lang() && parallel.tgt_lang == model.tgt_lang();
  if (!same_pair && !is_denoising_pair(parallel.src_lang, parallel.tgt_lang))
    throw LanguageMismatchError("model " + model.src_lang() + "->" + model.tgt_lang() +
                                " cannot continue on corpus " + parallel.src_lang + "->" +
                                parallel.tgt_lang);
  const LexicalModel fresh = train(parallel, cfg, label);
  const double w_old = cfg.continue_weight;
  const double w_new = 1.0 - w_old;
  const Lexicon& a = model.lexicon();
  const Lexicon& b = fresh.lexicon();

  Lexicon merged;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    const bool take_a = ib == b.end() || (ia != a.end() && ia->first <= ib->first);
    const bool take_b = ia == a.end() || (ib != b.end() && ib->first <= ia->first);
    const double wa = take_a ? w_old : 0.0;
    const double wb = take_b ? w_new : 0.0;
    const std::string& key = take_a ? ia->first : ib->first;
    if (wa > 0.0 && wb == 0.0) {
      merged.emplace(key, ia->second);
    } else if (wb > 0.0 && wa == 0.0) {
      merged.emplace(key, ib->second);
    } else if (wa > 0.0 && wb > 0.0) {
      LexRow row;
      auto ea = ia->second.begin(), eb = ib->second.begin();
      while (ea != ia->second.end() || eb != ib->second.end()) {
        if (eb == ib->second.end() || (ea != ia->second.end() && ea->target < eb->target)) {
          row.push_back({ea->target, wa * ea->prob});
          ++ea;
        } else if (ea == ia->second.end() || eb->target < ea->target) {
          row.push_back({eb->target, wb * eb->prob});
          ++eb;
        } else {
          row.push_back({ea->target, wa * ea->prob + wb * eb->prob});
          ++ea;
          ++eb;
        }
      }
      normalize(row);
      merged.emplace(key, std::move(row));
    }
    if (take_a) ++ia;
    if (take_b) ++ib;
  }

  std::vector<TrainingEvent> history = model.history();
  history.push_back({"continue", label.corpus_id, label.stage_id, cfg.em_epochs, w_old, cfg.seed});
  return LexicalModel(model.src_lang(), model.tgt_lang(), std::move(merged), std::move(history));
}

LexicalModel adopt_languages(const LexicalModel& model, std::string src_lang, std::string tgt_lang) {
  std::vector<TrainingEvent> history = model.history();
  history.push_back({"adopt", model.src_lang() + "->" + model.tgt_lang(), src_lang + "->" + tgt_lang, 0, 1.0, 0});
  return LexicalModel(std::move(src_lang), std::move(tgt_lang), model.lexicon(), std::move(history));
}

std::string translate_sentence(const LexicalModel& model, std::string_view sentence) {
  std::vector<std::string> tokens = utf8::split_whitespace(sentence);
  for (auto& tok : tokens)
    if (const std::string* best = model.best_translation(tok)) tok = *best;
  return utf8::join(tokens);
}

std::vector<SentenceRecord> translate_batch(const LexicalModel& model,
                                            std::span<const SentenceRecord> sentences) {
  std::vector<SentenceRecord> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back({translate_sentence(model, s.text), s.index});
  return out;
}

// --- checkpoint format ---------------------------------------------------

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  void raw(std::string_view s) { buf_.append(s); }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw LoadError("corrupt checkpoint: truncated at byte " + std::to_string(pos_));
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const LexicalModel& model) {
  Writer w;
  w.raw(std::string_view(kCheckpointMagic, 4));
  w.u32(kCheckpointVersion);
  w.str(model.src_lang());
  w.str(model.tgt_lang());
  w.u32(static_cast<std::uint32_t>(model.history().size()));
  for (const auto& ev : model.history()) {
    w.str(ev.kind);
    w.str(ev.corpus_id);
    w.str(ev.stage_id);
    w.u64(ev.epochs);
    w.f64(ev.weight);
    w.u64(ev.seed);
  }
  const auto& targets = model.vocab_tgt();
  std::unordered_map<std::string_view, std::uint32_t> target_ids;
  w.u32(static_cast<std::uint32_t>(targets.size()));
  for (const auto& t : targets) {
    target_ids.emplace(t, static_cast<std::uint32_t>(target_ids.size()));
    w.str(t);
  }
  w.u32(static_cast<std::uint32_t>(model.lexicon().size()));
  for (const auto& [src, row] : model.lexicon()) {
    w.str(src);
    w.u32(static_cast<std::uint32_t>(row.size()));
    for (const auto& e : row) {
      w.u32(target_ids.at(e.target));
      w.f64(e.prob);
    }
  }
  w.u64(io::fnv1a64(w.bytes()));
  return std::move(w.bytes());
}

LexicalModel deserialize(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0)
    throw LoadError("not a model checkpoint: bad magic");
  Reader r(bytes.substr(4));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw LoadError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  if (bytes.size() < 4 + 8) throw LoadError("corrupt checkpoint: truncated");
  std::string src = r.str();
  std::string tgt = r.str();
  std::vector<TrainingEvent> history(r.u32());
  for (auto& ev : history) {
    ev.kind = r.str();
    ev.corpus_id = r.str();
    ev.stage_id = r.str();
    ev.epochs = r.u64();
    ev.weight = r.f64();
    ev.seed = r.u64();
  }
  std::vector<std::string> targets(r.u32());
  for (auto& t : targets) t = r.str();
  Lexicon lexicon;
  const std::uint32_t n_rows = r.u32();
  for (std::uint32_t i = 0; i < n_rows; ++i) {
    std::string key = r.str();
    LexRow row(r.u32());
    double sum = 0.0;
    for (auto& e : row) {
      const std::uint32_t id = r.u32();
      if (id >= targets.size()) throw LoadError("corrupt checkpoint: target id out of range");
      e.target = targets[id];
      e.prob = r.f64();
      if (!(e.prob >= 0.0)) throw LoadError("corrupt checkpoint: negative probability");
      sum += e.prob;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw LoadError("corrupt checkpoint: row '" + key + "' does not sum to 1");
    lexicon.emplace(std::move(key), std::move(row));
  }
  const std::size_t payload = 4 + r.pos();
  const std::uint64_t stored = r.u64();
  if (stored != io::fnv1a64(bytes.substr(0, payload))) throw LoadError("corrupt checkpoint: checksum mismatch");
  if (4 + r.pos() != bytes.size()) throw LoadError("corrupt checkpoint: trailing bytes");
  return LexicalModel(std::move(src), std::move(tgt), std::move(lexicon), std::move(history));
}

void save(const LexicalModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize(model));
}

LexicalModel load_model(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = io::read_file(path);
  } catch (const DataError& e) {
    throw LoadError(e.what());
  }
  try {
    return deserialize(bytes);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const TrainingEvent& ev) {
  return {{"kind", ev.kind},     {"corpus_id", ev.corpus_id}, {"stage_id", ev.stage_id},
          {"epochs", ev.epochs}, {"weight", ev.weight},       {"seed", ev.seed}};
}

nlohmann::json to_json(const LexicalModel& model) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& ev : model.history()) history.push_back(to_json(ev));
  nlohmann::json lex = nlohmann::json::object();
  for (const auto& [src, row] : model.lexicon()) {
    nlohmann::json r = nlohmann::json::object();
    for (const auto& e : row) r[e.target] = e.prob;
    lex[src] = std::move(r);
  }
  return {{"format", "LRMT"},
          {"version", kCheckpointVersion},
          {"src_lang", model.src_lang()},
          {"tgt_lang", model.tgt_lang()},
          {"history", std::move(history)},
          {"lexicon", std::move(lex)}};
}

}  // namespace lrmt
