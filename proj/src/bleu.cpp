#include "lrmt/bleu.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "lrmt/error.hpp"
#include "lrmt/utf8.hpp"

namespace lrmt {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = s.find(from, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out.append(to);
    pos = hit + from.size();
  }
  out.append(s, pos, std::string::npos);
  s = std::move(out);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_period_comma(char c) { return c == '.' || c == ','; }

bool is_padded_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '{' && u <= '~') || (u >= '[' && u <= '`') || (u >= ' ' && u <= '&') ||
         (u >= '(' && u <= '+') || (u >= ':' && u <= '@') || u == '/';
}

// Applies a two-character rule "(A)(B) -> replacement" with non-overlapping
// left-to-right matching.
template <class First, class Second, class Emit>
std::string scan_pairs(const std::string& s, First first, Second second, Emit emit) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t i = 0;
  while (i < s.size()) {
    if (i + 1 < s.size() && first(s[i]) && second(s[i + 1])) {
      emit(out, s[i], s[i + 1]);
      i += 2;
    } else {
      out.push_back(s[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view input) {
  std::string s(input);
  replace_all(s, "&quot;", "\"");
  replace_all(s, "&amp;", "&");
  replace_all(s, "&lt;", "<");
  replace_all(s, "&gt;", ">");
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';

  std::string padded;
  padded.reserve(s.size() * 2);
  for (char c : s) {
    if (is_padded_punct(c)) {
      padded.push_back(' ');
      padded.push_back(c);
      padded.push_back(' ');
    } else {
      padded.push_back(c);
    }
  }

  auto not_digit = [](char c) { return !is_digit(c); };
  s = scan_pairs(padded, not_digit, is_period_comma, [](std::string& o, char a, char b) {
    o.push_back(a);
    o.push_back(' ');
    o.push_back(b);
    o.push_back(' ');
  });
  s = scan_pairs(s, is_period_comma, not_digit, [](std::string& o, char a, char b) {
    o.push_back(' ');
    o.push_back(a);
    o.push_back(' ');
    o.push_back(b);
  });
  s = scan_pairs(s, is_digit, [](char c) { return c == '-'; }, [](std::string& o, char a, char b) {
    o.push_back(a);
    o.push_back(' ');
    o.push_back(b);
    o.push_back(' ');
  });

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\f' || s[i] == '\v')) ++i;
    std::size_t j = i;
    while (j < s.size() && !(s[j] == ' ' || s[j] == '\t' || s[j] == '\f' || s[j] == '\v')) ++j;
    if (j > i) tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string BleuScore::formatted() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", score);
  return buf;
}

nlohmann::json BleuScore::to_json() const {
  return {{"score", score},       {"precisions", precisions}, {"brevity_penalty", brevity_penalty},
          {"hyp_len", hyp_len},   {"ref_len", ref_len},       {"matches", matches},
          {"totals", totals}};
}

BleuScore BleuScore::from_json(const nlohmann::json& j) {
  BleuScore b;
  b.score = j.at("score").get<double>();
  b.precisions = j.at("precisions").get<std::vector<double>>();
  b.brevity_penalty = j.at("brevity_penalty").get<double>();
  b.hyp_len = j.at("hyp_len").get<std::size_t>();
  b.ref_len = j.at("ref_len").get<std::size_t>();
  b.matches = j.at("matches").get<std::vector<std::size_t>>();
  b.totals = j.at("totals").get<std::vector<std::size_t>>();
  return b;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

}  // namespace

BleuScore corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      std::size_t max_n) {
  if (hyps.size() != refs.size())
    throw SizeError("BLEU needs one reference per hypothesis: " + std::to_string(hyps.size()) +
                    " hypotheses, " + std::to_string(refs.size()) + " references");
  if (hyps.empty()) throw SizeError("BLEU needs at least one hypothesis");
  if (max_n == 0) throw ConfigError("max_n must be positive");

  BleuScore b;
  b.matches.assign(max_n, 0);
  b.totals.assign(max_n, 0);
  for (std::size_t k = 0; k < hyps.size(); ++k) {
    const auto h = tokenize_13a(hyps[k]);
    const auto r = tokenize_13a(refs[k]);
    b.hyp_len += h.size();
    b.ref_len += r.size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      const NgramCounts hc = count_ngrams(h, n);
      const NgramCounts rc = count_ngrams(r, n);
      for (const auto& [gram, c] : hc) {
        b.totals[n - 1] += c;
        auto it = rc.find(gram);
        if (it != rc.end()) b.matches[n - 1] += std::min(c, it->second);
      }
    }
  }

  b.precisions.assign(max_n, 0.0);
  double smooth = 1.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (b.totals[n] == 0) break;
    if (b.matches[n] == 0) {
      smooth *= 2.0;
      b.precisions[n] = 1.0 / (smooth * static_cast<double>(b.totals[n]));
    } else {
      b.precisions[n] = static_cast<double>(b.matches[n]) / static_cast<double>(b.totals[n]);
    }
  }

  if (b.hyp_len == 0) {
    b.brevity_penalty = 0.0;
  } else if (b.hyp_len < b.ref_len) {
    b.brevity_penalty = std::exp(1.0 - static_cast<double>(b.ref_len) / static_cast<double>(b.hyp_len));
  } else {
    b.brevity_penalty = 1.0;
  }

  double log_sum = 0.0;
  for (double p : b.precisions) log_sum += std::log(p);
  b.score = 100.0 * b.brevity_penalty * std::exp(log_sum / static_cast<double>(max_n));
  return b;
}

BleuScore sentence_bleu(const std::string& hyp, const std::string& ref, std::size_t max_n) {
  return corpus_bleu({hyp}, {ref}, max_n);
}

BleuScore evaluate_model(const TranslationBackend& backend, const ModelHandle& model,
                         const ParallelCorpus& test) {
  if (model->src_lang() != test.src_lang)
    throw LanguageMismatchError("model translates from " + model->src_lang() +
                                " but the test set source is " + test.src_lang);
  const MonolingualCorpus source = test.source_side();
  const auto out = backend.translate_batch(model, source.sentences);
  std::vector<std::string> hyps, refs;
  hyps.reserve(out.size());
  refs.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    hyps.push_back(out[i].text);
    refs.push_back(test.pairs[i].target.text);
  }
  return corpus_bleu(hyps, refs);
}

}  // namespace lrmt
