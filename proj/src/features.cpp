#include "cea/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "cea/text.hpp"

namespace cea {

void FeatureVector::set(const std::string& name, double value) {
  if (value == 0.0)
    entries_.erase(name);
  else
    entries_[name] = value;
}

void FeatureVector::increment(const std::string& name, double delta) {
  set(name, get(name) + delta);
}

double FeatureVector::get(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? 0.0 : it->second;
}

namespace {

const std::pair<const char*, bool> kDefaultSentiment[] = {
    {"good", true},      {"great", true},      {"love", true},
    {"loved", true},     {"like", true},       {"best", true},
    {"awesome", true},   {"amazing", true},    {"excellent", true},
    {"happy", true},     {"nice", true},       {"perfect", true},
    {"wonderful", true}, {"fantastic", true},  {"delicious", true},
    {"friendly", true},  {"fun", true},        {"beautiful", true},
    {"glad", true},      {"thanks", true},     {"thank", true},
    {"win", true},       {"won", true},        {"enjoy", true},
    {"enjoyed", true},   {"cool", true},       {"sweet", true},
    {"fresh", true},     {"helpful", true},    {"pleased", true},
    {"bad", false},      {"terrible", false},  {"awful", false},
    {"hate", false},     {"hated", false},     {"worst", false},
    {"horrible", false}, {"rude", false},      {"slow", false},
    {"overpriced", false}, {"disgusting", false}, {"poor", false},
    {"disappointing", false}, {"disappointed", false}, {"sad", false},
    {"angry", false},    {"annoying", false},  {"broken", false},
    {"fail", false},     {"failed", false},    {"sick", false},
    {"tired", false},    {"worse", false},     {"gross", false},
    {"mad", false},      {"sucks", false},     {"boring", false},
    {"dirty", false},    {"mess", false},      {"wrong", false},
    {"problem", false},  {"bugs", false},      {"lost", false},
    {"cry", false},      {"upset", false},     {"cold", false}};

}  // namespace

SentimentLexicon SentimentLexicon::defaults() {
  SentimentLexicon lex;
  for (const auto& [word, pos] : kDefaultSentiment) lex.add(word, pos);
  return lex;
}

SentimentLexicon SentimentLexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sentiment lexicon '" + path + "'");
  SentimentLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("sentiment lexicon line " + std::to_string(lineno) +
                               ": expected word<TAB>polarity");
    const std::string word = line.substr(0, tab);
    const std::string pol = text::lower(line.substr(tab + 1));
    if (pol != "positive" && pol != "negative")
      throw std::runtime_error("sentiment lexicon line " + std::to_string(lineno) +
                               ": polarity must be positive or negative");
    lex.add(word, pol == "positive");
  }
  return lex;
}

void SentimentLexicon::add(const std::string& word, bool positive) {
  entries_[text::lower(word)] = positive ? 1 : -1;
}

int SentimentLexicon::polarity(const std::string& word) const {
  auto it = entries_.find(text::lower(word));
  return it == entries_.end() ? 0 : it->second;
}

std::string feature_family(const std::string& name) {
  const auto colon = name.find(':');
  return colon == std::string::npos ? name : name.substr(0, colon);
}

void FeatureSpace::reindex() {
  index.clear();
  index.reserve(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i)
    index.emplace(selected[i], static_cast<int>(i));
}

int FeatureSpace::index_of(const std::string& name) const {
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

FeatureSpace fit_feature_space(const std::vector<FeatureVector>& vectors) {
  FeatureSpace space;
  for (const auto& v : vectors)
    for (const auto& [name, value] : v.entries()) space.doc_frequency[name] += 1;
  space.selected.reserve(space.doc_frequency.size());
  for (const auto& [name, count] : space.doc_frequency) space.selected.push_back(name);
  space.reindex();
  return space;
}

void filter_low_frequency(FeatureSpace& space, const std::string& family,
                          long min_doc_count) {
  if (min_doc_count < 1) throw std::invalid_argument("min_doc_count must be >= 1");
  std::erase_if(space.selected, [&](const std::string& name) {
    if (feature_family(name) != family) return false;
    auto it = space.doc_frequency.find(name);
    const long df = it == space.doc_frequency.end() ? 0 : it->second;
    return df < min_doc_count;
  });
  space.reindex();
}

std::pair<double, double> chi2_2x2(double present_pos, double present_neg,
                                   double absent_pos, double absent_neg) {
  double a = present_pos, b = present_neg, c = absent_pos, d = absent_neg;
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) {
    a += 0.5;
    b += 0.5;
    c += 0.5;
    d += 0.5;
  }
  const double n = a + b + c + d;
  const double denom = (a + b) * (c + d) * (a + c) * (b + d);
  if (denom == 0.0) return {0.0, 1.0};
  const double diff = a * d - b * c;
  const double stat = n * diff * diff / denom;
  const double p = std::erfc(std::sqrt(stat / 2.0));  // chi-square sf, df=1
  return {stat, p};
}

void select_univariate(FeatureSpace& space, const std::vector<FeatureVector>& X,
                       const std::vector<bool>& y, double alpha) {
  if (X.size() != y.size()) throw std::invalid_argument("X and y lengths differ");
  if (X.size() < 2) throw std::invalid_argument("need at least 2 documents");
  long n_pos = 0;
  for (bool label : y) n_pos += label ? 1 : 0;
  const long n_neg = static_cast<long>(y.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::runtime_error("univariate selection needs both classes present");

  std::map<std::string, long> present_pos, present_neg;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (const auto& [name, value] : X[i].entries()) {
      if (y[i])
        present_pos[name] += 1;
      else
        present_neg[name] += 1;
    }
  }

  const double n_features = static_cast<double>(space.selected.size());
  const double threshold = n_features > 0 ? alpha / n_features : 0.0;

  std::vector<std::string> kept;
  kept.reserve(space.selected.size());
  for (const auto& name : space.selected) {
    auto pit = present_pos.find(name);
    auto nit = present_neg.find(name);
    const double pp = pit == present_pos.end() ? 0.0 : static_cast<double>(pit->second);
    const double pn = nit == present_neg.end() ? 0.0 : static_cast<double>(nit->second);
    const auto [stat, p] = chi2_2x2(pp, pn, static_cast<double>(n_pos) - pp,
                                    static_cast<double>(n_neg) - pn);
    if (p <= threshold) kept.push_back(name);
  }
  space.selected = std::move(kept);
  space.selection_alpha = alpha;
  space.reindex();
}

FeatureSpace select_features_univariate(const std::vector<FeatureVector>& X,
                                        const std::vector<bool>& y, double alpha) {
  FeatureSpace space = fit_feature_space(X);
  select_univariate(space, X, y, alpha);
  return space;
}

namespace {

bool is_feature_word(const Token& t) { return !text::is_punct_only(t.text); }

// lowercased non-punctuation words of an argument
std::vector<std::string> argument_words(const Message& m, const DiscourseArgument& arg) {
  std::vector<std::string> out;
  for (int i = arg.first; i <= arg.last; ++i)
    if (is_feature_word(m.tokens[i])) out.push_back(text::lower(m.tokens[i].text));
  return out;
}

void add_word_ngrams(FeatureVector& fv, const Message& m) {
  std::vector<std::string> words;
  for (const auto& t : m.tokens) words.push_back(text::lower(t.text));
  for (std::size_t n = 1; n <= 3; ++n) {
    if (words.size() < n) break;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      std::string gram = "ng:";
      for (std::size_t k = 0; k < n; ++k) {
        if (k) gram += ' ';
        gram += words[i + k];
      }
      fv.set(gram, 1.0);
    }
  }
}

void add_char_ngrams(FeatureVector& fv, const Message& m) {
  const auto cps = text::codepoints(text::lower(m.raw_text));
  for (std::size_t n = 2; n <= 5; ++n) {
    if (cps.size() < n) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram = "cng:";
      for (std::size_t k = 0; k < n; ++k) gram += cps[i + k];
      fv.set(gram, 1.0);
    }
  }
}

void add_pos_ngrams(FeatureVector& fv, const Message& m) {
  const auto& toks = m.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    fv.set("pos:" + toks[i].pos, 1.0);
    if (i + 1 < toks.size()) fv.set("pos:" + toks[i].pos + " " + toks[i + 1].pos, 1.0);
  }
}

void add_sentiment(FeatureVector& fv, const Message& m, const SentimentLexicon& lex) {
  long pos = 0, neg = 0;
  for (const auto& t : m.tokens) {
    const int p = lex.polarity(t.text);
    if (p > 0) ++pos;
    if (p < 0) ++neg;
  }
  fv.set("sent:positive", static_cast<double>(pos));
  fv.set("sent:negative", static_cast<double>(neg));
}

void add_stats(FeatureVector& fv, const Message& m) {
  fv.set("stat:word_count", static_cast<double>(m.tokens.size()));
  if (!m.tokens.empty()) {
    double total = 0.0;
    for (const auto& t : m.tokens)
      total += static_cast<double>(text::codepoint_length(t.text));
    fv.set("stat:avg_word_len", total / static_cast<double>(m.tokens.size()));
  }
}

void add_argument_pair_features(FeatureVector& fv, const Message& m,
                                const std::vector<DiscourseArgument>& args) {
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    const auto wa = argument_words(m, args[i]);
    const auto wb = argument_words(m, args[i + 1]);
    if (!wa.empty()) {
      fv.set("fl:first_A=" + wa.front(), 1.0);
      fv.set("fl:last_A=" + wa.back(), 1.0);
    }
    if (!wb.empty()) {
      fv.set("fl:first_B=" + wb.front(), 1.0);
      fv.set("fl:last_B=" + wb.back(), 1.0);
    }
    for (std::size_t k = 0; k < 3 && k < wa.size(); ++k)
      fv.set("f3:A:" + std::to_string(k + 1) + "=" + wa[k], 1.0);
    for (std::size_t k = 0; k < 3 && k < wb.size(); ++k)
      fv.set("f3:B:" + std::to_string(k + 1) + "=" + wb[k], 1.0);
    const std::set<std::string> sa(wa.begin(), wa.end());
    const std::set<std::string> sb(wb.begin(), wb.end());
    for (const auto& a : sa)
      for (const auto& b : sb) fv.set("wp:" + a + "|" + b, 1.0);
  }
}

}  // namespace

FeatureVector extract_message_features(const Message& message,
                                       const std::vector<DiscourseArgument>& args,
                                       const SentimentLexicon& sentiment) {
  if (!message.tokens.empty() && args.empty())
    throw std::runtime_error("message '" + message.id + "' is not segmented");
  FeatureVector fv;
  add_word_ngrams(fv, message);
  add_char_ngrams(fv, message);
  add_pos_ngrams(fv, message);
  add_sentiment(fv, message, sentiment);
  add_stats(fv, message);
  add_argument_pair_features(fv, message, args);
  return fv;
}

}  // namespace cea
