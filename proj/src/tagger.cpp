#include "cea/tagger.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "cea/rng.hpp"
#include "cea/text.hpp"

namespace cea {

namespace {

int tag_index(const std::string& tag) {
  const auto& tags = tagset();
  for (std::size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == tag) return static_cast<int>(i);
  return -1;
}

std::string suffix(const std::string& w, std::size_t n) {
  return w.size() <= n ? w : w.substr(w.size() - n);
}

// Context features for position i. Order is fixed; scoring iterates this
// list, never a hash map, so summation order is deterministic.
std::vector<std::string> features(const std::vector<Token>& tokens, std::size_t i,
                                  const std::string& prev_tag, const std::string& prev2_tag) {
  const std::string w = text::lower(tokens[i].text);
  const std::string prev_w = i > 0 ? text::lower(tokens[i - 1].text) : "<s>";
  const std::string next_w = i + 1 < tokens.size() ? text::lower(tokens[i + 1].text) : "</s>";
  std::vector<std::string> fs;
  fs.reserve(12);
  fs.push_back("bias");
  fs.push_back("w=" + w);
  fs.push_back("suf3=" + suffix(w, 3));
  fs.push_back("suf2=" + suffix(w, 2));
  fs.push_back("pre1=" + w.substr(0, 1));
  fs.push_back("t-1=" + prev_tag);
  fs.push_back("t-2,t-1=" + prev2_tag + "|" + prev_tag);
  fs.push_back("t-1,w=" + prev_tag + "|" + w);
  fs.push_back("w-1=" + prev_w);
  fs.push_back("w+1=" + next_w);
  if (std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); }))
    fs.push_back("hasdigit");
  return fs;
}

}  // namespace

std::string forced_tag(const std::string& token_text) {
  if (text::is_emoji_token(token_text)) return "E";
  if (text::is_punct_only(token_text)) return ",";
  if (text::starts_with(token_text, "http://") || text::starts_with(token_text, "https://") ||
      text::starts_with(token_text, "www."))
    return "U";
  if (token_text.size() > 1 && token_text[0] == '@') return "@";
  if (token_text.size() > 1 && token_text[0] == '#') return "#";
  return "";
}

void PosTagger::set_weights(WeightMap w, bool averaged) {
  weights_ = std::move(w);
  averaged_ = averaged;
}

std::vector<std::string> PosTagger::predict(const std::vector<Token>& tokens) const {
  const auto& tags = tagset();
  std::vector<std::string> out(tokens.size());
  std::string prev = "<s>", prev2 = "<s>";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string tag = forced_tag(tokens[i].text);
    if (tag.empty()) {
      if (!averaged_) throw std::runtime_error("no tag source");
      std::vector<double> score(tags.size(), 0.0);
      for (const auto& f : features(tokens, i, prev, prev2)) {
        auto it = weights_.find(f);
        if (it == weights_.end()) continue;
        for (std::size_t t = 0; t < tags.size(); ++t) score[t] += it->second[t];
      }
      int best = 0;
      for (std::size_t t = 1; t < tags.size(); ++t)
        if (score[t] > score[best]) best = static_cast<int>(t);
      tag = tags[best];
    }
    out[i] = tag;
    prev2 = prev;
    prev = tag;
  }
  return out;
}

void PosTagger::tag(Message& message) const {
  bool needs_model = false;
  for (const auto& t : message.tokens)
    if (!t.tagged() && forced_tag(t.text).empty()) needs_model = true;
  if (needs_model && !averaged_) throw std::runtime_error("no tag source");

  std::vector<std::string> predicted;
  bool have_predictions = false;
  for (std::size_t i = 0; i < message.tokens.size(); ++i) {
    Token& t = message.tokens[i];
    const std::string rule = forced_tag(t.text);
    if (!rule.empty()) {
      t.pos = rule;
    } else if (!t.tagged()) {
      if (!have_predictions) {
        predicted = predict(message.tokens);
        have_predictions = true;
      }
      t.pos = predicted[i];
    }
  }
}

void PosTagger::train(const Corpus& corpus, int epochs, std::uint64_t seed) {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (corpus.messages.empty()) throw std::runtime_error("empty training corpus");
  for (const auto& m : corpus.messages)
    for (const auto& t : m.tokens)
      if (!t.tagged())
        throw std::runtime_error("untagged token '" + t.text + "' in message '" + m.id + "'");

  const auto& tags = tagset();
  const std::size_t ntags = tags.size();

  // current weights, running totals and the step of the last total update
  // (the usual lazy-averaging bookkeeping)
  struct Cell {
    std::vector<double> w, total;
    std::vector<long> stamp;
    explicit Cell(std::size_t n) : w(n, 0.0), total(n, 0.0), stamp(n, 0) {}
  };
  std::unordered_map<std::string, Cell> acc;
  long step = 0;

  auto bump = [&](const std::string& f, int t, double delta) {
    auto [it, inserted] = acc.try_emplace(f, ntags);
    Cell& c = it->second;
    c.total[t] += static_cast<double>(step - c.stamp[t]) * c.w[t];
    c.stamp[t] = step;
    c.w[t] += delta;
  };

  std::vector<std::size_t> order(corpus.messages.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t mi : order) {
      const Message& m = corpus.messages[mi];
      std::string prev = "<s>", prev2 = "<s>";
      for (std::size_t i = 0; i < m.tokens.size(); ++i) {
        const std::string gold = m.tokens[i].pos;
        std::string guess = forced_tag(m.tokens[i].text);
        if (guess.empty()) {
          ++step;
          const auto fs = features(m.tokens, i, prev, prev2);
          std::vector<double> score(ntags, 0.0);
          for (const auto& f : fs) {
            auto it = acc.find(f);
            if (it == acc.end()) continue;
            for (std::size_t t = 0; t < ntags; ++t) score[t] += it->second.w[t];
          }
          int best = 0;
          for (std::size_t t = 1; t < ntags; ++t)
            if (score[t] > score[best]) best = static_cast<int>(t);
          guess = tags[best];
          if (guess != gold) {
            const int g = tag_index(gold);
            if (g < 0)
              throw std::runtime_error("unknown gold tag '" + gold + "'");
            for (const auto& f : fs) {
              bump(f, g, +1.0);
              bump(f, best, -1.0);
            }
          }
        }
        // gold tags provide the decoding context during training
        prev2 = prev;
        prev = gold;
      }
    }
  }

  weights_.clear();
  if (step > 0) {
    for (auto& [f, c] : acc) {
      std::vector<double> avg(ntags, 0.0);
      bool nonzero = false;
      for (std::size_t t = 0; t < ntags; ++t) {
        c.total[t] += static_cast<double>(step - c.stamp[t]) * c.w[t];
        avg[t] = c.total[t] / static_cast<double>(step);
        if (avg[t] != 0.0) nonzero = true;
      }
      if (nonzero) weights_.emplace(f, std::move(avg));
    }
  }
  averaged_ = true;
}

std::vector<Token> tag_pos(std::vector<Token> tokens, const PosTagger& tagger) {
  Message m;
  m.tokens = std::move(tokens);
  tagger.tag(m);
  return std::move(m.tokens);
}

PosTagger train_tagger(const Corpus& tagged_corpus, int epochs, std::uint64_t seed) {
  PosTagger tagger;
  tagger.train(tagged_corpus, epochs, seed);
  return tagger;
}

}  // namespace cea
