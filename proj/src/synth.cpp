#include "cea/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "cea/rng.hpp"

namespace cea {

namespace {

struct Word {
  const char* text;
  const char* tag;
};

const Word kPronouns[] = {{"i", "O"}, {"we", "O"}, {"he", "O"}, {"she", "O"}, {"they", "O"}};
const Word kNouns[] = {{"parser", "N"}, {"test", "N"},   {"dog", "N"},    {"cat", "N"},
                       {"boss", "N"},   {"friend", "N"}, {"dinner", "N"}, {"game", "N"},
                       {"code", "N"},   {"car", "N"},    {"job", "N"},    {"phone", "N"},
                       {"coffee", "N"}, {"meeting", "N"}};
const Word kVerbs[] = {{"failed", "V"},  {"crashed", "V"}, {"worked", "V"}, {"stayed", "V"},
                       {"cried", "V"},   {"smiled", "V"},  {"slept", "V"},  {"won", "V"},
                       {"lost", "V"},    {"broke", "V"},   {"ran", "V"},    {"played", "V"},
                       {"helped", "V"},  {"quit", "V"}};
const Word kAdverbs[] = {{"really", "R"}, {"always", "R"}, {"never", "R"},
                         {"today", "R"},  {"again", "R"},  {"yesterday", "R"}};
const Word kAdjectives[] = {{"happy", "A"}, {"sad", "A"},  {"tired", "A"},
                            {"angry", "A"}, {"busy", "A"}, {"late", "A"}};
const Word kCausal[] = {{"because", "P"}, {"cuz", "P"}, {"bcuz", "P"}, {"since", "P"},
                        {"cause", "P"}};
const Word kNonCausalConj[] = {{"and", "&"}, {"but", "&"}, {"or", "&"}};
const Word kNonCausalSub[] = {{"while", "P"}, {"when", "P"}};
const char* kEmoji[] = {":)", ":(", ":D", "\xF0\x9F\x98\x80"};  // last one: 😀

// fillers intentionally missing from the embedding file
const std::set<std::string> kEmbeddingHoldout = {"again", "yesterday"};

struct Builder {
  std::string text;
  std::vector<Token> tokens;

  void add(const std::string& w, const std::string& tag) {
    const bool attach = w == "." || w == "," || w == "!" || w == "?";
    if (!text.empty() && !attach) text += ' ';
    Token t;
    t.text = w;
    t.pos = tag;
    t.start = text.size();
    text += w;
    t.end = text.size();
    tokens.push_back(std::move(t));
  }
};

template <std::size_t N>
const Word& pick(const Word (&arr)[N], Rng& rng) {
  return arr[rng.next_below(N)];
}

// subject + verb (+ tail); always contains a V-tagged token
void add_clause(Builder& b, Rng& rng) {
  switch (rng.next_below(5)) {
    case 0: {
      const Word& p = pick(kPronouns, rng);
      b.add(p.text, p.tag);
      const Word& v = pick(kVerbs, rng);
      b.add(v.text, v.tag);
      if (rng.next_double() < 0.4) {
        const Word& r = pick(kAdverbs, rng);
        b.add(r.text, r.tag);
      }
      break;
    }
    case 1: {
      b.add(rng.next_double() < 0.5 ? "my" : "the", "D");
      const Word& n = pick(kNouns, rng);
      b.add(n.text, n.tag);
      const Word& v = pick(kVerbs, rng);
      b.add(v.text, v.tag);
      if (rng.next_double() < 0.3) {
        const Word& r = pick(kAdverbs, rng);
        b.add(r.text, r.tag);
      }
      break;
    }
    case 2: {
      const Word& p = pick(kPronouns, rng);
      b.add(p.text, p.tag);
      b.add("was", "V");
      const Word& a = pick(kAdjectives, rng);
      b.add(a.text, a.tag);
      break;
    }
    case 3: {
      b.add(rng.next_double() < 0.5 ? "my" : "the", "D");
      const Word& n = pick(kNouns, rng);
      b.add(n.text, n.tag);
      b.add("was", "V");
      const Word& a = pick(kAdjectives, rng);
      b.add(a.text, a.tag);
      break;
    }
    default: {
      const Word& p = pick(kPronouns, rng);
      b.add(p.text, p.tag);
      const Word& v = pick(kVerbs, rng);
      b.add(v.text, v.tag);
      b.add("the", "D");
      const Word& n = pick(kNouns, rng);
      b.add(n.text, n.tag);
      break;
    }
  }
}

Message make_causal(Rng& rng) {
  Builder b;
  Message m;
  const Word& conn = pick(kCausal, rng);
  const double form = rng.next_double();
  if (form < 0.10) {
    // sentence-initial explanation: "Because Y, X."
    const std::size_t conn_idx = b.tokens.size();
    b.add(conn.text, conn.tag);
    add_clause(b, rng);
    const std::size_t expl_last = b.tokens.size() - 1;
    b.add(",", ",");
    add_clause(b, rng);
    b.add(".", ",");
    m.gold_explanation_span = {b.tokens[conn_idx].start, b.tokens[expl_last].end};
  } else {
    add_clause(b, rng);
    if (form < 0.25) b.add(",", ",");
    const std::size_t conn_idx = b.tokens.size();
    b.add(conn.text, conn.tag);
    add_clause(b, rng);
    const std::size_t expl_last = b.tokens.size() - 1;
    b.add(".", ",");
    m.gold_explanation_span = {b.tokens[conn_idx].start, b.tokens[expl_last].end};
    if (form > 0.85) b.add(kEmoji[rng.next_below(4)], "E");
  }
  m.gold_causality = true;
  m.raw_text = std::move(b.text);
  m.tokens = std::move(b.tokens);
  return m;
}

Message make_non_causal(Rng& rng) {
  Builder b;
  Message m;
  const double form = rng.next_double();
  if (form < 0.30) {
    add_clause(b, rng);
    b.add(".", ",");
  } else if (form < 0.60) {
    add_clause(b, rng);
    const Word& conj = pick(kNonCausalConj, rng);
    b.add(conj.text, conj.tag);
    add_clause(b, rng);
    b.add(".", ",");
  } else if (form < 0.70) {
    add_clause(b, rng);
    b.add(",", ",");
    add_clause(b, rng);
    b.add(".", ",");
  } else if (form < 0.90) {
    add_clause(b, rng);
    const Word& sub = pick(kNonCausalSub, rng);
    b.add(sub.text, sub.tag);
    add_clause(b, rng);
    b.add(".", ",");
  } else {
    add_clause(b, rng);
    b.add(".", ",");
    b.add(kEmoji[rng.next_below(4)], "E");
  }
  m.gold_causality = false;
  m.raw_text = std::move(b.text);
  m.tokens = std::move(b.tokens);
  return m;
}

}  // namespace

Corpus synth_corpus(const SynthOptions& options) {
  if (options.n_messages == 0) throw std::invalid_argument("n_messages must be positive");
  Rng rng(options.seed);
  Corpus corpus;
  corpus.messages.reserve(options.n_messages);
  for (std::size_t i = 0; i < options.n_messages; ++i) {
    Message m = rng.next_double() < options.causal_fraction ? make_causal(rng)
                                                            : make_non_causal(rng);
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05zu", i);
    m.id = id;
    char user[16];
    std::snprintf(user, sizeof(user), "u%03zu",
                  static_cast<std::size_t>(rng.next_below(options.n_users)));
    m.user_id = user;
    if (!options.keep_tags)
      for (auto& t : m.tokens) t.pos.clear();
    corpus.messages.push_back(std::move(m));
  }
  corpus.validate();
  return corpus;
}

void split_corpus(const Corpus& corpus, double train_frac, double val_frac,
                  Corpus& train, Corpus& validation, Corpus& test) {
  const std::size_t n = corpus.messages.size();
  const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * train_frac);
  const auto n_val = static_cast<std::size_t>(static_cast<double>(n) * val_frac);
  train.split = Split::train;
  validation.split = Split::validation;
  test.split = Split::test;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train)
      train.messages.push_back(corpus.messages[i]);
    else if (i < n_train + n_val)
      validation.messages.push_back(corpus.messages[i]);
    else
      test.messages.push_back(corpus.messages[i]);
  }
}

std::vector<std::string> synth_vocabulary() {
  std::set<std::string> vocab;
  for (const auto& w : kPronouns) vocab.insert(w.text);
  for (const auto& w : kNouns) vocab.insert(w.text);
  for (const auto& w : kVerbs) vocab.insert(w.text);
  for (const auto& w : kAdverbs) vocab.insert(w.text);
  for (const auto& w : kAdjectives) vocab.insert(w.text);
  for (const auto& w : kCausal) vocab.insert(w.text);
  for (const auto& w : kNonCausalConj) vocab.insert(w.text);
  for (const auto& w : kNonCausalSub) vocab.insert(w.text);
  for (const auto& e : kEmoji) vocab.insert(e);
  vocab.insert({"my", "the", "was", ".", ","});
  return {vocab.begin(), vocab.end()};
}

void write_synth_embeddings(const std::string& path, int dim, std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("dim must be positive");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  Rng rng(seed);
  for (const auto& word : synth_vocabulary()) {
    const bool holdout = kEmbeddingHoldout.count(word) > 0;
    if (holdout) {
      for (int k = 0; k < dim; ++k) rng.next_double();  // keep the stream aligned
      continue;
    }
    out << word;
    char buf[32];
    for (int k = 0; k < dim; ++k) {
      std::snprintf(buf, sizeof(buf), " %.6f", rng.next_uniform(-0.5, 0.5));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace cea
