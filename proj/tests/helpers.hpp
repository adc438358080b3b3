#pragma once

// Shared builders for test fixtures.

#include <string>
#include <utility>
#include <vector>

#include "cea/corpus.hpp"
#include "cea/tagger.hpp"

namespace cea::testing {

// Builds a message from (word, tag) pairs; words joined by single spaces
// except sentence punctuation, which attaches to the previous word like real
// text. Empty tag -> shape rule or left untagged.
inline Message make_message(const std::string& id,
                            const std::vector<std::pair<std::string, std::string>>& words) {
  Message m;
  m.id = id;
  for (const auto& [w, tag] : words) {
    const bool attach = w == "." || w == "," || w == "!" || w == "?" ||
                        (w.size() >= 2 && w.find_first_not_of('.') == std::string::npos);
    Token t;
    t.text = w;
    if (!m.raw_text.empty() && !attach) m.raw_text += ' ';
    t.start = m.raw_text.size();
    m.raw_text += w;
    t.end = m.raw_text.size();
    t.pos = tag.empty() ? forced_tag(w) : tag;
    m.tokens.push_back(std::move(t));
  }
  return m;
}

// Tokenizes real text and applies the given tags positionally.
inline Message make_tagged(const std::string& id, const std::string& text,
                           const std::vector<std::string>& tags) {
  Message m;
  m.id = id;
  m.raw_text = text;
  m.tokens = tokenize(text);
  for (std::size_t i = 0; i < m.tokens.size() && i < tags.size(); ++i)
    m.tokens[i].pos = tags[i];
  for (auto& t : m.tokens) {
    const std::string rule = forced_tag(t.text);
    if (!rule.empty()) t.pos = rule;
  }
  return m;
}

}  // namespace cea::testing
