#include "cea/corpus.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cea/text.hpp"

namespace cea {

using json = nlohmann::ordered_json;

bool is_valid_tag(const std::string& tag) {
  for (const auto& t : tagset())
    if (t == tag) return true;
  return false;
}

void Message::validate() const {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.start >= t.end)
      throw std::runtime_error("message '" + id + "': token " + std::to_string(i) +
                               " has an empty char_span");
    if (t.end > raw_text.size())
      throw std::runtime_error("message '" + id + "': token " + std::to_string(i) +
                               " char_span exceeds text bounds");
    if (t.start < prev_end)
      throw std::runtime_error("message '" + id + "': token " + std::to_string(i) +
                               " overlaps or precedes the previous token");
    if (t.tagged() && !is_valid_tag(t.pos))
      throw std::runtime_error("message '" + id + "': token " + std::to_string(i) +
                               " has unknown pos '" + t.pos + "'");
    prev_end = t.end;
  }
  if (gold_explanation_span) {
    if (!gold_causality || !*gold_causality)
      throw std::runtime_error("message '" + id +
                               "': explanation_span requires causality=true");
    if (gold_explanation_span->first >= gold_explanation_span->second ||
        gold_explanation_span->second > raw_text.size())
      throw std::runtime_error("message '" + id +
                               "': explanation_span out of text bounds");
  }
}

void Corpus::validate() const {
  std::set<std::string> ids;
  for (const auto& m : messages) {
    m.validate();
    if (!ids.insert(m.id).second)
      throw std::runtime_error("duplicate message id '" + m.id + "'");
  }
}

namespace {

bool is_word_char(char32_t cp) {
  if (cp < 0x80)
    return std::isalnum(static_cast<int>(cp)) || cp == '_';
  return !text::is_emoji_cp(cp);  // accented letters etc.
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Tokens the punctuation splitter must not break apart.
bool is_lexical_exception(std::string_view field) {
  static const std::set<std::string, std::less<>> kKeep = {
      "b/c", "w/", "w/o", "a/c", "n/a"};
  return kKeep.count(text::lower(field)) > 0;
}

struct Scanner {
  const std::string& s;
  std::size_t base;  // byte offset of the field in the raw text
  std::string_view field;
  std::vector<Token>& out;

  void emit(std::size_t from, std::size_t to) {
    Token t;
    t.text = std::string(field.substr(from, to - from));
    t.start = base + from;
    t.end = base + to;
    out.push_back(std::move(t));
  }

  // Longest emoticon starting at `i`, or 0.
  std::size_t emoticon_at(std::size_t i) const {
    std::size_t best = 0;
    const std::size_t limit = std::min(field.size(), i + 6);
    for (std::size_t j = i + 2; j <= limit; ++j)
      if (text::is_emoticon(field.substr(i, j - i))) best = j - i;
    return best;
  }

  void run() {
    if (is_lexical_exception(field)) {
      emit(0, field.size());
      return;
    }
    std::size_t i = 0;
    while (i < field.size()) {
      std::string_view rest = field.substr(i);
      // URLs swallow the remainder of the field
      if (text::starts_with(rest, "http://") || text::starts_with(rest, "https://") ||
          text::starts_with(rest, "www.")) {
        emit(i, field.size());
        return;
      }
      if ((field[i] == '@' || field[i] == '#') && i + 1 < field.size() &&
          (std::isalnum(static_cast<unsigned char>(field[i + 1])) || field[i + 1] == '_')) {
        std::size_t j = i + 1;
        while (j < field.size() &&
               (std::isalnum(static_cast<unsigned char>(field[j])) || field[j] == '_'))
          ++j;
        emit(i, j);
        i = j;
        continue;
      }
      if (std::size_t len = emoticon_at(i); len > 0) {
        emit(i, i + len);
        i += len;
        continue;
      }
      char32_t cp;
      const std::size_t cplen = text::decode_utf8(field, i, cp);
      if (text::is_emoji_cp(cp)) {
        // one emoji cluster: base + ZWJ sequences / selectors
        std::size_t j = i + cplen;
        while (j < field.size()) {
          char32_t next;
          const std::size_t nlen = text::decode_utf8(field, j, next);
          if (next == 0x200d || next == 0xfe0f ||
              (next >= 0x1f3fb && next <= 0x1f3ff))
            j += nlen;
          else
            break;
        }
        emit(i, j);
        i = j;
        continue;
      }
      if (field[i] == '.' && i + 1 < field.size() && field[i + 1] == '.') {
        std::size_t j = i;
        while (j < field.size() && field[j] == '.') ++j;
        emit(i, j);  // ellipsis
        i = j;
        continue;
      }
      if (is_digit(cp)) {
        std::size_t j = i + 1;
        while (j < field.size()) {
          if (is_digit(static_cast<unsigned char>(field[j]))) {
            ++j;
          } else if ((field[j] == '.' || field[j] == ',' || field[j] == ':') &&
                     j + 1 < field.size() &&
                     is_digit(static_cast<unsigned char>(field[j + 1]))) {
            j += 2;
          } else {
            break;
          }
        }
        emit(i, j);
        i = j;
        continue;
      }
      if (is_word_char(cp)) {
        std::size_t j = i + cplen;
        while (j < field.size()) {
          char32_t next;
          const std::size_t nlen = text::decode_utf8(field, j, next);
          const bool interior_mark =
              (next == '\'' || next == 0x2019 || next == '-') && j + nlen < field.size();
          if (is_word_char(next) && !text::is_emoji_cp(next)) {
            j += nlen;
          } else if (interior_mark) {
            char32_t after;
            text::decode_utf8(field, j + nlen, after);
            if (is_word_char(after)) {
              j += nlen;
            } else {
              break;
            }
          } else {
            break;
          }
        }
        emit(i, j);
        i = j;
        continue;
      }
      emit(i, i + cplen);  // lone punctuation / symbol
      i += cplen;
    }
  }
};

}  // namespace

std::vector<Token> tokenize(const std::string& raw_text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < raw_text.size()) {
    while (i < raw_text.size() && std::isspace(static_cast<unsigned char>(raw_text[i]))) ++i;
    std::size_t j = i;
    while (j < raw_text.size() && !std::isspace(static_cast<unsigned char>(raw_text[j]))) ++j;
    if (j > i) {
      Scanner sc{raw_text, i, std::string_view(raw_text).substr(i, j - i), tokens};
      sc.run();
    }
    i = j;
  }
  return tokens;
}

namespace {

std::runtime_error line_error(std::size_t lineno, const std::string& what) {
  return std::runtime_error("line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

Message message_from_json_line(const std::string& line, std::size_t lineno) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw line_error(lineno, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw line_error(lineno, "expected a JSON object");

  Message m;
  try {
    m.id = j.at("id").get<std::string>();
    m.raw_text = j.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw line_error(lineno, std::string("field 'id'/'text': ") + e.what());
  }
  if (j.contains("tokens") && !j["tokens"].is_null()) {
    if (!j["tokens"].is_array()) throw line_error(lineno, "field 'tokens' must be an array");
    for (const auto& tj : j["tokens"]) {
      Token t;
      try {
        t.text = tj.at("t").get<std::string>();
        if (tj.contains("pos") && !tj["pos"].is_null()) t.pos = tj["pos"].get<std::string>();
        t.start = tj.at("start").get<std::size_t>();
        t.end = tj.at("end").get<std::size_t>();
      } catch (const json::exception& e) {
        throw line_error(lineno, std::string("field 'tokens': ") + e.what());
      }
      m.tokens.push_back(std::move(t));
    }
  }
  if (j.contains("causality") && !j["causality"].is_null()) {
    if (!j["causality"].is_boolean()) throw line_error(lineno, "field 'causality' must be a bool");
    m.gold_causality = j["causality"].get<bool>();
  }
  if (j.contains("explanation_span") && !j["explanation_span"].is_null()) {
    const auto& sp = j["explanation_span"];
    if (!sp.is_array() || sp.size() != 2 || !sp[0].is_number_unsigned() || !sp[1].is_number_unsigned())
      throw line_error(lineno, "field 'explanation_span' must be [start, end]");
    m.gold_explanation_span = {sp[0].get<std::size_t>(), sp[1].get<std::size_t>()};
  }
  if (j.contains("user_id") && !j["user_id"].is_null())
    m.user_id = j["user_id"].get<std::string>();
  if (j.contains("label") && !j["label"].is_null())
    m.label = j["label"].get<std::string>();

  try {
    m.validate();
  } catch (const std::exception& e) {
    throw line_error(lineno, e.what());
  }
  return m;
}

std::string message_to_json_line(const Message& m) {
  json j;
  j["id"] = m.id;
  j["text"] = m.raw_text;
  if (!m.tokens.empty()) {
    json toks = json::array();
    for (const auto& t : m.tokens) {
      json tj;
      tj["t"] = t.text;
      tj["pos"] = t.tagged() ? json(t.pos) : json(nullptr);
      tj["start"] = t.start;
      tj["end"] = t.end;
      toks.push_back(std::move(tj));
    }
    j["tokens"] = std::move(toks);
  } else {
    j["tokens"] = nullptr;
  }
  j["causality"] = m.gold_causality ? json(*m.gold_causality) : json(nullptr);
  if (m.gold_explanation_span)
    j["explanation_span"] = {m.gold_explanation_span->first, m.gold_explanation_span->second};
  else
    j["explanation_span"] = nullptr;
  j["user_id"] = m.user_id ? json(*m.user_id) : json(nullptr);
  j["label"] = m.label ? json(*m.label) : json(nullptr);
  return j.dump();
}

Corpus load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    corpus.messages.push_back(message_from_json_line(line, lineno));
  }
  corpus.validate();
  return corpus;
}

void save_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (const auto& m : corpus.messages) out << message_to_json_line(m) << '\n';
}

}  // namespace cea
