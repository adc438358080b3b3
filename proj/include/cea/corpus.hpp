#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cea {

// Coarse Twitter-style POS tagset. The symbols the rest of the pipeline
// depends on are V (verb), P (preposition / subordinating conjunction),
// & (coordinating conjunction), E (emoticon or emoji) and , (punctuation).
inline const std::vector<std::string>& tagset() {
  static const std::vector<std::string> tags = {
      "N", "O", "^", "S", "Z", "V", "L", "M", "A", "R", "!", "D", "P",
      "&", "T", "X", "Y", "#", "@", "~", "U", "E", "$", ",", "G"};
  return tags;
}

bool is_valid_tag(const std::string& tag);

struct Token {
  std::string text;
  std::string pos;  // empty until tagged; one of tagset() afterwards
  std::size_t start = 0;  // byte offsets into Message::raw_text
  std::size_t end = 0;

  bool tagged() const { return !pos.empty(); }
};

struct Message {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;
  std::optional<bool> gold_causality;
  std::optional<std::pair<std::size_t, std::size_t>> gold_explanation_span;
  std::optional<std::string> user_id;
  std::optional<std::string> label;  // e.g. review polarity

  // Throws if spans are out of order / out of bounds or the gold label
  // combination is inconsistent.
  void validate() const;
};

enum class Split { train, validation, test, unsplit };

struct Corpus {
  std::vector<Message> messages;
  Split split = Split::unsplit;

  void validate() const;  // all message invariants + id uniqueness
};

// Rule-based social-media tokenizer. Whitespace-delimited fields are scanned
// left to right: URLs, @-mentions, #hashtags, emoticons, emoji, numbers and
// ellipsis runs come out as single tokens, remaining punctuation detaches one
// character at a time. Byte spans always index into the original text.
std::vector<Token> tokenize(const std::string& raw_text);

// JSONL corpus I/O; schema documented in the README. Errors carry the
// offending line number and field.
Corpus load_jsonl(const std::string& path);
void save_jsonl(const Corpus& corpus, const std::string& path);

// Single-message (de)serialization shared with the CLI streaming path.
Message message_from_json_line(const std::string& line, std::size_t lineno);
std::string message_to_json_line(const Message& m);

}  // namespace cea
