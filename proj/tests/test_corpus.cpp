#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cea/corpus.hpp"
#include "cea/rng.hpp"
#include "cea/text.hpp"

using namespace cea;

namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::string join_ws(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("tokenize: empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize: ellipsis and emoticon stay single tokens") {
  const auto tokens = tokenize("My test result... :(");
  CHECK(texts(tokens) == std::vector<std::string>{"My", "test", "result", "...", ":("});
  CHECK(tokens[2].start == 8);
  CHECK(tokens[2].end == 14);
  CHECK(tokens[3].start == 14);
  CHECK(tokens[3].end == 17);
  CHECK(tokens[4].start == 18);
  CHECK(tokens[4].end == 20);
}

TEST_CASE("tokenize: plain whitespace split") {
  CHECK(texts(tokenize("I like apple and banana")) ==
        std::vector<std::string>{"I", "like", "apple", "and", "banana"});
}

TEST_CASE("tokenize: punctuation detaches, contractions and numbers do not") {
  CHECK(texts(tokenize("I went home, but he stayed.")) ==
        std::vector<std::string>{"I", "went", "home", ",", "but", "he", "stayed", "."});
  CHECK(texts(tokenize("don't stop")) == std::vector<std::string>{"don't", "stop"});
  CHECK(texts(tokenize("it cost 3.50 today")) ==
        std::vector<std::string>{"it", "cost", "3.50", "today"});
  CHECK(texts(tokenize("b/c of rain")) == std::vector<std::string>{"b/c", "of", "rain"});
}

TEST_CASE("tokenize: urls, mentions, hashtags, emoji") {
  CHECK(texts(tokenize("see https://example.com/x?a=1 now")) ==
        std::vector<std::string>{"see", "https://example.com/x?a=1", "now"});
  CHECK(texts(tokenize("@sam #fail \xF0\x9F\x98\x80ok")) ==
        std::vector<std::string>{"@sam", "#fail", "\xF0\x9F\x98\x80", "ok"});
}

TEST_CASE("tokenize: spans reconstruct the raw text") {
  const std::string raw = "My parser failed because I always have bugs.  :(";
  const auto tokens = tokenize(raw);
  std::string rebuilt(raw.size(), ' ');
  for (const auto& t : tokens)
    for (std::size_t i = t.start; i < t.end; ++i) rebuilt[i] = raw[i];
  // every non-space byte is covered by exactly one token
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!std::isspace(static_cast<unsigned char>(raw[i]))) CHECK(rebuilt[i] == raw[i]);
  std::size_t prev_end = 0;
  for (const auto& t : tokens) {
    CHECK(t.start >= prev_end);
    CHECK(t.start < t.end);
    prev_end = t.end;
  }
}

TEST_CASE("tokenize: idempotent on space-joined token texts") {
  Rng rng(7);
  const std::vector<std::string> pieces = {
      "hello",  "world!", "a,b",   "x...",  ":)",  "driving", "@you", "#tag",
      "haha,",  "(wow)",  "3.5",   "don't", "...", "https://x.io/a", "um",
      "\xF0\x9F\x98\x80", "so-so", "w/o",  "?!",  "end."};
  for (int iter = 0; iter < 300; ++iter) {
    std::string text;
    const int n = 1 + static_cast<int>(rng.next_below(8));
    for (int i = 0; i < n; ++i) {
      if (!text.empty()) text += ' ';
      text += pieces[rng.next_below(pieces.size())];
    }
    const auto once = texts(tokenize(text));
    const auto twice = texts(tokenize(join_ws(once)));
    CHECK(once == twice);
  }
}

TEST_CASE("message invariants") {
  Message m;
  m.id = "m1";
  m.raw_text = "ab cd";
  m.tokens = tokenize(m.raw_text);
  CHECK_NOTHROW(m.validate());

  SUBCASE("span past end of text") {
    m.tokens[1].end = 99;
    CHECK_THROWS(m.validate());
  }
  SUBCASE("overlapping tokens") {
    m.tokens[1].start = 1;
    CHECK_THROWS(m.validate());
  }
  SUBCASE("explanation span without causality") {
    m.gold_explanation_span = {0, 2};
    CHECK_THROWS_WITH_AS(m.validate(),
                         doctest::Contains("explanation_span requires causality"),
                         std::runtime_error);
  }
  SUBCASE("unknown pos tag") {
    m.tokens[0].pos = "ZZ";
    CHECK_THROWS(m.validate());
  }
}

TEST_CASE("jsonl: load, errors carry line numbers, round trip") {
  const auto path = temp_file("cea_corpus_test.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"a","text":"My parser failed because I always have bugs.","causality":true,"explanation_span":[17,44],"user_id":"u1"})"
        << "\n";
    out << R"({"id":"b","text":"I like apple and banana","causality":false})" << "\n";
    out << R"({"id":"c","text":"hi :)","tokens":[{"t":"hi","pos":"!","start":0,"end":2},{"t":":)","pos":"E","start":3,"end":5}]})"
        << "\n";
  }
  const Corpus corpus = load_jsonl(path.string());
  CHECK(corpus.messages.size() == 3);
  CHECK(corpus.messages[0].gold_causality == true);
  CHECK(corpus.messages[0].gold_explanation_span->first == 17);
  CHECK(corpus.messages[1].tokens.empty());
  CHECK(corpus.messages[2].tokens.size() == 2);

  SUBCASE("round trip is identity") {
    const auto out_path = temp_file("cea_corpus_rt.jsonl");
    save_jsonl(corpus, out_path.string());
    const Corpus again = load_jsonl(out_path.string());
    REQUIRE(again.messages.size() == corpus.messages.size());
    for (std::size_t i = 0; i < corpus.messages.size(); ++i)
      CHECK(message_to_json_line(again.messages[i]) ==
            message_to_json_line(corpus.messages[i]));
  }

  SUBCASE("span/causality violation is rejected with its line") {
    const auto bad = temp_file("cea_corpus_bad.jsonl");
    std::ofstream out(bad);
    out << R"({"id":"a","text":"ok","causality":false})" << "\n";
    out << R"({"id":"b","text":"broken","causality":false,"explanation_span":[0,3]})" << "\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_jsonl(bad.string()), doctest::Contains("line 2"),
                         std::runtime_error);
  }

  SUBCASE("malformed json is rejected") {
    const auto bad = temp_file("cea_corpus_bad2.jsonl");
    std::ofstream out(bad);
    out << "{nope\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_jsonl(bad.string()), doctest::Contains("malformed JSON"),
                         std::runtime_error);
  }

  SUBCASE("duplicate ids are rejected") {
    Corpus dup = corpus;
    dup.messages.push_back(dup.messages[0]);
    CHECK_THROWS_WITH_AS(dup.validate(), doctest::Contains("duplicate"),
                         std::runtime_error);
  }
}

TEST_CASE("text helpers") {
  CHECK(text::is_emoticon(":("));
  CHECK(text::is_emoticon(":-)"));
  CHECK(text::is_emoticon(";P"));
  CHECK(text::is_emoticon("D:"));
  CHECK(text::is_emoticon("<3"));
  CHECK_FALSE(text::is_emoticon("hello"));
  CHECK_FALSE(text::is_emoticon(","));
  CHECK(text::is_emoji_token("\xF0\x9F\x98\x80"));
  CHECK(text::is_punct_only("..."));
  CHECK(text::is_punct_only(","));
  CHECK_FALSE(text::is_punct_only(":("));  // emoticon, not plain punctuation
  CHECK(text::codepoint_length("a\xF0\x9F\x98\x80" "b") == 3);
  CHECK(text::lower("AbC") == "abc");
}
