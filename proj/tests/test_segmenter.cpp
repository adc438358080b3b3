#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "cea/rng.hpp"
#include "cea/segmenter.hpp"
#include "helpers.hpp"

using namespace cea;
using cea::testing::make_message;
using cea::testing::make_tagged;

namespace {

std::string arg_text(const Message& m, const DiscourseArgument& a) {
  return argument_text(m, a);
}

void check_partition(const Message& m, const std::vector<DiscourseArgument>& args) {
  int next = 0;
  for (const auto& a : args) {
    CHECK(a.first == next);
    CHECK(a.last >= a.first);
    next = a.last + 1;
  }
  CHECK(next == static_cast<int>(m.tokens.size()));
}

void check_emoji_invariant(const Message& m, const std::vector<DiscourseArgument>& args) {
  for (const auto& a : args) {
    bool all_e = true;
    for (int i = a.first; i <= a.last; ++i)
      if (m.tokens[i].pos != "E") all_e = false;
    CHECK((a.kind == ArgKind::emoji) == all_e);
  }
  // maximal E-runs are single emoji arguments
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i].kind == ArgKind::emoji)
      CHECK(args[i + 1].kind != ArgKind::emoji);
}

}  // namespace

TEST_CASE("connective detection: explicit word, informal variant, none") {
  const auto lex = ConnectiveLexicon::defaults();

  const Message m1 = make_tagged("m1", "I went home, but he stayed",
                                 {"O", "V", "N", ",", "&", "O", "V"});
  auto c1 = detect_connectives(m1, lex);
  REQUIRE(!c1.empty());
  bool saw_but = false;
  for (const auto& c : c1) saw_but = saw_but || c.connective == "but";
  CHECK(saw_but);

  const Message m2 =
      make_tagged("m2", "bcuz I was tired", {"P", "O", "V", "A"});
  auto c2 = detect_connectives(m2, lex);
  REQUIRE(c2.size() == 1);
  CHECK(c2[0].connective == "bcuz");
  CHECK(c2[0].first == 0);

  const Message m3 = make_tagged("m3", "green ideas sleep", {"A", "N", "V"});
  CHECK(detect_connectives(m3, lex).empty());
}

TEST_CASE("connective detection: maximal multi-word match and conjunction pos") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m = make_tagged("m", "he left as soon as we arrived",
                                {"O", "V", "P", "R", "P", "O", "V"});
  const auto matches = detect_connectives(m, lex);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].connective == "as soon as");
  CHECK(matches[0].first == 2);
  CHECK(matches[0].last == 4);

  // a conjunction-tagged token outside the lexicon still becomes a candidate
  ConnectiveLexicon empty_lex;
  empty_lex.add("nothing-matches-here");
  const auto pos_only = detect_connectives(m, empty_lex);
  REQUIRE(pos_only.size() == 2);
  CHECK(pos_only[0].connective == "as");
  CHECK(pos_only[1].connective == "as");
}

TEST_CASE("verb check accepts true connectives and rejects word glue") {
  const Message went = make_tagged("m1", "I went home, but he stayed",
                                   {"O", "V", "N", ",", "&", "O", "V"});
  const auto lex = ConnectiveLexicon::defaults();
  for (const auto& c : detect_connectives(went, lex))
    if (c.connective == "but") CHECK(is_discourse_connective(went, c));

  const Message fruit =
      make_tagged("m2", "I like apple and banana", {"O", "V", "N", "&", "N"});
  for (const auto& c : detect_connectives(fruit, lex))
    if (c.connective == "and") CHECK_FALSE(is_discourse_connective(fruit, c));

  // sentence-initial connective: no verb before it inside the sentence
  const Message because = make_tagged("m3", "Because I was late, I ran",
                                      {"P", "O", "V", "A", ",", "O", "V"});
  for (const auto& c : detect_connectives(because, lex))
    if (c.connective == "because") CHECK_FALSE(is_discourse_connective(because, c));
}

TEST_CASE("segment: headline example splits before the connective") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m =
      make_tagged("m", "My parser failed because I always have bugs.",
                  {"D", "N", "V", "P", "O", "R", "V", "N", ","});
  const auto args = segment(m, lex);
  REQUIRE(args.size() == 2);
  CHECK(arg_text(m, args[0]) == "My parser failed");
  CHECK(arg_text(m, args[1]) == "because I always have bugs.");
  CHECK(args[1].opens_with_connective == "because");
  CHECK(args[0].kind == ArgKind::plain);
  check_partition(m, args);
}

TEST_CASE("segment: emoji run becomes its own argument") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m = make_tagged("m", "My test result... :(", {"D", "N", "N", ",", "E"});
  const auto args = segment(m, lex);
  REQUIRE(args.size() == 2);
  CHECK(arg_text(m, args[0]) == "My test result...");
  CHECK(arg_text(m, args[1]) == ":(");
  CHECK(args[1].kind == ArgKind::emoji);
}

TEST_CASE("segment: rejected connective leaves one argument") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m = make_tagged("m", "I like apple and banana", {"O", "V", "N", "&", "N"});
  const auto args = segment(m, lex);
  REQUIRE(args.size() == 1);
  CHECK(args[0].first == 0);
  CHECK(args[0].last == 4);
  CHECK_FALSE(args[0].opens_with_connective.has_value());
}

TEST_CASE("segment: sentence-initial 'because' still splits at the comma") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m = make_tagged("m", "Because I was late, I ran",
                                {"P", "O", "V", "A", ",", "O", "V"});
  const auto args = segment(m, lex);
  REQUIRE(args.size() == 2);
  CHECK(arg_text(m, args[0]) == "Because I was late,");
  CHECK(arg_text(m, args[1]) == "I ran");
}

TEST_CASE("segment: verbless comma fragments merge into a neighbour") {
  const auto lex = ConnectiveLexicon::defaults();

  SUBCASE("trailing fragment merges left") {
    const Message m =
        make_tagged("m", "I went home, obviously", {"O", "V", "N", ",", "R"});
    const auto args = segment(m, lex);
    REQUIRE(args.size() == 1);
    CHECK(arg_text(m, args[0]) == "I went home, obviously");
  }
  SUBCASE("leading vocative merges right") {
    const Message m = make_tagged("m", "John, I went home", {"^", ",", "O", "V", "N"});
    const auto args = segment(m, lex);
    REQUIRE(args.size() == 1);
  }
  SUBCASE("verbless chain collapses") {
    const Message m = make_tagged("m", "red, green, blue", {"A", ",", "A", ",", "A"});
    const auto args = segment(m, lex);
    REQUIRE(args.size() == 1);
  }
}

TEST_CASE("segment: empty message, punctuation-only sentences") {
  const auto lex = ConnectiveLexicon::defaults();
  Message empty;
  empty.id = "e";
  CHECK(segment(empty, lex).empty());

  const Message bangs = make_tagged("m", "Great day today. !!!", {"A", "N", "N", ",", ",", ",", ","});
  const auto args = segment(bangs, lex);
  check_partition(bangs, args);
}

TEST_CASE("segment: purity") {
  const auto lex = ConnectiveLexicon::defaults();
  const Message m =
      make_tagged("m", "My parser failed because I always have bugs. :(",
                  {"D", "N", "V", "P", "O", "R", "V", "N", ",", "E"});
  const auto a = segment(m, lex);
  const auto b = segment(m, lex);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].last == b[i].last);
    CHECK((a[i].kind == b[i].kind));
  }
}

TEST_CASE("segment: fuzzed invariants") {
  const auto lex = ConnectiveLexicon::defaults();
  Rng rng(99);
  const std::vector<std::pair<std::string, std::string>> pool = {
      {"i", "O"},    {"dog", "N"},  {"ran", "V"},     {"failed", "V"}, {"happy", "A"},
      {"so", "P"},   {"because", "P"}, {"and", "&"},  {"but", "&"},    {"really", "R"},
      {",", ","},    {".", ","},    {"...", ","},     {"!", ","},      {":(", "E"},
      {":)", "E"},   {"\xF0\x9F\x98\x80", "E"},       {"cuz", "P"},    {"when", "P"},
      {"home", "N"}, {"was", "V"},  {"the", "D"},     {"?", ","}};

  for (int iter = 0; iter < 800; ++iter) {
    std::vector<std::pair<std::string, std::string>> words;
    const int n = 1 + static_cast<int>(rng.next_below(16));
    for (int i = 0; i < n; ++i) words.push_back(pool[rng.next_below(pool.size())]);
    const Message m = make_message("fuzz", words);
    const auto args = segment(m, lex);
    check_partition(m, args);
    check_emoji_invariant(m, args);
    // every accepted connective passes the verb check
    for (const auto& c : detect_connectives(m, lex)) {
      bool opens_argument = false;
      for (const auto& a : args)
        if (a.first == c.first && a.opens_with_connective == c.connective)
          opens_argument = true;
      if (opens_argument) CHECK(is_discourse_connective(m, c));
    }
  }
}

TEST_CASE("lexicon file loading") {
  const auto path = std::filesystem::temp_directory_path() / "cea_lexicon_test.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "Because\n";
    out << "as a result   # inline comment\n";
    out << "\n";
    out << "b/c\n";
  }
  const auto lex = ConnectiveLexicon::from_file(path.string());
  CHECK(lex.size() == 3);
  CHECK(lex.contains({"because"}));
  CHECK(lex.contains({"as", "a", "result"}));
  CHECK(lex.contains({"b/c"}));
  CHECK(lex.max_words() == 3);
  CHECK_THROWS(ConnectiveLexicon::from_file("/nonexistent/lexicon.txt"));
}

TEST_CASE("default lexicon has the informal causal variants") {
  const auto lex = ConnectiveLexicon::defaults();
  for (const std::string c : {"because", "cuz", "bcuz", "bc", "b/c", "coz", "cos", "cause"})
    CHECK(lex.contains({c}));
}
