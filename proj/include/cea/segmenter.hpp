#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cea/corpus.hpp"

namespace cea {

// Lowercase explicit discourse connectives; multi-word entries are stored as
// token sequences ("as a result" matches three consecutive tokens).
class ConnectiveLexicon {
 public:
  static ConnectiveLexicon defaults();           // PDTB list + informal variants
  static ConnectiveLexicon from_file(const std::string& path);

  void add(const std::string& connective);       // lowercased, space-separated
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t max_words() const { return max_words_; }
  bool contains(const std::vector<std::string>& words) const;
  std::vector<std::string> to_lines() const;     // sorted, for persistence

 private:
  std::set<std::vector<std::string>> entries_;
  std::size_t max_words_ = 0;
};

enum class ArgKind { plain, emoji };

// Contiguous token span; arguments of a message are ordered, non-overlapping
// and jointly cover every token.
struct DiscourseArgument {
  int first = 0;  // inclusive token indices
  int last = 0;
  ArgKind kind = ArgKind::plain;
  std::optional<std::string> opens_with_connective;

  int size() const { return last - first + 1; }
};

struct ConnectiveMatch {
  int first = 0;  // inclusive token indices
  int last = 0;
  std::string connective;  // lowercased surface form
};

// Sentence spans [first, last] delimited by sentence-final punctuation
// (periods, ellipses, ! and ?); runs of enders stay with their sentence.
std::vector<std::pair<int, int>> sentence_ranges(const Message& message);

// Every maximal lexicon match plus any single conjunction-tagged token (pos
// P or &) not already covered by a match, in token order.
std::vector<ConnectiveMatch> detect_connectives(const Message& message,
                                                const ConnectiveLexicon& lexicon);

// The verb check: a candidate counts as a discourse connective only when a
// V-tagged token appears both before and after it inside its sentence.
bool is_discourse_connective(const Message& message, const ConnectiveMatch& candidate);

// Sentence demarcation at punctuation, splits before accepted connectives
// (the connective opens the right-hand argument), emoji runs as their own
// arguments, then verbless comma fragments merge into a neighbour.
std::vector<DiscourseArgument> segment(const Message& message,
                                       const ConnectiveLexicon& lexicon);

// Raw text slice covered by an argument.
std::string argument_text(const Message& message, const DiscourseArgument& arg);

}  // namespace cea
