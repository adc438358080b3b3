#include "cea/segmenter.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cea/text.hpp"

namespace cea {

namespace {

// PDTB explicit connectives plus the informal spellings common on social
// media. One string per entry; multi-word entries separated by single spaces.
const char* const kDefaultConnectives[] = {
    "accordingly", "additionally", "after", "afterward", "afterwards", "also",
    "alternatively", "although", "and", "as", "as a result", "as an alternative",
    "as if", "as long as", "as soon as", "as though", "as well", "because",
    "before", "besides", "but", "by comparison", "by contrast", "by then",
    "consequently", "conversely", "earlier", "either", "else", "except",
    "finally", "for", "for example", "for instance", "further", "furthermore",
    "hence", "however", "if", "if and when", "in addition", "in contrast",
    "in fact", "in other words", "in particular", "in short", "in sum",
    "in the end", "in turn", "indeed", "insofar as", "instead", "later", "lest",
    "likewise", "meantime", "meanwhile", "moreover", "much as", "neither",
    "nevertheless", "next", "nonetheless", "nor", "now that", "on the contrary",
    "on the one hand", "on the other hand", "once", "or", "otherwise", "overall",
    "plus", "previously", "rather", "regardless", "separately", "similarly",
    "simultaneously", "since", "so", "so that", "specifically", "still", "then",
    "thereafter", "thereby", "therefore", "though", "thus", "till", "ultimately",
    "unless", "until", "when", "when and if", "whereas", "while", "yet",
    // informal variants
    "cuz", "bcuz", "bc", "b/c", "coz", "cos", "cause"};

bool is_sentence_ender(const std::string& tok) {
  if (tok == "!" || tok == "?") return true;
  if (tok.empty() || tok[0] != '.') return false;
  for (char c : tok)
    if (c != '.') return false;
  return true;  // "." or an ellipsis run
}

bool is_comma(const Token& t) { return t.text == "," && t.pos == ","; }

bool is_conjunction_pos(const std::string& pos) { return pos == "P" || pos == "&"; }

}  // namespace

ConnectiveLexicon ConnectiveLexicon::defaults() {
  ConnectiveLexicon lex;
  for (const char* c : kDefaultConnectives) lex.add(c);
  return lex;
}

ConnectiveLexicon ConnectiveLexicon::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon '" + path + "'");
  ConnectiveLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto words = text::split_ws(line);
    if (words.empty()) continue;
    std::ostringstream joined;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) joined << ' ';
      joined << words[i];
    }
    lex.add(joined.str());
  }
  return lex;
}

void ConnectiveLexicon::add(const std::string& connective) {
  auto words = text::split_ws(text::lower(connective));
  if (words.empty()) return;
  max_words_ = std::max(max_words_, words.size());
  entries_.insert(std::move(words));
}

bool ConnectiveLexicon::contains(const std::vector<std::string>& words) const {
  return entries_.count(words) > 0;
}

std::vector<std::string> ConnectiveLexicon::to_lines() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& words : entries_) {
    std::ostringstream joined;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) joined << ' ';
      joined << words[i];
    }
    out.push_back(joined.str());
  }
  return out;
}

std::vector<std::pair<int, int>> sentence_ranges(const Message& message) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(message.tokens.size());
  int start = 0;
  for (int i = 0; i < n; ++i) {
    const bool ender = is_sentence_ender(message.tokens[i].text);
    const bool next_ender = i + 1 < n && is_sentence_ender(message.tokens[i + 1].text);
    if (ender && !next_ender) {
      out.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < n) out.emplace_back(start, n - 1);
  return out;
}

std::vector<ConnectiveMatch> detect_connectives(const Message& message,
                                                const ConnectiveLexicon& lexicon) {
  const auto& toks = message.tokens;
  const int n = static_cast<int>(toks.size());
  std::vector<std::string> lowered(n);
  for (int i = 0; i < n; ++i) lowered[i] = text::lower(toks[i].text);

  std::vector<ConnectiveMatch> out;
  int i = 0;
  while (i < n) {
    int best_len = 0;
    const int cap = std::min<std::size_t>(lexicon.max_words(), n - i);
    std::vector<std::string> words;
    for (int len = 1; len <= cap; ++len) {
      words.push_back(lowered[i + len - 1]);
      if (lexicon.contains(words)) best_len = len;
    }
    if (best_len > 0) {
      ConnectiveMatch m;
      m.first = i;
      m.last = i + best_len - 1;
      for (int k = 0; k < best_len; ++k) {
        if (k) m.connective += ' ';
        m.connective += lowered[i + k];
      }
      out.push_back(std::move(m));
      i += best_len;
    } else {
      if (is_conjunction_pos(toks[i].pos)) out.push_back({i, i, lowered[i]});
      ++i;
    }
  }
  return out;
}

bool is_discourse_connective(const Message& message, const ConnectiveMatch& candidate) {
  const auto sentences = sentence_ranges(message);
  int s_first = 0, s_last = static_cast<int>(message.tokens.size()) - 1;
  for (const auto& [a, b] : sentences) {
    if (candidate.first >= a && candidate.first <= b) {
      s_first = a;
      s_last = b;
      break;
    }
  }
  bool verb_before = false, verb_after = false;
  for (int i = s_first; i < candidate.first; ++i)
    if (message.tokens[i].pos == "V") verb_before = true;
  for (int i = candidate.last + 1; i <= s_last; ++i)
    if (message.tokens[i].pos == "V") verb_after = true;
  return verb_before && verb_after;
}

namespace {

struct Piece {
  int first, last;
  ArgKind kind;
  // how the boundary to the left of this piece was created
  enum class LeftKind { sentence, comma, connective, emoji } left;
  std::optional<std::string> opens_with;
  bool has_verb;
};

bool piece_has_verb(const Message& m, int first, int last) {
  for (int i = first; i <= last; ++i)
    if (m.tokens[i].pos == "V") return true;
  return false;
}

}  // namespace

std::vector<DiscourseArgument> segment(const Message& message,
                                       const ConnectiveLexicon& lexicon) {
  const auto& toks = message.tokens;
  if (toks.empty()) return {};

  // accepted connective match starting at each token index
  std::vector<const ConnectiveMatch*> opens_at(toks.size(), nullptr);
  auto matches = detect_connectives(message, lexicon);
  for (auto& m : matches)
    if (is_discourse_connective(message, m)) opens_at[m.first] = &m;

  std::vector<DiscourseArgument> args;
  for (const auto& [s_first, s_last] : sentence_ranges(message)) {
    // fragment boundaries inside this sentence
    std::vector<Piece> pieces;
    int frag_start = s_first;
    auto left_kind = Piece::LeftKind::sentence;
    auto close_fragment = [&](int frag_end, Piece::LeftKind next_left) {
      if (frag_end >= frag_start) {
        // peel maximal E-runs into their own pieces
        int i = frag_start;
        auto lk = left_kind;
        while (i <= frag_end) {
          if (toks[i].pos == "E") {
            int j = i;
            while (j + 1 <= frag_end && toks[j + 1].pos == "E") ++j;
            pieces.push_back({i, j, ArgKind::emoji, lk, std::nullopt, false});
            lk = Piece::LeftKind::emoji;
            i = j + 1;
          } else {
            int j = i;
            while (j + 1 <= frag_end && toks[j + 1].pos != "E") ++j;
            Piece p{i, j, ArgKind::plain, lk, std::nullopt, piece_has_verb(message, i, j)};
            if (i == frag_start && opens_at[i]) p.opens_with = opens_at[i]->connective;
            pieces.push_back(std::move(p));
            lk = Piece::LeftKind::emoji;
            i = j + 1;
          }
        }
      }
      frag_start = frag_end + 1;
      left_kind = next_left;
    };

    for (int i = s_first; i <= s_last; ++i) {
      if (i > frag_start && opens_at[i])
        close_fragment(i - 1, Piece::LeftKind::connective);
      if (is_comma(toks[i]) && i < s_last)
        close_fragment(i, Piece::LeftKind::comma);
    }
    close_fragment(s_last, Piece::LeftKind::sentence);

    // merge verbless comma fragments into a plain neighbour; iterate to a
    // fixpoint so chains like "a, b, c" collapse fully
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        Piece& p = pieces[i];
        if (p.kind != ArgKind::plain || p.has_verb) continue;
        if (p.left == Piece::LeftKind::comma && i > 0 &&
            pieces[i - 1].kind == ArgKind::plain) {
          Piece& prev = pieces[i - 1];
          prev.last = p.last;
          prev.has_verb = prev.has_verb || p.has_verb;
          pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
        if (i + 1 < pieces.size() && pieces[i + 1].left == Piece::LeftKind::comma &&
            pieces[i + 1].kind == ArgKind::plain) {
          Piece& next = pieces[i + 1];
          next.first = p.first;
          next.left = p.left;
          next.opens_with = p.opens_with;
          next.has_verb = next.has_verb || p.has_verb;
          pieces.erase(pieces.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
      }
    }

    for (const auto& p : pieces)
      args.push_back({p.first, p.last, p.kind, p.opens_with});
  }
  return args;
}

std::string argument_text(const Message& message, const DiscourseArgument& arg) {
  const std::size_t a = message.tokens[arg.first].start;
  const std::size_t b = message.tokens[arg.last].end;
  return message.raw_text.substr(a, b - a);
}

}  // namespace cea
