#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cea/corpus.hpp"
#include "cea/segmenter.hpp"

namespace cea {

// Sparse named features. Families are prefixes: ng (word n-grams), cng
// (char n-grams), pos (tag n-grams), sent (sentiment counts), stat
// (word count / average length), fl (first-last), f3 (first three),
// wp (word pairs). Zero values are never stored.
class FeatureVector {
 public:
  void set(const std::string& name, double value);
  void increment(const std::string& name, double delta = 1.0);
  double get(const std::string& name) const;
  bool has(const std::string& name) const { return entries_.count(name) > 0; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, double>& entries() const { return entries_; }

 private:
  std::map<std::string, double> entries_;
};

// word -> positive/negative, loaded from a "word<TAB>polarity" file.
class SentimentLexicon {
 public:
  static SentimentLexicon defaults();
  static SentimentLexicon from_file(const std::string& path);

  void add(const std::string& word, bool positive);
  // +1 positive, -1 negative, 0 unknown
  int polarity(const std::string& word) const;
  const std::map<std::string, int>& entries() const { return entries_; }

 private:
  std::map<std::string, int> entries_;
};

std::string feature_family(const std::string& name);

// Fitted, ordered feature set. `selected` is lexicographic and frozen, so a
// feature's index is stable for the lifetime of a trained model.
struct FeatureSpace {
  std::vector<std::string> selected;
  std::map<std::string, long> doc_frequency;
  double selection_alpha = 0.0;

  std::unordered_map<std::string, int> index;  // rebuilt by reindex()
  void reindex();
  int index_of(const std::string& name) const;
};

// Document frequencies of every feature in the training vectors; `selected`
// covers all of them until filtering/selection prunes it.
FeatureSpace fit_feature_space(const std::vector<FeatureVector>& vectors);

// Drops features of `family` seen in fewer than min_doc_count documents.
// Other families are untouched.
void filter_low_frequency(FeatureSpace& space, const std::string& family,
                          long min_doc_count);

// One-degree-of-freedom chi-square on the (feature-present x class) table,
// 0.5 added to every cell when any cell is zero, Bonferroni threshold
// alpha / n_features. Keeps `space.selected` lexicographic.
void select_univariate(FeatureSpace& space, const std::vector<FeatureVector>& X,
                       const std::vector<bool>& y, double alpha);

// fit + select in one step.
FeatureSpace select_features_univariate(const std::vector<FeatureVector>& X,
                                        const std::vector<bool>& y, double alpha);

// chi-square statistic and df=1 p-value for a 2x2 contingency table.
std::pair<double, double> chi2_2x2(double present_pos, double present_neg,
                                   double absent_pos, double absent_neg);

// Message-level features for causality prediction: n-grams, POS tags,
// sentiment counts, length stats, and First-Last / First3 / Word Pairs over
// every adjacent pair of discourse arguments.
FeatureVector extract_message_features(const Message& message,
                                       const std::vector<DiscourseArgument>& args,
                                       const SentimentLexicon& sentiment);

}  // namespace cea
