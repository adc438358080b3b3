#pragma once

#include <map>
#include <string>
#include <vector>

#include "cea/corpus.hpp"
#include "cea/pipeline.hpp"

namespace cea {

struct UserStats {
  std::string user_id;
  long n_posts = 0;
  long n_causal = 0;
  double cp_ratio = 0.0;  // n_causal / n_posts
};

// One row per user, sorted by user_id.
std::vector<UserStats> cp_ratio_table(
    const std::vector<std::pair<std::string, bool>>& posts);

// Sample Pearson correlation; throws on constant input.
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// (mean_a - mean_b) / pooled sample standard deviation.
double cohens_d(const std::vector<double>& group_a, const std::vector<double>& group_b);

using NgramCounts = std::map<std::string, long>;

struct LogOddsEntry {
  std::string ngram;
  double delta = 0.0;     // log-odds difference, group i minus group j
  double variance = 0.0;
  double z_score = 0.0;
};

struct LogOddsResult {
  std::vector<LogOddsEntry> entries;  // sorted by z_score, descending
  long total_i = 0;
  long total_j = 0;
};

// Log-odds ratio with an informative Dirichlet prior:
//   delta_w = log((y_i + a_w) / (n_i + a0 - y_i - a_w))
//           - log((y_j + a_w) / (n_j + a0 - y_j - a_w))
//   var_w   = 1/(y_i + a_w) + 1/(y_j + a_w)
// Every scored ngram needs a strictly positive prior count.
LogOddsResult log_odds_dirichlet(const NgramCounts& counts_i, const NgramCounts& counts_j,
                                 const NgramCounts& prior);

// Combined counts of both groups rescaled so the prior mass sums to `mass`.
NgramCounts default_prior(const NgramCounts& counts_i, const NgramCounts& counts_j,
                          double mass = 500.0);
NgramCounts scale_prior(const NgramCounts& combined, double mass);

// Lowercased unigrams + bigrams of a token range (punctuation included).
void accumulate_ngrams(NgramCounts& counts, const Message& message, int first, int last);

struct CauseWordReport {
  std::vector<LogOddsEntry> ce;      // inside predicted explanations
  std::vector<LogOddsEntry> non_ce;  // everywhere else
};

// Runs the pipeline over labeled reviews and ranks ngrams associated with
// `target_label` (e.g. the negative class), separately for text inside and
// outside predicted causal explanations.
CauseWordReport cause_word_report(const Corpus& reviews, const ConnectiveLexicon& lexicon,
                                  const SentimentLexicon& sentiment, const LinearModel& cp,
                                  NeuralModel& cei, PipelineMode mode,
                                  const std::string& target_label, std::size_t top_k,
                                  double prior_mass = 500.0);

}  // namespace cea
