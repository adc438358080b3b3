#include "cea/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cea/text.hpp"

namespace cea {

std::vector<UserStats> cp_ratio_table(
    const std::vector<std::pair<std::string, bool>>& posts) {
  if (posts.empty()) throw std::invalid_argument("no posts");
  std::map<std::string, UserStats> by_user;
  for (const auto& [user, causal] : posts) {
    UserStats& s = by_user[user];
    s.user_id = user;
    s.n_posts += 1;
    s.n_causal += causal ? 1 : 0;
  }
  std::vector<UserStats> out;
  out.reserve(by_user.size());
  for (auto& [user, s] : by_user) {
    s.cp_ratio = static_cast<double>(s.n_causal) / static_cast<double>(s.n_posts);
    out.push_back(std::move(s));
  }
  return out;
}

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("series lengths differ");
  if (x.size() < 3) throw std::invalid_argument("need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::runtime_error("zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double cohens_d(const std::vector<double>& group_a, const std::vector<double>& group_b) {
  if (group_a.size() < 2 || group_b.size() < 2)
    throw std::invalid_argument("each group needs at least 2 values");
  auto mean = [](const std::vector<double>& g) {
    double m = 0.0;
    for (double v : g) m += v;
    return m / static_cast<double>(g.size());
  };
  auto sample_var = [&](const std::vector<double>& g, double m) {
    double s = 0.0;
    for (double v : g) s += (v - m) * (v - m);
    return s / static_cast<double>(g.size() - 1);
  };
  const double ma = mean(group_a), mb = mean(group_b);
  const double va = sample_var(group_a, ma), vb = sample_var(group_b, mb);
  const double na = static_cast<double>(group_a.size());
  const double nb = static_cast<double>(group_b.size());
  const double pooled = std::sqrt(((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0));
  if (pooled == 0.0) throw std::runtime_error("zero pooled standard deviation");
  return (ma - mb) / pooled;
}

LogOddsResult log_odds_dirichlet(const NgramCounts& counts_i, const NgramCounts& counts_j,
                                 const NgramCounts& prior) {
  if (counts_i.empty() || counts_j.empty())
    throw std::invalid_argument("both groups need counts");

  LogOddsResult result;
  double a0 = 0.0;
  for (const auto& [w, a] : prior) {
    if (a <= 0) throw std::invalid_argument("nonpositive prior count for '" + w + "'");
    a0 += static_cast<double>(a);
  }
  for (const auto& [w, c] : counts_i) result.total_i += c;
  for (const auto& [w, c] : counts_j) result.total_j += c;
  const double ni = static_cast<double>(result.total_i);
  const double nj = static_cast<double>(result.total_j);

  auto count_of = [](const NgramCounts& counts, const std::string& w) {
    auto it = counts.find(w);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second);
  };

  for (const auto& [w, a_w_long] : prior) {
    const double a_w = static_cast<double>(a_w_long);
    const double yi = count_of(counts_i, w);
    const double yj = count_of(counts_j, w);
    LogOddsEntry e;
    e.ngram = w;
    e.delta = std::log((yi + a_w) / (ni + a0 - yi - a_w)) -
              std::log((yj + a_w) / (nj + a0 - yj - a_w));
    e.variance = 1.0 / (yi + a_w) + 1.0 / (yj + a_w);
    e.z_score = e.delta / std::sqrt(e.variance);
    result.entries.push_back(std::move(e));
  }
  std::sort(result.entries.begin(), result.entries.end(),
            [](const LogOddsEntry& a, const LogOddsEntry& b) {
              if (a.z_score != b.z_score) return a.z_score > b.z_score;
              return a.ngram < b.ngram;
            });
  return result;
}

NgramCounts scale_prior(const NgramCounts& combined, double mass) {
  if (mass <= 0.0) throw std::invalid_argument("prior mass must be positive");
  double total = 0.0;
  for (const auto& [w, c] : combined) total += static_cast<double>(c);
  NgramCounts prior;
  if (total == 0.0) return prior;
  for (const auto& [w, c] : combined) {
    // keep integral counts, never below 1, so the prior stays positive
    const double scaled = static_cast<double>(c) * mass / total;
    prior[w] = std::max<long>(1, static_cast<long>(std::llround(scaled)));
  }
  return prior;
}

NgramCounts default_prior(const NgramCounts& counts_i, const NgramCounts& counts_j,
                          double mass) {
  NgramCounts combined = counts_i;
  for (const auto& [w, c] : counts_j) combined[w] += c;
  return scale_prior(combined, mass);
}

void accumulate_ngrams(NgramCounts& counts, const Message& message, int first, int last) {
  std::vector<std::string> words;
  for (int i = first; i <= last; ++i) words.push_back(text::lower(message.tokens[i].text));
  for (std::size_t i = 0; i < words.size(); ++i) {
    counts[words[i]] += 1;
    if (i + 1 < words.size()) counts[words[i] + " " + words[i + 1]] += 1;
  }
}

CauseWordReport cause_word_report(const Corpus& reviews, const ConnectiveLexicon& lexicon,
                                  const SentimentLexicon& sentiment, const LinearModel& cp,
                                  NeuralModel& cei, PipelineMode mode,
                                  const std::string& target_label, std::size_t top_k,
                                  double prior_mass) {
  NgramCounts ce_target, ce_other, non_target, non_other;
  for (const auto& message : reviews.messages) {
    if (!message.label) throw std::runtime_error("message '" + message.id + "' has no label");
    const bool is_target = *message.label == target_label;
    const PipelineResult result = run_pipeline(message, lexicon, sentiment, cp, cei, mode);
    for (std::size_t i = 0; i < result.args.size(); ++i) {
      const bool in_ce = result.explanations[i];
      NgramCounts& bucket = in_ce ? (is_target ? ce_target : ce_other)
                                  : (is_target ? non_target : non_other);
      accumulate_ngrams(bucket, message, result.args[i].first, result.args[i].last);
    }
  }

  CauseWordReport report;
  auto rank = [&](const NgramCounts& target, const NgramCounts& other) {
    std::vector<LogOddsEntry> out;
    if (target.empty() || other.empty()) return out;
    const LogOddsResult lo =
        log_odds_dirichlet(target, other, default_prior(target, other, prior_mass));
    const std::size_t k = std::min(top_k, lo.entries.size());
    out.assign(lo.entries.begin(), lo.entries.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
  };
  report.ce = rank(ce_target, ce_other);
  report.non_ce = rank(non_target, non_other);
  return report;
}

}  // namespace cea
