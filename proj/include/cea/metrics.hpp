#pragma once

#include <map>
#include <vector>

namespace cea {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;
};

struct EvalReport {
  std::map<int, ClassMetrics> per_class;
  std::map<std::pair<int, int>, long> confusion;  // (gold, pred) -> count
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  long total = 0;
};

// Confusion-matrix metrics with support-weighted averages. A class with no
// predicted and no actual positives has F1 = 0; zero-support classes get
// zero weight.
EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& golds);

struct McNemarResult {
  long b = 0;  // A correct, B wrong
  long c = 0;  // A wrong, B correct
  double statistic = 0.0;
  double p_value = 1.0;
};

// Continuity-corrected McNemar test on paired correctness,
// (|b-c|-1)^2 / (b+c) against chi-square df=1.
McNemarResult mcnemar(const std::vector<int>& preds_a, const std::vector<int>& preds_b,
                      const std::vector<int>& golds);

// Survival function of the chi-square distribution with one degree of
// freedom: p = erfc(sqrt(x/2)).
double chi2_sf_df1(double x);

}  // namespace cea
