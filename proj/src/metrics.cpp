#include "cea/metrics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace cea {

double chi2_sf_df1(double x) { return std::erfc(std::sqrt(x / 2.0)); }

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& golds) {
  if (preds.size() != golds.size())
    throw std::invalid_argument("predictions and gold labels differ in length");
  if (preds.empty()) throw std::invalid_argument("empty evaluation input");

  EvalReport report;
  report.total = static_cast<long>(golds.size());
  std::set<int> classes;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    classes.insert(golds[i]);
    classes.insert(preds[i]);
    report.confusion[{golds[i], preds[i]}] += 1;
  }

  for (const int c : classes) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      if (golds[i] == c) ++support;
      if (preds[i] == c && golds[i] == c) ++tp;
      if (preds[i] == c && golds[i] != c) ++fp;
      if (preds[i] != c && golds[i] == c) ++fn;
    }
    ClassMetrics m;
    m.support = support;
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class[c] = m;
    const double weight = static_cast<double>(support) / static_cast<double>(report.total);
    report.weighted_precision += weight * m.precision;
    report.weighted_recall += weight * m.recall;
    report.weighted_f1 += weight * m.f1;
  }
  return report;
}

McNemarResult mcnemar(const std::vector<int>& preds_a, const std::vector<int>& preds_b,
                      const std::vector<int>& golds) {
  if (preds_a.size() != golds.size() || preds_b.size() != golds.size())
    throw std::invalid_argument("prediction and gold lengths differ");

  McNemarResult r;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool a_ok = preds_a[i] == golds[i];
    const bool b_ok = preds_b[i] == golds[i];
    if (a_ok && !b_ok) ++r.b;
    if (!a_ok && b_ok) ++r.c;
  }
  const long disc = r.b + r.c;
  if (disc == 0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  const double diff = std::abs(static_cast<double>(r.b) - static_cast<double>(r.c)) - 1.0;
  r.statistic = diff * diff / static_cast<double>(disc);
  r.p_value = chi2_sf_df1(r.statistic);
  return r;
}

}  // namespace cea
