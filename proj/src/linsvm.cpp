#include "cea/linsvm.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "cea/rng.hpp"

namespace cea {

namespace {

// (index, value) projection of a sparse vector onto the feature space
std::vector<std::pair<int, double>> project(const FeatureSpace& space,
                                            const FeatureVector& x) {
  std::vector<std::pair<int, double>> out;
  out.reserve(x.size());
  for (const auto& [name, value] : x.entries()) {
    const int idx = space.index_of(name);
    if (idx >= 0) out.emplace_back(idx, value);
  }
  return out;
}

}  // namespace

double LinearModel::margin(const FeatureVector& x) const {
  double m = bias;
  for (const auto& [idx, value] : project(feature_space, x)) m += weights[idx] * value;
  return m;
}

std::pair<bool, double> LinearModel::predict(const FeatureVector& x) const {
  const double m = margin(x);
  return {m >= 0.0, m};
}

double LinearModel::objective(const std::vector<FeatureVector>& X,
                              const std::vector<bool>& y) const {
  double hinge = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double yi = y[i] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - yi * margin(X[i]));
  }
  hinge /= static_cast<double>(X.size());
  double norm2 = 0.0;
  for (double w : weights) norm2 += w * w;
  return hinge + 0.5 * lambda * norm2;
}

LinearModel train_svm(const std::vector<FeatureVector>& X, const std::vector<bool>& y,
                      const FeatureSpace& space, const SvmTrainOptions& options,
                      const std::function<void(int, const LinearModel&)>& on_epoch_end) {
  if (X.size() != y.size()) throw std::invalid_argument("X and y lengths differ");
  if (X.empty()) throw std::invalid_argument("empty training set");
  if (options.lambda <= 0.0) throw std::invalid_argument("lambda must be > 0");
  if (options.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  bool saw_pos = false, saw_neg = false;
  for (bool label : y) (label ? saw_pos : saw_neg) = true;
  if (!saw_pos || !saw_neg) throw std::runtime_error("training data has a single class");

  LinearModel model;
  model.lambda = options.lambda;
  model.feature_space = space;
  model.feature_space.reindex();
  model.weights.assign(space.selected.size(), 0.0);

  std::vector<std::vector<std::pair<int, double>>> rows(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) rows[i] = project(model.feature_space, X[i]);

  std::vector<std::size_t> order(X.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(options.seed);

  long t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (options.lambda * static_cast<double>(t));
      const double yi = y[i] ? 1.0 : -1.0;
      double m = model.bias;
      for (const auto& [idx, value] : rows[i]) m += model.weights[idx] * value;

      // subgradient step: shrink weights, then push on a margin violation
      const double shrink = 1.0 - eta * options.lambda;
      for (double& w : model.weights) w *= shrink;
      if (yi * m < 1.0) {
        for (const auto& [idx, value] : rows[i]) model.weights[idx] += eta * yi * value;
        model.bias += eta * yi;
      }
    }
    if (on_epoch_end) on_epoch_end(epoch, model);
  }
  return model;
}

}  // namespace cea
