#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cea/features.hpp"

namespace cea {

// L2-regularized hinge-loss linear classifier trained with the 1/(lambda*t)
// step schedule. Weights are indexed by FeatureSpace::selected.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  double lambda = 1e-4;
  FeatureSpace feature_space;

  // margin = w . proj(x) + bias; features outside the space are ignored
  double margin(const FeatureVector& x) const;
  std::pair<bool, double> predict(const FeatureVector& x) const;

  // mean hinge loss + (lambda/2)||w||^2 over a dataset
  double objective(const std::vector<FeatureVector>& X, const std::vector<bool>& y) const;
};

struct SvmTrainOptions {
  double lambda = 1e-4;
  int epochs = 50;
  std::uint64_t seed = 13;
};

// Deterministic SGD on the primal objective; per-epoch shuffling comes from
// the seed. `on_epoch_end`, when set, sees the model after each epoch (used
// for validation-based epoch selection).
LinearModel train_svm(const std::vector<FeatureVector>& X, const std::vector<bool>& y,
                      const FeatureSpace& space, const SvmTrainOptions& options,
                      const std::function<void(int, const LinearModel&)>& on_epoch_end = {});

}  // namespace cea
