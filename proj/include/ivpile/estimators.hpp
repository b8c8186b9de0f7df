#pragma once

#include <cstdint>
#include <vector>

#include "ivpile/data.hpp"
#include "ivpile/rule.hpp"

namespace ivpile {

struct PipelineConfig {
  EstimatorKind nuisance_kind = EstimatorKind::RandomForest;
  ForestConfig forest;
  LogitConfig logit;
  BoundMethod method = BoundMethod::balke_pearl();
  double delta = 0.0;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  double lambda = 1.0;
  double svm_tol = 1e-6;
  std::uint64_t seed = 1;
};

struct FitReport {
  TreatmentRule rule;
  Eigen::Index n_labeled = 0;    // intervals strictly positive or negative
  Eigen::Index n_unlabeled = 0;  // intervals covering zero
};

/// Interval-learning pipeline: nuisance fit -> bound intervals -> label and
/// weight transform -> weighted kernel SVM, all on the same training rows.
FitReport ivpile(const ObservationTable& train, const PipelineConfig& cfg);

/// Sample-splitting variant: nuisance and bounds are fitted on one random
/// half, the SVM is trained on the other half only. Requires n >= 4.
FitReport ivpile_split(const ObservationTable& table,
                       const PipelineConfig& cfg);

/// Pointwise sign of u^+ - (-l)^+ against intervals from a fitted model.
TreatmentRule plug_in_rule(const JointProbModel& model,
                           const BoundMethod& method, double delta);
TreatmentRule plug_in_rule(const ContinuousNuisanceModel& model,
                           const BoundMethod& method, double delta);

/// Outcome-weighted learning baseline assuming no unmeasured confounding:
/// pseudo-contrast C_i = A_i Y_i / pi(A_i | X_i) with the propensity clipped
/// to [0.01, 0.99], label -sgn(C_i), weight |C_i|, then the weighted SVM.
FitReport owl(const ObservationTable& train, const PipelineConfig& cfg);

TreatmentRule coin_flip_rule(std::uint64_t seed);

struct CrossValResult {
  double lambda = 0.0;
  double sigma = 0.0;
  struct Cell {
    double lambda, sigma, score;
  };
  std::vector<Cell> table;
};

/// K-fold grid search: per fold, nuisance and bounds come from the training
/// folds; candidate rules are scored by the held-out mean of sup_loss against
/// intervals the training-fold model assigns to held-out rows. Ties go to the
/// smallest lambda, then the smallest sigma.
CrossValResult cross_validate(const ObservationTable& table,
                              const PipelineConfig& cfg,
                              const std::vector<double>& lambda_grid,
                              const std::vector<double>& sigma_grid, int k,
                              std::uint64_t seed);

}  // namespace ivpile
