#include "ivpile/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ivpile/rng.hpp"

namespace ivpile {

namespace {

std::vector<WeightedLabel> label_rows(const std::vector<Interval>& intervals) {
  std::vector<WeightedLabel> labels(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i)
    labels[i] = weight_label(intervals[i]);
  return labels;
}

FitReport finish_fit(const Eigen::MatrixXd& xs,
                     const std::vector<Interval>& intervals,
                     const PipelineConfig& cfg) {
  const auto labels = label_rows(intervals);
  FitReport report;
  for (const auto& wl : labels)
    (wl.latent == Latent::Unlabeled ? report.n_unlabeled : report.n_labeled)++;
  report.rule = train_wsvm(xs, labels, cfg.kernel, cfg.lambda, cfg.svm_tol);
  return report;
}

std::vector<Interval> fit_and_bound(const ObservationTable& nuisance_data,
                                    const Eigen::MatrixXd& eval_xs,
                                    const PipelineConfig& cfg) {
  if (cfg.method.kind == BoundMethod::ManskiPepper) {
    const auto model = fit_continuous_nuisance(
        nuisance_data, cfg.nuisance_kind, cfg.seed, cfg.forest, cfg.logit);
    return estimate_intervals(model, eval_xs, cfg.method, cfg.delta);
  }
  const auto model = fit_joint_prob(nuisance_data, cfg.nuisance_kind, cfg.seed,
                                    cfg.forest, cfg.logit);
  return estimate_intervals(model, eval_xs, cfg.method, cfg.delta);
}

}  // namespace

FitReport ivpile(const ObservationTable& train, const PipelineConfig& cfg) {
  train.validate();
  const auto intervals = fit_and_bound(train, train.x, cfg);
  return finish_fit(train.x, intervals, cfg);
}

FitReport ivpile_split(const ObservationTable& table,
                       const PipelineConfig& cfg) {
  table.validate();
  if (table.n() < 4)
    throw std::invalid_argument("ivpile_split requires n >= 4");

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(table.n()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(derive_seed(cfg.seed, 101));
  rng.shuffle(idx);
  const std::size_t half = idx.size() / 2;
  std::vector<Eigen::Index> i1(idx.begin(), idx.begin() + half);
  std::vector<Eigen::Index> i2(idx.begin() + half, idx.end());
  std::sort(i1.begin(), i1.end());
  std::sort(i2.begin(), i2.end());

  const ObservationTable nuisance_half = table.subset(i1);
  const ObservationTable svm_half = table.subset(i2);
  const auto intervals = fit_and_bound(nuisance_half, svm_half.x, cfg);
  return finish_fit(svm_half.x, intervals, cfg);
}

TreatmentRule plug_in_rule(const JointProbModel& model,
                           const BoundMethod& method, double delta) {
  if (method.kind == BoundMethod::ManskiPepper)
    throw std::invalid_argument(
        "plug_in_rule: ManskiPepper needs a continuous nuisance model");
  if (!model.fitted()) throw std::logic_error("plug_in_rule: model not fitted");
  TreatmentRule rule;
  TreatmentRule::PlugIn pi;
  pi.joint = model;
  pi.method = method;
  pi.delta = delta;
  rule.impl = std::move(pi);
  return rule;
}

TreatmentRule plug_in_rule(const ContinuousNuisanceModel& model,
                           const BoundMethod& method, double delta) {
  if (method.kind != BoundMethod::ManskiPepper)
    throw std::invalid_argument(
        "plug_in_rule: binary bound methods need a joint probability model");
  if (!model.fitted()) throw std::logic_error("plug_in_rule: model not fitted");
  TreatmentRule rule;
  TreatmentRule::PlugIn pi;
  pi.continuous = model;
  pi.method = method;
  pi.delta = delta;
  rule.impl = std::move(pi);
  return rule;
}

FitReport owl(const ObservationTable& train, const PipelineConfig& cfg) {
  train.validate();
  const Eigen::Index n = train.n();

  Eigen::VectorXi acls(n);
  for (Eigen::Index i = 0; i < n; ++i) acls[i] = train.a[i] > 0 ? 1 : 0;

  std::shared_ptr<const Classifier> propensity;
  if (cfg.nuisance_kind == EstimatorKind::MultinomialLogit) {
    auto m = std::make_shared<MultinomialLogit>();
    m->fit(train.x, acls, 2, cfg.logit);
    propensity = m;
  } else {
    auto m = std::make_shared<ForestClassifier>();
    m->fit(train.x, acls, 2, cfg.forest, derive_seed(cfg.seed, 11));
    propensity = m;
  }

  std::vector<WeightedLabel> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p1 =
        std::clamp(propensity->predict_proba(train.x.row(i))[1], 0.01, 0.99);
    const double pi_a = train.a[i] > 0 ? p1 : 1.0 - p1;
    const double contrast = train.a[i] * train.y[i] / pi_a;
    auto& wl = labels[static_cast<std::size_t>(i)];
    wl.w = std::abs(contrast);
    wl.e = -sgn(contrast);
    wl.latent = wl.e < 0 ? Latent::Plus : Latent::Minus;
  }

  FitReport report;
  report.n_labeled = n;
  report.rule = train_wsvm(train.x, labels, cfg.kernel, cfg.lambda, cfg.svm_tol);
  return report;
}

TreatmentRule coin_flip_rule(std::uint64_t seed) {
  TreatmentRule rule;
  rule.impl = TreatmentRule::CoinFlip{seed};
  return rule;
}

CrossValResult cross_validate(const ObservationTable& table,
                              const PipelineConfig& cfg,
                              const std::vector<double>& lambda_grid,
                              const std::vector<double>& sigma_grid, int k,
                              std::uint64_t seed) {
  if (lambda_grid.empty() || sigma_grid.empty())
    throw std::invalid_argument("cross_validate: empty grid");
  if (k < 2) throw std::invalid_argument("cross_validate: k < 2");
  table.validate();

  const FoldAssignment folds = make_folds(table, k, derive_seed(seed, 7));
  const std::size_t n_cells = lambda_grid.size() * sigma_grid.size();
  std::vector<double> score_sum(n_cells, 0.0);

  for (int fold = 0; fold < k; ++fold) {
    const auto train_rows = folds.out_of_fold_rows(fold);
    const auto test_rows = folds.fold_rows(fold);
    const ObservationTable fit_part = table.subset(train_rows);
    const ObservationTable held_out = table.subset(test_rows);

    PipelineConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(fold));
    // fit the nuisance once per fold; the same model supplies training
    // intervals and held-out scoring intervals for every grid cell
    std::vector<Interval> train_ivs, test_ivs;
    if (fold_cfg.method.kind == BoundMethod::ManskiPepper) {
      const auto model =
          fit_continuous_nuisance(fit_part, fold_cfg.nuisance_kind,
                                  fold_cfg.seed, fold_cfg.forest, fold_cfg.logit);
      train_ivs = estimate_intervals(model, fit_part.x, fold_cfg.method,
                                     fold_cfg.delta);
      test_ivs = estimate_intervals(model, held_out.x, fold_cfg.method,
                                    fold_cfg.delta);
    } else {
      const auto model =
          fit_joint_prob(fit_part, fold_cfg.nuisance_kind, fold_cfg.seed,
                         fold_cfg.forest, fold_cfg.logit);
      train_ivs = estimate_intervals(model, fit_part.x, fold_cfg.method,
                                     fold_cfg.delta);
      test_ivs = estimate_intervals(model, held_out.x, fold_cfg.method,
                                    fold_cfg.delta);
    }
    const auto labels = label_rows(train_ivs);

    std::size_t cell = 0;
    for (double lambda : lambda_grid) {
      for (double sigma : sigma_grid) {
        KernelSpec kernel = cfg.kernel.kind == KernelSpec::Gaussian
                                ? KernelSpec::gaussian(sigma)
                                : KernelSpec::linear();
        const TreatmentRule rule =
            train_wsvm(fit_part.x, labels, kernel, lambda, cfg.svm_tol);
        double loss = 0.0;
        for (Eigen::Index i = 0; i < held_out.n(); ++i)
          loss += sup_loss(test_ivs[static_cast<std::size_t>(i)],
                           rule.decide(held_out.x.row(i), i));
        score_sum[cell] += loss;
        ++cell;
      }
    }
  }

  CrossValResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t cell = 0;
  for (double lambda : lambda_grid) {
    for (double sigma : sigma_grid) {
      const double score = score_sum[cell] / static_cast<double>(table.n());
      result.table.push_back({lambda, sigma, score});
      if (score < best) {
        best = score;
        result.lambda = lambda;
        result.sigma = sigma;
      }
      ++cell;
    }
  }
  return result;
}

}  // namespace ivpile
