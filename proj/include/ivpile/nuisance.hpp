#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ivpile/data.hpp"

namespace ivpile {

enum class EstimatorKind { MultinomialLogit, RandomForest };

struct LogitConfig {
  double l2 = 1e-4;
  int max_iter = 500;
  double tol = 1e-8;
};

struct ForestConfig {
  int n_trees = 500;
  int node_size = 1;
  int mtry = 0;  // 0 = ceil(sqrt(d)) for classification, ceil(d/3) for regression
  bool bootstrap = true;
};

/// Probabilistic multi-class model. predict_proba returns a nonnegative
/// vector summing to 1.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const = 0;
  virtual int n_classes() const = 0;
  virtual void save(std::ostream& out) const = 0;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(const Eigen::VectorXd& x) const = 0;
  virtual void save(std::ostream& out) const = 0;
};

std::unique_ptr<Classifier> load_classifier(std::istream& in);
std::unique_ptr<Regressor> load_regressor(std::istream& in);

/// Softmax-linear classifier fit by gradient descent with backtracking line
/// search on the l2-penalized multinomial negative log-likelihood.
class MultinomialLogit : public Classifier {
 public:
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& cls, int n_classes,
           const LogitConfig& cfg = {});
  Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const override;
  int n_classes() const override { return static_cast<int>(coef_.rows()); }
  void save(std::ostream& out) const override;
  void load(std::istream& in);

  bool converged() const { return converged_; }
  const std::vector<double>& loss_trace() const { return loss_trace_; }

 private:
  Eigen::MatrixXd coef_;  // n_classes x (d+1), last column the intercept
  bool converged_ = false;
  std::vector<double> loss_trace_;
};

namespace detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::VectorXd value;  // class frequencies, or a single-entry mean
};

using Tree = std::vector<TreeNode>;

}  // namespace detail

/// CART forest with Gini-impurity splits and leaf class frequencies.
/// Split ties break to the lowest feature index, then the lowest threshold,
/// so fits are deterministic per seed.
class ForestClassifier : public Classifier {
 public:
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& cls, int n_classes,
           const ForestConfig& cfg, std::uint64_t seed);
  /// As fit, but with caller-supplied bootstrap rows per tree.
  void fit_with_bootstrap(const Eigen::MatrixXd& x, const Eigen::VectorXi& cls,
                          int n_classes, const ForestConfig& cfg,
                          std::uint64_t seed,
                          const std::vector<std::vector<Eigen::Index>>& rows);
  Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const override;
  int n_classes() const override { return n_classes_; }
  void save(std::ostream& out) const override;
  void load(std::istream& in);

 private:
  std::vector<detail::Tree> trees_;
  int n_classes_ = 0;
};

/// CART forest with variance-reduction splits and leaf means; predictions are
/// clipped to the observed target range.
class ForestRegressor : public Regressor {
 public:
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& targets,
           const ForestConfig& cfg, std::uint64_t seed);
  double predict(const Eigen::VectorXd& x) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in);

 private:
  std::vector<detail::Tree> trees_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Ordinary least squares with l2 ridge, predictions clipped to the observed
/// target range.
class LinearRegressor : public Regressor {
 public:
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& targets,
           double l2 = 1e-8);
  double predict(const Eigen::VectorXd& x) const override;
  void save(std::ostream& out) const override;
  void load(std::istream& in);

 private:
  Eigen::VectorXd coef_;  // d+1 with intercept last
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Wraps an arbitrary function as a Classifier for oracle injection in tests.
/// Not serializable.
class FunctionClassifier : public Classifier {
 public:
  FunctionClassifier(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn,
                     int n_classes)
      : fn_(std::move(fn)), n_classes_(n_classes) {}
  Eigen::VectorXd predict_proba(const Eigen::VectorXd& x) const override {
    return fn_(x);
  }
  int n_classes() const override { return n_classes_; }
  void save(std::ostream&) const override;

 private:
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn_;
  int n_classes_;
};

class FunctionRegressor : public Regressor {
 public:
  explicit FunctionRegressor(std::function<double(const Eigen::VectorXd&)> fn)
      : fn_(std::move(fn)) {}
  double predict(const Eigen::VectorXd& x) const override { return fn_(x); }
  void save(std::ostream&) const override;

 private:
  std::function<double(const Eigen::VectorXd&)> fn_;
};

/// Joint law of (Y, A) given (Z, X) for binary outcomes: one 4-class model
/// per instrument arm. Class index = 2*(y > 0) + (a > 0).
struct JointProbModel {
  std::shared_ptr<const Classifier> arm_minus;  // Z = -1
  std::shared_ptr<const Classifier> arm_plus;   // Z = +1

  /// p(y, a | z, x) with a [1e-6, 1-1e-6] floor and renormalization.
  Eigen::Vector4d predict4(double z, const Eigen::VectorXd& x) const;

  bool fitted() const { return arm_minus && arm_plus; }
  void save(std::ostream& out) const;
  void load(std::istream& in);
};

inline int joint_class(double y, double a) {
  return 2 * (y > 0 ? 1 : 0) + (a > 0 ? 1 : 0);
}

/// Nuisance functions for bounded continuous outcomes.
struct ContinuousNuisanceModel {
  // mu indexed [z][a] with 0 -> -1, 1 -> +1
  std::shared_ptr<const Regressor> mu[2][2];
  std::shared_ptr<const Classifier> pa_model[2];  // binary, class 1 = A = +1
  std::shared_ptr<const Classifier> pz_model;     // binary, class 1 = Z = +1
  double k0 = -1.0;
  double k1 = 1.0;

  double mu_at(double z, double a, const Eigen::VectorXd& x) const;
  double pa(double z, const Eigen::VectorXd& x) const;  // P(A=+1 | Z=z, X=x)
  double pz(const Eigen::VectorXd& x) const;            // P(Z=+1 | X=x)

  bool fitted() const;
  void save(std::ostream& out) const;
  void load(std::istream& in);
};

JointProbModel fit_joint_prob(const ObservationTable& table, EstimatorKind kind,
                              std::uint64_t seed, const ForestConfig& fc = {},
                              const LogitConfig& lc = {});

ContinuousNuisanceModel fit_continuous_nuisance(const ObservationTable& table,
                                                EstimatorKind kind,
                                                std::uint64_t seed,
                                                const ForestConfig& fc = {},
                                                const LogitConfig& lc = {});

}  // namespace ivpile
