#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ivpile/data.hpp"
#include "ivpile/estimators.hpp"
#include "ivpile/rng.hpp"

namespace ivpile {

double expit(double t);

/// Nodes and weights for n-point Gauss-Legendre quadrature on [-1, 1].
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
Quadrature gauss_legendre(int n);

/// Inverse-CDF draw from Normal(mu, sigma) truncated to [a, b].
double truncnorm_sample(double mu, double sigma, double a, double b, Rng& rng);

enum class SimFamily {
  OwlFailureContinuous,
  OwlFailureBinary,
  MainBinary,
  ContinuousTruncNormal,
};

enum class GModel { Model1, Model2 };

struct SimScenario {
  SimFamily family = SimFamily::MainBinary;
  double lambda = 2.0;  // U coefficient in the treatment model
  double xi = 0.0;      // U coefficient in the main outcome term
  double delta = 2.0;   // U coefficient in the treatment-interaction term
  double alpha = 8.0;   // instrument strength
  double c = 0.0;       // direct instrument effect on the outcome
  GModel g1_model = GModel::Model1;
  GModel g2_model = GModel::Model1;
  Eigen::Index n_train = 300;
  Eigen::Index n_test = 20000;
  int reps = 50;
  std::uint64_t seed = 1;
};

/// A simulated dataset plus the withheld confounder. The table never carries
/// U; oracle treatment effects come from the scenario-level functions below.
struct SimDraw {
  ObservationTable table;
  Eigen::VectorXd u;
};

SimDraw gen_main_binary(const SimScenario& scn, Eigen::Index n,
                        std::uint64_t seed);
SimDraw gen_owl_failure(const SimScenario& scn, OutcomeKind outcome,
                        Eigen::Index n, std::uint64_t seed);
SimDraw gen_continuous_truncnorm(const SimScenario& scn, Eigen::Index n,
                                 std::uint64_t seed);

/// Dispatch on scn.family.
SimDraw generate(const SimScenario& scn, Eigen::Index n, std::uint64_t seed);

/// Treatment effect of the treated arm over the control arm given (x, u), on
/// the scale the family's identification bounds target (risk difference for
/// binary outcomes, parent-normal mean shift for the truncated family).
double oracle_cate_xu(const SimScenario& scn, const Eigen::VectorXd& x,
                      double u);

/// Integrates oracle_cate_xu over U ~ Unif[-1, 1] by Gauss-Legendre
/// quadrature.
double true_cate_x(const SimScenario& scn, const Eigen::VectorXd& x,
                   int n_quad = 64);

enum class Method { IvPile, IvPileSplit, PlugIn, Owl, CoinFlip };

std::string method_name(Method m);

struct MethodResult {
  Method method;
  double mean = 0.0;
  double se = 0.0;
  std::vector<double> per_rep;
};

struct ExperimentResult {
  std::vector<MethodResult> methods;
  double c_dgp = 0.0;
  Eigen::Index n_test = 0;
};

/// Monte Carlo study: one shared test draw per scenario; per replication a
/// fresh training draw with a deterministically derived seed, each method
/// fitted and scored by weighted misclassification against the omniscient
/// rule sgn(CATE(X, U)). `jobs` controls replication parallelism.
ExperimentResult run_experiment(const SimScenario& scn,
                                const std::vector<Method>& methods,
                                const PipelineConfig& cfg, int jobs = 1);

}  // namespace ivpile
