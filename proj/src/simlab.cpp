#include "ivpile/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ivpile/normal.hpp"
#include "ivpile/risk.hpp"

namespace ivpile {

double expit(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Quadrature gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.weights[i] = w;
    q.nodes[n - 1 - i] = x;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

double truncnorm_sample(double mu, double sigma, double a, double b, Rng& rng) {
  if (!(a < b)) throw std::invalid_argument("truncnorm_sample: a >= b");
  const double fa = normal_cdf((a - mu) / sigma);
  const double fb = normal_cdf((b - mu) / sigma);
  double u = fa + rng.uniform() * (fb - fa);
  u = std::clamp(u, 0x1.0p-53, 1.0 - 0x1.0p-53);
  return std::clamp(mu + sigma * normal_quantile(u), a, b);
}

namespace {

double g1_term(const SimScenario& scn, const Eigen::VectorXd& x, double u) {
  if (scn.g1_model == GModel::Model1)
    return 1.0 - x[0] + x[1] + scn.xi * u;
  return 1.0 - x[0] * x[0] + x[1] * x[1] + scn.xi * x[0] * x[1] * u;
}

// treatment enters the outcome models with {0, 1} coding: g2 vanishes on the
// control arm
double g2_term(const SimScenario& scn, const Eigen::VectorXd& x, double u) {
  if (scn.g2_model == GModel::Model1)
    return 0.442 * (1.0 - x[0] + x[1] + scn.delta * u);
  return x[1] - 0.25 * x[0] * x[0] - 1.0 + scn.delta * u;
}

// zb is the raw Bernoulli draw in {0, 1}; the stored instrument is 2 zb - 1.
double treat_prob(const SimScenario& scn, const Eigen::VectorXd& x, double u,
                  double zb) {
  return expit(scn.alpha * zb + x[0] - 7.0 * x[1] +
               scn.lambda * (1.0 + x[0]) * u);
}

}  // namespace

SimDraw gen_main_binary(const SimScenario& scn, Eigen::Index n,
                        std::uint64_t seed) {
  Rng rng(seed);
  SimDraw draw;
  draw.table.x.resize(n, 10);
  draw.table.z.resize(n);
  draw.table.a.resize(n);
  draw.table.y.resize(n);
  draw.u.resize(n);
  draw.table.outcome_kind = OutcomeKind::Binary;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double zb = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (int j = 0; j < 10; ++j) draw.table.x(i, j) = rng.uniform(-1.0, 1.0);
    const double u = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd x = draw.table.x.row(i);
    const double ab = rng.bernoulli(treat_prob(scn, x, u, zb)) ? 1.0 : 0.0;
    const double py =
        expit(g1_term(scn, x, u) + g2_term(scn, x, u) * ab + scn.c * zb);
    draw.table.z[i] = 2.0 * zb - 1.0;
    draw.table.a[i] = 2.0 * ab - 1.0;
    draw.table.y[i] = rng.bernoulli(py) ? 1.0 : -1.0;
    draw.u[i] = u;
  }
  return draw;
}

SimDraw gen_owl_failure(const SimScenario& scn, OutcomeKind outcome,
                        Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  SimDraw draw;
  draw.table.x.resize(n, 2);
  draw.table.z.resize(n);
  draw.table.a.resize(n);
  draw.table.y.resize(n);
  draw.u.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // no instrument in this design; an inert Bernoulli column keeps the
    // table schema uniform
    draw.table.z[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    const double u = rng.uniform(-1.0, 1.0);
    draw.table.x(i, 0) = x1;
    draw.table.x(i, 1) = x2;
    draw.u[i] = u;
    const double ab =
        rng.bernoulli(expit(1.0 + x1 - x2 + scn.lambda * u)) ? 1.0 : 0.0;
    draw.table.a[i] = 2.0 * ab - 1.0;
    if (outcome == OutcomeKind::Binary) {
      const double py = expit(1.0 - x1 + x2 + scn.xi * u +
                              0.442 * (1.0 - x1 + x2 + scn.delta * u) * ab);
      draw.table.y[i] = rng.bernoulli(py) ? 1.0 : -1.0;
    } else {
      draw.table.y[i] = 1.0 + x1 + x2 + scn.xi * u +
                        0.442 * (1.0 - x1 - x2 + scn.delta * u) * ab +
                        rng.normal();
    }
  }
  draw.table.outcome_kind = outcome;
  if (outcome == OutcomeKind::BoundedContinuous) {
    draw.table.k0 = std::floor(draw.table.y.minCoeff()) - 1.0;
    draw.table.k1 = std::ceil(draw.table.y.maxCoeff()) + 1.0;
  }
  return draw;
}

SimDraw gen_continuous_truncnorm(const SimScenario& scn, Eigen::Index n,
                                 std::uint64_t seed) {
  Rng rng(seed);
  SimDraw draw;
  draw.table.x.resize(n, 10);
  draw.table.z.resize(n);
  draw.table.a.resize(n);
  draw.table.y.resize(n);
  draw.u.resize(n);
  draw.table.outcome_kind = OutcomeKind::BoundedContinuous;
  draw.table.k0 = -3.0;
  draw.table.k1 = 4.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double zb = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (int j = 0; j < 10; ++j) draw.table.x(i, j) = rng.uniform(-1.0, 1.0);
    const double u = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd x = draw.table.x.row(i);
    const double ab = rng.bernoulli(treat_prob(scn, x, u, zb)) ? 1.0 : 0.0;
    const double mu =
        g1_term(scn, x, u) + 3.0 * g2_term(scn, x, u) * ab + scn.c * zb;
    draw.table.z[i] = 2.0 * zb - 1.0;
    draw.table.a[i] = 2.0 * ab - 1.0;
    draw.table.y[i] = truncnorm_sample(mu, 1.0, -3.0, 4.0, rng);
    draw.u[i] = u;
  }
  return draw;
}

SimDraw generate(const SimScenario& scn, Eigen::Index n, std::uint64_t seed) {
  switch (scn.family) {
    case SimFamily::MainBinary:
      return gen_main_binary(scn, n, seed);
    case SimFamily::OwlFailureContinuous:
      return gen_owl_failure(scn, OutcomeKind::BoundedContinuous, n, seed);
    case SimFamily::OwlFailureBinary:
      return gen_owl_failure(scn, OutcomeKind::Binary, n, seed);
    case SimFamily::ContinuousTruncNormal:
      return gen_continuous_truncnorm(scn, n, seed);
  }
  throw std::logic_error("generate: unknown family");
}

double oracle_cate_xu(const SimScenario& scn, const Eigen::VectorXd& x,
                      double u) {
  switch (scn.family) {
    case SimFamily::MainBinary: {
      // risk difference between the treated and control arms, averaged over
      // the two instrument draws to cover a direct instrument effect c != 0
      double cate = 0.0;
      for (double zb : {0.0, 1.0}) {
        const double base = g1_term(scn, x, u) + scn.c * zb;
        cate += 0.5 * (expit(base + g2_term(scn, x, u)) - expit(base));
      }
      return cate;
    }
    case SimFamily::OwlFailureContinuous:
      return 0.442 * (1.0 - x[0] - x[1] + scn.delta * u);
    case SimFamily::OwlFailureBinary: {
      const double base = 1.0 - x[0] + x[1] + scn.xi * u;
      const double h = 0.442 * (1.0 - x[0] + x[1] + scn.delta * u);
      return expit(base + h) - expit(base);
    }
    case SimFamily::ContinuousTruncNormal:
      // mean shift of the parent normal; a direct instrument effect adds
      // c zb to both arms and cancels
      return 3.0 * g2_term(scn, x, u);
  }
  throw std::logic_error("oracle_cate_xu: unknown family");
}

double true_cate_x(const SimScenario& scn, const Eigen::VectorXd& x,
                   int n_quad) {
  static const Quadrature q64 = gauss_legendre(64);
  const Quadrature q = n_quad == 64 ? q64 : gauss_legendre(n_quad);
  double total = 0.0;
  for (int i = 0; i < n_quad; ++i)
    total += q.weights[i] * oracle_cate_xu(scn, x, q.nodes[i]);
  return 0.5 * total;  // U ~ Unif[-1, 1] has density 1/2
}

std::string method_name(Method m) {
  switch (m) {
    case Method::IvPile:
      return "ivpile";
    case Method::IvPileSplit:
      return "ivpile-split";
    case Method::PlugIn:
      return "plugin";
    case Method::Owl:
      return "owl";
    case Method::CoinFlip:
      return "coin";
  }
  return "unknown";
}

namespace {

TreatmentRule fit_method(Method m, const ObservationTable& train,
                         const PipelineConfig& cfg) {
  switch (m) {
    case Method::IvPile:
      return ivpile(train, cfg).rule;
    case Method::IvPileSplit:
      return ivpile_split(train, cfg).rule;
    case Method::PlugIn: {
      if (cfg.method.kind == BoundMethod::ManskiPepper) {
        const auto model = fit_continuous_nuisance(
            train, cfg.nuisance_kind, cfg.seed, cfg.forest, cfg.logit);
        return plug_in_rule(model, cfg.method, cfg.delta);
      }
      const auto model = fit_joint_prob(train, cfg.nuisance_kind, cfg.seed,
                                        cfg.forest, cfg.logit);
      return plug_in_rule(model, cfg.method, cfg.delta);
    }
    case Method::Owl:
      return owl(train, cfg).rule;
    case Method::CoinFlip:
      return coin_flip_rule(derive_seed(cfg.seed, 0xC01FULL));
  }
  throw std::logic_error("fit_method: unknown method");
}

}  // namespace

ExperimentResult run_experiment(const SimScenario& scn,
                                const std::vector<Method>& methods,
                                const PipelineConfig& cfg, int jobs) {
  const SimDraw test = generate(scn, scn.n_test, derive_seed(scn.seed, 0xE57));
  Eigen::VectorXd test_cate(test.table.n());
  for (Eigen::Index i = 0; i < test.table.n(); ++i)
    test_cate[i] = oracle_cate_xu(scn, test.table.x.row(i), test.u[i]);

  std::vector<std::vector<double>> losses(
      methods.size(), std::vector<double>(static_cast<std::size_t>(scn.reps)));

  auto run_rep = [&](int rep) {
    const std::uint64_t rep_seed =
        derive_seed(scn.seed, 1000 + static_cast<std::uint64_t>(rep));
    const SimDraw train = generate(scn, scn.n_train, rep_seed);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      PipelineConfig rep_cfg = cfg;
      rep_cfg.seed = derive_seed(rep_seed, 7 + m);
      const TreatmentRule rule = fit_method(methods[m], train.table, rep_cfg);
      losses[m][static_cast<std::size_t>(rep)] =
          weighted_misclassification(rule, test.table.x, test_cate);
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || scn.reps == 1) {
    for (int rep = 0; rep < scn.reps; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&, t] {
        for (int rep = t; rep < scn.reps; rep += jobs) run_rep(rep);
      });
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.n_test = scn.n_test;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodResult mr;
    mr.method = methods[m];
    mr.per_rep = losses[m];
    double mean = 0.0;
    for (double v : mr.per_rep) mean += v;
    mean /= static_cast<double>(mr.per_rep.size());
    double var = 0.0;
    for (double v : mr.per_rep) var += (v - mean) * (v - mean);
    mr.mean = mean;
    mr.se = mr.per_rep.size() > 1
                ? std::sqrt(var / (static_cast<double>(mr.per_rep.size()) *
                                   (static_cast<double>(mr.per_rep.size()) - 1)))
                : 0.0;
    result.methods.push_back(std::move(mr));
  }
  result.c_dgp = c_dgp(scn, 200000, derive_seed(scn.seed, 0xCD6));
  return result;
}

}  // namespace ivpile
