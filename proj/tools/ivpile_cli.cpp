#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ivpile/data.hpp"
#include "ivpile/estimators.hpp"
#include "ivpile/risk.hpp"
#include "ivpile/rule.hpp"
#include "ivpile/simlab.hpp"

namespace {

using namespace ivpile;

constexpr const char* kVersion = "1.0.0";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("IVPILE_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 1;
}

struct PipelineOpts {
  std::string estimator = "rf";
  std::string bound = "bp";
  double delta = 0.0;
  double k0 = -3.0;
  double k1 = 4.0;
  double reg = 0.003;
  double sigma = 2.6;
  int n_trees = 500;
  int node_size = 1;
  bool cv = false;
  double grid_min = 1e-3;
  double grid_max = 1e3;
  int grid_points = 7;
};

void add_pipeline_flags(CLI::App* cmd, PipelineOpts& opts) {
  cmd->add_option("--estimator", opts.estimator, "Nuisance estimator")
      ->check(CLI::IsMember({"rf", "logit"}));
  cmd->add_option("--bound", opts.bound, "Bound method")
      ->check(CLI::IsMember({"bp", "sid", "mp"}));
  cmd->add_option("--margin", opts.delta,
                  "Margin subtracted from both bound endpoints");
  cmd->add_option("--k0", opts.k0, "Outcome lower bound (mp only)");
  cmd->add_option("--k1", opts.k1, "Outcome upper bound (mp only)");
  cmd->add_option("--reg", opts.reg, "SVM regularization lambda");
  cmd->add_option("--sigma", opts.sigma, "Gaussian kernel bandwidth");
  cmd->add_option("--n-trees", opts.n_trees, "Forest size");
  cmd->add_option("--node-size", opts.node_size, "Forest leaf size");
  cmd->add_flag("--cv", opts.cv, "Grid-search lambda and sigma by cross validation");
  cmd->add_option("--grid-min", opts.grid_min, "CV grid lower end");
  cmd->add_option("--grid-max", opts.grid_max, "CV grid upper end");
  cmd->add_option("--grid-points", opts.grid_points, "CV grid size per axis");
}

PipelineConfig to_config(const PipelineOpts& opts, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.nuisance_kind = opts.estimator == "logit" ? EstimatorKind::MultinomialLogit
                                                : EstimatorKind::RandomForest;
  cfg.forest.n_trees = opts.n_trees;
  cfg.forest.node_size = opts.node_size;
  if (opts.bound == "bp")
    cfg.method = BoundMethod::balke_pearl();
  else if (opts.bound == "sid")
    cfg.method = BoundMethod::siddique();
  else
    cfg.method = BoundMethod::manski_pepper(opts.k0, opts.k1);
  cfg.delta = opts.delta;
  cfg.kernel = KernelSpec::gaussian(opts.sigma);
  cfg.lambda = opts.reg;
  cfg.seed = seed;
  return cfg;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid;
  if (points == 1) {
    grid.push_back(lo);
    return grid;
  }
  const double step = (std::log10(hi) - std::log10(lo)) / (points - 1);
  for (int i = 0; i < points; ++i)
    grid.push_back(std::pow(10.0, std::log10(lo) + step * i));
  return grid;
}

ObservationTable load_table(const std::string& path, const PipelineOpts& opts) {
  const OutcomeKind kind =
      opts.bound == "mp" ? OutcomeKind::BoundedContinuous : OutcomeKind::Binary;
  return load_csv(path, CsvSchema{}, kind, opts.k0, opts.k1);
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const std::map<std::string, std::string>& entries) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/manifest-" + subcommand + ".txt");
  out << "[run]\nsubcommand = " << subcommand << "\nversion = " << kVersion
      << "\n";
  for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int run_simulate(const std::string& out_dir, std::uint64_t seed,
                 const PipelineOpts& popts, const std::string& family,
                 double lambda, double xi, double delta, double alpha, double c,
                 int g1, int g2, long n_train, long n_test, int reps,
                 const std::string& methods_csv, int jobs) {
  SimScenario scn;
  if (family == "main-binary")
    scn.family = SimFamily::MainBinary;
  else if (family == "owl-continuous")
    scn.family = SimFamily::OwlFailureContinuous;
  else if (family == "owl-binary")
    scn.family = SimFamily::OwlFailureBinary;
  else
    scn.family = SimFamily::ContinuousTruncNormal;
  scn.lambda = lambda;
  scn.xi = xi;
  scn.delta = delta;
  scn.alpha = alpha;
  scn.c = c;
  scn.g1_model = g1 == 2 ? GModel::Model2 : GModel::Model1;
  scn.g2_model = g2 == 2 ? GModel::Model2 : GModel::Model1;
  scn.n_train = n_train;
  scn.n_test = n_test;
  scn.reps = reps;
  scn.seed = seed;

  std::vector<Method> methods;
  std::stringstream ss(methods_csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "ivpile")
      methods.push_back(Method::IvPile);
    else if (token == "ivpile-split")
      methods.push_back(Method::IvPileSplit);
    else if (token == "plugin")
      methods.push_back(Method::PlugIn);
    else if (token == "owl")
      methods.push_back(Method::Owl);
    else if (token == "coin")
      methods.push_back(Method::CoinFlip);
    else
      throw CLI::ValidationError("--methods", "unknown method '" + token + "'");
  }
  if (methods.empty())
    throw CLI::ValidationError("--methods", "no methods given");

  PipelineOpts adjusted = popts;
  if (scn.family == SimFamily::ContinuousTruncNormal) {
    adjusted.bound = "mp";
    adjusted.k0 = -3.0;
    adjusted.k1 = 4.0;
  }
  const PipelineConfig cfg = to_config(adjusted, seed);
  const ExperimentResult result = run_experiment(scn, methods, cfg, jobs);

  std::filesystem::create_directories(out_dir);
  const std::string out_path = out_dir + "/results.csv";
  std::ofstream out(out_path);
  out << "method,mean_error,se,c_dgp,n_train,n_test,reps\n";
  for (const auto& mr : result.methods)
    out << method_name(mr.method) << "," << fmt(mr.mean) << "," << fmt(mr.se)
        << "," << fmt(result.c_dgp) << "," << scn.n_train << "," << scn.n_test
        << "," << scn.reps << "\n";

  write_manifest(out_dir, "simulate",
                 {{"family", family},
                  {"lambda", fmt(lambda)},
                  {"xi", fmt(xi)},
                  {"delta", fmt(delta)},
                  {"alpha", fmt(alpha)},
                  {"c", fmt(c)},
                  {"g1", std::to_string(g1)},
                  {"g2", std::to_string(g2)},
                  {"n_train", std::to_string(n_train)},
                  {"n_test", std::to_string(n_test)},
                  {"reps", std::to_string(reps)},
                  {"methods", methods_csv},
                  {"estimator", adjusted.estimator},
                  {"bound", adjusted.bound},
                  {"margin", fmt(adjusted.delta)},
                  {"reg", fmt(adjusted.reg)},
                  {"sigma", fmt(adjusted.sigma)},
                  {"seed", std::to_string(seed)},
                  {"output", out_path}});

  for (const auto& mr : result.methods)
    std::cout << method_name(mr.method) << ": " << mr.mean << " (se " << mr.se
              << ")\n";
  std::cout << "c_dgp: " << result.c_dgp << "\n";
  return 0;
}

int run_bounds(const std::string& out_dir, std::uint64_t seed,
               const PipelineOpts& popts, const std::string& input,
               const std::string& output) {
  const ObservationTable table = load_table(input, popts);
  const PipelineConfig cfg = to_config(popts, seed);
  std::vector<Interval> intervals;
  if (cfg.method.kind == BoundMethod::ManskiPepper) {
    const auto model = fit_continuous_nuisance(table, cfg.nuisance_kind,
                                               cfg.seed, cfg.forest, cfg.logit);
    intervals = estimate_intervals(model, table.x, cfg.method, cfg.delta);
  } else {
    const auto model = fit_joint_prob(table, cfg.nuisance_kind, cfg.seed,
                                      cfg.forest, cfg.logit);
    intervals = estimate_intervals(model, table.x, cfg.method, cfg.delta);
  }
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << "l,u,reconciled\n";
  for (const auto& iv : intervals)
    out << fmt(iv.l) << "," << fmt(iv.u) << "," << (iv.reconciled ? 1 : 0)
        << "\n";
  write_manifest(out_dir, "bounds",
                 {{"input", input},
                  {"output", output},
                  {"bound", popts.bound},
                  {"estimator", popts.estimator},
                  {"margin", fmt(popts.delta)},
                  {"seed", std::to_string(seed)}});
  return 0;
}

int run_train(const std::string& out_dir, std::uint64_t seed,
              PipelineOpts popts, const std::string& input,
              const std::string& method, const std::string& output) {
  const ObservationTable table = load_table(input, popts);
  PipelineConfig cfg = to_config(popts, seed);

  std::string cv_note = "off";
  if (popts.cv && method != "plugin") {
    const auto grid = log_grid(popts.grid_min, popts.grid_max, popts.grid_points);
    const CrossValResult cv = cross_validate(table, cfg, grid, grid, 5, seed);
    cfg.lambda = cv.lambda;
    cfg.kernel = KernelSpec::gaussian(cv.sigma);
    cv_note = "lambda=" + fmt(cv.lambda) + " sigma=" + fmt(cv.sigma);
  }

  TreatmentRule rule;
  if (method == "ivpile") {
    const FitReport report = ivpile::ivpile(table, cfg);
    std::cout << "labeled: " << report.n_labeled
              << " unlabeled: " << report.n_unlabeled << "\n";
    rule = report.rule;
  } else if (method == "ivpile-split") {
    const FitReport report = ivpile_split(table, cfg);
    std::cout << "labeled: " << report.n_labeled
              << " unlabeled: " << report.n_unlabeled << "\n";
    rule = report.rule;
  } else if (method == "plugin") {
    if (cfg.method.kind == BoundMethod::ManskiPepper) {
      const auto model = fit_continuous_nuisance(table, cfg.nuisance_kind,
                                                 cfg.seed, cfg.forest, cfg.logit);
      rule = plug_in_rule(model, cfg.method, cfg.delta);
    } else {
      const auto model = fit_joint_prob(table, cfg.nuisance_kind, cfg.seed,
                                        cfg.forest, cfg.logit);
      rule = plug_in_rule(model, cfg.method, cfg.delta);
    }
  } else {
    rule = owl(table, cfg).rule;
  }
  rule.save_file(output);
  write_manifest(out_dir, "train",
                 {{"input", input},
                  {"output", output},
                  {"method", method},
                  {"bound", popts.bound},
                  {"estimator", popts.estimator},
                  {"margin", fmt(popts.delta)},
                  {"reg", fmt(cfg.lambda)},
                  {"sigma", fmt(cfg.kernel.sigma)},
                  {"cv", cv_note},
                  {"seed", std::to_string(seed)}});
  return 0;
}

Eigen::MatrixXd load_covariates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      header.push_back(cell);
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] != "z" && header[c] != "a" && header[c] != "y")
      keep.push_back(c);
  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> all;
    while (std::getline(ss, cell, ',')) all.push_back(std::stod(cell));
    if (all.size() != header.size())
      throw std::runtime_error("csv parse error at row " +
                               std::to_string(row_no));
    std::vector<double> vals;
    for (auto c : keep) vals.push_back(all[c]);
    rows.push_back(std::move(vals));
  }
  Eigen::MatrixXd xs(rows.size(), keep.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j)
      xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return xs;
}

int run_predict(const std::string& out_dir, const std::string& rule_path,
                const std::string& input, const std::string& output) {
  const TreatmentRule rule = TreatmentRule::load_file(rule_path);
  const Eigen::MatrixXd xs = load_covariates(input);
  const Eigen::VectorXd decisions = rule.decide_all(xs);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write " + output);
  out << "decision\n";
  for (Eigen::Index i = 0; i < decisions.size(); ++i)
    out << static_cast<int>(decisions[i]) << "\n";
  write_manifest(out_dir, "predict",
                 {{"rule", rule_path}, {"input", input}, {"output", output}});
  return 0;
}

int run_evaluate(const std::string& out_dir, std::uint64_t seed,
                 const PipelineOpts& popts, const std::string& rule_path,
                 const std::string& input, const std::string& cate_col) {
  const TreatmentRule rule = TreatmentRule::load_file(rule_path);
  const ObservationTable table = load_table(input, popts);
  const PipelineConfig cfg = to_config(popts, seed);
  std::vector<Interval> intervals;
  if (cfg.method.kind == BoundMethod::ManskiPepper) {
    const auto model = fit_continuous_nuisance(table, cfg.nuisance_kind,
                                               cfg.seed, cfg.forest, cfg.logit);
    intervals = estimate_intervals(model, table.x, cfg.method, cfg.delta);
  } else {
    const auto model = fit_joint_prob(table, cfg.nuisance_kind, cfg.seed,
                                      cfg.forest, cfg.logit);
    intervals = estimate_intervals(model, table.x, cfg.method, cfg.delta);
  }
  const RiskReport report = empirical_risk_upper(rule, table.x, intervals);

  double wmis = std::nan("");
  if (!cate_col.empty()) {
    CsvSchema schema;
    schema.y_col = cate_col;  // reuse the loader's column lookup
    std::ifstream probe(input);
    std::string header_line;
    std::getline(probe, header_line);
    if (header_line.find(cate_col) == std::string::npos)
      throw std::runtime_error("evaluate: column '" + cate_col +
                               "' not found in " + input);
    // the cate column rides along as a covariate in load_covariates; load the
    // full numeric frame instead
    std::ifstream in(input);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        header.push_back(cell);
      }
    }
    std::size_t col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == cate_col) col = c;
    std::vector<double> cate;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> all;
      while (std::getline(ss, cell, ',')) all.push_back(std::stod(cell));
      cate.push_back(all[col]);
    }
    Eigen::VectorXd cate_v =
        Eigen::Map<Eigen::VectorXd>(cate.data(), static_cast<Eigen::Index>(cate.size()));
    wmis = weighted_misclassification(rule, table.x, cate_v);
  }

  std::cout << "n_eval: " << report.n_eval << "\n"
            << "r_upper: " << report.r_upper << " (se " << report.se_upper
            << ")\n"
            << "r_label: " << report.r_label << "\n"
            << "r_unlabel: " << report.r_unlabel << "\n";
  if (!cate_col.empty()) std::cout << "weighted_misclassification: " << wmis << "\n";

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/evaluation.csv");
  out << "n_eval,r_upper,se_upper,r_label,r_unlabel,weighted_misclassification\n"
      << report.n_eval << "," << fmt(report.r_upper) << ","
      << fmt(report.se_upper) << "," << fmt(report.r_label) << ","
      << fmt(report.r_unlabel) << "," << fmt(wmis) << "\n";
  write_manifest(out_dir, "evaluate",
                 {{"rule", rule_path},
                  {"input", input},
                  {"bound", popts.bound},
                  {"estimator", popts.estimator},
                  {"cate_col", cate_col.empty() ? "(none)" : cate_col},
                  {"seed", std::to_string(seed)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-identification interval learning for treatment rules"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key-value config file");
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = default_seed();
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Master seed (env IVPILE_SEED as fallback)");
  app.add_option("--out-dir", out_dir, "Directory for outputs and manifests");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo study");
  std::string family = "main-binary";
  double s_lambda = 2.0, s_xi = 0.0, s_delta = 2.0, s_alpha = 8.0, s_c = 0.0;
  int g1 = 1, g2 = 1, reps = 50, jobs = 1;
  long n_train = 300, n_test = 20000;
  std::string methods_csv = "ivpile,owl,coin";
  PipelineOpts sim_popts;
  sim->add_option("--family", family, "Data-generating family")
      ->check(CLI::IsMember(
          {"main-binary", "owl-continuous", "owl-binary", "truncnorm"}));
  sim->add_option("--lambda", s_lambda, "Confounder strength in the treatment model");
  sim->add_option("--xi", s_xi, "Confounder strength in the outcome main term");
  sim->add_option("--delta", s_delta, "Confounder-treatment interaction strength");
  sim->add_option("--alpha", s_alpha, "Instrument strength");
  sim->add_option("--c", s_c, "Direct instrument effect on the outcome");
  sim->add_option("--g1", g1, "Outcome main-term model (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  sim->add_option("--g2", g2, "Treatment-interaction model (1 or 2)")
      ->check(CLI::IsMember({1, 2}));
  sim->add_option("--n-train", n_train, "Training rows per replication");
  sim->add_option("--n-test", n_test, "Shared test rows");
  sim->add_option("--reps", reps, "Replications");
  sim->add_option("--methods", methods_csv, "Comma-separated method list");
  sim->add_option("--jobs", jobs, "Parallel replications");
  add_pipeline_flags(sim, sim_popts);

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Per-row identification intervals");
  std::string bnd_input, bnd_output = "bounds.csv";
  PipelineOpts bnd_popts;
  bnd->add_option("--input", bnd_input, "Input CSV")->required();
  bnd->add_option("--output", bnd_output, "Output CSV");
  add_pipeline_flags(bnd, bnd_popts);

  // train
  auto* trn = app.add_subcommand("train", "Fit a treatment rule");
  std::string trn_input, trn_method = "ivpile", trn_output = "rule.txt";
  PipelineOpts trn_popts;
  trn->add_option("--input", trn_input, "Training CSV")->required();
  trn->add_option("--method", trn_method, "Estimator")
      ->check(CLI::IsMember({"ivpile", "ivpile-split", "plugin", "owl"}));
  trn->add_option("--output", trn_output, "Rule file");
  add_pipeline_flags(trn, trn_popts);

  // predict
  auto* prd = app.add_subcommand("predict", "Apply a serialized rule");
  std::string prd_rule, prd_input, prd_output = "predictions.csv";
  prd->add_option("--rule", prd_rule, "Rule file")->required();
  prd->add_option("--input", prd_input, "Covariate CSV")->required();
  prd->add_option("--output", prd_output, "Output CSV");

  // evaluate
  auto* evl = app.add_subcommand("evaluate", "Score a rule on a dataset");
  std::string evl_rule, evl_input, evl_cate;
  PipelineOpts evl_popts;
  evl->add_option("--rule", evl_rule, "Rule file")->required();
  evl->add_option("--input", evl_input, "Evaluation CSV")->required();
  evl->add_option("--cate-col", evl_cate, "Oracle treatment-effect column");
  add_pipeline_flags(evl, evl_popts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return run_simulate(out_dir, seed, sim_popts, family, s_lambda, s_xi,
                          s_delta, s_alpha, s_c, g1, g2, n_train, n_test, reps,
                          methods_csv, jobs);
    if (bnd->parsed())
      return run_bounds(out_dir, seed, bnd_popts, bnd_input, bnd_output);
    if (trn->parsed())
      return run_train(out_dir, seed, trn_popts, trn_input, trn_method,
                       trn_output);
    if (prd->parsed()) return run_predict(out_dir, prd_rule, prd_input, prd_output);
    if (evl->parsed())
      return run_evaluate(out_dir, seed, evl_popts, evl_rule, evl_input,
                          evl_cate);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error [configuration]: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "error [pipeline state]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error [pipeline]: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
