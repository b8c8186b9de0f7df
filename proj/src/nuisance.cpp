#include "ivpile/nuisance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ivpile/rng.hpp"

namespace ivpile {

namespace {

constexpr double kProbFloor = 1e-6;

int count_distinct(const Eigen::VectorXi& cls) {
  std::vector<int> seen(cls.begin(), cls.end());
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return static_cast<int>(seen.size());
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g%c", m(i, j),
                    j + 1 == m.cols() ? '\n' : ' ');
      out << buf;
    }
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  Eigen::Index rows, cols;
  if (!(in >> rows >> cols))
    throw std::runtime_error("model load: bad matrix header");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw std::runtime_error("model load: truncated matrix");
  return m;
}

}  // namespace

void MultinomialLogit::fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& cls,
                           int n_classes, const LogitConfig& cfg) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (cls.size() != n) throw std::invalid_argument("logit: size mismatch");
  if (n_classes < 2) throw std::invalid_argument("logit: n_classes < 2");
  if (count_distinct(cls) < 2)
    throw std::runtime_error("logit: degenerate fit, single class present");
  for (Eigen::Index i = 0; i < n; ++i)
    if (cls[i] < 0 || cls[i] >= n_classes)
      throw std::invalid_argument("logit: class index out of range");

  Eigen::MatrixXd xb(n, d + 1);
  xb.leftCols(d) = x;
  xb.col(d).setOnes();

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_classes, d + 1);

  auto loss_grad = [&](const Eigen::MatrixXd& wm, Eigen::MatrixXd* grad) {
    Eigen::MatrixXd scores = xb * wm.transpose();  // n x c
    Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
    scores.colwise() -= row_max;
    Eigen::MatrixXd expd = scores.array().exp().matrix();
    Eigen::VectorXd denom = expd.rowwise().sum();
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      nll -= scores(i, cls[i]) - std::log(denom[i]);
    nll /= static_cast<double>(n);
    // penalize slopes only, not the intercept column
    double pen = 0.5 * cfg.l2 * wm.leftCols(d).squaredNorm();
    if (grad) {
      Eigen::MatrixXd probs = expd.array().colwise() / denom.array();
      for (Eigen::Index i = 0; i < n; ++i) probs(i, cls[i]) -= 1.0;
      *grad = (probs.transpose() * xb) / static_cast<double>(n);
      grad->leftCols(d) += cfg.l2 * wm.leftCols(d);
    }
    return nll + pen;
  };

  converged_ = false;
  loss_trace_.clear();
  Eigen::MatrixXd grad;
  double loss = loss_grad(w, &grad);
  loss_trace_.push_back(loss);
  double step = 1.0;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) <= cfg.tol) {
      converged_ = true;
      break;
    }
    // backtracking line search with Armijo condition
    double trial = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::MatrixXd w_new = w - trial * grad;
      double loss_new = loss_grad(w_new, nullptr);
      if (loss_new <= loss - 1e-4 * trial * gnorm2) {
        w = std::move(w_new);
        loss = loss_new;
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    loss_trace_.push_back(loss);
    step = trial * 2.0;  // gentle growth keeps later searches short
    loss = loss_grad(w, &grad);
  }
  coef_ = std::move(w);
}

Eigen::VectorXd MultinomialLogit::predict_proba(const Eigen::VectorXd& x) const {
  const Eigen::Index d = coef_.cols() - 1;
  Eigen::VectorXd xb(d + 1);
  xb.head(d) = x;
  xb[d] = 1.0;
  Eigen::VectorXd scores = coef_ * xb;
  scores.array() -= scores.maxCoeff();
  Eigen::VectorXd p = scores.array().exp();
  return p / p.sum();
}

void MultinomialLogit::save(std::ostream& out) const {
  out << "logit\n";
  write_matrix(out, coef_);
}

void MultinomialLogit::load(std::istream& in) {
  coef_ = read_matrix(in);
  converged_ = true;
  loss_trace_.clear();
}

namespace {

using detail::Tree;
using detail::TreeNode;

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Best axis-aligned split among `features` (already sorted ascending) for the
// rows of a node. Ties in gain keep the first candidate found, so the lowest
// feature index and then the lowest threshold wins.
template <typename GainFn>
SplitChoice best_split(const Eigen::MatrixXd& x,
                       const std::vector<Eigen::Index>& rows,
                       const std::vector<int>& features, GainFn&& gain_at) {
  SplitChoice best;
  std::vector<std::pair<double, Eigen::Index>> vals(rows.size());
  for (int f : features) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      vals[i] = {x(rows[i], f), rows[i]};
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    gain_at(f, vals, best);
  }
  return best;
}

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXi* cls = nullptr;  // classification targets
  const Eigen::VectorXd* y = nullptr;    // regression targets
  int n_classes = 0;
  int node_size = 1;
  int mtry = 1;
  Rng& rng;
  Tree& tree;

  std::vector<int> draw_features() {
    const int d = static_cast<int>(x.cols());
    std::vector<int> features;
    if (mtry >= d) {
      features.resize(static_cast<std::size_t>(d));
      std::iota(features.begin(), features.end(), 0);
      return features;
    }
    std::vector<char> used(static_cast<std::size_t>(d), 0);
    while (static_cast<int>(features.size()) < mtry) {
      const auto f = rng.uniform_index(static_cast<std::size_t>(d));
      if (!used[f]) {
        used[f] = 1;
        features.push_back(static_cast<int>(f));
      }
    }
    std::sort(features.begin(), features.end());
    return features;
  }

  int build(std::vector<Eigen::Index>& rows) {
    const int node_id = static_cast<int>(tree.size());
    tree.emplace_back();

    if (cls) {
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
      for (auto r : rows) counts[(*cls)[r]] += 1.0;
      tree[node_id].value = counts / counts.sum();
    } else {
      double mean = 0.0;
      for (auto r : rows) mean += (*y)[r];
      mean /= static_cast<double>(rows.size());
      tree[node_id].value = Eigen::VectorXd::Constant(1, mean);
    }

    if (static_cast<int>(rows.size()) <= node_size) return node_id;
    if (pure(rows)) return node_id;

    const std::vector<int> features = draw_features();
    const SplitChoice choice =
        cls ? best_split(x, rows, features,
                         [&](int f, const auto& vals, SplitChoice& best) {
                           gini_sweep(f, vals, best);
                         })
            : best_split(x, rows, features,
                         [&](int f, const auto& vals, SplitChoice& best) {
                           sse_sweep(f, vals, best);
                         });
    if (choice.feature < 0 || choice.gain <= 1e-12) return node_id;

    std::vector<Eigen::Index> left_rows, right_rows;
    for (auto r : rows)
      (x(r, choice.feature) <= choice.threshold ? left_rows : right_rows)
          .push_back(r);
    if (left_rows.empty() || right_rows.empty()) return node_id;

    rows.clear();
    rows.shrink_to_fit();
    tree[node_id].feature = choice.feature;
    tree[node_id].threshold = choice.threshold;
    tree[node_id].left = build(left_rows);
    tree[node_id].right = build(right_rows);
    return node_id;
  }

  bool pure(const std::vector<Eigen::Index>& rows) const {
    if (cls) {
      for (auto r : rows)
        if ((*cls)[r] != (*cls)[rows[0]]) return false;
      return true;
    }
    for (auto r : rows)
      if ((*y)[r] != (*y)[rows[0]]) return false;
    return true;
  }

  void gini_sweep(int f,
                  const std::vector<std::pair<double, Eigen::Index>>& vals,
                  SplitChoice& best) const {
    const auto n = static_cast<double>(vals.size());
    Eigen::VectorXd total = Eigen::VectorXd::Zero(n_classes);
    for (const auto& [v, r] : vals) total[(*cls)[r]] += 1.0;
    const double parent = 1.0 - total.squaredNorm() / (n * n);

    Eigen::VectorXd left = Eigen::VectorXd::Zero(n_classes);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      left[(*cls)[vals[i].second]] += 1.0;
      if (vals[i].first == vals[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const Eigen::VectorXd right = total - left;
      const double child = (nl / n) * (1.0 - left.squaredNorm() / (nl * nl)) +
                           (nr / n) * (1.0 - right.squaredNorm() / (nr * nr));
      const double gain = parent - child;
      if (gain > best.gain) {
        best = {gain, f, 0.5 * (vals[i].first + vals[i + 1].first)};
      }
    }
  }

  void sse_sweep(int f,
                 const std::vector<std::pair<double, Eigen::Index>>& vals,
                 SplitChoice& best) const {
    const auto n = static_cast<double>(vals.size());
    double total_sum = 0.0, total_sq = 0.0;
    for (const auto& [v, r] : vals) {
      total_sum += (*y)[r];
      total_sq += (*y)[r] * (*y)[r];
    }
    const double parent = total_sq - total_sum * total_sum / n;

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      left_sum += (*y)[vals[i].second];
      if (vals[i].first == vals[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const double right_sum = total_sum - left_sum;
      const double child = (total_sq) - left_sum * left_sum / nl -
                           right_sum * right_sum / nr;
      const double gain = parent - child;
      if (gain > best.gain) {
        best = {gain, f, 0.5 * (vals[i].first + vals[i + 1].first)};
      }
    }
  }
};

const TreeNode& descend(const Tree& tree, const Eigen::VectorXd& x) {
  int node = 0;
  while (tree[node].feature >= 0)
    node = x[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                         : tree[node].right;
  return tree[static_cast<std::size_t>(node)];
}

void write_trees(std::ostream& out, const std::vector<Tree>& trees) {
  out << trees.size() << "\n";
  char buf[64];
  for (const auto& tree : trees) {
    out << tree.size() << "\n";
    for (const auto& node : tree) {
      std::snprintf(buf, sizeof(buf), "%d %.17g %d %d %d", node.feature,
                    node.threshold, node.left, node.right,
                    static_cast<int>(node.value.size()));
      out << buf;
      for (Eigen::Index i = 0; i < node.value.size(); ++i) {
        std::snprintf(buf, sizeof(buf), " %.17g", node.value[i]);
        out << buf;
      }
      out << "\n";
    }
  }
}

std::vector<Tree> read_trees(std::istream& in) {
  std::size_t n_trees;
  if (!(in >> n_trees)) throw std::runtime_error("model load: bad tree count");
  std::vector<Tree> trees(n_trees);
  for (auto& tree : trees) {
    std::size_t n_nodes;
    if (!(in >> n_nodes)) throw std::runtime_error("model load: bad node count");
    tree.resize(n_nodes);
    for (auto& node : tree) {
      int vsize;
      if (!(in >> node.feature >> node.threshold >> node.left >> node.right >>
            vsize))
        throw std::runtime_error("model load: truncated tree node");
      node.value.resize(vsize);
      for (int i = 0; i < vsize; ++i)
        if (!(in >> node.value[i]))
          throw std::runtime_error("model load: truncated node value");
    }
  }
  return trees;
}

int default_mtry_classification(Eigen::Index d) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
}

int default_mtry_regression(Eigen::Index d) {
  return static_cast<int>(std::ceil(static_cast<double>(d) / 3.0));
}

std::vector<std::vector<Eigen::Index>> draw_bootstrap(
    Eigen::Index n, const ForestConfig& cfg, std::uint64_t seed) {
  std::vector<std::vector<Eigen::Index>> rows(
      static_cast<std::size_t>(cfg.n_trees));
  for (int t = 0; t < cfg.n_trees; ++t) {
    auto& r = rows[static_cast<std::size_t>(t)];
    r.resize(static_cast<std::size_t>(n));
    if (cfg.bootstrap) {
      Rng rng(derive_seed(seed, 0x8000000000000000ULL + t));
      for (auto& idx : r)
        idx = static_cast<Eigen::Index>(
            rng.uniform_index(static_cast<std::size_t>(n)));
    } else {
      std::iota(r.begin(), r.end(), Eigen::Index{0});
    }
  }
  return rows;
}

}  // namespace

void ForestClassifier::fit(const Eigen::MatrixXd& x, const Eigen::VectorXi& cls,
                           int n_classes, const ForestConfig& cfg,
                           std::uint64_t seed) {
  fit_with_bootstrap(x, cls, n_classes, cfg, seed,
                     draw_bootstrap(x.rows(), cfg, seed));
}

void ForestClassifier::fit_with_bootstrap(
    const Eigen::MatrixXd& x, const Eigen::VectorXi& cls, int n_classes,
    const ForestConfig& cfg, std::uint64_t seed,
    const std::vector<std::vector<Eigen::Index>>& rows) {
  if (cls.size() != x.rows()) throw std::invalid_argument("forest: size mismatch");
  if (count_distinct(cls) < 2)
    throw std::runtime_error("forest: degenerate fit, single class present");
  if (cfg.n_trees < 1 || static_cast<int>(rows.size()) != cfg.n_trees)
    throw std::invalid_argument("forest: bad tree count");
  n_classes_ = n_classes;
  const int mtry =
      cfg.mtry > 0 ? cfg.mtry : default_mtry_classification(x.cols());
  trees_.assign(static_cast<std::size_t>(cfg.n_trees), {});
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> node_rows = rows[static_cast<std::size_t>(t)];
    TreeBuilder builder{x,    &cls, nullptr, n_classes,
                        cfg.node_size, mtry, rng,     trees_[static_cast<std::size_t>(t)]};
    builder.build(node_rows);
  }
}

Eigen::VectorXd ForestClassifier::predict_proba(const Eigen::VectorXd& x) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_classes_);
  for (const auto& tree : trees_) p += descend(tree, x).value;
  return p / static_cast<double>(trees_.size());
}

void ForestClassifier::save(std::ostream& out) const {
  out << "forest_cls\n" << n_classes_ << "\n";
  write_trees(out, trees_);
}

void ForestClassifier::load(std::istream& in) {
  if (!(in >> n_classes_)) throw std::runtime_error("model load: bad header");
  trees_ = read_trees(in);
}

void ForestRegressor::fit(const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& targets,
                          const ForestConfig& cfg, std::uint64_t seed) {
  if (targets.size() != x.rows())
    throw std::invalid_argument("forest: size mismatch");
  if (x.rows() < 2) throw std::invalid_argument("forest regressor: n < 2");
  lo_ = targets.minCoeff();
  hi_ = targets.maxCoeff();
  const int mtry = cfg.mtry > 0 ? cfg.mtry : default_mtry_regression(x.cols());
  const auto rows = draw_bootstrap(x.rows(), cfg, seed);
  trees_.assign(static_cast<std::size_t>(cfg.n_trees), {});
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::Index> node_rows = rows[static_cast<std::size_t>(t)];
    TreeBuilder builder{x,    nullptr, &targets, 0,
                        cfg.node_size, mtry,    rng, trees_[static_cast<std::size_t>(t)]};
    builder.build(node_rows);
  }
}

double ForestRegressor::predict(const Eigen::VectorXd& x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += descend(tree, x).value[0];
  return std::clamp(sum / static_cast<double>(trees_.size()), lo_, hi_);
}

void ForestRegressor::save(std::ostream& out) const {
  char buf[64];
  out << "forest_reg\n";
  std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", lo_, hi_);
  out << buf;
  write_trees(out, trees_);
}

void ForestRegressor::load(std::istream& in) {
  if (!(in >> lo_ >> hi_)) throw std::runtime_error("model load: bad header");
  trees_ = read_trees(in);
}

void LinearRegressor::fit(const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& targets, double l2) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (targets.size() != n) throw std::invalid_argument("linear: size mismatch");
  Eigen::MatrixXd xb(n, d + 1);
  xb.leftCols(d) = x;
  xb.col(d).setOnes();
  Eigen::MatrixXd gram = xb.transpose() * xb;
  gram.diagonal().head(d).array() += l2;
  coef_ = gram.ldlt().solve(xb.transpose() * targets);
  lo_ = targets.minCoeff();
  hi_ = targets.maxCoeff();
}

double LinearRegressor::predict(const Eigen::VectorXd& x) const {
  const Eigen::Index d = coef_.size() - 1;
  const double v = coef_.head(d).dot(x) + coef_[d];
  return std::clamp(v, lo_, hi_);
}

void LinearRegressor::save(std::ostream& out) const {
  char buf[64];
  out << "linear\n";
  std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", lo_, hi_);
  out << buf;
  write_matrix(out, coef_);
}

void LinearRegressor::load(std::istream& in) {
  if (!(in >> lo_ >> hi_)) throw std::runtime_error("model load: bad header");
  coef_ = read_matrix(in);
}

void FunctionClassifier::save(std::ostream&) const {
  throw std::logic_error("function-backed classifiers are not serializable");
}

void FunctionRegressor::save(std::ostream&) const {
  throw std::logic_error("function-backed regressors are not serializable");
}

std::unique_ptr<Classifier> load_classifier(std::istream& in) {
  std::string tag;
  if (!(in >> tag)) throw std::runtime_error("model load: missing tag");
  if (tag == "logit") {
    auto m = std::make_unique<MultinomialLogit>();
    m->load(in);
    return m;
  }
  if (tag == "forest_cls") {
    auto m = std::make_unique<ForestClassifier>();
    m->load(in);
    return m;
  }
  throw std::runtime_error("model load: unknown classifier tag '" + tag + "'");
}

std::unique_ptr<Regressor> load_regressor(std::istream& in) {
  std::string tag;
  if (!(in >> tag)) throw std::runtime_error("model load: missing tag");
  if (tag == "forest_reg") {
    auto m = std::make_unique<ForestRegressor>();
    m->load(in);
    return m;
  }
  if (tag == "linear") {
    auto m = std::make_unique<LinearRegressor>();
    m->load(in);
    return m;
  }
  throw std::runtime_error("model load: unknown regressor tag '" + tag + "'");
}

Eigen::Vector4d JointProbModel::predict4(double z,
                                         const Eigen::VectorXd& x) const {
  if (!fitted()) throw std::logic_error("JointProbModel: not fitted");
  const Classifier& arm = z > 0 ? *arm_plus : *arm_minus;
  Eigen::VectorXd raw = arm.predict_proba(x);
  if (raw.size() != 4)
    throw std::logic_error("JointProbModel: arm predictor is not 4-class");
  Eigen::Vector4d p = raw.cwiseMax(kProbFloor).cwiseMin(1.0 - kProbFloor);
  return p / p.sum();
}

void JointProbModel::save(std::ostream& out) const {
  if (!fitted()) throw std::logic_error("JointProbModel: not fitted");
  arm_minus->save(out);
  arm_plus->save(out);
}

void JointProbModel::load(std::istream& in) {
  arm_minus = load_classifier(in);
  arm_plus = load_classifier(in);
}

double ContinuousNuisanceModel::mu_at(double z, double a,
                                      const Eigen::VectorXd& x) const {
  const auto& m = mu[z > 0 ? 1 : 0][a > 0 ? 1 : 0];
  if (!m) throw std::logic_error("ContinuousNuisanceModel: not fitted");
  return std::clamp(m->predict(x), k0, k1);
}

double ContinuousNuisanceModel::pa(double z, const Eigen::VectorXd& x) const {
  const auto& m = pa_model[z > 0 ? 1 : 0];
  if (!m) throw std::logic_error("ContinuousNuisanceModel: not fitted");
  return std::clamp(m->predict_proba(x)[1], 0.0, 1.0);
}

double ContinuousNuisanceModel::pz(const Eigen::VectorXd& x) const {
  if (!pz_model) throw std::logic_error("ContinuousNuisanceModel: not fitted");
  return std::clamp(pz_model->predict_proba(x)[1], 0.0, 1.0);
}

bool ContinuousNuisanceModel::fitted() const {
  return mu[0][0] && mu[0][1] && mu[1][0] && mu[1][1] && pa_model[0] &&
         pa_model[1] && pz_model;
}

void ContinuousNuisanceModel::save(std::ostream& out) const {
  if (!fitted()) throw std::logic_error("ContinuousNuisanceModel: not fitted");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", k0, k1);
  out << buf;
  for (int zi = 0; zi < 2; ++zi)
    for (int ai = 0; ai < 2; ++ai) mu[zi][ai]->save(out);
  pa_model[0]->save(out);
  pa_model[1]->save(out);
  pz_model->save(out);
}

void ContinuousNuisanceModel::load(std::istream& in) {
  if (!(in >> k0 >> k1))
    throw std::runtime_error("model load: bad nuisance header");
  for (int zi = 0; zi < 2; ++zi)
    for (int ai = 0; ai < 2; ++ai) mu[zi][ai] = load_regressor(in);
  pa_model[0] = load_classifier(in);
  pa_model[1] = load_classifier(in);
  pz_model = load_classifier(in);
}

namespace {

std::shared_ptr<const Classifier> fit_classifier(const Eigen::MatrixXd& x,
                                                 const Eigen::VectorXi& cls,
                                                 int n_classes,
                                                 EstimatorKind kind,
                                                 std::uint64_t seed,
                                                 const ForestConfig& fc,
                                                 const LogitConfig& lc) {
  if (kind == EstimatorKind::MultinomialLogit) {
    auto m = std::make_shared<MultinomialLogit>();
    m->fit(x, cls, n_classes, lc);
    return m;
  }
  auto m = std::make_shared<ForestClassifier>();
  m->fit(x, cls, n_classes, fc, seed);
  return m;
}

std::shared_ptr<const Regressor> fit_regressor(const Eigen::MatrixXd& x,
                                               const Eigen::VectorXd& y,
                                               EstimatorKind kind,
                                               std::uint64_t seed,
                                               const ForestConfig& fc) {
  if (kind == EstimatorKind::MultinomialLogit) {
    auto m = std::make_shared<LinearRegressor>();
    m->fit(x, y);
    return m;
  }
  auto m = std::make_shared<ForestRegressor>();
  m->fit(x, y, fc, seed);
  return m;
}

std::vector<Eigen::Index> arm_rows(const ObservationTable& table, double z) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < table.n(); ++i)
    if (table.z[i] == z) rows.push_back(i);
  return rows;
}

}  // namespace

JointProbModel fit_joint_prob(const ObservationTable& table,
                              EstimatorKind kind, std::uint64_t seed,
                              const ForestConfig& fc, const LogitConfig& lc) {
  table.validate();
  if (table.outcome_kind != OutcomeKind::Binary)
    throw std::invalid_argument("fit_joint_prob requires a binary outcome");
  JointProbModel model;
  for (int zi = 0; zi < 2; ++zi) {
    const double z = zi == 0 ? -1.0 : 1.0;
    const auto rows = arm_rows(table, z);
    const std::string arm_name = zi == 0 ? "z = -1" : "z = +1";
    if (rows.empty())
      throw std::runtime_error("fit_joint_prob: degenerate fit, arm " +
                               arm_name + " is empty");
    const ObservationTable sub = table.subset(rows);
    Eigen::VectorXi cls(sub.n());
    for (Eigen::Index i = 0; i < sub.n(); ++i)
      cls[i] = joint_class(sub.y[i], sub.a[i]);
    if (count_distinct(cls) < 2)
      throw std::runtime_error("fit_joint_prob: degenerate fit, arm " +
                               arm_name + " has a single (y, a) class");
    auto fitted = fit_classifier(sub.x, cls, 4, kind,
                                 derive_seed(seed, static_cast<std::uint64_t>(zi)),
                                 fc, lc);
    (zi == 0 ? model.arm_minus : model.arm_plus) = std::move(fitted);
  }
  return model;
}

ContinuousNuisanceModel fit_continuous_nuisance(const ObservationTable& table,
                                                EstimatorKind kind,
                                                std::uint64_t seed,
                                                const ForestConfig& fc,
                                                const LogitConfig& lc) {
  table.validate();
  if (table.outcome_kind != OutcomeKind::BoundedContinuous)
    throw std::invalid_argument(
        "fit_continuous_nuisance requires a bounded continuous outcome");
  ContinuousNuisanceModel model;
  model.k0 = table.k0;
  model.k1 = table.k1;

  std::uint64_t stream = 0;
  for (int zi = 0; zi < 2; ++zi)
    for (int ai = 0; ai < 2; ++ai) {
      const double z = zi == 0 ? -1.0 : 1.0;
      const double a = ai == 0 ? -1.0 : 1.0;
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < table.n(); ++i)
        if (table.z[i] == z && table.a[i] == a) rows.push_back(i);
      if (rows.empty())
        throw std::runtime_error(
            "fit_continuous_nuisance: degenerate fit, empty cell (z = " +
            std::to_string(static_cast<int>(z)) +
            ", a = " + std::to_string(static_cast<int>(a)) + ")");
      const ObservationTable sub = table.subset(rows);
      model.mu[zi][ai] =
          fit_regressor(sub.x, sub.y, kind, derive_seed(seed, stream++), fc);
    }

  for (int zi = 0; zi < 2; ++zi) {
    const double z = zi == 0 ? -1.0 : 1.0;
    const auto rows = arm_rows(table, z);
    const ObservationTable sub = table.subset(rows);
    Eigen::VectorXi cls(sub.n());
    for (Eigen::Index i = 0; i < sub.n(); ++i) cls[i] = sub.a[i] > 0 ? 1 : 0;
    model.pa_model[zi] = fit_classifier(sub.x, cls, 2, kind,
                                        derive_seed(seed, stream++), fc, lc);
  }

  Eigen::VectorXi zcls(table.n());
  for (Eigen::Index i = 0; i < table.n(); ++i) zcls[i] = table.z[i] > 0 ? 1 : 0;
  model.pz_model =
      fit_classifier(table.x, zcls, 2, kind, derive_seed(seed, stream++), fc, lc);
  return model;
}

}  // namespace ivpile
