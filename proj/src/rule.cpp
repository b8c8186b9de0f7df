#include "ivpile/rule.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ivpile/rng.hpp"

namespace ivpile {

namespace {

double coin_decide(std::uint64_t seed, Eigen::Index row) {
  const std::uint64_t bits =
      derive_seed(seed, static_cast<std::uint64_t>(row));
  return (bits >> 63) ? 1.0 : -1.0;
}

Interval plugin_interval(const TreatmentRule::PlugIn& pi,
                         const Eigen::VectorXd& x) {
  Eigen::MatrixXd xs(1, x.size());
  xs.row(0) = x;
  const auto ivs = pi.method.kind == BoundMethod::ManskiPepper
                       ? estimate_intervals(pi.continuous, xs, pi.method,
                                            pi.delta)
                       : estimate_intervals(pi.joint, xs, pi.method, pi.delta);
  return ivs[0];
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[64];
  out << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v[i],
                  i + 1 == v.size() ? '\n' : ' ');
    out << buf;
  }
  if (v.size() == 0) out << "\n";
}

Eigen::VectorXd read_vector(std::istream& in) {
  Eigen::Index size;
  if (!(in >> size)) throw std::runtime_error("rule load: bad vector header");
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i)
    if (!(in >> v[i])) throw std::runtime_error("rule load: truncated vector");
  return v;
}

}  // namespace

double TreatmentRule::decision_value(const Eigen::VectorXd& x) const {
  if (const auto* ke = std::get_if<KernelExpansion>(&impl)) {
    double f = ke->beta0;
    for (Eigen::Index j = 0; j < ke->support.rows(); ++j)
      f += ke->alpha[j] * kernel_value(ke->kernel, ke->support.row(j), x);
    return f;
  }
  if (const auto* pi = std::get_if<PlugIn>(&impl)) {
    const Interval iv = plugin_interval(*pi, x);
    return std::max(iv.u, 0.0) - std::max(-iv.l, 0.0);
  }
  if (const auto* c = std::get_if<Constant>(&impl)) return c->sign;
  throw std::logic_error("coin-flip rules have no deterministic score");
}

double TreatmentRule::decide(const Eigen::VectorXd& x, Eigen::Index row) const {
  if (const auto* cf = std::get_if<CoinFlip>(&impl))
    return coin_decide(cf->seed, row);
  if (std::holds_alternative<PlugIn>(impl))
    return decision_value(x) >= 0.0 ? 1.0 : -1.0;
  return decision_value(x) > 0.0 ? 1.0 : -1.0;
}

Eigen::VectorXd TreatmentRule::decide_all(const Eigen::MatrixXd& xs) const {
  Eigen::VectorXd out(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out[i] = decide(xs.row(i), i);
  return out;
}

void TreatmentRule::save(std::ostream& out) const {
  out << "ivpile-rule v1\n";
  char buf[128];
  if (const auto* ke = std::get_if<KernelExpansion>(&impl)) {
    out << "kernel\n";
    if (ke->kernel.kind == KernelSpec::Gaussian) {
      std::snprintf(buf, sizeof(buf), "gaussian %.17g\n", ke->kernel.sigma);
      out << buf;
    } else {
      out << "linear\n";
    }
    out << ke->support.rows() << " " << ke->support.cols() << "\n";
    for (Eigen::Index i = 0; i < ke->support.rows(); ++i)
      for (Eigen::Index j = 0; j < ke->support.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g%c", ke->support(i, j),
                      j + 1 == ke->support.cols() ? '\n' : ' ');
        out << buf;
      }
    write_vector(out, ke->alpha);
    std::snprintf(buf, sizeof(buf), "%.17g\n", ke->beta0);
    out << buf;
    return;
  }
  if (const auto* pi = std::get_if<PlugIn>(&impl)) {
    out << "plugin\n";
    const char* method = pi->method.kind == BoundMethod::BalkePearl ? "bp"
                         : pi->method.kind == BoundMethod::Siddique ? "sid"
                                                                    : "mp";
    std::snprintf(buf, sizeof(buf), "%s %.17g %.17g %.17g\n", method,
                  pi->method.k0, pi->method.k1, pi->delta);
    out << buf;
    if (pi->method.kind == BoundMethod::ManskiPepper)
      pi->continuous.save(out);
    else
      pi->joint.save(out);
    return;
  }
  if (const auto* c = std::get_if<Constant>(&impl)) {
    std::snprintf(buf, sizeof(buf), "constant\n%.17g\n", c->sign);
    out << buf;
    return;
  }
  out << "coinflip\n" << std::get<CoinFlip>(impl).seed << "\n";
}

TreatmentRule TreatmentRule::load(std::istream& in) {
  std::string magic, version, kind;
  if (!(in >> magic >> version) || magic != "ivpile-rule" || version != "v1")
    throw std::runtime_error("rule load: unrecognized file header");
  if (!(in >> kind)) throw std::runtime_error("rule load: missing rule kind");

  TreatmentRule rule;
  if (kind == "kernel") {
    KernelExpansion ke;
    std::string kkind;
    if (!(in >> kkind)) throw std::runtime_error("rule load: missing kernel");
    if (kkind == "gaussian") {
      double sigma;
      if (!(in >> sigma)) throw std::runtime_error("rule load: missing sigma");
      ke.kernel = KernelSpec::gaussian(sigma);
    } else if (kkind == "linear") {
      ke.kernel = KernelSpec::linear();
    } else {
      throw std::runtime_error("rule load: unknown kernel '" + kkind + "'");
    }
    Eigen::Index rows, cols;
    if (!(in >> rows >> cols))
      throw std::runtime_error("rule load: bad support header");
    ke.support.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(in >> ke.support(i, j)))
          throw std::runtime_error("rule load: truncated support matrix");
    ke.alpha = read_vector(in);
    if (ke.alpha.size() != rows)
      throw std::runtime_error("rule load: alpha/support size mismatch");
    if (!(in >> ke.beta0)) throw std::runtime_error("rule load: missing beta0");
    rule.impl = std::move(ke);
    return rule;
  }
  if (kind == "plugin") {
    PlugIn pi;
    std::string method;
    double k0, k1;
    if (!(in >> method >> k0 >> k1 >> pi.delta))
      throw std::runtime_error("rule load: bad plugin header");
    if (method == "bp") {
      pi.method = BoundMethod::balke_pearl();
      pi.joint.load(in);
    } else if (method == "sid") {
      pi.method = BoundMethod::siddique();
      pi.joint.load(in);
    } else if (method == "mp") {
      pi.method = BoundMethod::manski_pepper(k0, k1);
      pi.continuous.load(in);
    } else {
      throw std::runtime_error("rule load: unknown bound method '" + method +
                               "'");
    }
    rule.impl = std::move(pi);
    return rule;
  }
  if (kind == "constant") {
    Constant c;
    if (!(in >> c.sign)) throw std::runtime_error("rule load: missing sign");
    rule.impl = c;
    return rule;
  }
  if (kind == "coinflip") {
    CoinFlip cf;
    if (!(in >> cf.seed)) throw std::runtime_error("rule load: missing seed");
    rule.impl = cf;
    return rule;
  }
  throw std::runtime_error("rule load: unknown rule kind '" + kind + "'");
}

void TreatmentRule::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write rule file: " + path);
  save(out);
}

TreatmentRule TreatmentRule::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rule file: " + path);
  return load(in);
}

TreatmentRule train_wsvm(const Eigen::MatrixXd& xs,
                         const std::vector<WeightedLabel>& labels,
                         const KernelSpec& kernel, double lambda, double tol) {
  const Eigen::Index n = xs.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("train_wsvm: label/row count mismatch");
  Eigen::VectorXd w(n), e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = labels[static_cast<std::size_t>(i)].w;
    e[i] = labels[static_cast<std::size_t>(i)].e;
  }
  const Eigen::MatrixXd K = gram(kernel, xs, xs);
  const DualSolution sol = solve_dual(w, e, K, lambda, tol);

  const double scale = 1.0 / (static_cast<double>(n) * lambda);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i)
    if (sol.q[i] * w[i] != 0.0) keep.push_back(i);

  TreatmentRule::KernelExpansion ke;
  ke.kernel = kernel;
  ke.beta0 = sol.beta0;
  ke.support.resize(static_cast<Eigen::Index>(keep.size()), xs.cols());
  ke.alpha.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    ke.support.row(static_cast<Eigen::Index>(j)) = xs.row(keep[j]);
    ke.alpha[static_cast<Eigen::Index>(j)] =
        -sol.q[keep[j]] * w[keep[j]] * e[keep[j]] * scale;
  }
  TreatmentRule rule;
  rule.impl = std::move(ke);
  return rule;
}

}  // namespace ivpile
