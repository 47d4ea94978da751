#include "ntk/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/parallel.hpp"

namespace ntk {

namespace {

std::span<const double> row_span(const RowMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

template <class F>
double guarded(F&& f, Eigen::Index i, Eigen::Index j) {
  try {
    return f();
  } catch (const Error& e) {
    std::ostringstream os;
    os << "entry (" << i << "," << j << "): " << e.what();
    if (e.code() == ErrorCode::domain) throw DomainError(os.str());
    throw NumericalError(os.str());
  }
}

// Shuffle helper with a fixed, portable algorithm (std::shuffle is implementation-defined).
void fisher_yates(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::vector<int>> by_class(const std::vector<int>& labels) {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(c));
  for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  return out;
}

}  // namespace

GramMatrix gram(const Kernel& kernel, const RowMatrix& x, double ridge) {
  const Eigen::Index n = x.rows();
  GramMatrix g{Eigen::MatrixXd(n, n), kernel.spec(), ridge};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = i; j < n; ++j)
      g.values(i, j) = guarded([&] { return kernel.general(row_span(x, i), row_span(x, j)); }, i, j);
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) g.values(i, j) = g.values(j, i);
  return g;
}

Eigen::MatrixXd cross_gram(const Kernel& kernel, const RowMatrix& x_test, const RowMatrix& x_train) {
  if (x_test.cols() != x_train.cols()) throw InvalidArgument("cross_gram: feature dimensions differ");
  Eigen::MatrixXd k(x_test.rows(), x_train.rows());
  parallel_for(static_cast<std::size_t>(x_test.rows()), [&](std::size_t ii) {
    const auto i = static_cast<Eigen::Index>(ii);
    for (Eigen::Index j = 0; j < x_train.rows(); ++j)
      k(i, j) = guarded([&] { return kernel.general(row_span(x_test, i), row_span(x_train, j)); }, i, j);
  });
  return k;
}

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int class_count) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) throw InvalidArgument("label out of range");
    y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return y;
}

FitResult krr_fit(const GramMatrix& g, const std::vector<int>& labels, int class_count, double ridge) {
  return krr_fit(g.values, labels, class_count, ridge);
}

FitResult krr_fit(const Eigen::MatrixXd& g, const std::vector<int>& labels, int class_count, double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidArgument("ridge must be finite and >= 0");
  if (g.rows() != g.cols()) throw InvalidArgument("gram matrix must be square");
  if (static_cast<std::size_t>(g.rows()) != labels.size()) throw InvalidArgument("label count differs from gram size");
  if (class_count < 2) throw InvalidArgument("class_count must be >= 2");

  Eigen::MatrixXd a = g;
  a.diagonal().array() += ridge;
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  FitResult fit;
  fit.ridge = ridge;
  fit.class_count = class_count;
  if (llt.info() != Eigen::Success) {
    if (ridge == 0.0) throw NumericalError("gram matrix is not positive definite at ridge 0; add jitter (e.g. --jitter 1e-10)");
    throw NumericalError("gram + ridge*I is not positive definite");
  }
  const double rc = llt.rcond();
  fit.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (ridge == 0.0 && !(fit.condition < kMaxInterpolationCondition)) {
    std::ostringstream os;
    os << "gram matrix is numerically singular at ridge 0 (condition estimate " << fit.condition
       << "); add jitter (e.g. --jitter 1e-10)";
    throw NumericalError(os.str());
  }
  const Eigen::MatrixXd y = one_hot(labels, class_count);
  fit.coefficients = llt.solve(y);
  if (!fit.coefficients.allFinite()) throw NumericalError("non-finite solution of the ridge system");
  fit.relative_residual = (a * fit.coefficients - y).norm() / y.norm();

  const Eigen::MatrixXd pred = g * fit.coefficients;
  std::vector<int> ids(labels.size());
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    Eigen::Index best = 0;
    pred.row(i).maxCoeff(&best);
    ids[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  fit.train_accuracy = accuracy(ids, labels);
  return fit;
}

std::vector<int> classify(const FitResult& fit, const Eigen::MatrixXd& k_cross) {
  if (k_cross.cols() != fit.coefficients.rows()) throw InvalidArgument("classify: cross-gram columns do not match training size");
  const Eigen::MatrixXd scores = k_cross * fit.coefficients;
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw InvalidArgument("accuracy: size mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("folds must be >= 2");
  if (labels.size() < static_cast<std::size_t>(folds)) throw InvalidArgument("fewer samples than folds");
  std::mt19937_64 rng(seed);
  std::vector<int> out(labels.size(), 0);
  int offset = 0;
  for (auto& members : by_class(labels)) {
    fisher_yates(members, rng);
    for (std::size_t k = 0; k < members.size(); ++k)
      out[static_cast<std::size_t>(members[k])] = static_cast<int>((k + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(folds));
    offset += static_cast<int>(members.size());
  }
  return out;
}

std::vector<bool> stratified_holdout(const std::vector<int>& labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test fraction must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::vector<bool> test(labels.size(), false);
  for (auto& members : by_class(labels)) {
    fisher_yates(members, rng);
    auto take = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) take = std::clamp<std::size_t>(take, 1, members.size() - 1);
    for (std::size_t k = 0; k < take && k < members.size(); ++k) test[static_cast<std::size_t>(members[k])] = true;
  }
  return test;
}

void KernelTemplate::validate() const {
  if (family == KernelFamily::resntk) {
    if (alpha.has_value() == alpha_rule.has_value()) throw InvalidArgument("resntk needs exactly one of alpha or alpha_rule");
    if (!(tau >= 0.0)) throw InvalidArgument("tau must be >= 0");
  } else if (alpha || alpha_rule) {
    throw InvalidArgument("alpha applies only to resntk");
  }
  if ((family == KernelFamily::laplace || family == KernelFamily::homlaplace) && !(c > 0.0))
    throw InvalidArgument("laplace constant c must be > 0");
}

std::optional<double> KernelTemplate::alpha_at(int layers) const {
  if (family != KernelFamily::resntk) return std::nullopt;
  return alpha_rule ? alpha_rule->resolve(layers) : *alpha;
}

Kernel KernelTemplate::build(int layers) const {
  validate();
  switch (family) {
    case KernelFamily::fcntk: return Kernel(FcNtkSpec{layers});
    case KernelFamily::resntk: {
      ResNtkSpec s = alpha_rule ? ResNtkSpec::make(layers, *alpha_rule, tau) : ResNtkSpec{layers, *alpha, tau, std::nullopt};
      return Kernel(s);
    }
    case KernelFamily::laplace: return Kernel(LaplaceSpec{c, false});
    case KernelFamily::homlaplace: return Kernel(LaplaceSpec{c, true});
  }
  throw InvalidArgument("unknown kernel family");
}

AccuracyRow evaluate_split(const Dataset& ds, const Kernel& kernel, const SweepConfig& cfg) {
  AccuracyRow row;
  row.ridge = cfg.ridge;
  const GramMatrix full = gram(kernel, ds.features);
  const auto n = static_cast<Eigen::Index>(ds.labels.size());

  std::vector<int> fold_of;
  int folds = cfg.folds;
  if (folds >= 2) {
    fold_of = stratified_folds(ds.labels, folds, cfg.seed);
  } else if (folds == 1) {
    const auto held = stratified_holdout(ds.labels, cfg.test_fraction, cfg.seed);
    fold_of.resize(held.size());
    for (std::size_t i = 0; i < held.size(); ++i) fold_of[i] = held[i] ? 0 : -1;
  } else {
    throw InvalidArgument("folds must be >= 1");
  }

  double train_sum = 0.0, test_sum = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
    if (tr.empty() || te.empty()) throw InvalidArgument("empty train or test split");
    const Eigen::MatrixXd g_tr = full.values(tr, tr);
    const Eigen::MatrixXd k_te = full.values(te, tr);
    std::vector<int> y_tr, y_te;
    for (auto i : tr) y_tr.push_back(ds.labels[static_cast<std::size_t>(i)]);
    for (auto i : te) y_te.push_back(ds.labels[static_cast<std::size_t>(i)]);
    const FitResult fit = krr_fit(g_tr, y_tr, ds.class_count(), cfg.ridge);
    train_sum += fit.train_accuracy;
    test_sum += accuracy(classify(fit, k_te), y_te);
  }
  row.train_acc = train_sum / folds;
  row.test_acc = test_sum / folds;
  row.ok = true;
  return row;
}

std::vector<AccuracyRow> depth_sweep(const Dataset& ds, const SweepConfig& cfg) {
  cfg.kernel.validate();
  if (cfg.depths.empty()) throw InvalidArgument("depth list is empty");
  if (cfg.folds == 1 && !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw InvalidArgument("test fraction must lie in (0,1)");
  std::vector<AccuracyRow> rows;
  for (int depth : cfg.depths) {
    AccuracyRow row;
    row.depth = depth;
    row.ridge = cfg.ridge;
    try {
      row.alpha = cfg.kernel.alpha_at(depth);
      const Kernel k = cfg.kernel.build(depth);
      AccuracyRow r = evaluate_split(ds, k, cfg);
      row.train_acc = r.train_acc;
      row.test_acc = r.test_acc;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ntk
