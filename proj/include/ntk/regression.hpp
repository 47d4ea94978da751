#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ntk/dataset.hpp"
#include "ntk/kernel.hpp"

namespace ntk {

/// Condition-estimate ceiling for an unregularized solve.
inline constexpr double kMaxInterpolationCondition = 1e12;

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelSpec kernel;
  double ridge = 0.0;
};

struct FitResult {
  Eigen::MatrixXd coefficients;  // n x C
  double train_accuracy = 0.0;
  double condition = 0.0;         // 1-norm estimate for G + ridge*I
  double relative_residual = 0.0; // ||(G+λI)A - Y|| / ||Y||
  double ridge = 0.0;
  int class_count = 0;
};

GramMatrix gram(const Kernel& kernel, const RowMatrix& x, double ridge = 0.0);
Eigen::MatrixXd cross_gram(const Kernel& kernel, const RowMatrix& x_test, const RowMatrix& x_train);

Eigen::MatrixXd one_hot(const std::vector<int>& labels, int class_count);

FitResult krr_fit(const GramMatrix& g, const std::vector<int>& labels, int class_count, double ridge);
FitResult krr_fit(const Eigen::MatrixXd& g, const std::vector<int>& labels, int class_count, double ridge);

/// Argmax of k_cross * coefficients per row; ties resolve to the lower class id.
std::vector<int> classify(const FitResult& fit, const Eigen::MatrixXd& k_cross);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Per-sample fold ids in [0, folds); each class is shuffled with `seed` and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

/// Single stratified holdout: true marks a test sample.
std::vector<bool> stratified_holdout(const std::vector<int>& labels, double test_fraction, std::uint64_t seed);

/// Kernel family plus depth-independent parameters; `build(L)` materializes one depth.
struct KernelTemplate {
  KernelFamily family = KernelFamily::fcntk;
  std::optional<double> alpha;           // constant α (resntk)
  std::optional<AlphaRule> alpha_rule;   // depth-dependent α (resntk)
  double tau = 0.0;
  double c = 1.0;                        // laplace / homlaplace

  Kernel build(int layers) const;
  std::optional<double> alpha_at(int layers) const;
  void validate() const;
};

struct SweepConfig {
  KernelTemplate kernel;
  std::vector<int> depths;
  double ridge = 1e-3;
  int folds = 4;               // >= 2: stratified k-fold; 1: single holdout
  double test_fraction = 0.25; // used only when folds == 1
  std::uint64_t seed = 0;
};

struct AccuracyRow {
  int depth = 0;
  std::optional<double> alpha;
  double ridge = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  bool ok = false;
  std::string message;
};

/// Evaluates train/test accuracy for one prebuilt kernel using the config's split.
AccuracyRow evaluate_split(const Dataset& ds, const Kernel& kernel, const SweepConfig& cfg);

std::vector<AccuracyRow> depth_sweep(const Dataset& ds, const SweepConfig& cfg);

}  // namespace ntk
