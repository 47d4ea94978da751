#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ntk {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Normalization { none, unit_norm, standardize };

std::string normalization_name(Normalization n);
Normalization parse_normalization(const std::string& name);

/// Numeric features with integer class labels. Immutable once built; `normalize` returns a copy.
struct Dataset {
  RowMatrix features;                   // n x d
  std::vector<int> labels;              // class ids in [0, class_count)
  std::vector<std::string> class_names; // id -> original label text
  std::vector<std::string> feature_names;
  Normalization normalization = Normalization::none;

  int rows() const { return static_cast<int>(features.rows()); }
  int dims() const { return static_cast<int>(features.cols()); }
  int class_count() const { return static_cast<int>(class_names.size()); }
};

/// Parses a comma-delimited file with an optional header row. `label_column` is a header
/// name or a 0-based index (negative counts from the end). Labels are encoded in order of
/// first appearance.
Dataset load_dataset(const std::string& path, const std::string& label_column);
Dataset parse_dataset(const std::string& text, const std::string& label_column, const std::string& source = "<memory>");

/// Builds a dataset from in-memory arrays; validates labels and class count.
Dataset make_dataset(RowMatrix features, std::vector<int> labels);

Dataset normalize(const Dataset& ds, Normalization mode);

}  // namespace ntk
