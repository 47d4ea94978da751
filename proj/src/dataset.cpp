#include "ntk/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ntk/error.hpp"

namespace ntk {

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text, const std::string& source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        cell.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r': break;
      case '\n':
        if (row_has_content || !cell.empty()) {
          row.push_back(std::move(cell));
          rows.push_back(std::move(row));
        }
        row.clear();
        cell.clear();
        row_has_content = false;
        ++line;
        break;
      default:
        cell.push_back(ch);
        row_has_content = true;
    }
  }
  if (quoted) throw ParseError(source + ": unterminated quoted field near line " + std::to_string(line));
  if (row_has_content || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& raw, double& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_index(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

}  // namespace

std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::unit_norm: return "unit_norm";
    case Normalization::standardize: return "standardize";
  }
  return "none";
}

Normalization parse_normalization(const std::string& name) {
  if (name == "none") return Normalization::none;
  if (name == "unit_norm") return Normalization::unit_norm;
  if (name == "standardize") return Normalization::standardize;
  throw InvalidArgument("unknown normalization '" + name + "' (expected none, unit_norm or standardize)");
}

Dataset parse_dataset(const std::string& text, const std::string& label_column, const std::string& source) {
  auto rows = split_csv(text, source);
  if (rows.empty()) throw ParseError(source + ": empty file");
  const std::size_t width = rows.front().size();
  if (width < 2) throw ParseError(source + ": need at least one feature column and one label column");
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != width) {
      std::ostringstream os;
      os << source << ": row " << r + 1 << " has " << rows[r].size() << " cells, expected " << width;
      throw ParseError(os.str());
    }

  // The label column is chosen by integer index, or by name (which implies a header). With an
  // index, the first row is a header when one of its feature cells is not numeric; the label
  // cell itself may be text either way.
  long label_idx = -1;
  const bool by_index = parse_index(label_column, label_idx);
  if (by_index) {
    if (label_idx < 0) label_idx += static_cast<long>(width);
    if (label_idx < 0 || label_idx >= static_cast<long>(width))
      throw InvalidArgument(source + ": label column index " + label_column + " out of range");
  }
  bool header = !by_index;
  for (std::size_t j = 0; j < width && !header; ++j) {
    double v = 0.0;
    if (static_cast<long>(j) != label_idx && !parse_number(rows.front()[j], v)) header = true;
  }
  std::vector<std::string> names(width);
  for (std::size_t j = 0; j < width; ++j) names[j] = header ? trim(rows.front()[j]) : "col" + std::to_string(j);
  if (!by_index) {
    label_idx = -1;
    for (std::size_t j = 0; j < width; ++j)
      if (names[j] == label_column) label_idx = static_cast<long>(j);
    if (label_idx < 0) throw InvalidArgument(source + ": no label column named '" + label_column + "'");
  }

  const std::size_t first = header ? 1 : 0;
  const std::size_t n = rows.size() - first;
  if (n < 2) throw ParseError(source + ": need at least two data rows");
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width - 1));
  ds.labels.resize(n);
  std::map<std::string, int> ids;
  for (std::size_t j = 0; j < width; ++j)
    if (static_cast<long>(j) != label_idx) ds.feature_names.push_back(names[j]);

  for (std::size_t r = first; r < rows.size(); ++r) {
    const std::size_t i = r - first;
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& cell = rows[r][j];
      if (static_cast<long>(j) == label_idx) {
        const std::string key = trim(cell);
        auto [it, inserted] = ids.emplace(key, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(key);
        ds.labels[i] = it->second;
        continue;
      }
      double v = 0.0;
      std::ostringstream where;
      where << source << ": row " << i + 1 << " (line " << r + 1 << "), column '" << names[j] << "'";
      if (!parse_number(cell, v)) throw ParseError(where.str() + ": non-numeric value '" + cell + "'");
      if (!std::isfinite(v)) throw ParseError(where.str() + ": non-finite value '" + trim(cell) + "'");
      ds.features(static_cast<Eigen::Index>(i), col++) = v;
    }
  }
  if (ds.class_count() < 2) throw ParseError(source + ": degenerate label set (a single class)");
  return ds;
}

Dataset load_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), label_column, path);
}

Dataset make_dataset(RowMatrix features, std::vector<int> labels) {
  if (features.rows() < 2) throw InvalidArgument("dataset needs at least two rows");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) throw InvalidArgument("label count differs from row count");
  if (!features.allFinite()) throw InvalidArgument("dataset features must be finite");
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("labels must be nonnegative");
    max_label = std::max(max_label, l);
  }
  if (max_label < 1) throw InvalidArgument("degenerate label set (a single class)");
  Dataset ds;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  for (int c = 0; c <= max_label; ++c) ds.class_names.push_back(std::to_string(c));
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) ds.feature_names.push_back("col" + std::to_string(j));
  return ds;
}

Dataset normalize(const Dataset& ds, Normalization mode) {
  Dataset out = ds;
  out.normalization = mode;
  switch (mode) {
    case Normalization::none: break;
    case Normalization::unit_norm:
      for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
        const double nrm = out.features.row(i).norm();
        if (!(nrm > 0.0)) throw DomainError("unit_norm: row " + std::to_string(i) + " has zero norm");
        out.features.row(i) /= nrm;
      }
      break;
    case Normalization::standardize: {
      const double n = static_cast<double>(out.features.rows());
      for (Eigen::Index j = 0; j < out.features.cols(); ++j) {
        auto col = out.features.col(j);
        const double mean = col.sum() / n;
        col.array() -= mean;
        const double var = col.squaredNorm() / n;
        if (var > 0.0 && std::sqrt(var) > 1e-300)
          col /= std::sqrt(var);
        else
          col.setZero();
      }
      break;
    }
  }
  return out;
}

}  // namespace ntk
