#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ntk {

/// How the skip/residual balance alpha is chosen from the depth.
struct AlphaRule {
  enum class Kind { constant, power };
  Kind kind = Kind::constant;
  double value = 1.0;  // alpha for `constant`, gamma for `power` (alpha = L^-gamma)

  static AlphaRule constant(double alpha) { return {Kind::constant, alpha}; }
  static AlphaRule inv_L() { return {Kind::power, 1.0}; }
  static AlphaRule inv_sqrt_L() { return {Kind::power, 0.5}; }
  static AlphaRule power(double gamma) { return {Kind::power, gamma}; }

  /// Parses "inv_L", "inv_sqrt_L" or "pow:<gamma>".
  static AlphaRule parse(const std::string& text);

  double resolve(int layers) const;
  std::string to_string() const;
};

/// Residual network with L blocks. `alpha` is always concrete; a rule, if any, has already
/// been resolved and is kept only for reporting.
struct ResNtkSpec {
  int layers = 1;
  double alpha = 1.0;
  double tau = 0.0;
  std::optional<AlphaRule> alpha_rule;

  static ResNtkSpec make(int layers, const AlphaRule& rule, double tau = 0.0);
  void validate() const;
};

/// Per-layer recursion state on the sphere. Vectors k, u, v are indexed by l = 0..L;
/// b holds B_2..B_{L+1} at b[l - 2]; summand[l - 1] is the l-th term of the sum before
/// the normalizer is applied.
struct LayerTrace {
  std::vector<double> k;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> b;
  std::vector<double> summand;
  double normalizer = 0.0;

  double b_at(int l) const { return b.at(static_cast<std::size_t>(l - 2)); }
  /// normalizer * sum(summand); reproduces res_ntk_sphere.
  double resum() const;
};

/// ResNTK on the sphere via the (1+alpha^2)^l norm factor. At u = 1 and tau = 0 this is 1.
double res_ntk_sphere(double u, const ResNtkSpec& spec);

/// ResNTK on R^d. With tau = 0 uses degree-1 homogeneity; with tau > 0 runs the full
/// recursion on (K(x,x), K(z,z), K(x,z)).
double res_ntk_general(std::span<const double> x, std::span<const double> z, const ResNtkSpec& spec);

/// The full R^d recursion, regardless of tau. Exposed so the homogeneity shortcut can be
/// checked against it.
double res_ntk_recursion(std::span<const double> x, std::span<const double> z, const ResNtkSpec& spec);

LayerTrace res_ntk_trace(double u, const ResNtkSpec& spec);

}  // namespace ntk
