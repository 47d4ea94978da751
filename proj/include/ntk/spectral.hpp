#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntk/kernel.hpp"

namespace ntk {

/// Dimension of the space of degree-k spherical harmonics on S^{d-1}.
std::uint64_t harmonic_count(int d, int k);

/// Gegenbauer polynomials for S^{d-1}, normalized to 1 at t = 1, for degrees 0..k_max.
/// Writes k_max + 1 values into `out`.
void gegenbauer_normalized(int d, int k_max, double t, std::span<double> out);

enum class QuadRule {
  angular,  // Gauss-Legendre in theta, t = cos(theta); smooth through the sqrt kinks at +-1
  jacobi,   // Gauss-Jacobi in t with weight (1 - t^2)^((d-3)/2)
};

std::string quad_rule_name(QuadRule rule);
QuadRule parse_quad_rule(const std::string& name);

inline constexpr int kDefaultQuadOrder = 4096;

struct SpectrumOptions {
  int dim = 3;
  int k_max = 50;
  int quad_order = kDefaultQuadOrder;
  QuadRule rule = QuadRule::angular;
};

/// Funk-Hecke eigenvalues of a zonal kernel, normalized so that
/// k(u) = sum_k lambda[k] * multiplicity[k] * P_k(u), with P_k(1) = 1.
struct Spectrum {
  int dim = 3;
  int k_max = 0;
  int quad_order = 0;
  QuadRule rule = QuadRule::angular;
  std::vector<double> lambda;
  std::vector<std::uint64_t> multiplicity;
  std::optional<KernelSpec> kernel;  // empty for ad-hoc profiles
  std::string kernel_label;
};

using ZonalProfile = std::function<double(double)>;

Spectrum spectrum(const Kernel& kernel, const SpectrumOptions& options);
Spectrum spectrum(const ZonalProfile& profile, const SpectrumOptions& options, std::string label = "profile");

/// Truncated Mercer sum at each grid point.
std::vector<double> reconstruct(const Spectrum& s, std::span<const double> u_grid);

enum class Parity { even, odd, both };
std::string parity_name(Parity p);
Parity parse_parity(const std::string& name);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int k_lo = 0;
  int k_hi = 0;
  Parity parity = Parity::both;
  int points = 0;
};

/// Least-squares fit of log lambda_k against log k over the positive eigenvalues with the
/// requested parity in [k_lo, k_hi]. Needs at least five such frequencies.
DecayFit decay_fit(const Spectrum& s, int k_lo, int k_hi, Parity parity);

inline constexpr int kParityGapLo = 3;
inline constexpr int kParityGapHi = 9;

/// Median over odd k in [k_lo, k_hi] of lambda_k / lambda_{k-1}. Small values certify
/// suppression of the odd frequencies.
double parity_gap(const Spectrum& s, int k_lo = kParityGapLo, int k_hi = kParityGapHi);

/// Eigenvalues of the n x n Gram matrix on n seeded uniform points of S^{d-1}, divided by
/// n, in decreasing order.
std::vector<double> monte_carlo_spectrum(const Kernel& kernel, int d, int n_points, std::uint64_t seed);
std::vector<double> monte_carlo_spectrum(const ZonalProfile& profile, int d, int n_points, std::uint64_t seed);

/// Assigns sorted Monte-Carlo eigenvalues to frequencies 0..k_max in decreasing order of
/// the quadrature eigenvalues, N(d,k) values per frequency, and returns the mean of each
/// block indexed by k.
std::vector<double> group_by_frequency(std::span<const double> mc_eigenvalues, const Spectrum& reference, int k_max);

/// Uniform samples on S^{d-1} (normalized standard Gaussians), row-major n x d.
std::vector<double> sample_sphere(int d, int n_points, std::uint64_t seed);

}  // namespace ntk
