#pragma once

#include <vector>

#include "ntk/kernel.hpp"
#include "ntk/spectral.hpp"

namespace ntk {

/// Default geometric t-grid for edge fits.
inline constexpr double kEdgeTLo = 1e-12;
inline constexpr double kEdgeTHi = 1e-6;
inline constexpr int kEdgePoints = 24;
inline constexpr double kEdgeTMax = 1e-2;
inline constexpr double kEdgeMaxCondition = 1e12;

/// Window for the intermediate regime alpha^2 L << t << 1 near -1.
inline constexpr double kVanishingTLo = 1e-3;
inline constexpr double kVanishingTHi = 1e-2;

/// Local fit k(+-1 -+ t) ~ a0 + a1 t + c_half sqrt(t) at one endpoint.
struct EdgeExpansion {
  int endpoint = 1;  // +1 or -1
  double c_half = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double nu = 0.5;
  std::vector<double> t_grid;  // exact distances to the endpoint
  std::vector<double> values;  // kernel values on the grid
  double residual = 0.0;       // max absolute fit residual
  double condition = 0.0;      // of the column-equilibrated design
  bool accepted = false;       // residual < 1e-6 |c_half|
};

EdgeExpansion extract_edge_coefficient(const ZonalProfile& profile, int endpoint, double t_lo = kEdgeTLo,
                                       double t_hi = kEdgeTHi, int n_t = kEdgePoints);
EdgeExpansion extract_edge_coefficient(const Kernel& kernel, int endpoint, double t_lo = kEdgeTLo,
                                       double t_hi = kEdgeTHi, int n_t = kEdgePoints);

/// sqrt(t) coefficient of bias-free ResNTK at +1: -(1 + alpha^2 L) / (sqrt(2) pi (1 + alpha^2)).
double c1_closed_form(int layers, double alpha);

/// sqrt(t) coefficient of FC-NTK at +1: -L / (sqrt(2) pi).
double fc_c1_closed_form(int layers);

/// Printed bound on |c_{-1}| for bias-free ResNTK, 1 / (sqrt(2) pi (1 + alpha^2) L), L >= 2.
double cm1_bound(int layers, double alpha);

/// Limit of c_{-1} when alpha = L^-gamma and alpha^2 L -> 0: -1 / (sqrt(2) pi). Rejects
/// gamma <= 0.5 or L^(1 - 2 gamma) >= 0.1.
double cm1_vanishing_regime(int layers, double gamma);

/// Laplace scale whose sqrt(t) coefficient at +1 matches the kernel: L / (2 pi) for FC-NTK,
/// (1 + alpha^2 L) / (2 pi (1 + alpha^2)) for bias-free ResNTK.
double laplace_match(const Kernel& kernel);

/// |k(1 - t) - laplace(1 - t, c)| / sqrt(t) on each t; tends to 0 for the matched c.
std::vector<double> edge_match_ratios(const Kernel& kernel, double c, const std::vector<double>& ts);

struct ConvergenceReport {
  double gamma = 1.0;
  double delta = 0.1;
  int n_u = 2001;
  std::vector<int> depths;
  std::vector<double> alphas;
  std::vector<double> sup_dev;
  double fitted_rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double expected_rate = 0.0;  // 1 - 2 gamma
};

inline constexpr double kMinSlopeR2 = 0.98;

/// sup over u in [-1 + delta, 1 - delta] of |r^(L)(u) - fc^(1)(u)| with alpha = L^-gamma, and
/// the log-log slope against L. The fit uses entries with positive deviation and is rejected
/// when R^2 < 0.98.
ConvergenceReport convergence_curve(double gamma, const std::vector<int>& depths, double delta = 0.1, int n_u = 2001);

}  // namespace ntk
