#pragma once

#include <span>
#include <vector>

namespace ntk {

/// Bias-free fully connected ReLU network with `layers` hidden layers.
struct FcNtkSpec {
  int layers = 1;

  void validate() const;
};

/// State of the FC-NTK recursion after `layer` steps.
struct FcNtkState {
  int layer = 0;
  double sigma = 0.0;    // Sigma^(l)(u), stays in [-1, 1]
  double k_tilde = 0.0;  // unnormalized kernel; equals l+1 at u = 1
};

/// Normalized FC-NTK on the sphere, K~^(L)(u) / (L+1). Equals 1 at u = 1.
double fc_ntk_sphere(double u, const FcNtkSpec& spec);

/// ||x|| ||z|| fc_ntk_sphere(cos(x, z)).
double fc_ntk_general(std::span<const double> x, std::span<const double> z, const FcNtkSpec& spec);

/// All intermediate states for layers 0..L.
std::vector<FcNtkState> fc_ntk_trace(double u, const FcNtkSpec& spec);

}  // namespace ntk
