#include "ntk/fc_ntk.hpp"

#include <algorithm>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"

namespace ntk {

void FcNtkSpec::validate() const {
  if (layers < 1) throw InvalidArgument("FC-NTK needs at least one hidden layer");
}

namespace {

// Sigma stays in [-1, 1] analytically; rounding may push it out by an ulp.
inline double clamp_unit(double s) { return std::clamp(s, -1.0, 1.0); }

}  // namespace

double fc_ntk_sphere(double u, const FcNtkSpec& spec) {
  spec.validate();
  double sigma = clamp_cosine(u);
  double k_tilde = sigma;
  for (int l = 1; l <= spec.layers; ++l) {
    const double next_sigma = clamp_unit(kappa1(sigma));
    k_tilde = k_tilde * kappa0(sigma) + next_sigma;
    sigma = next_sigma;
  }
  return k_tilde / static_cast<double>(spec.layers + 1);
}

double fc_ntk_general(std::span<const double> x, std::span<const double> z, const FcNtkSpec& spec) {
  const double u = cosine(x, z);
  return norm(x) * norm(z) * fc_ntk_sphere(u, spec);
}

std::vector<FcNtkState> fc_ntk_trace(double u, const FcNtkSpec& spec) {
  spec.validate();
  std::vector<FcNtkState> out;
  out.reserve(static_cast<std::size_t>(spec.layers) + 1);
  double sigma = clamp_cosine(u);
  double k_tilde = sigma;
  out.push_back({0, sigma, k_tilde});
  for (int l = 1; l <= spec.layers; ++l) {
    const double next_sigma = clamp_unit(kappa1(sigma));
    k_tilde = k_tilde * kappa0(sigma) + next_sigma;
    sigma = next_sigma;
    out.push_back({l, sigma, k_tilde});
  }
  return out;
}

}  // namespace ntk
