#pragma once

#include <span>
#include <string>
#include <variant>

#include "ntk/fc_ntk.hpp"
#include "ntk/res_ntk.hpp"

namespace ntk {

/// Laplace kernel exp(-c ||x - z||); `homogenized` selects ||x|| ||z|| exp(-c sqrt(2(1-u))).
struct LaplaceSpec {
  double c = 1.0;
  bool homogenized = false;

  void validate() const;
};

using KernelSpec = std::variant<FcNtkSpec, ResNtkSpec, LaplaceSpec>;

enum class KernelFamily { fcntk, resntk, laplace, homlaplace };

KernelFamily family_of(const KernelSpec& spec);
std::string family_name(KernelFamily family);
KernelFamily parse_family(const std::string& name);

/// Value-semantic handle over a validated KernelSpec.
class Kernel {
 public:
  explicit Kernel(KernelSpec spec);

  const KernelSpec& spec() const noexcept { return spec_; }
  KernelFamily family() const { return family_of(spec_); }

  /// Zonal profile k(u) on the sphere.
  double sphere(double u) const;

  /// Two-argument evaluation on R^d.
  double general(std::span<const double> x, std::span<const double> z) const;

  /// Single-line description, e.g. "resntk(L=100, alpha=0.01, tau=0)".
  std::string describe() const;

 private:
  KernelSpec spec_;
};

}  // namespace ntk
