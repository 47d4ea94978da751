#pragma once

#include <numbers>
#include <span>

namespace ntk {

/// Width of the band around ±1 that is clamped before acos/sqrt.
inline constexpr double kClampBand = 1e-12;

inline constexpr double kPi = std::numbers::pi;

/// Clamps a cosine into [-1, 1]. Values further than kClampBand outside throw DomainError.
double clamp_cosine(double u);

/// Zeroth-order arc-cosine kernel, (pi - acos u) / pi.
double kappa0(double u);

/// First-order arc-cosine kernel, (u (pi - acos u) + sqrt(1 - u^2)) / pi. Its derivative is kappa0.
double kappa1(double u);

/// Laplace kernel on the sphere, exp(-c ||x - z||) written in terms of u = x.z.
double laplace_sphere(double u, double c);

/// Degree-1 homogeneous extension of the spherical Laplace kernel to R^d.
double homogenized_laplace(std::span<const double> x, std::span<const double> z, double c);

// Vector helpers shared by the R^d evaluators.
double dot(std::span<const double> x, std::span<const double> z);
double norm(std::span<const double> x);

/// Cosine of the angle between x and z; throws DomainError when either has zero norm.
double cosine(std::span<const double> x, std::span<const double> z);

}  // namespace ntk
