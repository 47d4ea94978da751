#include "ntk/kernel_primitives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ntk/error.hpp"

namespace ntk {

double clamp_cosine(double u) {
  if (!(std::abs(u) <= 1.0 + kClampBand)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "cosine " << u << " outside [-1, 1]";
    throw DomainError(msg.str());
  }
  if (u > 1.0) return 1.0;
  if (u < -1.0) return -1.0;
  return u;
}

double kappa0(double u) {
  u = clamp_cosine(u);
  return std::clamp((kPi - std::acos(u)) / kPi, 0.0, 1.0);
}

double kappa1(double u) {
  u = clamp_cosine(u);
  // 1 - u^2 factored to keep precision near the endpoints.
  const double s = std::sqrt((1.0 - u) * (1.0 + u));
  return std::clamp((u * (kPi - std::acos(u)) + s) / kPi, 0.0, 1.0);
}

double laplace_sphere(double u, double c) {
  if (!(c > 0.0)) throw DomainError("Laplace scale c must be positive");
  u = clamp_cosine(u);
  return std::exp(-c * std::sqrt(2.0 * (1.0 - u)));
}

double dot(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) throw InvalidArgument("vector dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * z[i];
  return s;
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double cosine(std::span<const double> x, std::span<const double> z) {
  const double nx = norm(x);
  const double nz = norm(z);
  if (!(nx > 0.0) || !(nz > 0.0)) throw DomainError("zero-norm input vector");
  // Identical arguments: avoid a 1 - eps cosine, which the sqrt kink at +1 would amplify.
  if (x.size() == z.size() && std::equal(x.begin(), x.end(), z.begin())) return 1.0;
  return clamp_cosine(dot(x, z) / (nx * nz));
}

double homogenized_laplace(std::span<const double> x, std::span<const double> z, double c) {
  const double u = cosine(x, z);
  return norm(x) * norm(z) * laplace_sphere(u, c);
}

}  // namespace ntk
