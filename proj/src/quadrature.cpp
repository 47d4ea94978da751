#include "ntk/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"

namespace ntk {

namespace {

constexpr int kMaxNewton = 100;

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
void legendre_pair(std::size_t n, double x, double& pn, double& pn1) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    pn = 1.0;
    pn1 = 0.0;
    return;
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk + 1.0) * x * p1 - kk * p0) / (kk + 1.0);
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

// Jacobi P_n^{(a,b)}(x), P_{n-1}^{(a,b)}(x).
void jacobi_pair(std::size_t n, double a, double b, double x, double& pn, double& pn1) {
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  if (n == 0) {
    pn = 1.0;
    pn1 = 0.0;
    return;
  }
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    const double c1 = 2.0 * kk * (kk + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
    const double p2 = (c2 * p1 - c3 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidArgument("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double nn = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    double pn = 0.0, pn1 = 0.0, dp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      legendre_pair(n, x, pn, pn1);
      dp = nn * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_pair(n, x, pn, pn1);
    dp = nn * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_jacobi(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidArgument("quadrature order must be positive");
  if (!(a > -1.0) || !(b > -1.0)) throw InvalidArgument("Jacobi exponents must exceed -1");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double nn = static_cast<double>(n);
  // log of 2^{a+b+1} Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!)
  const double log_const = (a + b + 1.0) * std::log(2.0) + std::lgamma(nn + a + 1.0) +
                           std::lgamma(nn + b + 1.0) - std::lgamma(nn + a + b + 1.0) - std::lgamma(nn + 1.0);
  const double s = 2.0 * nn + a + b;
  for (std::size_t i = 0; i < n; ++i) {
    // Asymptotic angle of the (i+1)-th largest zero; Newton polishes it.
    const double theta = kPi * (static_cast<double>(i) + 0.75 + 0.5 * a) / (nn + 0.5 * (a + b + 1.0));
    double x = std::cos(theta);
    double pn = 0.0, pn1 = 0.0, dp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      jacobi_pair(n, a, b, x, pn, pn1);
      dp = (nn * (a - b - s * x) * pn + 2.0 * (nn + a) * (nn + b) * pn1) / (s * (1.0 - x * x));
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    jacobi_pair(n, a, b, x, pn, pn1);
    dp = (nn * (a - b - s * x) * pn + 2.0 * (nn + a) * (nn + b) * pn1) / (s * (1.0 - x * x));
    rule.nodes[i] = x;
    rule.weights[i] = std::exp(log_const - std::log((1.0 - x * x) * dp * dp));
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!(rule.nodes[i] < rule.nodes[i - 1]))
      throw NumericalError("Gauss-Jacobi root finding did not separate the zeros");
  return rule;
}

std::shared_ptr<const QuadratureRule> cached_gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const QuadratureRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const QuadratureRule>(gauss_legendre(n));
  return slot;
}

}  // namespace ntk
