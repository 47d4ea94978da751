#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace ntk {

/// Nodes and weights of an interpolatory rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point Gauss-Legendre rule, nodes in decreasing order.
QuadratureRule gauss_legendre(std::size_t n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a, b > -1; nodes decreasing.
QuadratureRule gauss_jacobi(std::size_t n, double a, double b);

/// Shared cached Gauss-Legendre rule (the spectral code reuses a handful of orders).
std::shared_ptr<const QuadratureRule> cached_gauss_legendre(std::size_t n);

}  // namespace ntk
