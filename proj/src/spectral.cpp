#include "ntk/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"
#include "ntk/parallel.hpp"
#include "ntk/quadrature.hpp"

namespace ntk {

namespace {

__extension__ typedef unsigned __int128 uint128;

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  uint128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) throw InvalidArgument("harmonic count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Combined nodes/weights for integrals of f(t) (1 - t^2)^((d-3)/2) over [-1, 1].
struct SphereRule {
  std::vector<double> t;
  std::vector<double> w;
};

SphereRule sphere_rule(int d, int n, QuadRule kind) {
  SphereRule r;
  const auto nn = static_cast<std::size_t>(n);
  if (kind == QuadRule::angular) {
    const auto gl = cached_gauss_legendre(nn);
    r.t.resize(nn);
    r.w.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      const double theta = 0.5 * kPi * (gl->nodes[i] + 1.0);
      r.t[i] = std::cos(theta);
      r.w[i] = 0.5 * kPi * gl->weights[i] * std::pow(std::sin(theta), d - 2);
    }
  } else {
    const double a = 0.5 * (d - 3);
    if (d == 3) {
      const auto gl = cached_gauss_legendre(nn);
      r.t = gl->nodes;
      r.w = gl->weights;
    } else {
      auto gj = gauss_jacobi(nn, a, a);
      r.t = std::move(gj.nodes);
      r.w = std::move(gj.weights);
    }
  }
  return r;
}

// omega_{d-2} / omega_{d-1}, with omega_m the area of S^m.
double surface_ratio(int d) {
  return std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1))) / std::sqrt(kPi);
}

void validate(const SpectrumOptions& o) {
  if (o.dim < 3) throw InvalidArgument("spectrum needs dimension d >= 3");
  if (o.k_max < 0) throw InvalidArgument("k_max must be nonnegative");
  if (o.quad_order < 1 || o.quad_order < 4 * o.k_max) {
    std::ostringstream os;
    os << "quadrature order " << o.quad_order << " too small for k_max " << o.k_max << " (need >= "
       << std::max(1, 4 * o.k_max) << ")";
    throw InvalidArgument(os.str());
  }
}

Spectrum project(const ZonalProfile& f, const SpectrumOptions& o) {
  validate(o);
  const SphereRule rule = sphere_rule(o.dim, o.quad_order, o.rule);
  const std::size_t n = rule.t.size();
  std::vector<double> fw(n);
  parallel_for(n, [&](std::size_t i) { fw[i] = f(rule.t[i]) * rule.w[i]; });

  const auto kcount = static_cast<std::size_t>(o.k_max) + 1;
  std::vector<CompensatedSum> acc(kcount);
  std::vector<double> p(kcount);
  for (std::size_t i = 0; i < n; ++i) {
    gegenbauer_normalized(o.dim, o.k_max, rule.t[i], p);
    for (std::size_t k = 0; k < kcount; ++k) acc[k].add(fw[i] * p[k]);
  }

  Spectrum s;
  s.dim = o.dim;
  s.k_max = o.k_max;
  s.quad_order = o.quad_order;
  s.rule = o.rule;
  s.lambda.resize(kcount);
  s.multiplicity.resize(kcount);
  const double ratio = surface_ratio(o.dim);
  for (std::size_t k = 0; k < kcount; ++k) {
    s.lambda[k] = ratio * acc[k].value();
    s.multiplicity[k] = harmonic_count(o.dim, static_cast<int>(k));
  }
  const double floor = 1e-15 * std::abs(s.lambda[0]);
  for (auto& l : s.lambda)
    if (std::abs(l) < floor) l = 0.0;
  return s;
}

std::vector<double> eigenvalues_over_n(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Gram eigensolver did not converge");
  const double n = static_cast<double>(gram.rows());
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (auto& v : ev) v /= n;
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

}  // namespace

std::uint64_t harmonic_count(int d, int k) {
  if (d < 2) throw DomainError("harmonic count needs d >= 2");
  if (k < 0) throw DomainError("harmonic count needs k >= 0");
  if (k == 0) return 1;
  if (k == 1) return static_cast<std::uint64_t>(d);
  const auto kk = static_cast<std::uint64_t>(k);
  const auto dd = static_cast<std::uint64_t>(d);
  return binomial(kk + dd - 1, kk) - binomial(kk + dd - 3, kk - 2);
}

void gegenbauer_normalized(int d, int k_max, double t, std::span<double> out) {
  if (d < 2) throw DomainError("Gegenbauer polynomials need d >= 2");
  if (out.size() < static_cast<std::size_t>(k_max) + 1) throw InvalidArgument("output span too short");
  const double lam = 0.5 * (d - 2);
  out[0] = 1.0;
  if (k_max == 0) return;
  out[1] = t;
  for (int k = 1; k < k_max; ++k) {
    const double kk = k;
    out[k + 1] = (2.0 * (kk + lam) * t * out[k] - kk * out[k - 1]) / (kk + 2.0 * lam);
  }
}

std::string quad_rule_name(QuadRule rule) { return rule == QuadRule::angular ? "angular" : "jacobi"; }

QuadRule parse_quad_rule(const std::string& name) {
  if (name == "angular") return QuadRule::angular;
  if (name == "jacobi") return QuadRule::jacobi;
  throw InvalidArgument("unknown quadrature rule '" + name + "' (expected angular or jacobi)");
}

Spectrum spectrum(const Kernel& kernel, const SpectrumOptions& options) {
  Spectrum s = project([&kernel](double u) { return kernel.sphere(u); }, options);
  s.kernel = kernel.spec();
  s.kernel_label = kernel.describe();
  return s;
}

Spectrum spectrum(const ZonalProfile& profile, const SpectrumOptions& options, std::string label) {
  Spectrum s = project(profile, options);
  s.kernel_label = std::move(label);
  return s;
}

std::vector<double> reconstruct(const Spectrum& s, std::span<const double> u_grid) {
  std::vector<double> out(u_grid.size());
  const auto kcount = static_cast<std::size_t>(s.k_max) + 1;
  std::vector<double> p(kcount);
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    gegenbauer_normalized(s.dim, s.k_max, clamp_cosine(u_grid[i]), p);
    CompensatedSum acc;
    for (std::size_t k = 0; k < kcount; ++k) acc.add(s.lambda[k] * static_cast<double>(s.multiplicity[k]) * p[k]);
    out[i] = acc.value();
  }
  return out;
}

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::both: return "both";
  }
  return "both";
}

Parity parse_parity(const std::string& name) {
  if (name == "even") return Parity::even;
  if (name == "odd") return Parity::odd;
  if (name == "both") return Parity::both;
  throw InvalidArgument("unknown parity '" + name + "'");
}

DecayFit decay_fit(const Spectrum& s, int k_lo, int k_hi, Parity parity) {
  if (!(k_lo >= 2 && k_lo < k_hi && k_hi <= s.k_max)) {
    std::ostringstream os;
    os << "decay fit range [" << k_lo << ", " << k_hi << "] must satisfy 2 <= k_lo < k_hi <= k_max (" << s.k_max
       << ")";
    throw InvalidArgument(os.str());
  }
  std::vector<double> xs, ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (parity == Parity::even && k % 2 != 0) continue;
    if (parity == Parity::odd && k % 2 == 0) continue;
    const double l = s.lambda[static_cast<std::size_t>(k)];
    if (!(l > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(l));
  }
  if (xs.size() < 5) {
    std::ostringstream os;
    os << "insufficient positive eigenvalues of " << parity_name(parity) << " parity in [" << k_lo << ", " << k_hi
       << "]: " << xs.size() << " < 5";
    throw NumericalError(os.str());
  }
  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.k_lo = k_lo;
  fit.k_hi = k_hi;
  fit.parity = parity;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

double parity_gap(const Spectrum& s, int k_lo, int k_hi) {
  if (k_lo < 3) throw InvalidArgument("parity gap needs k_lo >= 3");
  if (k_hi > s.k_max || k_hi < k_lo) throw InvalidArgument("parity gap range exceeds the spectrum");
  std::vector<double> ratios;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (k % 2 == 0) continue;
    const double even = s.lambda[static_cast<std::size_t>(k - 1)];
    if (!(even > 0.0)) continue;
    ratios.push_back(s.lambda[static_cast<std::size_t>(k)] / even);
  }
  if (ratios.size() < 2) {
    std::ostringstream os;
    os << "insufficient positive even eigenvalues for the parity gap in [" << k_lo << ", " << k_hi << "]";
    throw NumericalError(os.str());
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  return m % 2 == 1 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

std::vector<double> sample_sphere(int d, int n_points, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("sphere sampling needs d >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto dd = static_cast<std::size_t>(d);
  std::vector<double> x(static_cast<std::size_t>(n_points) * dd);
  for (int i = 0; i < n_points; ++i) {
    double* row = x.data() + static_cast<std::size_t>(i) * dd;
    double nrm = 0.0;
    do {
      nrm = 0.0;
      for (std::size_t j = 0; j < dd; ++j) {
        row[j] = normal(rng);
        nrm += row[j] * row[j];
      }
    } while (nrm == 0.0);
    nrm = std::sqrt(nrm);
    for (std::size_t j = 0; j < dd; ++j) row[j] /= nrm;
  }
  return x;
}

std::vector<double> monte_carlo_spectrum(const ZonalProfile& profile, int d, int n_points, std::uint64_t seed) {
  if (n_points < 100) throw InvalidArgument("Monte-Carlo spectrum needs at least 100 points");
  const auto x = sample_sphere(d, n_points, seed);
  const auto n = static_cast<std::size_t>(n_points);
  const auto dd = static_cast<std::size_t>(d);
  Eigen::MatrixXd gram(n_points, n_points);
  parallel_for(n, [&](std::size_t i) {
    const std::span<const double> xi(x.data() + i * dd, dd);
    for (std::size_t j = i; j < n; ++j) {
      const std::span<const double> xj(x.data() + j * dd, dd);
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = profile(clamp_cosine(dot(xi, xj)));
    }
  });
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j) gram(i, j) = gram(j, i);
  return eigenvalues_over_n(gram);
}

std::vector<double> monte_carlo_spectrum(const Kernel& kernel, int d, int n_points, std::uint64_t seed) {
  return monte_carlo_spectrum([&kernel](double u) { return kernel.sphere(u); }, d, n_points, seed);
}

std::vector<double> group_by_frequency(std::span<const double> mc, const Spectrum& reference, int k_max) {
  if (k_max > reference.k_max) throw InvalidArgument("grouping beyond the reference spectrum");
  std::vector<int> order(static_cast<std::size_t>(k_max) + 1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return reference.lambda[static_cast<std::size_t>(a)] > reference.lambda[static_cast<std::size_t>(b)];
  });
  std::vector<double> means(order.size(), 0.0);
  std::size_t pos = 0;
  for (int k : order) {
    const auto m = reference.multiplicity[static_cast<std::size_t>(k)];
    if (pos + m > mc.size()) throw InvalidArgument("not enough Monte-Carlo eigenvalues to group");
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += mc[pos + j];
    means[static_cast<std::size_t>(k)] = s / static_cast<double>(m);
    pos += m;
  }
  return means;
}

}  // namespace ntk
