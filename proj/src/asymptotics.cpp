#include "ntk/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"
#include "ntk/parallel.hpp"

namespace ntk {

namespace {

const double kSqrt2Pi = std::sqrt(2.0) * kPi;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

}  // namespace

EdgeExpansion extract_edge_coefficient(const ZonalProfile& profile, int endpoint, double t_lo, double t_hi, int n_t) {
  if (endpoint != 1 && endpoint != -1) throw InvalidArgument("endpoint must be +1 or -1");
  if (!(t_lo > 0.0 && t_lo < t_hi && t_hi <= kEdgeTMax))
    throw InvalidArgument("edge grid needs 0 < t_lo < t_hi <= 1e-2");
  if (n_t < 8) throw InvalidArgument("edge grid needs at least 8 points");

  EdgeExpansion e;
  e.endpoint = endpoint;
  const auto n = static_cast<std::size_t>(n_t);
  e.t_grid.resize(n);
  e.values.resize(n);
  const double ratio = std::log(t_hi / t_lo) / static_cast<double>(n_t - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double nominal = t_lo * std::exp(ratio * static_cast<double>(i));
    // Recover the exact distance from the rounded abscissa.
    const double u = endpoint == 1 ? 1.0 - nominal : -1.0 + nominal;
    e.t_grid[i] = endpoint == 1 ? 1.0 - u : u + 1.0;
    e.values[i] = profile(u);
  }

  Eigen::MatrixXd a(n_t, 3);
  Eigen::VectorXd y(n_t);
  for (Eigen::Index i = 0; i < n_t; ++i) {
    const double t = e.t_grid[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = std::sqrt(t);
    y(i) = e.values[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d scale = a.colwise().norm().transpose();
  const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  e.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(e.condition <= kEdgeMaxCondition)) {
    std::ostringstream os;
    os << "edge fit ill-conditioned (condition " << e.condition << "); widen the t-grid";
    throw NumericalError(os.str());
  }
  const Eigen::Vector3d coef = svd.solve(y).cwiseQuotient(scale);
  e.a0 = coef(0);
  e.a1 = coef(1);
  e.c_half = coef(2);
  e.residual = (a * coef - y).cwiseAbs().maxCoeff();
  e.accepted = e.residual < 1e-6 * std::abs(e.c_half);
  return e;
}

EdgeExpansion extract_edge_coefficient(const Kernel& kernel, int endpoint, double t_lo, double t_hi, int n_t) {
  return extract_edge_coefficient([&kernel](double u) { return kernel.sphere(u); }, endpoint, t_lo, t_hi, n_t);
}

double c1_closed_form(int layers, double alpha) {
  if (layers < 1) throw DomainError("c1 needs L >= 1");
  if (!(alpha > 0.0)) throw DomainError("c1 needs alpha > 0");
  const double a2 = alpha * alpha;
  return -(1.0 + a2 * layers) / (kSqrt2Pi * (1.0 + a2));
}

double fc_c1_closed_form(int layers) {
  if (layers < 1) throw DomainError("FC-NTK c1 needs L >= 1");
  return -static_cast<double>(layers) / kSqrt2Pi;
}

double cm1_bound(int layers, double alpha) {
  if (layers < 2) throw DomainError("the c_{-1} bound needs L >= 2");
  if (!(alpha > 0.0)) throw DomainError("the c_{-1} bound needs alpha > 0");
  return 1.0 / (kSqrt2Pi * (1.0 + alpha * alpha) * layers);
}

double cm1_vanishing_regime(int layers, double gamma) {
  if (!(gamma > 0.5)) throw DomainError("vanishing regime needs gamma > 0.5");
  if (layers < 1) throw DomainError("vanishing regime needs L >= 1");
  const double excess = std::pow(static_cast<double>(layers), 1.0 - 2.0 * gamma);
  if (!(excess < 0.1)) {
    std::ostringstream os;
    os << "vanishing regime needs L^(1-2 gamma) < 0.1, got " << excess;
    throw DomainError(os.str());
  }
  return -1.0 / kSqrt2Pi;
}

double laplace_match(const Kernel& kernel) {
  switch (kernel.family()) {
    case KernelFamily::fcntk: {
      const auto& s = std::get<FcNtkSpec>(kernel.spec());
      return static_cast<double>(s.layers) / (2.0 * kPi);
    }
    case KernelFamily::resntk: {
      const auto& s = std::get<ResNtkSpec>(kernel.spec());
      if (s.tau != 0.0) throw InvalidArgument("Laplace matching is defined for bias-free ResNTK only");
      const double a2 = s.alpha * s.alpha;
      return (1.0 + a2 * s.layers) / (2.0 * kPi * (1.0 + a2));
    }
    case KernelFamily::laplace:
    case KernelFamily::homlaplace: break;
  }
  throw InvalidArgument("Laplace matching of a Laplace kernel is degenerate");
}

std::vector<double> edge_match_ratios(const Kernel& kernel, double c, const std::vector<double>& ts) {
  std::vector<double> out;
  out.reserve(ts.size());
  for (double nominal : ts) {
    const double u = 1.0 - nominal;
    const double t = 1.0 - u;
    out.push_back(std::abs(kernel.sphere(u) - laplace_sphere(u, c)) / std::sqrt(t));
  }
  return out;
}

ConvergenceReport convergence_curve(double gamma, const std::vector<int>& depths, double delta, int n_u) {
  if (!(gamma > 0.5 && gamma <= 1.0))
    throw InvalidArgument("convergence needs gamma in the open-closed interval (0.5, 1]");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 0.5)");
  if (depths.size() < 4) throw InvalidArgument("convergence needs at least four depths");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 1) throw InvalidArgument("depths must be positive");
    if (i > 0 && depths[i] <= depths[i - 1]) throw InvalidArgument("depths must be strictly increasing");
  }
  if (n_u < 2) throw InvalidArgument("need at least two grid points");

  ConvergenceReport rep;
  rep.gamma = gamma;
  rep.delta = delta;
  rep.n_u = n_u;
  rep.depths = depths;
  rep.expected_rate = 1.0 - 2.0 * gamma;
  rep.alphas.resize(depths.size());
  rep.sup_dev.assign(depths.size(), 0.0);

  const auto nu = static_cast<std::size_t>(n_u);
  std::vector<double> grid(nu), base(nu);
  const double lo = -1.0 + delta;
  const double hi = 1.0 - delta;
  const FcNtkSpec shallow{1};
  for (std::size_t i = 0; i < nu; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nu - 1);
    base[i] = fc_ntk_sphere(grid[i], shallow);
  }
  for (std::size_t j = 0; j < depths.size(); ++j) {
    const ResNtkSpec spec = ResNtkSpec::make(depths[j], AlphaRule::power(gamma));
    rep.alphas[j] = spec.alpha;
    std::vector<double> dev(nu);
    parallel_for(nu, [&](std::size_t i) { dev[i] = std::abs(res_ntk_sphere(grid[i], spec) - base[i]); });
    rep.sup_dev[j] = *std::max_element(dev.begin(), dev.end());
  }

  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < depths.size(); ++j) {
    if (rep.sup_dev[j] > 0.0) {
      xs.push_back(std::log(static_cast<double>(depths[j])));
      ys.push_back(std::log(rep.sup_dev[j]));
    }
  }
  if (xs.size() < 3) throw NumericalError("fewer than three depths with nonzero deviation; cannot fit a rate");
  const LineFit f = fit_line(xs, ys);
  rep.fitted_rate = f.slope;
  rep.intercept = f.intercept;
  rep.r_squared = f.r_squared;
  if (f.r_squared < kMinSlopeR2) {
    std::ostringstream os;
    os << "convergence slope fit rejected: R^2 = " << f.r_squared << " < " << kMinSlopeR2
       << " (outside the asymptotic regime)";
    throw NumericalError(os.str());
  }
  return rep;
}

}  // namespace ntk
