#include "ntk/res_ntk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"

namespace ntk {

AlphaRule AlphaRule::parse(const std::string& text) {
  if (text == "inv_L") return inv_L();
  if (text == "inv_sqrt_L") return inv_sqrt_L();
  if (text.rfind("pow:", 0) == 0) {
    const std::string num = text.substr(4);
    std::size_t used = 0;
    double gamma = 0.0;
    try {
      gamma = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) throw InvalidArgument("bad alpha rule exponent: " + text);
    return power(gamma);
  }
  throw InvalidArgument("unknown alpha rule '" + text + "' (expected inv_L, inv_sqrt_L or pow:<gamma>)");
}

double AlphaRule::resolve(int layers) const {
  if (kind == Kind::constant) return value;
  if (!(value >= 0.5 && value <= 1.0))
    throw InvalidArgument("alpha rule exponent gamma must lie in [0.5, 1]");
  return std::pow(static_cast<double>(layers), -value);
}

std::string AlphaRule::to_string() const {
  if (kind == Kind::constant) {
    std::ostringstream os;
    os.precision(17);
    os << "constant:" << value;
    return os.str();
  }
  if (value == 1.0) return "inv_L";
  if (value == 0.5) return "inv_sqrt_L";
  std::ostringstream os;
  os.precision(17);
  os << "pow:" << value;
  return os.str();
}

ResNtkSpec ResNtkSpec::make(int layers, const AlphaRule& rule, double tau) {
  if (layers < 1) throw InvalidArgument("ResNTK needs at least one block");
  ResNtkSpec spec;
  spec.layers = layers;
  spec.alpha = rule.resolve(layers);
  spec.tau = tau;
  if (rule.kind == AlphaRule::Kind::power) spec.alpha_rule = rule;
  spec.validate();
  return spec;
}

void ResNtkSpec::validate() const {
  if (layers < 1) throw InvalidArgument("ResNTK needs at least one block");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("ResNTK alpha must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("ResNTK tau must be nonnegative");
}

double LayerTrace::resum() const {
  double s = 0.0;
  // Same order as the evaluator: l = L down to 1.
  for (auto it = summand.rbegin(); it != summand.rend(); ++it) s += *it;
  return normalizer * s;
}

namespace {

// On-sphere recursion. Fills k[0..L], p[0..L] = (1+a^2)^l and u[0..L]. The powers are
// accumulated with the same operation as K_l so that K_l(1) == p[l] holds exactly.
void forward_sphere(double u0, const ResNtkSpec& spec, std::vector<double>& k, std::vector<double>& p,
                    std::vector<double>& u) {
  const auto n = static_cast<std::size_t>(spec.layers) + 1;
  const double a2 = spec.alpha * spec.alpha;
  k.resize(n);
  p.resize(n);
  u.resize(n);
  k[0] = clamp_cosine(u0);
  p[0] = 1.0;
  u[0] = k[0];
  for (std::size_t l = 1; l < n; ++l) {
    k[l] = k[l - 1] + a2 * p[l - 1] * kappa1(u[l - 1]);
    p[l] = p[l - 1] + a2 * p[l - 1];
    u[l] = clamp_cosine(k[l] / p[l]);
  }
}

}  // namespace

double res_ntk_sphere(double u, const ResNtkSpec& spec) {
  spec.validate();
  // Normalized form: with q_l = B_{l+1} p_{l-1} / p_{L-1} nothing grows like (1+a^2)^L, so
  // deep or wide-alpha settings stay finite. At u = 1 every ratio below is exactly 1.
  const double a2 = spec.alpha * spec.alpha;
  const double tau2 = spec.tau * spec.tau;
  const auto L = static_cast<std::size_t>(spec.layers);
  thread_local std::vector<double> uu;
  uu.resize(L);
  double c = clamp_cosine(u);
  for (std::size_t l = 0; l < L; ++l) {
    uu[l] = c;
    c = clamp_cosine((c + a2 * kappa1(c)) / (1.0 + a2));
  }
  double q = 1.0;
  double sum = 0.0;
  for (std::size_t l = L; l >= 1; --l) {
    const double ul = uu[l - 1];
    const double k0 = kappa0(ul);
    double term = kappa1(ul) + ul * k0;
    if (tau2 > 0.0) term += tau2 * k0 * std::pow(1.0 + a2, -static_cast<double>(l - 1));
    sum += q * term;
    q *= (1.0 + a2 * k0) / (1.0 + a2);
  }
  return sum / (2.0 * static_cast<double>(L));
}

LayerTrace res_ntk_trace(double u, const ResNtkSpec& spec) {
  spec.validate();
  LayerTrace t;
  std::vector<double> p;
  forward_sphere(u, spec, t.k, p, t.u);
  t.v = p;
  const double a2 = spec.alpha * spec.alpha;
  const double tau2 = spec.tau * spec.tau;
  const auto L = static_cast<std::size_t>(spec.layers);
  t.b.assign(L, 0.0);
  t.summand.assign(L, 0.0);
  double b = 1.0;
  t.b[L - 1] = b;  // B_{L+1}
  for (std::size_t l = L; l >= 1; --l) {
    const double k0 = kappa0(t.u[l - 1]);
    t.summand[l - 1] = b * (p[l - 1] * kappa1(t.u[l - 1]) + (t.k[l - 1] + tau2) * k0);
    b *= 1.0 + a2 * k0;
    if (l >= 2) t.b[l - 2] = b;  // B_l
  }
  t.normalizer = 1.0 / (2.0 * static_cast<double>(L) * p[L - 1]);
  return t;
}

double res_ntk_recursion(std::span<const double> x, std::span<const double> z, const ResNtkSpec& spec) {
  spec.validate();
  const double nx = norm(x);
  const double nz = norm(z);
  if (!(nx > 0.0) || !(nz > 0.0)) throw DomainError("zero-norm input vector");
  const auto L = static_cast<std::size_t>(spec.layers);
  const double a2 = spec.alpha * spec.alpha;
  const double tau2 = spec.tau * spec.tau;

  std::vector<double> kxz(L), v(L), u(L);
  double cross = dot(x, z);
  double kxx = nx * nx;
  double kzz = nz * nz;
  double scale = 1.0;  // (1+a^2)^l, for the normalizer
  for (std::size_t l = 0; l < L; ++l) {
    kxz[l] = cross;
    v[l] = std::sqrt(kxx * kzz);
    u[l] = clamp_cosine(cross / v[l]);
    cross += a2 * v[l] * kappa1(u[l]);
    // kappa1(1) = 1, so the diagonal grows by exactly (1 + a^2) per block.
    kxx += a2 * kxx;
    kzz += a2 * kzz;
    if (l + 1 < L) scale += a2 * scale;
  }
  double b = 1.0;
  double sum = 0.0;
  for (std::size_t l = L; l >= 1; --l) {
    const double k0 = kappa0(u[l - 1]);
    sum += b * (v[l - 1] * kappa1(u[l - 1]) + (kxz[l - 1] + tau2) * k0);
    b *= 1.0 + a2 * k0;
  }
  return sum / (2.0 * static_cast<double>(L) * scale);
}

double res_ntk_general(std::span<const double> x, std::span<const double> z, const ResNtkSpec& spec) {
  if (spec.tau > 0.0) return res_ntk_recursion(x, z, spec);
  const double u = cosine(x, z);
  return norm(x) * norm(z) * res_ntk_sphere(u, spec);
}

}  // namespace ntk
