#include "ntk/kernel.hpp"

#include <cmath>
#include <sstream>

#include "ntk/error.hpp"
#include "ntk/kernel_primitives.hpp"

namespace ntk {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

void LaplaceSpec::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("Laplace scale c must be positive");
}

KernelFamily family_of(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const FcNtkSpec&) { return KernelFamily::fcntk; },
                        [](const ResNtkSpec&) { return KernelFamily::resntk; },
                        [](const LaplaceSpec& s) {
                          return s.homogenized ? KernelFamily::homlaplace : KernelFamily::laplace;
                        },
                    },
                    spec);
}

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::fcntk: return "fcntk";
    case KernelFamily::resntk: return "resntk";
    case KernelFamily::laplace: return "laplace";
    case KernelFamily::homlaplace: return "homlaplace";
  }
  return "unknown";
}

KernelFamily parse_family(const std::string& name) {
  if (name == "fcntk") return KernelFamily::fcntk;
  if (name == "resntk") return KernelFamily::resntk;
  if (name == "laplace") return KernelFamily::laplace;
  if (name == "homlaplace") return KernelFamily::homlaplace;
  throw InvalidArgument("unknown kernel family '" + name + "'");
}

Kernel::Kernel(KernelSpec spec) : spec_(std::move(spec)) {
  std::visit([](const auto& s) { s.validate(); }, spec_);
}

double Kernel::sphere(double u) const {
  return std::visit(overloaded{
                        [u](const FcNtkSpec& s) { return fc_ntk_sphere(u, s); },
                        [u](const ResNtkSpec& s) { return res_ntk_sphere(u, s); },
                        [u](const LaplaceSpec& s) { return laplace_sphere(u, s.c); },
                    },
                    spec_);
}

double Kernel::general(std::span<const double> x, std::span<const double> z) const {
  return std::visit(overloaded{
                        [&](const FcNtkSpec& s) { return fc_ntk_general(x, z, s); },
                        [&](const ResNtkSpec& s) { return res_ntk_general(x, z, s); },
                        [&](const LaplaceSpec& s) {
                          if (s.homogenized) return homogenized_laplace(x, z, s.c);
                          if (x.size() != z.size()) throw InvalidArgument("vector dimensions differ");
                          double d2 = 0.0;
                          for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - z[i]) * (x[i] - z[i]);
                          return std::exp(-s.c * std::sqrt(d2));
                        },
                    },
                    spec_);
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const FcNtkSpec& s) { os << "fcntk(L=" << s.layers << ")"; },
                 [&](const ResNtkSpec& s) {
                   os << "resntk(L=" << s.layers << ", alpha=" << s.alpha << ", tau=" << s.tau;
                   if (s.alpha_rule) os << ", rule=" << s.alpha_rule->to_string();
                   os << ")";
                 },
                 [&](const LaplaceSpec& s) { os << (s.homogenized ? "homlaplace" : "laplace") << "(c=" << s.c << ")"; },
             },
             spec_);
  return os.str();
}

}  // namespace ntk
