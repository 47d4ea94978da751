// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ntk/asymptotics.hpp"
#include "ntk/dataset.hpp"
#include "ntk/fc_ntk.hpp"
#include "ntk/kernel.hpp"
#include "ntk/regression.hpp"
#include "ntk/res_ntk.hpp"
#include "ntk/spectral.hpp"

using namespace ntk;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < budget_s, fmt("runtime %.2f s over budget %.0f s", secs, budget_s));
  if (!o.pass) ++failures;
  std::printf("%s #%d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

Kernel res(int L, double alpha, double tau = 0.0) { return Kernel(ResNtkSpec{L, alpha, tau, std::nullopt}); }
Kernel fc(int L) { return Kernel(FcNtkSpec{L}); }

}  // namespace

int main() {
  criterion(1, "one-block ResNTK equals one-layer FC-NTK", 1.0, [](Outcome& o) {
    for (double a : {0.1, 1.0, 10.0}) {
      const Kernel r = res(1, a), f = fc(1);
      double worst = 0.0;
      for (int i = 0; i <= 1000; ++i) {
        const double u = -1.0 + 2.0 * i / 1000;
        worst = std::max(worst, std::fabs(r.sphere(u) - f.sphere(u)));
      }
      o.require(worst < 1e-14, fmt("alpha=%g: %.3g", a, worst));
      o.note(fmt("alpha=%g max %.2g", a, worst));
    }
  });

  criterion(2, "degree-1 homogeneity on R^d", 1.0, [](Outcome& o) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> S(0.1, 10.0), A(0.05, 2.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int d = 2 + static_cast<int>(rng() % 8);
      const int L = 1 + static_cast<int>(rng() % 30);
      const ResNtkSpec spec{L, A(rng), 0.0, std::nullopt};
      std::vector<double> x(d), z(d), ax(d), bz(d);
      const double a = S(rng), b = S(rng);
      for (int i = 0; i < d; ++i) {
        x[i] = N(rng);
        z[i] = N(rng);
        ax[i] = a * x[i];
        bz[i] = b * z[i];
      }
      // the layer recursion on R^d, not the sphere shortcut
      const double base = res_ntk_recursion(x, z, spec);
      const double scaled = res_ntk_recursion(ax, bz, spec);
      worst = std::max(worst, std::fabs(scaled - a * b * base) / (a * b * std::fabs(base)));
    }
    o.require(worst < 1e-10, fmt("max rel %.3g", worst));
    o.note(fmt("max rel dev %.2g over 100 draws", worst));
  });

  criterion(3, "sqrt(t) coefficient at +1", 10.0, [](Outcome& o) {
    double worst = 0.0;
    for (int L : {2, 5, 20, 100})
      for (double a : {1.0, 1.0 / std::sqrt(L), 1.0 / L}) {
        const double c = extract_edge_coefficient(res(L, a), 1).c_half;
        const double ref = -(1 + a * a * L) / (std::sqrt(2.0) * kPi * (1 + a * a));
        const double dev = std::fabs(c / ref - 1);
        worst = std::max(worst, dev);
        o.require(dev < 0.02, fmt("ResNTK L=%g alpha=%g: %.4g vs %.4g", L, a, c, ref));
      }
    for (int L : {1, 3, 5, 20}) {
      const double c = extract_edge_coefficient(fc(L), 1).c_half;
      const double ref = -L / (std::sqrt(2.0) * kPi);
      const double dev = std::fabs(c / ref - 1);
      worst = std::max(worst, dev);
      o.require(dev < 0.02, fmt("FC-NTK L=%g: %.4g vs %.4g", L, c, ref));
    }
    o.note(fmt("max rel dev %.2g over 16 cases", worst));
  });

  criterion(4, "sqrt(t) coefficient at -1", 60.0, [](Outcome& o) {
    for (int L : {2, 10, 50})
      for (double a : {1.0, 1.0 / std::sqrt(L)}) {
        const double c = extract_edge_coefficient(res(L, a), -1).c_half;
        const double bound = 1.0 / (std::sqrt(2.0) * kPi * (1 + a * a) * L);
        const double ratio = std::fabs(c) / bound;
        o.require(ratio <= 1.05, fmt("L=%g alpha=%.4g: |c|=%.5g, %.4gx the bound", L, a, std::fabs(c), ratio));
        if (ratio <= 1.05) o.note(fmt("L=%g alpha=%.3g ratio %.3f", L, a, ratio));
      }
    const int L = 10000;
    const auto e = extract_edge_coefficient(res(L, 1.0 / L), -1, kVanishingTLo, kVanishingTHi);
    const double ref = -1.0 / (std::sqrt(2.0) * kPi);
    const double dev = std::fabs(e.c_half / ref - 1);
    o.require(dev < 0.05, fmt("L=1e4 alpha=1/L: %.5g vs %.5g", e.c_half, ref));
    o.note(fmt("L=1e4 alpha=1/L %.5g vs %.5g (%.2g)", e.c_half, ref, dev));
  });

  criterion(5, "even-frequency decay k^-3 on S^2", 120.0, [](Outcome& o) {
    struct Case {
      std::string name;
      Kernel k;
    };
    std::vector<Case> cases;
    for (int L : {2, 3, 5}) cases.push_back({"fc" + std::to_string(L), fc(L)});
    for (int L : {5, 20}) cases.push_back({"res" + std::to_string(L), res(L, 1.0 / std::sqrt(L))});
    for (double c : {0.5, 1.0, 2.0}) cases.push_back({fmt("lap%g", c), Kernel(LaplaceSpec{c, false})});
    SpectrumOptions opt;
    opt.dim = 3;
    opt.k_max = 50;
    opt.quad_order = 4096;
    for (const auto& c : cases) {
      const double slope = decay_fit(spectrum(c.k, opt), 10, 40, Parity::even).slope;
      o.require(slope >= -3.3 && slope <= -2.7, c.name + fmt(" slope %.4g", slope));
      o.note(c.name + fmt(" %.3f", slope));
    }
  });

  criterion(6, "odd-frequency collapse at L = 100", 120.0, [](Outcome& o) {
    SpectrumOptions opt;
    const int L = 100;
    const double g_inv = parity_gap(spectrum(res(L, 1.0 / L), opt));
    const double g_sqrt = parity_gap(spectrum(res(L, 1.0 / std::sqrt(L)), opt));
    const double g_bias = parity_gap(spectrum(res(L, 1.0 / L, 1.0), opt));
    o.require(10 * g_inv <= g_sqrt, fmt("gap %.4g vs %.4g", g_inv, g_sqrt));
    o.require(g_bias >= 0.1 && g_bias <= 10, fmt("tau=1 gap %.4g", g_bias));
    o.note(fmt("gap 1/L %.4f, 1/sqrt(L) %.4f (%.1fx), tau=1 %.4f", g_inv, g_sqrt, g_sqrt / g_inv, g_bias));
  });

  criterion(7, "depth convergence rate 1 - 2 gamma", 60.0, [](Outcome& o) {
    for (double gamma : {0.75, 1.0}) {
      const auto r = convergence_curve(gamma, {16, 32, 64, 128, 256, 512});
      const double expected = 1 - 2 * gamma;
      o.require(std::fabs(r.fitted_rate - expected) <= 0.15, fmt("gamma=%g rate %.4g", gamma, r.fitted_rate));
      o.note(fmt("gamma=%g rate %.4f (expected %g, R2 %.4f)", gamma, r.fitted_rate, expected, r.r_squared));
    }
  });

  criterion(8, "spikiness with depth", 5.0, [](Outcome& o) {
    const double f0 = fc(100).sphere(0.0);
    o.require(std::fabs(f0 - 0.25) < 0.05, fmt("FC-NTK L=100 at 0: %.5g", f0));
    const Kernel r5 = res(5, 1.0 / 5), r100 = res(100, 1.0 / 100);
    double sup = 0.0;
    for (int i = 0; i <= 1800; ++i) {
      const double u = -0.9 + 1.8 * i / 1800;
      sup = std::max(sup, std::fabs(r5.sphere(u) - r100.sphere(u)));
    }
    o.require(sup < 0.05, fmt("alpha=1/L sup diff %.4g", sup));
    const double drop = res(5, 1.0).sphere(0.5) - res(100, 1.0).sphere(0.5);
    o.require(drop > 0.1, fmt("alpha=1 drop %.4g", drop));
    o.note(fmt("FC(0)=%.4f, alpha=1/L sup diff %.4f, alpha=1 drop at 0.5 %.4f", f0, sup, drop));
  });

  criterion(9, "quadrature versus Monte-Carlo Gram spectrum", 60.0, [](Outcome& o) {
    const Kernel k = fc(2);
    SpectrumOptions opt;
    opt.k_max = 10;
    const auto s = spectrum(k, opt);
    const auto mc = monte_carlo_spectrum(k, 3, 2000, 0);
    const auto blocks = group_by_frequency(mc, s, 5);
    double worst = 0.0;
    for (int kk = 0; kk <= 5; ++kk) {
      o.require(s.multiplicity[kk] == static_cast<std::uint64_t>(2 * kk + 1), fmt("multiplicity at k=%g", kk));
      if (s.lambda[kk] == 0.0) {
        o.require(std::fabs(blocks[kk]) < 1e-3 * s.lambda[0], fmt("k=%g zero eigenvalue: mc %.3g", kk, blocks[kk]));
        continue;
      }
      const double dev = std::fabs(blocks[kk] / s.lambda[kk] - 1);
      worst = std::max(worst, dev);
      o.require(dev < 0.10, fmt("k=%g: mc %.4g vs %.4g", kk, blocks[kk], s.lambda[kk]));
    }
    o.note(fmt("max rel dev %.3f over k<=5, n=2000", worst));
  });

  criterion(10, "regression: interpolation and depth trend", 300.0, [](Outcome& o) {
    {
      std::mt19937_64 rng(10);
      std::normal_distribution<double> N;
      RowMatrix x(150, 6);
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = N(rng);
      std::vector<int> y;
      for (Eigen::Index i = 0; i < x.rows(); ++i) y.push_back(static_cast<int>(rng() % 3));
      const Kernel k = res(3, 0.5);
      const auto g = gram(k, x);
      const auto fit = krr_fit(g, y, 3, 0.0);
      const Eigen::MatrixXd Y = one_hot(y, 3);
      const double resid = (g.values * fit.coefficients - Y).norm() / Y.norm();
      o.require(resid < 1e-8, fmt("interpolation residual %.3g", resid));
      o.require(fit.train_accuracy == 1.0, "interpolant reproduces training labels");
      o.note(fmt("lambda=0 residual %.2g (cond %.2g)", resid, fit.condition));
    }
    const Dataset ds = normalize(normalize(load_dataset(NTK_DATA_DIR "/breast_cancer.csv", "diagnosis"),
                                           Normalization::standardize),
                                 Normalization::unit_norm);
    o.require(ds.rows() <= 1000, "n <= 1000");
    auto sweep = [&](KernelTemplate t) {
      SweepConfig cfg;
      cfg.kernel = t;
      cfg.depths = {5, 25, 50, 100};
      std::vector<double> acc;
      for (const auto& r : depth_sweep(ds, cfg)) {
        o.require(r.ok, "depth " + std::to_string(r.depth) + ": " + r.message);
        acc.push_back(r.test_acc);
      }
      return acc;
    };
    KernelTemplate t_fc;
    const auto a_fc = sweep(t_fc);
    o.require(a_fc[3] < a_fc[0], fmt("FC-NTK acc(100) %.4f vs acc(5) %.4f", a_fc[3], a_fc[0]));
    o.note(fmt("FC acc 5/25/50/100 = %.4f %.4f %.4f %.4f", a_fc[0], a_fc[1], a_fc[2], a_fc[3]));
    for (const auto& [name, rule] : {std::pair{"1/L", AlphaRule::inv_L()}, std::pair{"1/sqrt(L)", AlphaRule::inv_sqrt_L()}}) {
      KernelTemplate t;
      t.family = KernelFamily::resntk;
      t.alpha_rule = rule;
      const auto a = sweep(t);
      const double spread = *std::max_element(a.begin(), a.end()) - *std::min_element(a.begin(), a.end());
      o.require(spread < 0.03, std::string("ResNTK alpha=") + name + fmt(" spread %.4f", spread));
      o.note(std::string("ResNTK alpha=") + name + fmt(" spread %.2f points", 100 * spread));
    }
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
