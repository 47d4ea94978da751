#include "ntk/ntk.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ntk/asymptotics.hpp"
#include "ntk/dataset.hpp"
#include "ntk/error.hpp"
#include "ntk/io.hpp"
#include "ntk/kernel_primitives.hpp"
#include "ntk/parallel.hpp"
#include "ntk/regression.hpp"
#include "ntk/spectral.hpp"

struct ntk_kernel {
  ntk::Kernel k;
};
struct ntk_trace {
  ntk::LayerTrace t;
};
struct ntk_spectrum {
  ntk::Spectrum s;
};
struct ntk_convergence {
  ntk::ConvergenceReport r;
};
struct ntk_dataset {
  ntk::Dataset d;
};
struct ntk_sweep {
  std::vector<ntk::AccuracyRow> rows;
};

namespace {

thread_local std::string g_last_error;

ntk_status fail(ntk_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
ntk_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NTK_OK;
  } catch (const ntk::Error& e) {
    return fail(static_cast<ntk_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NTK_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NTK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NTK_ERR_INTERNAL, e.what());
  }
}

#define NTK_REQUIRE(ptr)                                                       \
  do {                                                                         \
    if (!(ptr)) return fail(NTK_ERR_INVALID_ARGUMENT, "null argument: " #ptr); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const std::vector<double>* trace_field(const ntk::LayerTrace& t, const char* field) {
  if (!field) return nullptr;
  const std::string f(field);
  if (f == "k") return &t.k;
  if (f == "u") return &t.u;
  if (f == "v") return &t.v;
  if (f == "b") return &t.b;
  if (f == "summand") return &t.summand;
  return nullptr;
}

const ntk::ResNtkSpec& residual_spec(const ntk_kernel* k) {
  const auto* s = std::get_if<ntk::ResNtkSpec>(&k->k.spec());
  if (!s) throw ntk::InvalidArgument("kernel is not a residual kernel");
  return *s;
}

}  // namespace

extern "C" {

const char* ntk_version(void) { return NTK_VERSION_STRING; }
const char* ntk_last_error(void) { return g_last_error.c_str(); }

const char* ntk_status_name(ntk_status status) {
  switch (status) {
    case NTK_OK: return "ok";
    case NTK_ERR_DOMAIN: return "domain";
    case NTK_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NTK_ERR_NUMERICAL: return "numerical";
    case NTK_ERR_IO: return "io";
    case NTK_ERR_PARSE: return "parse";
    case NTK_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void ntk_string_free(char* s) { std::free(s); }
int ntk_thread_count(void) { return ntk::thread_count(); }

double ntk_kappa0(double u) { return ntk::kappa0(u); }
double ntk_kappa1(double u) { return ntk::kappa1(u); }

ntk_status ntk_kernel_fcntk(int layers, ntk_kernel** out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_kernel{ntk::Kernel(ntk::FcNtkSpec{layers})}; });
}

ntk_status ntk_kernel_resntk(int layers, double alpha, double tau, ntk_kernel** out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_kernel{ntk::Kernel(ntk::ResNtkSpec{layers, alpha, tau, std::nullopt})}; });
}

ntk_status ntk_kernel_resntk_rule(int layers, const char* rule, double tau, ntk_kernel** out) {
  NTK_REQUIRE(rule);
  NTK_REQUIRE(out);
  return guard([&] {
    *out = new ntk_kernel{ntk::Kernel(ntk::ResNtkSpec::make(layers, ntk::AlphaRule::parse(rule), tau))};
  });
}

ntk_status ntk_kernel_laplace(double c, int homogenized, ntk_kernel** out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_kernel{ntk::Kernel(ntk::LaplaceSpec{c, homogenized != 0})}; });
}

ntk_status ntk_kernel_from_json(const char* json, ntk_kernel** out) {
  NTK_REQUIRE(json);
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_kernel{ntk::Kernel(ntk::kernel_spec_from_json(ntk::Json::parse(json)))}; });
}

void ntk_kernel_free(ntk_kernel* k) { delete k; }

ntk_family ntk_kernel_family(const ntk_kernel* k) { return static_cast<ntk_family>(static_cast<int>(k->k.family())); }

ntk_status ntk_kernel_to_json(const ntk_kernel* k, char** out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = dup_string(ntk::to_json(k->k.spec()).dump()); });
}

ntk_status ntk_kernel_describe(const ntk_kernel* k, char** out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = dup_string(k->k.describe()); });
}

ntk_status ntk_kernel_sphere(const ntk_kernel* k, double u, double* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = k->k.sphere(u); });
}

ntk_status ntk_kernel_sphere_many(const ntk_kernel* k, const double* u, size_t n, double* out) {
  NTK_REQUIRE(k);
  if (n > 0) {
    NTK_REQUIRE(u);
    NTK_REQUIRE(out);
  }
  return guard([&] {
    for (size_t i = 0; i < n; ++i) out[i] = k->k.sphere(u[i]);
  });
}

ntk_status ntk_kernel_general(const ntk_kernel* k, const double* x, const double* z, size_t dim, double* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(x);
  NTK_REQUIRE(z);
  NTK_REQUIRE(out);
  return guard([&] { *out = k->k.general({x, dim}, {z, dim}); });
}

ntk_status ntk_trace_compute(const ntk_kernel* k, double u, ntk_trace** out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_trace{ntk::res_ntk_trace(u, residual_spec(k))}; });
}

void ntk_trace_free(ntk_trace* t) { delete t; }

size_t ntk_trace_length(const ntk_trace* t, const char* field) {
  const auto* v = t ? trace_field(t->t, field) : nullptr;
  return v ? v->size() : 0;
}

ntk_status ntk_trace_get(const ntk_trace* t, const char* field, double* out, size_t capacity) {
  NTK_REQUIRE(t);
  NTK_REQUIRE(out);
  const auto* v = trace_field(t->t, field);
  if (!v) return fail(NTK_ERR_INVALID_ARGUMENT, std::string("unknown trace field '") + (field ? field : "") + "'");
  if (capacity < v->size()) return fail(NTK_ERR_INVALID_ARGUMENT, "output buffer too small");
  std::copy(v->begin(), v->end(), out);
  g_last_error.clear();
  return NTK_OK;
}

double ntk_trace_normalizer(const ntk_trace* t) { return t->t.normalizer; }
double ntk_trace_resum(const ntk_trace* t) { return t->t.resum(); }

ntk_status ntk_spectrum_compute(const ntk_kernel* k, int dim, int k_max, int quad_order, const char* rule,
                                ntk_spectrum** out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] {
    ntk::SpectrumOptions o;
    o.dim = dim;
    o.k_max = k_max;
    o.quad_order = quad_order;
    o.rule = rule ? ntk::parse_quad_rule(rule) : ntk::QuadRule::angular;
    *out = new ntk_spectrum{ntk::spectrum(k->k, o)};
  });
}

ntk_status ntk_spectrum_read_csv(const char* path, ntk_spectrum** out) {
  NTK_REQUIRE(path);
  NTK_REQUIRE(out);
  return guard([&] {
    std::ifstream in(path);
    if (!in) throw ntk::IoError(std::string("cannot open '") + path + "'");
    *out = new ntk_spectrum{ntk::read_spectrum_csv(in)};
  });
}

void ntk_spectrum_free(ntk_spectrum* s) { delete s; }
int ntk_spectrum_kmax(const ntk_spectrum* s) { return s->s.k_max; }
int ntk_spectrum_dim(const ntk_spectrum* s) { return s->s.dim; }

double ntk_spectrum_lambda(const ntk_spectrum* s, int k) {
  if (k < 0 || k > s->s.k_max) return 0.0;
  return s->s.lambda[static_cast<size_t>(k)];
}

uint64_t ntk_spectrum_multiplicity(const ntk_spectrum* s, int k) {
  if (k < 0 || k > s->s.k_max) return 0;
  return s->s.multiplicity[static_cast<size_t>(k)];
}

ntk_status ntk_spectrum_reconstruct(const ntk_spectrum* s, const double* u, size_t n, double* out) {
  NTK_REQUIRE(s);
  if (n > 0) {
    NTK_REQUIRE(u);
    NTK_REQUIRE(out);
  }
  return guard([&] {
    const auto v = ntk::reconstruct(s->s, {u, n});
    std::copy(v.begin(), v.end(), out);
  });
}

ntk_status ntk_spectrum_to_csv(const ntk_spectrum* s, char** out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  return guard([&] {
    std::ostringstream os;
    ntk::write_spectrum_csv(os, s->s);
    *out = dup_string(os.str());
  });
}

ntk_status ntk_spectrum_write_csv(const ntk_spectrum* s, const char* path) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(path);
  return guard([&] {
    std::ofstream f(path);
    if (!f) throw ntk::IoError(std::string("cannot write '") + path + "'");
    ntk::write_spectrum_csv(f, s->s);
    if (!f) throw ntk::IoError(std::string("write failed for '") + path + "'");
  });
}

ntk_status ntk_spectrum_metadata_json(const ntk_spectrum* s, char** out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  return guard([&] { *out = dup_string(ntk::spectrum_metadata(s->s).dump()); });
}

ntk_status ntk_spectrum_decay_fit(const ntk_spectrum* s, int k_lo, int k_hi, const char* parity, ntk_decay_fit* out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  return guard([&] {
    const auto f = ntk::decay_fit(s->s, k_lo, k_hi, parity ? ntk::parse_parity(parity) : ntk::Parity::both);
    *out = ntk_decay_fit{f.slope, f.intercept, f.r_squared, f.k_lo, f.k_hi, f.points};
  });
}

ntk_status ntk_spectrum_parity_gap(const ntk_spectrum* s, int k_lo, int k_hi, double* out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::parity_gap(s->s, k_lo, k_hi); });
}

ntk_status ntk_monte_carlo_spectrum(const ntk_kernel* k, int dim, int n_points, uint64_t seed, double* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] {
    const auto v = ntk::monte_carlo_spectrum(k->k, dim, n_points, seed);
    std::copy(v.begin(), v.end(), out);
  });
}

ntk_status ntk_group_by_frequency(const double* mc, size_t n, const ntk_spectrum* reference, int k_max, double* out) {
  NTK_REQUIRE(mc);
  NTK_REQUIRE(reference);
  NTK_REQUIRE(out);
  return guard([&] {
    const auto v = ntk::group_by_frequency({mc, n}, reference->s, k_max);
    std::copy(v.begin(), v.end(), out);
  });
}

uint64_t ntk_harmonic_count(int dim, int k) {
  try {
    return ntk::harmonic_count(dim, k);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return 0;
  }
}

namespace {
ntk::EdgeExpansion edge_of(const ntk_kernel* k, int endpoint, double t_lo, double t_hi, int n_t) {
  return ntk::extract_edge_coefficient(k->k, endpoint, t_lo > 0 ? t_lo : ntk::kEdgeTLo,
                                       t_hi > 0 ? t_hi : ntk::kEdgeTHi, n_t > 0 ? n_t : ntk::kEdgePoints);
}
}  // namespace

ntk_status ntk_edge_extract(const ntk_kernel* k, int endpoint, double t_lo, double t_hi, int n_t,
                            ntk_edge_expansion* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] {
    const auto e = edge_of(k, endpoint, t_lo, t_hi, n_t);
    *out = ntk_edge_expansion{e.endpoint, e.c_half, e.a0, e.a1, e.nu, e.residual, e.condition, e.accepted ? 1 : 0};
  });
}

ntk_status ntk_edge_extract_json(const ntk_kernel* k, int endpoint, double t_lo, double t_hi, int n_t, char** out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = dup_string(ntk::to_json(edge_of(k, endpoint, t_lo, t_hi, n_t)).dump()); });
}

ntk_status ntk_c1_closed_form(int layers, double alpha, double* out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::c1_closed_form(layers, alpha); });
}

ntk_status ntk_fc_c1_closed_form(int layers, double* out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::fc_c1_closed_form(layers); });
}

ntk_status ntk_cm1_bound(int layers, double alpha, double* out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::cm1_bound(layers, alpha); });
}

ntk_status ntk_cm1_vanishing_regime(int layers, double gamma, double* out) {
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::cm1_vanishing_regime(layers, gamma); });
}

ntk_status ntk_laplace_match(const ntk_kernel* k, double* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(out);
  return guard([&] { *out = ntk::laplace_match(k->k); });
}

double ntk_edge_default_tlo(void) { return ntk::kEdgeTLo; }
double ntk_edge_default_thi(void) { return ntk::kEdgeTHi; }
double ntk_vanishing_tlo(void) { return ntk::kVanishingTLo; }
double ntk_vanishing_thi(void) { return ntk::kVanishingTHi; }

ntk_status ntk_convergence_compute(double gamma, const int* depths, size_t n_depths, double delta, int n_u,
                                   ntk_convergence** out) {
  NTK_REQUIRE(out);
  if (n_depths > 0) NTK_REQUIRE(depths);
  return guard([&] {
    *out = new ntk_convergence{
        ntk::convergence_curve(gamma, std::vector<int>(depths, depths + n_depths), delta, n_u)};
  });
}

void ntk_convergence_free(ntk_convergence* c) { delete c; }
size_t ntk_convergence_count(const ntk_convergence* c) { return c->r.depths.size(); }
int ntk_convergence_depth(const ntk_convergence* c, size_t i) { return c->r.depths.at(i); }
double ntk_convergence_alpha(const ntk_convergence* c, size_t i) { return c->r.alphas.at(i); }
double ntk_convergence_sup_dev(const ntk_convergence* c, size_t i) { return c->r.sup_dev.at(i); }
double ntk_convergence_rate(const ntk_convergence* c) { return c->r.fitted_rate; }
double ntk_convergence_expected_rate(const ntk_convergence* c) { return c->r.expected_rate; }
double ntk_convergence_r_squared(const ntk_convergence* c) { return c->r.r_squared; }

ntk_status ntk_convergence_to_json(const ntk_convergence* c, char** out) {
  NTK_REQUIRE(c);
  NTK_REQUIRE(out);
  return guard([&] { *out = dup_string(ntk::to_json(c->r).dump()); });
}

ntk_status ntk_convergence_to_csv(const ntk_convergence* c, char** out) {
  NTK_REQUIRE(c);
  NTK_REQUIRE(out);
  return guard([&] {
    std::ostringstream os;
    ntk::write_convergence_csv(os, c->r);
    *out = dup_string(os.str());
  });
}

ntk_status ntk_dataset_load(const char* path, const char* label_column, ntk_dataset** out) {
  NTK_REQUIRE(path);
  NTK_REQUIRE(label_column);
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_dataset{ntk::load_dataset(path, label_column)}; });
}

ntk_status ntk_dataset_from_arrays(const double* x, size_t n, size_t dim, const int* labels, ntk_dataset** out) {
  NTK_REQUIRE(x);
  NTK_REQUIRE(labels);
  NTK_REQUIRE(out);
  return guard([&] {
    ntk::RowMatrix m = Eigen::Map<const ntk::RowMatrix>(x, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    *out = new ntk_dataset{ntk::make_dataset(std::move(m), std::vector<int>(labels, labels + n))};
  });
}

ntk_status ntk_dataset_normalize(const ntk_dataset* ds, const char* mode, ntk_dataset** out) {
  NTK_REQUIRE(ds);
  NTK_REQUIRE(mode);
  NTK_REQUIRE(out);
  return guard([&] { *out = new ntk_dataset{ntk::normalize(ds->d, ntk::parse_normalization(mode))}; });
}

void ntk_dataset_free(ntk_dataset* ds) { delete ds; }
size_t ntk_dataset_rows(const ntk_dataset* ds) { return static_cast<size_t>(ds->d.rows()); }
size_t ntk_dataset_dims(const ntk_dataset* ds) { return static_cast<size_t>(ds->d.dims()); }
int ntk_dataset_class_count(const ntk_dataset* ds) { return ds->d.class_count(); }

ntk_status ntk_dataset_features(const ntk_dataset* ds, double* out) {
  NTK_REQUIRE(ds);
  NTK_REQUIRE(out);
  std::copy(ds->d.features.data(), ds->d.features.data() + ds->d.features.size(), out);
  return NTK_OK;
}

ntk_status ntk_dataset_labels(const ntk_dataset* ds, int* out) {
  NTK_REQUIRE(ds);
  NTK_REQUIRE(out);
  std::copy(ds->d.labels.begin(), ds->d.labels.end(), out);
  return NTK_OK;
}

ntk_status ntk_gram(const ntk_kernel* k, const ntk_dataset* ds, double* out) {
  NTK_REQUIRE(k);
  NTK_REQUIRE(ds);
  NTK_REQUIRE(out);
  return guard([&] {
    const auto g = ntk::gram(k->k, ds->d.features);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, g.values.rows(),
                                                                                        g.values.cols()) = g.values;
  });
}

ntk_status ntk_krr_fit(const double* gram, size_t n, const int* labels, int class_count, double ridge,
                       double* coefficients, double* train_accuracy, double* condition) {
  NTK_REQUIRE(gram);
  NTK_REQUIRE(labels);
  NTK_REQUIRE(coefficients);
  return guard([&] {
    const auto ni = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd g = Eigen::Map<const ntk::RowMatrix>(gram, ni, ni);
    const auto fit = ntk::krr_fit(g, std::vector<int>(labels, labels + n), class_count, ridge);
    Eigen::Map<ntk::RowMatrix>(coefficients, ni, class_count) = fit.coefficients;
    if (train_accuracy) *train_accuracy = fit.train_accuracy;
    if (condition) *condition = fit.condition;
  });
}

ntk_status ntk_classify(const double* coefficients, size_t n, int class_count, const double* k_cross, size_t m,
                        int* out) {
  NTK_REQUIRE(coefficients);
  NTK_REQUIRE(k_cross);
  NTK_REQUIRE(out);
  return guard([&] {
    ntk::FitResult fit;
    fit.class_count = class_count;
    fit.coefficients = Eigen::Map<const ntk::RowMatrix>(coefficients, static_cast<Eigen::Index>(n), class_count);
    const Eigen::MatrixXd kc =
        Eigen::Map<const ntk::RowMatrix>(k_cross, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    const auto ids = ntk::classify(fit, kc);
    std::copy(ids.begin(), ids.end(), out);
  });
}

void ntk_sweep_params_default(ntk_sweep_params* p) {
  if (!p) return;
  *p = ntk_sweep_params{"fcntk", 0, 1.0, nullptr, 0.0, 1.0, 1e-3, 4, 0.25, 0};
}

ntk_status ntk_sweep_run(const ntk_dataset* ds, const ntk_sweep_params* params, const int* depths, size_t n_depths,
                         ntk_sweep** out) {
  NTK_REQUIRE(ds);
  NTK_REQUIRE(params);
  NTK_REQUIRE(out);
  if (n_depths > 0) NTK_REQUIRE(depths);
  return guard([&] {
    ntk::SweepConfig cfg;
    cfg.kernel.family = ntk::parse_family(params->family ? params->family : "");
    if (cfg.kernel.family == ntk::KernelFamily::resntk) {
      if (params->has_alpha)
        cfg.kernel.alpha = params->alpha;
      else if (params->alpha_rule)
        cfg.kernel.alpha_rule = ntk::AlphaRule::parse(params->alpha_rule);
      else
        throw ntk::InvalidArgument("resntk sweep needs alpha or alpha_rule");
    }
    cfg.kernel.tau = params->tau;
    cfg.kernel.c = params->c;
    cfg.depths.assign(depths, depths + n_depths);
    cfg.ridge = params->ridge;
    cfg.folds = params->folds;
    cfg.test_fraction = params->test_fraction;
    cfg.seed = params->seed;
    *out = new ntk_sweep{ntk::depth_sweep(ds->d, cfg)};
  });
}

void ntk_sweep_free(ntk_sweep* s) { delete s; }
size_t ntk_sweep_rows(const ntk_sweep* s) { return s->rows.size(); }

ntk_status ntk_sweep_row(const ntk_sweep* s, size_t i, ntk_accuracy_row* out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  if (i >= s->rows.size()) return fail(NTK_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = s->rows[i];
  *out = ntk_accuracy_row{r.depth, r.alpha ? 1 : 0, r.alpha.value_or(0.0), r.ridge, r.train_acc, r.test_acc,
                          r.ok ? 1 : 0};
  return NTK_OK;
}

const char* ntk_sweep_message(const ntk_sweep* s, size_t i) {
  if (!s || i >= s->rows.size()) return "";
  return s->rows[i].message.c_str();
}

ntk_status ntk_sweep_to_csv(const ntk_sweep* s, char** out) {
  NTK_REQUIRE(s);
  NTK_REQUIRE(out);
  return guard([&] {
    std::ostringstream os;
    ntk::write_accuracy_csv(os, s->rows);
    *out = dup_string(os.str());
  });
}

}  // extern "C"
