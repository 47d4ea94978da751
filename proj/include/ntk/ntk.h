/* C interface to the ntk library. All functions returning ntk_status leave a message
 * retrievable through ntk_last_error() (per thread) when they fail. Handles are opaque and
 * must be released with the matching *_free function; strings returned through char**
 * are released with ntk_string_free. */
#ifndef NTK_NTK_H
#define NTK_NTK_H

#include <stddef.h>
#include <stdint.h>

#if defined(NTK_BUILDING_LIBRARY)
#define NTK_API __attribute__((visibility("default")))
#else
#define NTK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ntk_status {
  NTK_OK = 0,
  NTK_ERR_DOMAIN = 1,
  NTK_ERR_INVALID_ARGUMENT = 2,
  NTK_ERR_NUMERICAL = 3,
  NTK_ERR_IO = 4,
  NTK_ERR_PARSE = 5,
  NTK_ERR_INTERNAL = 99
} ntk_status;

typedef enum ntk_family { NTK_FCNTK = 0, NTK_RESNTK = 1, NTK_LAPLACE = 2, NTK_HOMLAPLACE = 3 } ntk_family;

typedef struct ntk_kernel ntk_kernel;
typedef struct ntk_trace ntk_trace;
typedef struct ntk_spectrum ntk_spectrum;
typedef struct ntk_convergence ntk_convergence;
typedef struct ntk_dataset ntk_dataset;
typedef struct ntk_sweep ntk_sweep;

NTK_API const char* ntk_version(void);
NTK_API const char* ntk_last_error(void);
NTK_API const char* ntk_status_name(ntk_status status);
NTK_API void ntk_string_free(char* s);
NTK_API int ntk_thread_count(void);

/* ---- primitives ---- */
NTK_API double ntk_kappa0(double u);
NTK_API double ntk_kappa1(double u);

/* ---- kernels ---- */
NTK_API ntk_status ntk_kernel_fcntk(int layers, ntk_kernel** out);
NTK_API ntk_status ntk_kernel_resntk(int layers, double alpha, double tau, ntk_kernel** out);
/* rule: "inv_L", "inv_sqrt_L" or "pow:<gamma>" */
NTK_API ntk_status ntk_kernel_resntk_rule(int layers, const char* rule, double tau, ntk_kernel** out);
NTK_API ntk_status ntk_kernel_laplace(double c, int homogenized, ntk_kernel** out);
NTK_API ntk_status ntk_kernel_from_json(const char* json, ntk_kernel** out);
NTK_API void ntk_kernel_free(ntk_kernel* k);

NTK_API ntk_family ntk_kernel_family(const ntk_kernel* k);
NTK_API ntk_status ntk_kernel_to_json(const ntk_kernel* k, char** out);
NTK_API ntk_status ntk_kernel_describe(const ntk_kernel* k, char** out);
NTK_API ntk_status ntk_kernel_sphere(const ntk_kernel* k, double u, double* out);
NTK_API ntk_status ntk_kernel_sphere_many(const ntk_kernel* k, const double* u, size_t n, double* out);
NTK_API ntk_status ntk_kernel_general(const ntk_kernel* k, const double* x, const double* z, size_t dim, double* out);

/* Per-layer recursion state of a residual kernel at u (on the sphere).
 * field: "k", "u", "v" (length L+1), "b" (B_2..B_{L+1}, length L), "summand" (length L). */
NTK_API ntk_status ntk_trace_compute(const ntk_kernel* k, double u, ntk_trace** out);
NTK_API void ntk_trace_free(ntk_trace* t);
NTK_API size_t ntk_trace_length(const ntk_trace* t, const char* field);
NTK_API ntk_status ntk_trace_get(const ntk_trace* t, const char* field, double* out, size_t capacity);
NTK_API double ntk_trace_normalizer(const ntk_trace* t);
NTK_API double ntk_trace_resum(const ntk_trace* t);

/* ---- spectra ---- */
/* rule: "angular" (default when NULL) or "jacobi" */
NTK_API ntk_status ntk_spectrum_compute(const ntk_kernel* k, int dim, int k_max, int quad_order, const char* rule,
                                        ntk_spectrum** out);
NTK_API ntk_status ntk_spectrum_read_csv(const char* path, ntk_spectrum** out);
NTK_API void ntk_spectrum_free(ntk_spectrum* s);
NTK_API int ntk_spectrum_kmax(const ntk_spectrum* s);
NTK_API int ntk_spectrum_dim(const ntk_spectrum* s);
NTK_API double ntk_spectrum_lambda(const ntk_spectrum* s, int k);
NTK_API uint64_t ntk_spectrum_multiplicity(const ntk_spectrum* s, int k);
NTK_API ntk_status ntk_spectrum_reconstruct(const ntk_spectrum* s, const double* u, size_t n, double* out);
NTK_API ntk_status ntk_spectrum_to_csv(const ntk_spectrum* s, char** out);
NTK_API ntk_status ntk_spectrum_write_csv(const ntk_spectrum* s, const char* path);
NTK_API ntk_status ntk_spectrum_metadata_json(const ntk_spectrum* s, char** out);

typedef struct ntk_decay_fit {
  double slope;
  double intercept;
  double r_squared;
  int k_lo;
  int k_hi;
  int points;
} ntk_decay_fit;

/* parity: "even", "odd" or "both" */
NTK_API ntk_status ntk_spectrum_decay_fit(const ntk_spectrum* s, int k_lo, int k_hi, const char* parity,
                                          ntk_decay_fit* out);
NTK_API ntk_status ntk_spectrum_parity_gap(const ntk_spectrum* s, int k_lo, int k_hi, double* out);

/* Gram eigenvalues / n on n_points seeded sphere samples, descending; out has n_points slots. */
NTK_API ntk_status ntk_monte_carlo_spectrum(const ntk_kernel* k, int dim, int n_points, uint64_t seed, double* out);
/* Block means of sorted Monte-Carlo eigenvalues per frequency 0..k_max; out has k_max+1 slots. */
NTK_API ntk_status ntk_group_by_frequency(const double* mc, size_t n, const ntk_spectrum* reference, int k_max,
                                          double* out);
NTK_API uint64_t ntk_harmonic_count(int dim, int k);

/* ---- edge expansions ---- */
typedef struct ntk_edge_expansion {
  int endpoint;
  double c_half;
  double a0;
  double a1;
  double nu;
  double residual;
  double condition;
  int accepted;
} ntk_edge_expansion;

/* t_lo/t_hi/n_t <= 0 select the defaults. */
NTK_API ntk_status ntk_edge_extract(const ntk_kernel* k, int endpoint, double t_lo, double t_hi, int n_t,
                                    ntk_edge_expansion* out);
NTK_API ntk_status ntk_edge_extract_json(const ntk_kernel* k, int endpoint, double t_lo, double t_hi, int n_t,
                                         char** out);
NTK_API ntk_status ntk_c1_closed_form(int layers, double alpha, double* out);
NTK_API ntk_status ntk_fc_c1_closed_form(int layers, double* out);
NTK_API ntk_status ntk_cm1_bound(int layers, double alpha, double* out);
NTK_API ntk_status ntk_cm1_vanishing_regime(int layers, double gamma, double* out);
NTK_API ntk_status ntk_laplace_match(const ntk_kernel* k, double* out);
NTK_API double ntk_edge_default_tlo(void);
NTK_API double ntk_edge_default_thi(void);
NTK_API double ntk_vanishing_tlo(void);
NTK_API double ntk_vanishing_thi(void);

/* ---- depth convergence ---- */
NTK_API ntk_status ntk_convergence_compute(double gamma, const int* depths, size_t n_depths, double delta, int n_u,
                                           ntk_convergence** out);
NTK_API void ntk_convergence_free(ntk_convergence* c);
NTK_API size_t ntk_convergence_count(const ntk_convergence* c);
NTK_API int ntk_convergence_depth(const ntk_convergence* c, size_t i);
NTK_API double ntk_convergence_alpha(const ntk_convergence* c, size_t i);
NTK_API double ntk_convergence_sup_dev(const ntk_convergence* c, size_t i);
NTK_API double ntk_convergence_rate(const ntk_convergence* c);
NTK_API double ntk_convergence_expected_rate(const ntk_convergence* c);
NTK_API double ntk_convergence_r_squared(const ntk_convergence* c);
NTK_API ntk_status ntk_convergence_to_json(const ntk_convergence* c, char** out);
NTK_API ntk_status ntk_convergence_to_csv(const ntk_convergence* c, char** out);

/* ---- datasets and regression ---- */
NTK_API ntk_status ntk_dataset_load(const char* path, const char* label_column, ntk_dataset** out);
/* x is row-major n x dim; labels in [0, C). */
NTK_API ntk_status ntk_dataset_from_arrays(const double* x, size_t n, size_t dim, const int* labels, ntk_dataset** out);
/* mode: "none", "unit_norm" or "standardize"; returns a new dataset. */
NTK_API ntk_status ntk_dataset_normalize(const ntk_dataset* ds, const char* mode, ntk_dataset** out);
NTK_API void ntk_dataset_free(ntk_dataset* ds);
NTK_API size_t ntk_dataset_rows(const ntk_dataset* ds);
NTK_API size_t ntk_dataset_dims(const ntk_dataset* ds);
NTK_API int ntk_dataset_class_count(const ntk_dataset* ds);
NTK_API ntk_status ntk_dataset_features(const ntk_dataset* ds, double* out);
NTK_API ntk_status ntk_dataset_labels(const ntk_dataset* ds, int* out);

/* Full n x n Gram matrix (row-major) of the kernel on the dataset rows. */
NTK_API ntk_status ntk_gram(const ntk_kernel* k, const ntk_dataset* ds, double* out);
/* Solves (G + ridge I) A = Y for one-hot Y; coefficients is n x C row-major. */
NTK_API ntk_status ntk_krr_fit(const double* gram, size_t n, const int* labels, int class_count, double ridge,
                               double* coefficients, double* train_accuracy, double* condition);
/* k_cross is m x n row-major, coefficients n x C; writes m class ids. */
NTK_API ntk_status ntk_classify(const double* coefficients, size_t n, int class_count, const double* k_cross,
                                size_t m, int* out);

typedef struct ntk_sweep_params {
  const char* family;     /* "fcntk", "resntk", "laplace", "homlaplace" */
  int has_alpha;          /* resntk: 1 = constant alpha, 0 = alpha_rule */
  double alpha;
  const char* alpha_rule; /* used when has_alpha == 0 for resntk */
  double tau;
  double c;               /* laplace families */
  double ridge;
  int folds;              /* >= 2 stratified k-fold, 1 single holdout */
  double test_fraction;   /* folds == 1 only */
  uint64_t seed;
} ntk_sweep_params;

NTK_API void ntk_sweep_params_default(ntk_sweep_params* p);

typedef struct ntk_accuracy_row {
  int depth;
  int has_alpha;
  double alpha;
  double ridge;
  double train_acc;
  double test_acc;
  int ok;
} ntk_accuracy_row;

NTK_API ntk_status ntk_sweep_run(const ntk_dataset* ds, const ntk_sweep_params* params, const int* depths,
                                 size_t n_depths, ntk_sweep** out);
NTK_API void ntk_sweep_free(ntk_sweep* s);
NTK_API size_t ntk_sweep_rows(const ntk_sweep* s);
NTK_API ntk_status ntk_sweep_row(const ntk_sweep* s, size_t i, ntk_accuracy_row* out);
NTK_API const char* ntk_sweep_message(const ntk_sweep* s, size_t i);
NTK_API ntk_status ntk_sweep_to_csv(const ntk_sweep* s, char** out);

#ifdef __cplusplus
}
#endif

#endif
