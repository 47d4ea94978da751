// ntk: command-line front end over the C API.
//
// Exit codes: 0 success, 1 runtime failure (JSON error list on stderr), 2 usage error.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ntk/ntk.h"
#include "svg.hpp"

using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failed library call: stage names which step of the command failed.
struct RunFailure : std::runtime_error {
  RunFailure(std::string stage_, ntk_status status_, const std::string& msg)
      : std::runtime_error(msg), stage(std::move(stage_)), status(status_) {}
  std::string stage;
  ntk_status status;
};

void check(ntk_status s, const std::string& stage) {
  if (s != NTK_OK) throw RunFailure(stage, s, ntk_last_error());
}

template <class T, void (*F)(T*)>
struct Deleter {
  void operator()(T* p) const { F(p); }
};
using KernelPtr = std::unique_ptr<ntk_kernel, Deleter<ntk_kernel, ntk_kernel_free>>;
using SpectrumPtr = std::unique_ptr<ntk_spectrum, Deleter<ntk_spectrum, ntk_spectrum_free>>;
using ConvergencePtr = std::unique_ptr<ntk_convergence, Deleter<ntk_convergence, ntk_convergence_free>>;
using DatasetPtr = std::unique_ptr<ntk_dataset, Deleter<ntk_dataset, ntk_dataset_free>>;
using SweepPtr = std::unique_ptr<ntk_sweep, Deleter<ntk_sweep, ntk_sweep_free>>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  ntk_string_free(s);
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- kernel flags --------------------------------------------------------

struct KernelFlags {
  std::string kernel;
  int layers = 1;
  double alpha = 1.0;
  std::string alpha_rule;
  double tau = 0.0;
  double c = 1.0;
  CLI::Option* layers_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* rule_opt = nullptr;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* c_opt = nullptr;

  bool residual() const { return kernel == "resntk"; }
  bool laplace() const { return kernel == "laplace" || kernel == "homlaplace"; }
};

void add_kernel_flags(CLI::App* app, KernelFlags& f, bool with_layers = true) {
  app->add_option("--kernel", f.kernel, "Kernel family")
      ->required()
      ->check(CLI::IsMember({"fcntk", "resntk", "laplace", "homlaplace"}));
  if (with_layers) f.layers_opt = app->add_option("--layers", f.layers, "Depth L (fcntk, resntk)")->check(CLI::PositiveNumber);
  f.alpha_opt = app->add_option("--alpha", f.alpha, "Constant residual weight alpha (resntk)");
  f.rule_opt = app->add_option("--alpha-rule", f.alpha_rule, "Depth rule for alpha: inv_L, inv_sqrt_L or pow:<gamma>");
  f.alpha_opt->excludes(f.rule_opt);
  f.tau_opt = app->add_option("--tau", f.tau, "Bias scale tau (resntk)");
  f.c_opt = app->add_option("--c", f.c, "Laplace scale c (laplace, homlaplace)");
}

// Flags that do not belong to the selected family are a usage error rather than ignored.
void validate_kernel_flags(const KernelFlags& f) {
  const bool has_alpha = f.alpha_opt->count() > 0, has_rule = f.rule_opt->count() > 0;
  if (f.residual()) {
    if (!has_alpha && !has_rule) throw UsageError("resntk needs --alpha or --alpha-rule");
  } else if (has_alpha || has_rule || f.tau_opt->count()) {
    throw UsageError("--alpha, --alpha-rule and --tau apply only to --kernel resntk");
  }
  if (f.laplace()) {
    if (f.layers_opt && f.layers_opt->count()) throw UsageError("--layers does not apply to --kernel " + f.kernel);
  } else if (f.c_opt->count()) {
    throw UsageError("--c applies only to the laplace kernels");
  }
}

KernelPtr build_kernel(const KernelFlags& f, int layers) {
  ntk_kernel* k = nullptr;
  ntk_status s = NTK_OK;
  if (f.kernel == "fcntk")
    s = ntk_kernel_fcntk(layers, &k);
  else if (f.kernel == "resntk")
    s = f.rule_opt->count() ? ntk_kernel_resntk_rule(layers, f.alpha_rule.c_str(), f.tau, &k)
                            : ntk_kernel_resntk(layers, f.alpha, f.tau, &k);
  else
    s = ntk_kernel_laplace(f.c, f.kernel == "homlaplace" ? 1 : 0, &k);
  if (s == NTK_ERR_INVALID_ARGUMENT || s == NTK_ERR_PARSE) throw UsageError(ntk_last_error());
  check(s, "kernel");
  return KernelPtr(k);
}

json kernel_json(const ntk_kernel* k) {
  char* s = nullptr;
  check(ntk_kernel_to_json(k, &s), "kernel");
  return json::parse(take_string(s));
}

// ---- run bookkeeping -----------------------------------------------------

struct Run {
  std::string command;
  std::vector<std::string> argv;
  std::string manifest_path;
  json parameters = json::object();
  json outputs = json::object();
  json summary = json::object();
  json kernel = nullptr;
  std::optional<std::uint64_t> seed;
  json errors = json::array();

  void error(const std::string& stage, const std::string& status, const std::string& message) {
    errors.push_back(json{{"stage", stage}, {"status", status}, {"message", message}});
  }

  // Writes the text to a file, or stdout for "-"; records it under `key`.
  void emit(const std::string& key, const std::string& path, const std::string& text) {
    if (path == "-") {
      std::cout << text;
      std::cout.flush();
      outputs[key] = "-";
      return;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.close();
    if (!f) {
      error(key, "io", "cannot write '" + path + "'");
      return;
    }
    outputs[key] = path;
  }

  void plot(const std::string& path, const std::vector<ntk_cli::Series>& series, const ntk_cli::PlotOptions& opt) {
    if (path.empty()) return;
    if (ntk_cli::write_svg(path, series, opt))
      outputs["svg"] = path;
    else
      error("svg", "io", "cannot write plot '" + path + "'");
  }

  int finish() {
    json m;
    m["tool"] = "ntk";
    m["version"] = ntk_version();
    m["command"] = command;
    m["argv"] = argv;
    m["kernel"] = kernel;
    m["parameters"] = parameters;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["threads"] = ntk_thread_count();
    m["outputs"] = outputs;
    m["summary"] = summary;
    m["status"] = errors.empty() ? "ok" : "failed";
    m["errors"] = errors;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["created"] = stamp;
    std::ofstream f(manifest_path);
    f << m.dump(2) << "\n";
    f.close();
    if (!f) error("manifest", "io", "cannot write manifest '" + manifest_path + "'");
    if (!errors.empty()) {
      std::cerr << json{{"errors", errors}}.dump() << "\n";
      return 1;
    }
    return 0;
  }
};

std::string default_manifest(const std::string& command, const std::string& out) {
  if (!out.empty() && out != "-") return out + ".manifest.json";
  return "ntk-" + command + ".manifest.json";
}

struct Grid {
  double lo = -1.0, hi = 1.0;
  int n = 201;
};

Grid parse_grid(const std::string& text) {
  Grid g;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.n, &tail) != 3)
    throw UsageError("--grid expects lo:hi:n, got '" + text + "'");
  if (!(g.lo >= -1.0 && g.hi <= 1.0 && g.lo < g.hi)) throw UsageError("--grid bounds must satisfy -1 <= lo < hi <= 1");
  if (g.n < 2) throw UsageError("--grid needs at least 2 points");
  return g;
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> u(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) u[static_cast<std::size_t>(i)] = g.lo + (g.hi - g.lo) * i / (g.n - 1);
  u.front() = g.lo;
  u.back() = g.hi;
  return u;
}

// ---- commands ------------------------------------------------------------

struct Common {
  std::string out = "-";
  std::string manifest;
  std::string svg;
};

void add_common(CLI::App* app, Common& c, const std::string& out_help) {
  app->add_option("--out", c.out, out_help + " ('-' for stdout)");
  app->add_option("--manifest", c.manifest, "Run manifest path (default: <out>.manifest.json)");
  app->add_option("--svg", c.svg, "Optional SVG line plot");
}

struct EvalArgs {
  KernelFlags k;
  Common io;
  std::string grid = "-1:1:201";
};

void cmd_eval(Run& run, const EvalArgs& a) {
  validate_kernel_flags(a.k);
  const Grid g = parse_grid(a.grid);
  run.parameters = {{"layers", a.k.layers}, {"grid", {{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}}}};
  const auto kernel = build_kernel(a.k, a.k.layers);
  run.kernel = kernel_json(kernel.get());
  const auto u = grid_points(g);
  std::vector<double> v(u.size());
  check(ntk_kernel_sphere_many(kernel.get(), u.data(), u.size(), v.data()), "eval");
  std::ostringstream os;
  os << "u,value\n";
  for (std::size_t i = 0; i < u.size(); ++i) os << fmt17(u[i]) << ',' << fmt17(v[i]) << '\n';
  run.emit("csv", a.io.out, os.str());
  char* d = nullptr;
  check(ntk_kernel_describe(kernel.get(), &d), "eval");
  const std::string label = take_string(d);
  run.plot(a.io.svg, {{label, u, v}}, {label, "u", "k(u)"});
}

struct SpectrumArgs {
  KernelFlags k;
  Common io;
  int dim = 3;
  int kmax = 50;
  int quad = 4096;
  std::string rule = "angular";
  int decay_lo = 10, decay_hi = 40;
  int gap_lo = 3, gap_hi = 9;
};

void cmd_spectrum(Run& run, const SpectrumArgs& a) {
  validate_kernel_flags(a.k);
  run.parameters = {{"layers", a.k.layers}, {"dim", a.dim},           {"k_max", a.kmax},
                    {"quad_order", a.quad}, {"quad_rule", a.rule},    {"decay_window", {a.decay_lo, a.decay_hi}},
                    {"parity_gap_window", {a.gap_lo, a.gap_hi}}};
  const auto kernel = build_kernel(a.k, a.k.layers);
  run.kernel = kernel_json(kernel.get());
  ntk_spectrum* raw = nullptr;
  check(ntk_spectrum_compute(kernel.get(), a.dim, a.kmax, a.quad, a.rule.c_str(), &raw), "spectrum");
  const SpectrumPtr s(raw);
  char* csv = nullptr;
  check(ntk_spectrum_to_csv(s.get(), &csv), "spectrum");
  run.emit("csv", a.io.out, take_string(csv));

  // Summaries are diagnostics: a window without enough positive eigenvalues is reported, not fatal.
  const int hi = std::min(a.decay_hi, a.kmax);
  for (const char* parity : {"even", "odd"}) {
    ntk_decay_fit f{};
    if (ntk_spectrum_decay_fit(s.get(), a.decay_lo, hi, parity, &f) == NTK_OK)
      run.summary[std::string("decay_fit_") + parity] = {{"slope", f.slope},   {"intercept", f.intercept},
                                                         {"r_squared", f.r_squared}, {"k_lo", f.k_lo},
                                                         {"k_hi", f.k_hi},     {"points", f.points}};
    else
      run.summary[std::string("decay_fit_") + parity] = {{"error", ntk_last_error()}};
  }
  double gap = 0.0;
  if (ntk_spectrum_parity_gap(s.get(), a.gap_lo, a.gap_hi, &gap) == NTK_OK)
    run.summary["parity_gap"] = gap;
  else
    run.summary["parity_gap"] = {{"error", ntk_last_error()}};

  if (!a.io.svg.empty()) {
    ntk_cli::Series even{"even k", {}, {}}, odd{"odd k", {}, {}};
    for (int k = 1; k <= a.kmax; ++k) {
      auto& dst = k % 2 ? odd : even;
      dst.x.push_back(k);
      dst.y.push_back(ntk_spectrum_lambda(s.get(), k));
    }
    run.plot(a.io.svg, {even, odd}, {"eigenvalues", "k", "lambda_k", true, true});
  }
}

struct EdgeArgs {
  KernelFlags k;
  Common io;
  std::string side = "plus";
  double tmin = 0.0, tmax = 0.0;
  int points = 0;
};

void cmd_edge(Run& run, const EdgeArgs& a) {
  validate_kernel_flags(a.k);
  const int endpoint = a.side == "plus" ? 1 : -1;
  const double tlo = a.tmin > 0 ? a.tmin : ntk_edge_default_tlo();
  const double thi = a.tmax > 0 ? a.tmax : ntk_edge_default_thi();
  run.parameters = {{"layers", a.k.layers}, {"side", a.side}, {"tmin", tlo}, {"tmax", thi}, {"points", a.points > 0 ? a.points : 24}};
  const auto kernel = build_kernel(a.k, a.k.layers);
  run.kernel = kernel_json(kernel.get());
  char* raw = nullptr;
  check(ntk_edge_extract_json(kernel.get(), endpoint, tlo, thi, a.points, &raw), "edge");
  json out = json::parse(take_string(raw));
  const double c = out["c_half"].get<double>();

  json refs = json::array();
  auto equality = [&](const char* name, double v) {
    refs.push_back({{"name", name}, {"kind", "equality"}, {"value", v}, {"relative_deviation", std::fabs(c / v - 1.0)}});
  };
  const int L = run.kernel.value("layers", 0);
  const double tau = run.kernel.value("tau", 0.0);
  const double alpha = run.kernel.value("alpha", 0.0);
  double v = 0.0;
  if (a.k.kernel == "fcntk" && endpoint == 1) {
    check(ntk_fc_c1_closed_form(L, &v), "reference");
    equality("fc_c1_closed_form", v);
  } else if (a.k.residual() && tau == 0.0) {
    if (endpoint == 1) {
      check(ntk_c1_closed_form(L, alpha, &v), "reference");
      equality("c1_closed_form", v);
    } else {
      if (ntk_cm1_bound(L, alpha, &v) == NTK_OK)
        refs.push_back({{"name", "cm1_bound"}, {"kind", "bound"}, {"value", v}, {"satisfied", std::fabs(c) <= 1.05 * v}});
      const std::string rule = run.kernel.value("alpha_rule", "");
      double gamma = rule == "inv_L" ? 1.0 : rule == "inv_sqrt_L" ? 0.5 : rule.rfind("pow:", 0) == 0 ? std::stod(rule.substr(4)) : 0.0;
      if (gamma > 0 && ntk_cm1_vanishing_regime(L, gamma, &v) == NTK_OK) equality("cm1_vanishing_regime", v);
    }
  } else if (a.k.laplace() && endpoint == 1) {
    equality("laplace_c_half", -std::sqrt(2.0) * a.k.c);
  }
  out["references"] = refs;
  out["relative_deviation"] = nullptr;
  for (const auto& r : refs)
    if (r["kind"] == "equality") {
      out["relative_deviation"] = r["relative_deviation"];
      break;
    }
  run.summary = {{"c_half", c}, {"accepted", out["accepted"]}, {"relative_deviation", out["relative_deviation"]}};
  run.emit("json", a.io.out, out.dump(2) + "\n");
}

struct ConvergeArgs {
  Common io;
  std::string report = "-";
  double gamma = 1.0;
  std::vector<int> depths{16, 32, 64, 128, 256, 512};
  double delta = 0.1;
  int n_u = 2001;
};

void cmd_converge(Run& run, const ConvergeArgs& a) {
  if (!(a.gamma > 0.5 && a.gamma <= 1.0))
    throw UsageError("--gamma must lie in the open-closed interval (1/2, 1]; the depth-convergence rate 1 - 2*gamma "
                     "is only established there");
  run.parameters = {{"gamma", a.gamma}, {"depths", a.depths}, {"delta", a.delta}, {"n_u", a.n_u}};
  run.kernel = {{"family", "resntk"}, {"alpha_rule", "pow:" + fmt17(a.gamma)}, {"tau", 0.0}};
  ntk_convergence* raw = nullptr;
  const ntk_status s = ntk_convergence_compute(a.gamma, a.depths.data(), a.depths.size(), a.delta, a.n_u, &raw);
  if (s == NTK_ERR_INVALID_ARGUMENT) throw UsageError(ntk_last_error());
  check(s, "converge");
  const ConvergencePtr c(raw);
  char* j = nullptr;
  check(ntk_convergence_to_json(c.get(), &j), "converge");
  const json report = json::parse(take_string(j));
  run.summary = {{"fitted_rate", report["fitted_rate"]}, {"expected_rate", report["expected_rate"]},
                 {"r_squared", report["r_squared"]}};
  if (a.io.out != "-") {
    char* csv = nullptr;
    check(ntk_convergence_to_csv(c.get(), &csv), "converge");
    run.emit("csv", a.io.out, take_string(csv));
  }
  run.emit("json", a.report, report.dump(2) + "\n");
  if (!a.io.svg.empty()) {
    ntk_cli::Series s1{"sup deviation", {}, {}};
    for (std::size_t i = 0; i < ntk_convergence_count(c.get()); ++i) {
      s1.x.push_back(ntk_convergence_depth(c.get(), i));
      s1.y.push_back(ntk_convergence_sup_dev(c.get(), i));
    }
    run.plot(a.io.svg, {s1}, {"depth convergence", "L", "sup |r - fc1|", true, true});
  }
}

struct RegressArgs {
  KernelFlags k;
  Common io;
  std::string data;
  std::string label = "-1";
  std::vector<std::string> normalize{"unit_norm"};
  double ridge = 1e-3;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  int folds = 4;
  double test_fraction = 0.25;
  std::vector<int> depths;
};

void cmd_regress(Run& run, const RegressArgs& a, bool sweep) {
  validate_kernel_flags(a.k);
  std::vector<int> depths = sweep ? a.depths : std::vector<int>{a.k.layers};
  if (a.k.laplace() && !sweep) depths = {0};
  if (depths.empty()) throw UsageError("--depths must list at least one depth");
  if (a.ridge < 0 || a.jitter < 0) throw UsageError("--ridge and --jitter must be >= 0");
  if (a.folds < 1) throw UsageError("--folds must be >= 1");
  if (a.folds == 1 && !(a.test_fraction > 0 && a.test_fraction < 1)) throw UsageError("--test-fraction must lie in (0,1)");
  run.seed = a.seed;

  ntk_dataset* raw = nullptr;
  check(ntk_dataset_load(a.data.c_str(), a.label.c_str(), &raw), "load_dataset");
  DatasetPtr ds(raw);
  for (const auto& mode : a.normalize) {
    ntk_dataset* next = nullptr;
    const ntk_status s = ntk_dataset_normalize(ds.get(), mode.c_str(), &next);
    if (s == NTK_ERR_INVALID_ARGUMENT) throw UsageError(ntk_last_error());
    check(s, "normalize");
    ds.reset(next);
  }

  ntk_sweep_params p;
  ntk_sweep_params_default(&p);
  p.family = a.k.kernel.c_str();
  p.has_alpha = a.k.alpha_opt->count() ? 1 : 0;
  p.alpha = a.k.alpha;
  p.alpha_rule = a.k.rule_opt->count() ? a.k.alpha_rule.c_str() : nullptr;
  p.tau = a.k.tau;
  p.c = a.k.c;
  p.ridge = a.ridge + a.jitter;
  p.folds = a.folds;
  p.test_fraction = a.test_fraction;
  p.seed = a.seed;

  run.kernel = {{"family", a.k.kernel}};
  if (a.k.residual()) {
    if (p.has_alpha)
      run.kernel["alpha"] = a.k.alpha;
    else
      run.kernel["alpha_rule"] = a.k.alpha_rule;
    run.kernel["tau"] = a.k.tau;
  }
  if (a.k.laplace()) run.kernel["c"] = a.k.c;
  run.parameters = {{"dataset", {{"path", a.data},
                                 {"label", a.label},
                                 {"rows", ntk_dataset_rows(ds.get())},
                                 {"dims", ntk_dataset_dims(ds.get())},
                                 {"classes", ntk_dataset_class_count(ds.get())}}},
                    {"normalize", a.normalize},
                    {"depths", depths},
                    {"ridge", a.ridge},
                    {"jitter", a.jitter},
                    {"effective_ridge", p.ridge},
                    {"folds", a.folds},
                    {"test_fraction", a.folds == 1 ? json(a.test_fraction) : json(1.0 / a.folds)}};

  ntk_sweep* sw = nullptr;
  check(ntk_sweep_run(ds.get(), &p, depths.data(), depths.size(), &sw), "sweep");
  const SweepPtr sweep_result(sw);
  char* csv = nullptr;
  check(ntk_sweep_to_csv(sweep_result.get(), &csv), "sweep");
  run.emit("csv", a.io.out, take_string(csv));

  json rows = json::array();
  ntk_cli::Series test{"test accuracy", {}, {}}, train{"train accuracy", {}, {}};
  for (std::size_t i = 0; i < ntk_sweep_rows(sweep_result.get()); ++i) {
    ntk_accuracy_row r{};
    check(ntk_sweep_row(sweep_result.get(), i, &r), "sweep");
    json row{{"depth", r.depth}, {"status", r.ok ? "ok" : "failed"}};
    if (r.ok) {
      row["test_acc"] = r.test_acc;
      row["train_acc"] = r.train_acc;
      test.x.push_back(r.depth);
      test.y.push_back(r.test_acc);
      train.x.push_back(r.depth);
      train.y.push_back(r.train_acc);
    } else {
      row["message"] = ntk_sweep_message(sweep_result.get(), i);
      run.error("depth " + std::to_string(r.depth), "numerical", ntk_sweep_message(sweep_result.get(), i));
    }
    rows.push_back(row);
  }
  run.summary["rows"] = rows;
  run.plot(a.io.svg, {test, train}, {"accuracy vs depth", "depth", "accuracy"});
}

std::string status_text(ntk_status s) { return ntk_status_name(s); }

}  // namespace

int run_cli(std::vector<std::string> args);

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args));
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Neural tangent kernels of fully connected and residual networks: evaluation, spectra, edge "
               "expansions, depth convergence and kernel regression",
               "ntk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ntk_version()));

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Evaluate k(u) on a grid of cosines");
  add_kernel_flags(ev, eval.k);
  add_common(ev, eval.io, "CSV output (u,value)");
  ev->add_option("--grid", eval.grid, "Grid lo:hi:n within [-1,1]");

  SpectrumArgs spec;
  auto* sp = app.add_subcommand("spectrum", "Funk-Hecke eigenvalues on the sphere");
  add_kernel_flags(sp, spec.k);
  add_common(sp, spec.io, "Spectrum CSV");
  sp->add_option("--dim", spec.dim, "Ambient dimension d (sphere S^{d-1})");
  sp->add_option("--kmax", spec.kmax, "Largest frequency");
  sp->add_option("--quad", spec.quad, "Quadrature order");
  sp->add_option("--quad-rule", spec.rule, "Quadrature rule")->check(CLI::IsMember({"angular", "jacobi"}));
  sp->add_option("--decay-lo", spec.decay_lo, "Decay-fit window start");
  sp->add_option("--decay-hi", spec.decay_hi, "Decay-fit window end");
  sp->add_option("--gap-lo", spec.gap_lo, "Parity-gap window start");
  sp->add_option("--gap-hi", spec.gap_hi, "Parity-gap window end");

  EdgeArgs edge;
  auto* ed = app.add_subcommand("edge", "Extract the sqrt(t) coefficient at u = +-1");
  add_kernel_flags(ed, edge.k);
  add_common(ed, edge.io, "JSON output");
  ed->add_option("--side", edge.side, "Endpoint")->check(CLI::IsMember({"plus", "minus"}));
  ed->add_option("--tmin", edge.tmin, "Smallest distance t");
  ed->add_option("--tmax", edge.tmax, "Largest distance t");
  ed->add_option("--points", edge.points, "Number of geometric grid points");

  ConvergeArgs conv;
  auto* cv = app.add_subcommand("converge", "Depth convergence of ResNTK with alpha = L^-gamma to the one-layer kernel");
  add_common(cv, conv.io, "CSV output (L,alpha,sup_dev)");
  cv->add_option("--report", conv.report, "Report JSON ('-' for stdout)");
  cv->add_option("--gamma", conv.gamma, "Exponent gamma in (1/2, 1]")->required();
  cv->add_option("--depths", conv.depths, "Comma-separated depths")->delimiter(',');
  cv->add_option("--delta", conv.delta, "Keep u in [-1+delta, 1-delta]");
  cv->add_option("--u-points", conv.n_u, "Grid points in u");

  RegressArgs reg, swp;
  auto add_regress = [](CLI::App* c, RegressArgs& r) {
    add_kernel_flags(c, r.k);
    add_common(c, r.io, "Accuracy CSV");
    c->add_option("--data", r.data, "CSV dataset")->required();
    c->add_option("--label", r.label, "Label column name or index (negative counts from the end)");
    c->add_option("--normalize", r.normalize, "Normalizations applied in order: none, unit_norm, standardize")
        ->delimiter(',');
    c->add_option("--ridge", r.ridge, "Ridge constant lambda");
    c->add_option("--jitter", r.jitter, "Extra diagonal jitter added to the ridge");
    c->add_option("--seed", r.seed, "Split seed");
    c->add_option("--folds", r.folds, "Stratified folds (1 = single holdout)");
    c->add_option("--test-fraction", r.test_fraction, "Holdout fraction when --folds 1");
  };
  auto* rg = app.add_subcommand("regress", "Kernel ridge classification at one depth");
  add_regress(rg, reg);
  auto* sw = app.add_subcommand("sweep", "Kernel ridge classification over a list of depths");
  add_regress(sw, swp);
  sw->add_option("--depths", swp.depths, "Comma-separated depths")->delimiter(',')->required();

  std::string replay_path;
  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rp->add_option("manifest", replay_path, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // --help / --version exit 0; every other parse problem is a usage error
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (rp->parsed()) {
    std::ifstream in(replay_path);
    if (!in) {
      std::cerr << json{{"errors", {{{"stage", "replay"}, {"status", "io"}, {"message", "cannot open '" + replay_path + "'"}}}}}.dump() << "\n";
      return 1;
    }
    json m;
    try {
      m = json::parse(in);
      return run_cli(m.at("argv").get<std::vector<std::string>>());
    } catch (const json::exception& e) {
      std::cerr << json{{"errors", {{{"stage", "replay"}, {"status", "parse"}, {"message", e.what()}}}}}.dump() << "\n";
      return 1;
    }
  }

  Run run;
  run.argv = args;
  const Common* io = nullptr;
  if (ev->parsed()) run.command = "eval", io = &eval.io;
  if (sp->parsed()) run.command = "spectrum", io = &spec.io;
  if (ed->parsed()) run.command = "edge", io = &edge.io;
  if (cv->parsed()) run.command = "converge", io = &conv.io;
  if (rg->parsed()) run.command = "regress", io = &reg.io;
  if (sw->parsed()) run.command = "sweep", io = &swp.io;
  run.manifest_path = io->manifest.empty()
                          ? default_manifest(run.command, run.command == "converge" && io->out == "-" ? conv.report : io->out)
                          : io->manifest;

  try {
    if (run.command == "eval") cmd_eval(run, eval);
    if (run.command == "spectrum") cmd_spectrum(run, spec);
    if (run.command == "edge") cmd_edge(run, edge);
    if (run.command == "converge") cmd_converge(run, conv);
    if (run.command == "regress") cmd_regress(run, reg, false);
    if (run.command == "sweep") cmd_regress(run, swp, true);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const RunFailure& e) {
    run.error(e.stage, status_text(e.status), e.what());
  } catch (const std::exception& e) {
    run.error(run.command, "internal", e.what());
  }
  return run.finish();
}
