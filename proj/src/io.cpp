#include "ntk/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ntk/error.hpp"

namespace ntk {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

namespace {

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) throw ParseError(std::string("bad ") + what + " value '" + s + "'");
  return v;
}

}  // namespace

Json to_json(const KernelSpec& spec) {
  Json j;
  j["family"] = family_name(family_of(spec));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FcNtkSpec>) {
          j["layers"] = s.layers;
        } else if constexpr (std::is_same_v<T, ResNtkSpec>) {
          j["layers"] = s.layers;
          j["alpha"] = s.alpha;
          j["tau"] = s.tau;
          if (s.alpha_rule) j["alpha_rule"] = s.alpha_rule->to_string();
        } else {
          j["c"] = s.c;
        }
      },
      spec);
  return j;
}

KernelSpec kernel_spec_from_json(const Json& j) {
  try {
    switch (parse_family(j.at("family").get<std::string>())) {
      case KernelFamily::fcntk: return FcNtkSpec{j.at("layers").get<int>()};
      case KernelFamily::resntk: {
        ResNtkSpec s{j.at("layers").get<int>(), j.at("alpha").get<double>(), j.value("tau", 0.0), std::nullopt};
        if (j.contains("alpha_rule")) s.alpha_rule = AlphaRule::parse(j["alpha_rule"].get<std::string>());
        return s;
      }
      case KernelFamily::laplace: return LaplaceSpec{j.at("c").get<double>(), false};
      case KernelFamily::homlaplace: return LaplaceSpec{j.at("c").get<double>(), true};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("kernel spec: ") + e.what());
  }
  throw ParseError("kernel spec: unknown family");
}

Json to_json(const DecayFit& f) {
  return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"k_lo", f.k_lo},
              {"k_hi", f.k_hi},   {"parity", parity_name(f.parity)}, {"points", f.points}};
}

Json to_json(const EdgeExpansion& e) {
  return Json{{"endpoint", e.endpoint}, {"c_half", e.c_half},       {"a0", e.a0},
              {"a1", e.a1},             {"nu", e.nu},               {"residual", e.residual},
              {"condition", e.condition}, {"accepted", e.accepted}, {"t_grid", e.t_grid},
              {"values", e.values}};
}

Json to_json(const ConvergenceReport& r) {
  return Json{{"gamma", r.gamma},           {"delta", r.delta},          {"n_u", r.n_u},
              {"depths", r.depths},         {"alphas", r.alphas},        {"sup_dev", r.sup_dev},
              {"fitted_rate", r.fitted_rate}, {"intercept", r.intercept}, {"r_squared", r.r_squared},
              {"expected_rate", r.expected_rate}};
}

Json spectrum_metadata(const Spectrum& s) {
  Json j{{"dim", s.dim}, {"k_max", s.k_max}, {"quad_order", s.quad_order}, {"quad_rule", quad_rule_name(s.rule)},
         {"kernel_label", s.kernel_label}};
  j["kernel"] = s.kernel ? to_json(*s.kernel) : Json(nullptr);
  return j;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "# " << spectrum_metadata(s).dump() << "\n";
  out << "k,lambda,multiplicity\n";
  for (std::size_t k = 0; k < s.lambda.size(); ++k)
    out << k << ',' << format_double(s.lambda[k]) << ',' << s.multiplicity[k] << '\n';
}

Spectrum read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ParseError("spectrum csv: missing metadata line");
  Json meta;
  try {
    meta = Json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("spectrum csv metadata: ") + e.what());
  }
  Spectrum s;
  s.dim = meta.at("dim").get<int>();
  s.k_max = meta.at("k_max").get<int>();
  s.quad_order = meta.at("quad_order").get<int>();
  s.rule = parse_quad_rule(meta.at("quad_rule").get<std::string>());
  s.kernel_label = meta.value("kernel_label", "");
  if (!meta["kernel"].is_null()) s.kernel = kernel_spec_from_json(meta["kernel"]);
  if (!std::getline(in, line) || line != "k,lambda,multiplicity") throw ParseError("spectrum csv: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string k, lam, mult;
    std::getline(ss, k, ',');
    std::getline(ss, lam, ',');
    std::getline(ss, mult, ',');
    if (parse_double(k, "k") != static_cast<double>(s.lambda.size())) throw ParseError("spectrum csv: frequencies out of order");
    s.lambda.push_back(parse_double(lam, "lambda"));
    s.multiplicity.push_back(std::stoull(mult));
  }
  if (s.lambda.size() != static_cast<std::size_t>(s.k_max + 1)) throw ParseError("spectrum csv: row count differs from k_max + 1");
  return s;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows) {
  out << "depth,alpha,ridge,train_acc,test_acc,status\n";
  for (const auto& r : rows) {
    out << r.depth << ',' << (r.alpha ? format_double(*r.alpha) : "") << ',' << format_double(r.ridge) << ',';
    if (r.ok)
      out << format_double(r.train_acc) << ',' << format_double(r.test_acc) << ",ok\n";
    else
      out << ",,failed\n";
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& r) {
  out << "L,alpha,sup_dev\n";
  for (std::size_t i = 0; i < r.depths.size(); ++i)
    out << r.depths[i] << ',' << format_double(r.alphas[i]) << ',' << format_double(r.sup_dev[i]) << '\n';
}

}  // namespace ntk
