#include "tkrr/config.hpp"

#include "tkrr/error.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace tkrr {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

std::string type_tag(const json& j, const std::string& where) {
  const auto& v = field(j, "type", where);
  if (!v.is_string()) throw ConfigError(where + ".type: expected a string");
  return v.get<std::string>();
}

// Library constructors throw DomainError on bad parameters; surface them as
// configuration errors.
template <class F>
auto as_config(F&& f, const std::string& where) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

LamRule lam_rule_from_json(const json& j) {
  const std::string where = "lam_rule";
  require_object(j, where);
  const auto type = type_tag(j, where);
  LamRule r;
  if (type == "paper_fixed") {
    reject_unknown(j, {"type", "value"}, where);
    r.kind = LamRule::Kind::paper_fixed;
    r.value = number(j, "value", where);
    if (!(r.value > 0.0)) throw ConfigError("lam_rule.value must be positive");
  } else if (type == "exponential_rule") {
    reject_unknown(j, {"type", "b", "n_b"}, where);
    r.kind = LamRule::Kind::exponential_rule;
    if (j.contains("b")) r.b = number(j, "b", where);
    if (j.contains("n_b")) r.n_b = integer(j, "n_b", where);
    if (r.b && !(*r.b > 0.0)) throw ConfigError("lam_rule.b must be positive");
    if (r.n_b && *r.n_b < 1) throw ConfigError("lam_rule.n_b must be >= 1");
  } else if (type == "refined_sinc") {
    reject_unknown(j, {"type"}, where);
    r.kind = LamRule::Kind::refined_sinc;
  } else {
    throw ConfigError("lam_rule: unknown type '" + type + "'");
  }
  return r;
}

json lam_rule_to_json(const LamRule& r) {
  json j{{"type", to_string(r.kind)}};
  if (r.kind == LamRule::Kind::paper_fixed) j["value"] = r.value;
  if (r.b) j["b"] = *r.b;
  if (r.n_b) j["n_b"] = *r.n_b;
  return j;
}

std::optional<TestFunction> target_from_json(const json& j) {
  const std::string where = "regression_target";
  if (j.is_null()) return std::nullopt;
  require_object(j, where);
  const auto type = type_tag(j, where);
  if (type == "none") {
    reject_unknown(j, {"type"}, where);
    return std::nullopt;
  }
  if (type == "sinc_ratio") {
    reject_unknown(j, {"type", "freq"}, where);
    const double freq = number(j, "freq", where);
    if (!(freq > 0.0)) throw ConfigError("regression_target.freq must be positive");
    return SincRatio{freq};
  }
  if (type == "gaussian_synthetic") {
    reject_unknown(j, {"type", "xi", "c"}, where);
    const double xi = number(j, "xi", where);
    const double c = number(j, "c", where);
    if (!(xi > 0.0) || !(c > 0.0)) throw ConfigError("regression_target xi and c must be positive");
    return GaussianSynthetic{xi, c};
  }
  throw ConfigError("regression_target: unknown type '" + type + "'");
}

json target_to_json(const std::optional<TestFunction>& t) {
  if (!t) return json{{"type", "none"}};
  return std::visit(overloaded{
                        [](const SincRatio& s) { return json{{"type", "sinc_ratio"}, {"freq", s.freq}}; },
                        [](const GaussianSynthetic& g) {
                          return json{{"type", "gaussian_synthetic"}, {"xi", g.xi}, {"c", g.c}};
                        },
                    },
                    *t);
}

}  // namespace

const char* to_string(LamRule::Kind k) {
  switch (k) {
    case LamRule::Kind::paper_fixed: return "paper_fixed";
    case LamRule::Kind::exponential_rule: return "exponential_rule";
    case LamRule::Kind::refined_sinc: return "refined_sinc";
  }
  return "unknown";
}

double evaluate(const TestFunction& f, double x) {
  return std::visit(overloaded{
                        [x](const SincRatio& s) {
                          const double u = s.freq * x;
                          if (std::abs(u) < 1e-8) return 1.0 - u * u / 6.0;
                          return std::sin(u) / u;
                        },
                        [x](const GaussianSynthetic& g) {
                          double poly = 1.0;
                          double power = 1.0;
                          for (int j = 1; j <= 10; ++j) {
                            power *= x;
                            poly += power / j;
                          }
                          return std::exp(-std::sqrt(g.c * g.c + g.c * g.xi)) * poly;
                        },
                    },
                    f);
}

Vector evaluate(const TestFunction& f, const Samples& xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != 1) throw DomainError("regression targets are univariate");
    out[static_cast<Eigen::Index>(i)] = evaluate(f, xs[i][0]);
  }
  return out;
}

KernelSpec kernel_from_json(const json& j) {
  const std::string where = "kernel";
  require_object(j, where);
  const auto type = type_tag(j, where);
  if (type == "sinc") {
    reject_unknown(j, {"type", "c"}, where);
    return as_config([&] { return KernelSpec::sinc(number(j, "c", where)); }, where);
  }
  if (type == "gaussian") {
    reject_unknown(j, {"type", "xi"}, where);
    return as_config([&] { return KernelSpec::gaussian(number(j, "xi", where)); }, where);
  }
  if (type == "tensor_product") {
    reject_unknown(j, {"type", "base", "d"}, where);
    const auto base = kernel_from_json(field(j, "base", where));
    return as_config([&] { return KernelSpec::tensor(base, integer(j, "d", where)); }, where);
  }
  throw ConfigError("kernel: unknown type '" + type + "'");
}

json kernel_to_json(const KernelSpec& k) {
  auto uni = [](const UnivariateKernel& u) {
    return std::visit(overloaded{
                          [](const SincKernel& s) { return json{{"type", "sinc"}, {"c", s.c}}; },
                          [](const GaussianKernel& g) { return json{{"type", "gaussian"}, {"xi", g.xi}}; },
                      },
                      u);
  };
  return std::visit(overloaded{
                        [&](const SincKernel& s) { return uni(s); },
                        [&](const GaussianKernel& g) { return uni(g); },
                        [&](const TensorProductKernel& t) {
                          return json{{"type", "tensor_product"}, {"base", uni(t.base)}, {"d", t.d}};
                        },
                    },
                    k.variant());
}

MeasureSpec measure_from_json(const json& j) {
  const std::string where = "measure";
  require_object(j, where);
  const auto type = type_tag(j, where);
  if (type == "uniform_cube") {
    reject_unknown(j, {"type", "d"}, where);
    const int d = j.contains("d") ? integer(j, "d", where) : 1;
    return as_config([&] { return MeasureSpec::uniform_cube(d); }, where);
  }
  if (type == "truncated_std_normal") {
    reject_unknown(j, {"type"}, where);
    return MeasureSpec::truncated_std_normal();
  }
  if (type == "gaussian_measure") {
    reject_unknown(j, {"type", "c"}, where);
    return as_config([&] { return MeasureSpec::gaussian(number(j, "c", where)); }, where);
  }
  throw ConfigError("measure: unknown type '" + type + "'");
}

json measure_to_json(const MeasureSpec& m) {
  return std::visit(overloaded{
                        [](const UniformCube& u) { return json{{"type", "uniform_cube"}, {"d", u.d}}; },
                        [](const TruncatedStdNormal&) { return json{{"type", "truncated_std_normal"}}; },
                        [](const GaussianMeasure& g) { return json{{"type", "gaussian_measure"}, {"c", g.c}}; },
                        [](const CenteredNormal& g) { return json{{"type", "centered_normal"}, {"sigma", g.sigma}}; },
                    },
                    m.variant());
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (n_trunc_list.empty()) throw ConfigError("n_trunc_list must not be empty");
  for (int nt : n_trunc_list) {
    if (nt < 1 || nt > n) throw ConfigError("every n_trunc must satisfy 1 <= N <= n");
  }
  for (double s : sigma_list) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("every sigma must be >= 0");
  }
  if (kernel.dim() != measure.dim()) throw ConfigError("kernel and measure dimensions differ");
  if (!(spectrum_scale > 0.0)) throw ConfigError("spectrum_scale must be positive");
  if (experiment == ExperimentKind::regression) {
    if (!regression_target) throw ConfigError("regression experiments need a regression_target");
    if (sigma_list.empty()) throw ConfigError("regression experiments need a nonempty sigma_list");
  }
}

double ExperimentConfig::gaussian_reference_scale() const {
  if (const auto* g = std::get_if<GaussianMeasure>(&measure.variant())) return g->c;
  return spectrum_scale;
}

ExperimentConfig config_from_json(const json& j) {
  const std::string where = "config";
  require_object(j, where);
  reject_unknown(j,
                 {"experiment", "kernel", "measure", "n", "n_trunc_list", "sigma_list", "realizations", "master_seed",
                  "lam_rule", "regression_target", "output_dir", "spectrum_scale"},
                 where);
  ExperimentConfig c;
  const auto& exp = field(j, "experiment", where);
  if (exp == "spectra") {
    c.experiment = ExperimentKind::spectra;
  } else if (exp == "regression") {
    c.experiment = ExperimentKind::regression;
  } else {
    throw ConfigError("experiment must be \"spectra\" or \"regression\"");
  }
  c.kernel = kernel_from_json(field(j, "kernel", where));
  c.measure = measure_from_json(field(j, "measure", where));
  c.n = integer(j, "n", where);
  try {
    c.n_trunc_list = field(j, "n_trunc_list", where).get<std::vector<int>>();
    if (j.contains("sigma_list")) c.sigma_list = j.at("sigma_list").get<std::vector<double>>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (j.contains("realizations")) c.realizations = integer(j, "realizations", where);
  if (j.contains("lam_rule")) c.lam_rule = lam_rule_from_json(j.at("lam_rule"));
  if (j.contains("regression_target")) c.regression_target = target_from_json(j.at("regression_target"));
  if (j.contains("spectrum_scale")) c.spectrum_scale = number(j, "spectrum_scale", where);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment == ExperimentKind::spectra ? "spectra" : "regression"},
              {"kernel", kernel_to_json(c.kernel)},
              {"measure", measure_to_json(c.measure)},
              {"n", c.n},
              {"n_trunc_list", c.n_trunc_list},
              {"sigma_list", c.sigma_list},
              {"realizations", c.realizations},
              {"master_seed", c.master_seed},
              {"lam_rule", lam_rule_to_json(c.lam_rule)},
              {"regression_target", target_to_json(c.regression_target)},
              {"output_dir", c.output_dir},
              {"spectrum_scale", c.spectrum_scale}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

KernelSpec parse_kernel_arg(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return kernel_from_json(json::parse(text));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("kernel argument is not valid JSON: ") + e.what());
    }
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("kernel argument must look like sinc:<c> or gaussian:<xi>");
  const std::string name = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("kernel parameter in '" + text + "' is not a number");
  }
  if (name == "sinc") return as_config([&] { return KernelSpec::sinc(value); }, "kernel");
  if (name == "gaussian") return as_config([&] { return KernelSpec::gaussian(value); }, "kernel");
  throw ConfigError("unknown kernel '" + name + "'");
}

}  // namespace tkrr
