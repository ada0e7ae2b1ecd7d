#pragma once

#include "tkrr/kernels.hpp"
#include "tkrr/sampling.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tkrr {

enum class ExperimentKind { spectra, regression };

/// How the ridge parameter of each regression cell is chosen.
struct LamRule {
  enum class Kind { paper_fixed, exponential_rule, refined_sinc };
  Kind kind = Kind::paper_fixed;
  /// paper_fixed only.
  double value = 0.0;
  /// exponential_rule only; derived from the kernel when absent.
  std::optional<double> b;
  std::optional<int> n_b;
};

const char* to_string(LamRule::Kind k);

/// f*(x) = sin(freq x) / (freq x), equal to 1 at x = 0.
struct SincRatio {
  double freq;
};

/// f*(x) = exp(-sqrt(c^2 + c xi)) (1 + sum_{j=1..10} x^j / j).
struct GaussianSynthetic {
  double xi;
  double c;
};

using TestFunction = std::variant<SincRatio, GaussianSynthetic>;

double evaluate(const TestFunction& f, double x);
Vector evaluate(const TestFunction& f, const Samples& xs);

/// Declarative description of one experiment; the JSON form uses the same
/// snake_case field names and rejects unknown keys.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::spectra;
  KernelSpec kernel = KernelSpec::sinc(1.0);
  MeasureSpec measure = MeasureSpec::uniform_cube(1);
  int n = 0;
  std::vector<int> n_trunc_list;
  std::vector<double> sigma_list;
  int realizations = 10;
  std::uint64_t master_seed = 0;
  LamRule lam_rule;
  std::optional<TestFunction> regression_target;
  std::string output_dir = ".";
  /// Scale c of the Gaussian reference measure used for closed-form
  /// Gaussian spectra when the sampling law is not itself a GaussianMeasure.
  double spectrum_scale = 1.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  /// c of the Gaussian reference measure (measure's own c if it has one).
  double gaussian_reference_scale() const;
};

KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const KernelSpec& k);
MeasureSpec measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const MeasureSpec& m);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses "sinc:25", "gaussian:25" or a JSON kernel object.
KernelSpec parse_kernel_arg(const std::string& text);

}  // namespace tkrr
