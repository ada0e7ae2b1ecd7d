#pragma once

#include "tkrr/config.hpp"
#include "tkrr/selection.hpp"
#include "tkrr/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tkrr {

/// Realization-averaged spectra of B_n and A_N next to the operator spectrum.
/// Row j (1-based) of every column refers to the j-th eigen/singular value.
struct SpectraOutput {
  std::vector<int> j;
  std::vector<double> true_eig;
  std::vector<double> mean_full_eig;
  std::vector<double> mean_trunc_sv;
  std::vector<double> tail_full;
  std::vector<double> tail_trunc;
  std::vector<double> log10_true;
  std::vector<double> log10_full;
  std::vector<double> log10_trunc;
  /// Per-realization trace tails, [realization][j].
  std::vector<std::vector<double>> realization_tail_full;
  std::vector<std::vector<double>> realization_tail_trunc;
  std::string true_eig_source;
};

/// Mean empirical risk of one (sigma, N) cell next to its rate bound.
struct RiskReport {
  double sigma;
  int n_trunc;
  double lam;
  double empirical;
  double empirical_std;
  double theoretical;
  std::vector<double> per_realization;
};

/// Realization r (1-based) uses covariate stream r and noise stream
/// r + kNoiseStreamOffset. `threads` workers split realizations; results are
/// merged by realization index, so output does not depend on `threads`.
SpectraOutput run_spectra(const ExperimentConfig& config, int threads = 1);
std::vector<RiskReport> run_regression(const ExperimentConfig& config, int threads = 1);
std::vector<SelectionResult> run_selection_report(const ExperimentConfig& config);

/// Ridge parameter for one sigma under the config's lam_rule.
SelectionResult resolve_lambda(const ExperimentConfig& config, double sigma);

inline constexpr const char* kSpectraCsvHeader =
    "j,true_eig,mean_full_eig,mean_trunc_sv,tail_full,tail_trunc,log10_true,log10_full,log10_trunc";
inline constexpr const char* kRegressionCsvHeader = "sigma,n_trunc,lambda,emp_risk_mean,emp_risk_std,rate_bound";

std::string spectra_csv(const SpectraOutput& out);
std::string spectra_tails_csv(const SpectraOutput& out);
std::string regression_csv(const std::vector<RiskReport>& reports);
nlohmann::json selection_json(const std::vector<SelectionResult>& results);
nlohmann::json regression_meta_json(const ExperimentConfig& config, const std::vector<RiskReport>& reports);

/// Writes the artifacts of each experiment under `dir` (created if needed)
/// and returns the paths written.
std::vector<std::filesystem::path> write_spectra(const SpectraOutput& out, const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_regression(const ExperimentConfig& config,
                                                    const std::vector<RiskReport>& reports,
                                                    const std::filesystem::path& dir);
std::filesystem::path write_selection(const std::vector<SelectionResult>& results, const std::filesystem::path& dir);

/// Shortest decimal form that round-trips, used for every CSV number.
std::string format_number(double v);

struct Dataset {
  Samples x;
  Vector y;
};

/// Reads a CSV with header x_1,...,x_d,y.
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace tkrr
