// Command-line front end: spectra / regress / select experiments driven by a
// JSON config, plus ad-hoc TKRR fitting on a CSV file.

#include "tkrr/config.hpp"
#include "tkrr/error.hpp"
#include "tkrr/estimators.hpp"
#include "tkrr/harness.hpp"
#include "tkrr/selection.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kInvariantError = 3 };

struct Overrides {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> realizations;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--realizations", o.realizations, "number of realizations (overrides config)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed (overrides master_seed)");
  cmd->add_option("--threads", o.threads, "worker threads over realizations")->check(CLI::PositiveNumber);
}

tkrr::ExperimentConfig load(const Overrides& o) {
  auto cfg = tkrr::load_config(o.config);
  if (o.out_dir) cfg.output_dir = *o.out_dir;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (o.seed) cfg.master_seed = *o.seed;
  cfg.validate();
  return cfg;
}

void report(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

int run_fit(const std::string& kernel_arg, const std::string& data, int n_trunc, double lam,
            const std::optional<std::string>& out_dir) {
  const auto ds = tkrr::read_dataset_csv(data);
  auto kernel = tkrr::parse_kernel_arg(kernel_arg);
  const int d = static_cast<int>(ds.x.front().size());
  if (d > 1 && kernel.is_univariate()) kernel = tkrr::KernelSpec::tensor(kernel, d);
  if (n_trunc < 1 || n_trunc > static_cast<int>(ds.x.size())) {
    throw tkrr::ConfigError("--n-trunc must satisfy 1 <= N <= number of rows");
  }
  const auto model = tkrr::fit_tkrr(kernel, ds.x, ds.y, n_trunc, lam);
  const auto fitted = tkrr::predict_tkrr(model, ds.x);

  nlohmann::json basis = nlohmann::json::array();
  for (const auto& p : model.basis_points) basis.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  nlohmann::json out{{"kernel", tkrr::kernel_to_json(kernel)},
                     {"n", model.n},
                     {"n_trunc", model.n_trunc()},
                     {"lambda", model.lam},
                     {"lambda_used", model.lam_used},
                     {"weights", std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size())},
                     {"basis_points", basis},
                     {"train_mse", tkrr::empirical_risk(fitted, ds.y)}};
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const auto path = std::filesystem::path(*out_dir) / "fit.json";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw tkrr::IoError("cannot write " + path.string());
    f << text;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated kernel ridge regression experiments"};
  app.require_subcommand(1);

  Overrides spectra_opts;
  auto* spectra = app.add_subcommand("spectra", "Gram and operator spectra averaged over realizations");
  add_common(spectra, spectra_opts);

  Overrides regress_opts;
  auto* regress = app.add_subcommand("regress", "empirical risk of TKRR per (sigma, N) cell");
  add_common(regress, regress_opts);

  Overrides select_opts;
  auto* select = app.add_subcommand("select", "selected (N, lambda) per sigma");
  add_common(select, select_opts);

  std::string kernel_arg;
  std::string data;
  int n_trunc = 0;
  double lam = 0.0;
  std::optional<std::string> fit_out;
  auto* fit = app.add_subcommand("fit", "fit TKRR on a CSV with columns x_1..x_d,y");
  fit->add_option("--kernel", kernel_arg, "sinc:<c>, gaussian:<xi> or a JSON kernel object")->required();
  fit->add_option("--data", data, "training CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--n-trunc", n_trunc, "truncation order N")->required();
  fit->add_option("--lam", lam, "ridge parameter")->required();
  fit->add_option("--out-dir", fit_out, "also write fit.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*spectra) {
      const auto cfg = load(spectra_opts);
      report(tkrr::write_spectra(tkrr::run_spectra(cfg, spectra_opts.threads), cfg.output_dir));
    } else if (*regress) {
      const auto cfg = load(regress_opts);
      const auto reports = tkrr::run_regression(cfg, regress_opts.threads);
      std::cout << tkrr::regression_csv(reports);
      report(tkrr::write_regression(cfg, reports, cfg.output_dir));
    } else if (*select) {
      const auto cfg = load(select_opts);
      const auto results = tkrr::run_selection_report(cfg);
      std::cout << tkrr::selection_json(results).dump(2) << '\n';
      report({tkrr::write_selection(results, cfg.output_dir)});
    } else if (*fit) {
      return run_fit(kernel_arg, data, n_trunc, lam, fit_out);
    }
  } catch (const tkrr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const tkrr::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const tkrr::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kConfigError;
  } catch (const tkrr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const tkrr::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariantError;
  }
  return kOk;
}
