#include "tkrr/harness.hpp"

#include "tkrr/error.hpp"
#include "tkrr/estimators.hpp"
#include "tkrr/gram.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace tkrr {

using nlohmann::json;

namespace {

// Runs body(r) for r = 0..count-1 on up to `threads` workers. The first
// exception by realization index is rethrown after all workers join.
template <class Body>
void for_each_realization(int count, int threads, Body body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) {
      try {
        body(r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < count; r = next++) {
          try {
            body(r);
          } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RngSeed covariate_seed(const ExperimentConfig& c, int r) {
  return {c.master_seed, static_cast<std::uint64_t>(r) + 1};
}

RngSeed noise_seed(const ExperimentConfig& c, int r) {
  return {c.master_seed, static_cast<std::uint64_t>(r) + 1 + kNoiseStreamOffset};
}

std::vector<double> log10_column(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::log10(v[i]);
  return out;
}

std::vector<double> true_spectrum(const ExperimentConfig& c, int count, std::string& source) {
  if (c.kernel.is_sinc()) {
    // Lebesgue convention on [-1, 1]; two quadrature orders must agree.
    const auto lebesgue = MeasureSpec::uniform_cube(1);
    const auto coarse = nystrom_eigenvalues(c.kernel, lebesgue, 400, count, OperatorMeasure::lebesgue);
    const auto fine = nystrom_eigenvalues(c.kernel, lebesgue, 600, count, OperatorMeasure::lebesgue);
    for (int k = 0; k < count; ++k) {
      if (std::abs(coarse[static_cast<std::size_t>(k)] - fine[static_cast<std::size_t>(k)]) > 1e-8) {
        std::ostringstream os;
        os << "Sinc Nystrom eigenvalue " << k + 1 << " differs between orders 400 and 600";
        throw InvariantError(os.str());
      }
    }
    source = "nystrom(lebesgue, order=400, checked at 600)";
    return coarse.values();
  }
  const double xi = c.kernel.gaussian_xi();
  const double scale = c.gaussian_reference_scale();
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(gaussian_eigenvalue(xi, scale, k, true));
  source = "closed-form(gaussian)";
  return out;
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

SpectraOutput run_spectra(const ExperimentConfig& config, int threads) {
  config.validate();
  if (config.experiment != ExperimentKind::spectra) throw ConfigError("run_spectra needs experiment=spectra");
  if (!config.kernel.is_univariate() || config.measure.dim() != 1) {
    throw ConfigError("spectra experiments need a univariate kernel and measure");
  }
  const int n = config.n;
  const int n_trunc = config.n_trunc_list.front();
  const int reps = config.realizations;

  std::vector<std::vector<double>> full(static_cast<std::size_t>(reps));
  std::vector<std::vector<double>> trunc(static_cast<std::size_t>(reps));
  std::vector<std::vector<double>> tail_full(static_cast<std::size_t>(reps));
  std::vector<std::vector<double>> tail_trunc(static_cast<std::size_t>(reps));

  for_each_realization(reps, threads, [&](int r) {
    const auto samples = draw(config.measure, n, covariate_seed(config, r));
    const auto b = build_full(config.kernel, samples);
    const auto lam = eigvals_desc(b);
    const auto mu = singvals_desc(truncate(b, n_trunc));
    const double kappa = b.kappa1;
    if (!interlacing_holds(mu, lam, 1e-8 * kappa)) {
      throw InvariantError("interlacing mu_i(A_N) <= lambda_i(B_n) violated in realization " + std::to_string(r + 1));
    }
    if (!(b.trace() <= kappa * (1.0 + 1e-12))) {
      throw InvariantError("trace(B_n) exceeds kappa1 in realization " + std::to_string(r + 1));
    }
    const auto idx = static_cast<std::size_t>(r);
    full[idx] = lam.values();
    trunc[idx] = mu.values();
    tail_full[idx] = trace_tails(lam);
    tail_trunc[idx] = trace_tails(mu);
  });

  SpectraOutput out;
  auto mean_column = [&](const std::vector<std::vector<double>>& per) {
    std::vector<double> m(static_cast<std::size_t>(n_trunc), 0.0);
    for (const auto& row : per) {
      for (int k = 0; k < n_trunc; ++k) m[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k)];
    }
    for (double& v : m) v /= reps;
    return m;
  };
  for (int k = 1; k <= n_trunc; ++k) out.j.push_back(k);
  out.true_eig = true_spectrum(config, n_trunc, out.true_eig_source);
  out.mean_full_eig = mean_column(full);
  out.mean_trunc_sv = mean_column(trunc);
  out.tail_full = mean_column(tail_full);
  out.tail_trunc = mean_column(tail_trunc);
  out.log10_true = log10_column(out.true_eig);
  out.log10_full = log10_column(out.mean_full_eig);
  out.log10_trunc = log10_column(out.mean_trunc_sv);
  for (int r = 0; r < reps; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    out.realization_tail_full.emplace_back(tail_full[idx].begin(), tail_full[idx].begin() + n_trunc);
    out.realization_tail_trunc.emplace_back(tail_trunc[idx].begin(), tail_trunc[idx].begin() + n_trunc);
  }
  return out;
}

SelectionResult resolve_lambda(const ExperimentConfig& config, double sigma) {
  const double sigma2 = sigma * sigma;
  const auto& rule = config.lam_rule;
  switch (rule.kind) {
    case LamRule::Kind::paper_fixed:
      return SelectionResult{config.n_trunc_list.front(), rule.value, SelectionRule::exponential, config.n, sigma2,
                             {{"value", rule.value}}, std::nullopt};
    case LamRule::Kind::exponential_rule: {
      if (sigma2 == 0.0) throw ConfigError("exponential_rule is inapplicable at sigma = 0");
      double b = 0.0;
      int n_b = 0;
      if (config.kernel.is_sinc()) {
        b = rule.b.value_or(2.0);
        n_b = rule.n_b.value_or(static_cast<int>(std::ceil(std::numbers::e * config.kernel.sinc_c() / 2.0)));
      } else {
        const double xi = config.kernel.gaussian_xi();
        const double c = config.gaussian_reference_scale();
        b = rule.b.value_or((c + xi + gaussian_gamma(xi, c)) / xi);
        if (!rule.n_b) throw ConfigError("exponential_rule for a Gaussian kernel needs n_b");
        n_b = *rule.n_b;
      }
      try {
        return select_exponential(b, n_b, config.n, sigma2);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("exponential_rule inapplicable: ") + e.what());
      }
    }
    case LamRule::Kind::refined_sinc: {
      if (!config.kernel.is_sinc()) throw ConfigError("refined_sinc needs a Sinc kernel");
      if (sigma2 == 0.0) throw ConfigError("refined_sinc is inapplicable at sigma = 0");
      try {
        return refined_truncation_sinc(config.kernel.sinc_c(), config.n, sigma2);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("refined_sinc inapplicable: ") + e.what());
      }
    }
  }
  throw ConfigError("unknown lam_rule");
}

namespace {

double cell_rate_bound(const ExperimentConfig& config, const SelectionResult& sel, double sigma) {
  const double sigma2 = sigma * sigma;
  if (config.kernel.is_sinc()) return rate_bound(SincRate{sigma2, config.n, config.kernel.sinc_c()});
  const double xi = config.kernel.gaussian_xi();
  const double c = config.gaussian_reference_scale();
  const auto nb_it = sel.params.find("n_b");
  if (nb_it == sel.params.end()) return std::numeric_limits<double>::quiet_NaN();
  const int n_b = static_cast<int>(nb_it->second);
  return rate_bound(GaussianTableRate{sigma2, config.n, sel.lam, n_b, gaussian_eigenvalue(xi, c, n_b, true)});
}

}  // namespace

std::vector<RiskReport> run_regression(const ExperimentConfig& config, int threads) {
  config.validate();
  if (config.experiment != ExperimentKind::regression) throw ConfigError("run_regression needs experiment=regression");
  if (!config.kernel.is_univariate()) throw ConfigError("regression experiments need a univariate kernel");

  struct Cell {
    double sigma;
    int n_trunc;
    double lam;
    double rate;
  };
  std::vector<Cell> cells;
  for (double sigma : config.sigma_list) {
    const auto sel = resolve_lambda(config, sigma);
    const double rate = cell_rate_bound(config, sel, sigma);
    for (int nt : config.n_trunc_list) cells.push_back({sigma, nt, sel.lam, rate});
  }

  const int reps = config.realizations;
  const auto& target = *config.regression_target;
  std::vector<std::vector<double>> risks(static_cast<std::size_t>(reps), std::vector<double>(cells.size()));
  const auto unit_noise = MeasureSpec::centered_normal(1.0);

  for_each_realization(reps, threads, [&](int r) {
    const auto samples = draw(config.measure, config.n, covariate_seed(config, r));
    const Vector truth = evaluate(target, samples);
    const Vector z = draw_scalars(unit_noise, config.n, noise_seed(config, r));
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& cell = cells[ci];
      const Vector y = truth + cell.sigma * z;
      const auto model = fit_tkrr(config.kernel, samples, y, cell.n_trunc, cell.lam);
      risks[static_cast<std::size_t>(r)][ci] = empirical_risk(predict_tkrr(model, samples), truth);
    }
  });

  std::vector<RiskReport> reports;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    RiskReport rep{cells[ci].sigma, cells[ci].n_trunc, cells[ci].lam, 0.0, 0.0, cells[ci].rate, {}};
    for (int r = 0; r < reps; ++r) rep.per_realization.push_back(risks[static_cast<std::size_t>(r)][ci]);
    double s = 0.0;
    for (double v : rep.per_realization) s += v;
    rep.empirical = s / reps;
    rep.empirical_std = sample_std(rep.per_realization, rep.empirical);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<SelectionResult> run_selection_report(const ExperimentConfig& config) {
  config.validate();
  if (config.lam_rule.kind == LamRule::Kind::paper_fixed) {
    throw ConfigError("selection reports need lam_rule exponential_rule or refined_sinc");
  }
  if (config.sigma_list.empty()) throw ConfigError("selection reports need a nonempty sigma_list");
  std::vector<SelectionResult> out;
  for (double sigma : config.sigma_list) out.push_back(resolve_lambda(config, sigma));
  return out;
}

std::string spectra_csv(const SpectraOutput& out) {
  std::ostringstream os;
  os << kSpectraCsvHeader << '\n';
  for (std::size_t i = 0; i < out.j.size(); ++i) {
    os << out.j[i] << ',' << format_number(out.true_eig[i]) << ',' << format_number(out.mean_full_eig[i]) << ','
       << format_number(out.mean_trunc_sv[i]) << ',' << format_number(out.tail_full[i]) << ','
       << format_number(out.tail_trunc[i]) << ',' << format_number(out.log10_true[i]) << ','
       << format_number(out.log10_full[i]) << ',' << format_number(out.log10_trunc[i]) << '\n';
  }
  return os.str();
}

std::string spectra_tails_csv(const SpectraOutput& out) {
  std::ostringstream os;
  os << "realization,j,tail_full,tail_trunc\n";
  for (std::size_t r = 0; r < out.realization_tail_full.size(); ++r) {
    for (std::size_t i = 0; i < out.realization_tail_full[r].size(); ++i) {
      os << r + 1 << ',' << i + 1 << ',' << format_number(out.realization_tail_full[r][i]) << ','
         << format_number(out.realization_tail_trunc[r][i]) << '\n';
    }
  }
  return os.str();
}

std::string regression_csv(const std::vector<RiskReport>& reports) {
  std::ostringstream os;
  os << kRegressionCsvHeader << '\n';
  for (const auto& r : reports) {
    os << format_number(r.sigma) << ',' << r.n_trunc << ',' << format_number(r.lam) << ','
       << format_number(r.empirical) << ',' << format_number(r.empirical_std) << ',' << format_number(r.theoretical)
       << '\n';
  }
  return os.str();
}

json selection_json(const std::vector<SelectionResult>& results) {
  json arr = json::array();
  for (const auto& r : results) {
    arr.push_back(json{{"sigma", std::sqrt(r.sigma2)},
                       {"rule", to_string(r.rule)},
                       {"n_trunc", r.n_trunc},
                       {"lambda", r.lam},
                       {"fixed_point_eps", r.fixed_point_eps ? json(*r.fixed_point_eps) : json(nullptr)}});
  }
  return arr;
}

json regression_meta_json(const ExperimentConfig& config, const std::vector<RiskReport>& reports) {
  json cells = json::array();
  for (const auto& r : reports) {
    cells.push_back(json{{"sigma", r.sigma},
                         {"n_trunc", r.n_trunc},
                         {"lambda", r.lam},
                         {"emp_risk_mean", r.empirical},
                         {"rate_bound", r.theoretical},
                         {"per_realization", r.per_realization}});
  }
  json meta{{"config", config_to_json(config)}, {"cells", cells}};
  if (config.lam_rule.kind != LamRule::Kind::paper_fixed) {
    meta["lambda_note"] = "lambda computed from the selection rule with O(.) constant 1";
  }
  if (!config.kernel.is_sinc()) {
    meta["rate_bound_note"] =
        "rate_bound = lam/2 + 2 sigma^2 N_b/n + lambda_{N_b} with constant 1; the published R_n column is not "
        "recovered exactly by this reading";
  }
  return meta;
}

std::vector<std::filesystem::path> write_spectra(const SpectraOutput& out, const std::filesystem::path& dir) {
  ensure_dir(dir);
  const auto main = dir / "spectra.csv";
  const auto tails = dir / "spectra_tails.csv";
  write_text(main, spectra_csv(out));
  write_text(tails, spectra_tails_csv(out));
  return {main, tails};
}

std::vector<std::filesystem::path> write_regression(const ExperimentConfig& config,
                                                    const std::vector<RiskReport>& reports,
                                                    const std::filesystem::path& dir) {
  ensure_dir(dir);
  const auto main = dir / "regression.csv";
  const auto meta = dir / "regression_meta.json";
  write_text(main, regression_csv(reports));
  write_text(meta, regression_meta_json(config, reports).dump(2) + "\n");
  return {main, meta};
}

std::filesystem::path write_selection(const std::vector<SelectionResult>& results, const std::filesystem::path& dir) {
  ensure_dir(dir);
  const auto path = dir / "selection.json";
  write_text(path, selection_json(results).dump(2) + "\n");
  return path;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("data file " + path.string() + " is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) {
      while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
      while (!cur.empty() && cur.front() == ' ') cur.erase(cur.begin());
      parts.push_back(cur);
    }
    return parts;
  };
  const auto header = split(line);
  if (header.size() < 2 || header.back() != "y") throw ConfigError("data header must be x_1,...,x_d,y");
  const int d = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < d; ++i) {
    if (header[static_cast<std::size_t>(i)] != "x_" + std::to_string(i + 1)) {
      throw ConfigError("data header must be x_1,...,x_d,y");
    }
  }
  Dataset ds;
  std::vector<double> ys;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto parts = split(line);
    if (static_cast<int>(parts.size()) != d + 1) {
      throw ConfigError("data line " + std::to_string(lineno) + " has the wrong number of columns");
    }
    std::vector<double> vals;
    for (const auto& p : parts) {
      double v = 0.0;
      const auto res = std::from_chars(p.data(), p.data() + p.size(), v);
      if (res.ec != std::errc() || res.ptr != p.data() + p.size()) {
        throw ConfigError("data line " + std::to_string(lineno) + ": '" + p + "' is not a number");
      }
      vals.push_back(v);
    }
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = vals[static_cast<std::size_t>(i)];
    ds.x.push_back(std::move(x));
    ys.push_back(vals.back());
  }
  if (ds.x.empty()) throw ConfigError("data file has no rows");
  ds.y = Eigen::Map<Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return ds;
}

}  // namespace tkrr
