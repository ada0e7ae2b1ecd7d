// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "test_support.hpp"

#include "tkrr/config.hpp"
#include "tkrr/estimators.hpp"
#include "tkrr/gram.hpp"
#include "tkrr/harness.hpp"
#include "tkrr/selection.hpp"
#include "tkrr/spectral.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tkrr;
using tkrr::testing::agrees_to_sig_figs;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(TKRR_SOURCE_DIR) / "configs";

// Tolerances.
constexpr double kSelectionBudgetMs = 1.0;
constexpr double kPipelineBudgetS = 30.0;
constexpr double kSpectralBudgetS = 5.0;
constexpr double kRiskFactor = 5.0;
constexpr double kRateFactor = 2.0;
constexpr double kRatioRelTol = 1e-6;
constexpr int kHermiteOrder = 200;
constexpr double kPropertyTol = 1e-8;
// Floor for comparing Nystrom eigenvalues with the Sinc bound once both are
// below double-precision resolution of the discretized operator.
constexpr double kNystromFloor = 1e-14;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Mean wall time of one call, in milliseconds.
double time_ms(const std::function<void()>& f, int reps = 200) {
  f();
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) f();
  return 1e3 * seconds_since(t0) / reps;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

int g_failures = 0;

void report(int id, const char* name, Outcome& o) {
  std::printf("criterion %d %s: %s%s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

bool within_factor(double v, double ref, double factor) { return v <= factor * ref && v >= ref / factor; }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_selection() {
  Outcome o;
  SelectionResult r = select_exponential(2.0, 34, 200, 0.01);
  const double ms = time_ms([&] { r = select_exponential(2.0, 34, 200, 0.01); });
  o.require(agrees_to_sig_figs(r.lam, 2.47e-4, 3), "lambda " + sci(r.lam) + " vs 2.47e-4");
  o.require(ms < kSelectionBudgetMs, "runtime " + std::to_string(ms) + " ms");
  o.detail << " lambda=" << sci(r.lam) << " N=" << r.n_trunc << " time=" << ms << "ms";
  report(1, "exponential selection rule", o);
}

void criterion_fixed_point() {
  Outcome o;
  for (const auto& [s2, expect] : {std::pair{0.01, 21}, std::pair{0.25, 20}}) {
    SelectionResult r = refined_truncation_sinc(25.0, 200, s2);
    const double ms = time_ms([&] { r = refined_truncation_sinc(25.0, 200, s2); });
    o.require(r.n_trunc == expect, "sigma2=" + sci(s2) + " N=" + std::to_string(r.n_trunc));
    o.require(ms < kSelectionBudgetMs, "runtime " + std::to_string(ms) + " ms");
    o.detail << " sigma2=" << s2 << ":N=" << r.n_trunc << "," << ms << "ms";
  }
  report(2, "refined Sinc truncation order", o);
}

void criterion_rate() {
  Outcome o;
  const double a = rate_bound(SincRate{0.01, 200, 25.0});
  const double b = rate_bound(SincRate{0.25, 200, 25.0});
  o.require(agrees_to_sig_figs(a, 1.70e-3, 3), "sigma=0.1 " + sci(a));
  o.require(agrees_to_sig_figs(b, 4.25e-2, 3), "sigma=0.5 " + sci(b));
  o.detail << " R_n=" << sci(a) << "," << sci(b);
  report(3, "Sinc rate bound", o);
}

void check_table(Outcome& o, const std::vector<RiskReport>& reports,
                 const std::map<std::pair<double, int>, double>& reference_risk, const std::map<double, double>& reference_rate,
                 bool rate_sig_figs, bool risk_below_rate_at_half) {
  for (const auto& r : reports) {
    const auto key = std::pair{r.sigma, r.n_trunc};
    const double ref = reference_risk.at(key);
    const std::string cell = "s=" + std::to_string(r.sigma).substr(0, 3) + ",N=" + std::to_string(r.n_trunc);
    o.require(within_factor(r.empirical, ref, kRiskFactor), cell + " risk " + sci(r.empirical) + " vs " + sci(ref));
    const double rate_ref = reference_rate.at(r.sigma);
    if (rate_sig_figs)
      o.require(agrees_to_sig_figs(r.theoretical, rate_ref, 3), cell + " R_n " + sci(r.theoretical));
    else
      o.require(within_factor(r.theoretical, rate_ref, kRateFactor),
                cell + " R_n " + sci(r.theoretical) + " vs " + sci(rate_ref));
    if (risk_below_rate_at_half && r.sigma == 0.5)
      o.require(r.empirical <= r.theoretical, cell + " risk above R_n");
  }
}

void criterion_table1() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto cfg = load_config(kConfigs / "example2_sinc_regression.json");
  const auto reports = run_regression(cfg);
  const double s = seconds_since(t0);
  const std::map<std::pair<double, int>, double> reference{
      {{0.1, 20}, 9.05e-3}, {{0.1, 25}, 4.64e-3}, {{0.1, 30}, 1.02e-3}, {{0.1, 50}, 1.00e-3},
      {{0.5, 20}, 2.07e-2}, {{0.5, 25}, 2.21e-2}, {{0.5, 30}, 2.20e-2}, {{0.5, 50}, 1.92e-2}};
  o.require(reports.size() == 8, "expected 8 cells");
  check_table(o, reports, reference, {{0.1, 1.70e-3}, {0.5, 4.25e-2}}, true, true);
  o.require(s < kPipelineBudgetS, "runtime " + std::to_string(s) + " s");
  o.detail << " time=" << s << "s";
  report(4, "Sinc regression reference risks", o);
}

void criterion_table2() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto cfg = load_config(kConfigs / "example3_gaussian_regression.json");
  const auto reports = run_regression(cfg);
  const double s = seconds_since(t0);
  const std::map<std::pair<double, int>, double> reference{
      {{0.1, 20}, 1.13e-2}, {{0.1, 25}, 5.26e-3}, {{0.1, 30}, 1.91e-3}, {{0.1, 50}, 1.10e-3},
      {{0.5, 20}, 1.20e-2}, {{0.5, 25}, 1.43e-2}, {{0.5, 30}, 1.04e-2}, {{0.5, 50}, 8.72e-3}};
  o.require(reports.size() == 8, "expected 8 cells");
  check_table(o, reports, reference, {{0.1, 4.75e-3}, {0.5, 5.01e-2}}, false, false);
  o.require(s < kPipelineBudgetS, "runtime " + std::to_string(s) + " s");
  o.detail << " time=" << s << "s";
  report(5, "Gaussian regression reference risks", o);
}

void criterion_spectral() {
  Outcome o;
  const auto t0 = Clock::now();
  const double closed = gaussian_eigenvalue_ratio(25.0, 1.0);
  const double exact = 25.0 / (26.0 + std::sqrt(51.0));
  o.require(std::abs(closed - exact) <= 1e-15 * exact, "closed-form ratio");
  const auto ny = nystrom_eigenvalues(KernelSpec::gaussian(25.0), MeasureSpec::gaussian(1.0), kHermiteOrder, 10);
  double worst = 0.0;
  for (int k = 0; k + 1 < 10; ++k) worst = std::max(worst, std::abs(ny[k + 1] / ny[k] - closed) / closed);
  o.require(worst <= kRatioRelTol, "Nystrom ratio error " + sci(worst));
  const double s = seconds_since(t0);
  o.require(s < kSpectralBudgetS, "runtime " + std::to_string(s) + " s");
  o.detail << " worst_rel_ratio_err=" << sci(worst) << " time=" << s << "s";
  report(6, "Gaussian spectral oracle", o);
}

void criterion_properties() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  auto random_case = [&](int max_n) {
    const auto k = tkrr::testing::random_kernel(rng);
    const auto m = tkrr::testing::random_measure(rng);
    const int n = std::uniform_int_distribution<int>(2, max_n)(rng);
    const int n_trunc = std::uniform_int_distribution<int>(1, n)(rng);
    const double lam = std::pow(10.0, std::uniform_real_distribution<double>(-6.0, 0.0)(rng));
    const std::uint64_t s = rng();
    return std::tuple{k, draw(m, n, {s, 1}), Vector(draw_scalars(MeasureSpec::centered_normal(1.0), n, {s, 2})),
                      n_trunc, lam};
  };

  int bad_interlace = 0, bad_trace = 0;
  for (int t = 0; t < 100; ++t) {
    auto [k, xs, y, n_trunc, lam] = random_case(100);
    const auto g = build_full(k, xs);
    const double k1 = kappa1(k);
    if (!interlacing_holds(singvals_desc(truncate(g, n_trunc)), eigvals_desc(g), kPropertyTol * k1)) ++bad_interlace;
    const double sum = eigvals_desc(g).sum();
    double diag = 0.0;
    for (const auto& x : xs) diag += eval(k, x, x);
    diag /= static_cast<double>(xs.size());
    if (std::abs(sum - diag) > kPropertyTol * diag || diag > k1 * (1 + kPropertyTol)) ++bad_trace;
  }
  o.require(bad_interlace == 0, std::to_string(bad_interlace) + " interlacing violations");
  o.require(bad_trace == 0, std::to_string(bad_trace) + " trace identity violations");

  int bad_hat = 0;
  for (int t = 0; t < 100; ++t) {
    auto [k, xs, y, n_trunc, lam] = random_case(80);
    const Matrix a = build_truncated(k, xs, n_trunc).entries;
    const Matrix h = tkrr_hat_matrix(a, lam);
    const double hn = Eigen::JacobiSVD<Matrix>(h).singularValues()(0);
    const Matrix r = (h - Matrix::Identity(h.rows(), h.cols())) * a;
    const double rn = Eigen::JacobiSVD<Matrix>(r).singularValues()(0);
    if (hn > 1.0 + kPropertyTol || rn * rn > lam / 4.0 + kPropertyTol) ++bad_hat;
  }
  o.require(bad_hat == 0, std::to_string(bad_hat) + " hat-matrix violations");

  int bad_reduction = 0;
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    auto [k, xs, y, n_trunc, lam] = random_case(60);
    const int n = static_cast<int>(xs.size());
    const Matrix a = build_truncated(k, xs, n_trunc).entries;
    const Vector w = fit_generalized_ridge(a, Matrix::Identity(n_trunc, n_trunc) / n, y, lam, n);
    const Vector w_ref = fit_tkrr(k, xs, y, n_trunc, lam).weights;
    if ((w - w_ref).norm() > kPropertyTol * std::max(1.0, w_ref.norm())) ++bad_reduction;
    Matrix b(n, n);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = nd(rng);
    const Matrix km = b * b.transpose() / n + 0.5 * Matrix::Identity(n, n);
    const Vector c = fit_generalized_ridge(km, km, y, lam, n);
    const Vector c_ref = (km + n * lam * Matrix::Identity(n, n)).llt().solve(y);
    if ((c - c_ref).norm() > kPropertyTol * std::max(1.0, c_ref.norm())) ++bad_reduction;
  }
  o.require(bad_reduction == 0, std::to_string(bad_reduction) + " reduction mismatches");

  int bad_shrink = 0;
  for (int t = 0; t < 50; ++t) {
    auto [k, xs, y, n_trunc, lam] = random_case(80);
    double prev = std::numeric_limits<double>::infinity();
    for (double l : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const double wn = fit_tkrr(k, xs, y, n_trunc, l).weights.norm();
      if (wn > prev * (1 + 1e-10)) ++bad_shrink;
      prev = wn;
    }
  }
  o.require(bad_shrink == 0, std::to_string(bad_shrink) + " shrinkage violations");

  const auto sinc = nystrom_eigenvalues(KernelSpec::sinc(25.0), MeasureSpec::uniform_cube(1), 400, 60,
                                        OperatorMeasure::lebesgue);
  int bad_bound = 0;
  for (int m = 34; m <= 60; ++m)
    if (sinc[m - 1] > sinc_eigenvalue_upper_bound(25.0, m) + kNystromFloor * sinc[0]) ++bad_bound;
  o.require(bad_bound == 0, std::to_string(bad_bound) + " Sinc bound violations");

  int bad_tensor = 0, tensor_cases = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int len = 1; len <= 5; ++len)
    for (int d = 1; d <= 3; ++d)
      for (int rep = 0; rep < 4; ++rep) {
        std::vector<double> v(len);
        for (auto& x : v) x = u(rng);
        std::sort(v.begin(), v.end(), std::greater<>());
        std::vector<double> all{1.0};
        for (int i = 0; i < d; ++i) {
          std::vector<double> next;
          for (double p : all)
            for (double q : v) next.push_back(p * q);
          all.swap(next);
        }
        std::sort(all.begin(), all.end(), std::greater<>());
        for (int m = 1; m <= static_cast<int>(all.size()); ++m) {
          ++tensor_cases;
          const auto got = tensor_top_eigenvalues(EigenvalueTable(v, TableSource::empirical), d, m);
          for (int i = 0; i < m; ++i)
            if (std::abs(got[i] - all[i]) > 1e-14 * all[0]) {
              ++bad_tensor;
              break;
            }
        }
      }
  o.require(bad_tensor == 0, std::to_string(bad_tensor) + " tensor mismatches");
  o.detail << " tensor_cases=" << tensor_cases;
  report(7, "property suite", o);
}

void criterion_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "tkrr_acceptance";
  fs::remove_all(root);
  auto run_all = [&](const fs::path& dir, int threads) {
    write_spectra(run_spectra(load_config(kConfigs / "example1_sinc_spectra.json"), threads), dir / "s1");
    write_spectra(run_spectra(load_config(kConfigs / "example1_gaussian_spectra.json"), threads), dir / "s2");
    for (const char* name : {"example2_sinc_regression.json", "example3_gaussian_regression.json"}) {
      const auto cfg = load_config(kConfigs / name);
      write_regression(cfg, run_regression(cfg, threads), dir / fs::path(name).stem());
    }
    write_selection(run_selection_report(load_config(kConfigs / "example2_selection.json")), dir / "sel");
  };
  run_all(root / "a", 1);
  run_all(root / "b", 1);
  run_all(root / "c", 4);
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), root / "a");
    const std::string ref = slurp(e.path());
    o.require(ref == slurp(root / "b" / rel), "rerun differs: " + rel.string());
    o.require(ref == slurp(root / "c" / rel), "parallel differs: " + rel.string());
  }
  o.require(files == 9, "expected 9 output files, got " + std::to_string(files));
  o.detail << " files=" << files;
  fs::remove_all(root);
  report(8, "determinism", o);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_selection, criterion_fixed_point, criterion_rate,
                                                    criterion_table1,    criterion_table2,      criterion_spectral,
                                                    criterion_properties, criterion_determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("criterion %zu FAIL: exception %s\n", i + 1, e.what());
      ++g_failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", g_failures, criteria.size());
  return g_failures == 0 ? 0 : 1;
}
