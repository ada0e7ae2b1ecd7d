#pragma once

#include "tkrr/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tkrr {

enum class SelectionRule { exponential, polynomial, refined_fixed_point };

const char* to_string(SelectionRule r);

/// Chosen truncation order and ridge parameter, with the inputs that produced
/// them.
struct SelectionResult {
  int n_trunc;
  double lam;
  SelectionRule rule;
  int n;
  double sigma2;
  /// Decay parameters used by the rule (b, n_b, s, n_s, a, gamma, c, ...).
  std::map<std::string, double> params;
  /// Solution of the fixed-point equation for refined rules.
  std::optional<double> fixed_point_eps;
};

/// Ceiling that ignores floating-point noise just above an integer.
int ceil_to_int(double x);

/// Exponential-decay rule: N = max(N_b, ceil(log(n / sigma2) / b)),
/// lam = sigma2 * min(N_b / n, log(n / sigma2) / (b n)).
SelectionResult select_exponential(double b, int n_b, int n, double sigma2);

/// Polynomial-decay rule with gamma = min(1, 2 - a):
/// N = max(N_s, ceil((n / sigma2)^(1 / (2s + gamma)))),
/// lam = min(N_s / n, (sigma2 / n)^(1 - 1 / (2s + gamma))).
SelectionResult select_polynomial(double s, int n_s, double a, int n, double sigma2);

/// Refined Sinc truncation order from Landau's degrees-of-freedom estimate.
/// Solves eps = (sigma2 / n) (2c/pi + (log(1/eps) / pi^2 + 1) log(2c/pi)) by
/// fixed-point iteration; lam uses the exponential rule with b = 2 and the
/// resulting N in place of N_b.
SelectionResult refined_truncation_sinc(double c, int n, double sigma2);

/// Refined truncation order from a tabulated spectrum:
/// N = d_inf(eps) with eps = (sigma2 / n) d_inf(eps)^(1 - eta),
/// eta = max(0, a - 1).
///
/// The map eps -> d_inf(eps) is integer valued, so an exact fixed point need
/// not exist. The result is the smallest N whose induced level
/// (sigma2 / n) N^(1 - eta) already has d_inf <= N; when the plain iteration
/// settles this is its limit. lam balances the variance term: sigma2 N / n.
SelectionResult refined_truncation_general(const EigenvalueTable& table, double a, int n, double sigma2);

/// (1/n) sum (pred_i - truth_i)^2.
double empirical_risk(const Vector& predictions, const Vector& truth);

/// Upper bound on the expected empirical risk of TKRR:
///   lam/2 + (2 sigma2 / n) sum_j (mu_j^2 / (mu_j^2 + lam))^2
///   + c1 (lambda_{N+1} ||f*||_H^2 + (1/N) sum_{k > N} lambda_k k^a).
double risk_bound_tkrr(double lam, int n, double sigma2, const EigenvalueTable& singvals,
                       const SpectralModel& spectrum, double rkhs_norm2, int n_trunc, double c1 = 1.0);

struct SincRate {
  double sigma2;
  int n;
  double c;
};
struct ExponentialRate {
  double sigma2;
  int n;
  double b;
  int n_b;
};
struct PolynomialRate {
  double sigma2;
  int n;
  double s;
  double gamma;
  int n_s;
};
/// lam/2 + 2 sigma2 N_b / n + lambda_N.
struct GaussianTableRate {
  double sigma2;
  int n;
  double lam;
  int n_b;
  double lambda_n;
};

using RateParams = std::variant<SincRate, ExponentialRate, PolynomialRate, GaussianTableRate>;

/// Convergence-rate value with every O(.) constant set to 1.
double rate_bound(const RateParams& params);

/// Keyed form: kind in {sinc, exponential, polynomial, gaussian_table};
/// throws DomainError naming any missing parameter.
double rate_bound(const std::string& kind, const std::map<std::string, double>& params);

}  // namespace tkrr
