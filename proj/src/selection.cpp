#include "tkrr/selection.hpp"

#include "tkrr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tkrr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_noise_ratio(int n, double sigma2) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be positive");
  if (!(static_cast<double>(n) / sigma2 > 1.0)) throw DomainError("selection rules require n / sigma2 > 1");
}

double exponential_lambda(double b, double n_b, int n, double sigma2) {
  const double nn = static_cast<double>(n);
  return sigma2 * std::min(n_b / nn, std::log(nn / sigma2) / (b * nn));
}

double landau_count(double c, double eps) {
  const double plateau = 2.0 * c / std::numbers::pi;
  return plateau + (std::log(1.0 / eps) / (std::numbers::pi * std::numbers::pi) + 1.0) * std::log(plateau);
}

}  // namespace

const char* to_string(SelectionRule r) {
  switch (r) {
    case SelectionRule::exponential: return "exponential";
    case SelectionRule::polynomial: return "polynomial";
    case SelectionRule::refined_fixed_point: return "refined_fixed_point";
  }
  return "unknown";
}

int ceil_to_int(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<int>(r);
  return static_cast<int>(std::ceil(x));
}

SelectionResult select_exponential(double b, int n_b, int n, double sigma2) {
  if (!(b > 0.0)) throw DomainError("decay rate b must be positive");
  if (n_b < 1) throw DomainError("N_b must be >= 1");
  check_noise_ratio(n, sigma2);
  const double lg = std::log(static_cast<double>(n) / sigma2);
  const int n_trunc = std::max(n_b, ceil_to_int(lg / b));
  return SelectionResult{n_trunc,
                         exponential_lambda(b, n_b, n, sigma2),
                         SelectionRule::exponential,
                         n,
                         sigma2,
                         {{"b", b}, {"n_b", static_cast<double>(n_b)}},
                         std::nullopt};
}

SelectionResult select_polynomial(double s, int n_s, double a, int n, double sigma2) {
  if (!(a >= 0.0) || !(s > a / 2.0)) throw DomainError("polynomial rule requires s > a/2 >= 0");
  if (n_s < 1) throw DomainError("N_s must be >= 1");
  check_noise_ratio(n, sigma2);
  const double gamma = std::min(1.0, 2.0 - a);
  const double expo = 2.0 * s + gamma;
  if (!(expo > 0.0)) throw DomainError("polynomial rule requires 2s + gamma > 0");
  const double nn = static_cast<double>(n);
  const int n_trunc = std::max(n_s, ceil_to_int(std::pow(nn / sigma2, 1.0 / expo)));
  const double lam = std::min(n_s / nn, std::pow(sigma2 / nn, 1.0 - 1.0 / expo));
  return SelectionResult{n_trunc,
                         lam,
                         SelectionRule::polynomial,
                         n,
                         sigma2,
                         {{"s", s}, {"n_s", static_cast<double>(n_s)}, {"a", a}, {"gamma", gamma}},
                         std::nullopt};
}

SelectionResult refined_truncation_sinc(double c, int n, double sigma2) {
  if (!(c >= 1.0)) throw DomainError("refined_truncation_sinc requires c >= 1");
  check_noise_ratio(n, sigma2);
  const double scale = sigma2 / static_cast<double>(n);
  double eps = scale * 2.0 * c / std::numbers::pi;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double next = scale * landau_count(c, eps);
    if (!(next > 0.0) || !std::isfinite(next)) break;
    const bool done = std::abs(next - eps) <= 1e-12 * std::abs(next);
    eps = next;
    if (done) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("refined Sinc fixed-point iteration did not converge in 100 steps");
  const int n_trunc = ceil_to_int(landau_count(c, eps));
  constexpr double b = 2.0;
  return SelectionResult{n_trunc,
                         exponential_lambda(b, n_trunc, n, sigma2),
                         SelectionRule::refined_fixed_point,
                         n,
                         sigma2,
                         {{"c", c}, {"b", b}, {"a", 1.0}},
                         eps};
}

SelectionResult refined_truncation_general(const EigenvalueTable& table, double a, int n, double sigma2) {
  if (table.empty()) throw DomainError("refined_truncation_general needs a nonempty table");
  if (!(a >= 0.0)) throw DomainError("sup-norm exponent a must be >= 0");
  check_noise_ratio(n, sigma2);
  const double eta = std::max(0.0, a - 1.0);
  const double scale = sigma2 / static_cast<double>(n);
  auto level = [&](int dof) { return scale * std::pow(static_cast<double>(dof), 1.0 - eta); };
  auto certified = [&](int cand) { return degrees_of_freedom(table, level(cand)) <= cand; };

  auto finish = [&](int n_trunc) {
    const double eps = level(n_trunc);
    return SelectionResult{n_trunc,
                           sigma2 * n_trunc / static_cast<double>(n),
                           SelectionRule::refined_fixed_point,
                           n,
                           sigma2,
                           {{"a", a}, {"eta", eta}},
                           eps};
  };

  // Plain iteration eps <- scale * dof(eps)^(1 - eta), tracked through N.
  int prev = degrees_of_freedom(table, scale);
  int prev2 = -1;
  for (int it = 0; it < 100; ++it) {
    const int next = degrees_of_freedom(table, level(prev));
    if (next == prev) return finish(next);
    if (next == prev2) {
      // Two-cycle: the crossing lies between the candidates.
      const int lo = std::min(prev, next);
      const int hi = std::max(prev, next);
      for (int cand = lo; cand <= hi; ++cand) {
        if (certified(cand)) return finish(cand);
      }
      std::ostringstream os;
      os << "refined truncation oscillates between N=" << lo << " and N=" << hi;
      throw NumericalError(os.str());
    }
    prev2 = prev;
    prev = next;
  }
  std::ostringstream os;
  os << "refined truncation did not stabilize in 100 steps (last candidates N=" << prev2 << ", N=" << prev << ")";
  throw NumericalError(os.str());
}

double empirical_risk(const Vector& predictions, const Vector& truth) {
  if (predictions.size() != truth.size()) throw DomainError("empirical_risk: length mismatch");
  if (predictions.size() < 1) throw DomainError("empirical_risk needs at least one value");
  return (predictions - truth).squaredNorm() / static_cast<double>(predictions.size());
}

double risk_bound_tkrr(double lam, int n, double sigma2, const EigenvalueTable& singvals,
                       const SpectralModel& spectrum, double rkhs_norm2, int n_trunc, double c1) {
  if (!(lam > 0.0)) throw DomainError("lam must be positive");
  if (n < 1 || n_trunc < 1) throw DomainError("n and N must be >= 1");
  if (!(sigma2 >= 0.0) || !(rkhs_norm2 >= 0.0) || !(c1 > 0.0)) throw DomainError("invalid risk-bound parameters");
  if (static_cast<int>(singvals.size()) != n_trunc) throw DomainError("singvals must hold exactly N values");
  const double a = spectrum.sup_norm_exponent();
  if (const auto* p = std::get_if<PolynomialDecay>(&spectrum.decay())) {
    if (2.0 * p->s - a <= 1.0) throw DomainError("tail sum diverges: polynomial decay needs 2s - a > 1");
  }

  double filter = 0.0;
  for (double mu : singvals.values()) {
    const double f = mu * mu / (mu * mu + lam);
    filter += f * f;
  }

  double tail = 0.0;
  constexpr int kMaxTerms = 10'000'000;
  for (int k = n_trunc + 1;; ++k) {
    if (k - n_trunc > kMaxTerms) throw NumericalError("risk-bound tail did not converge");
    const double term = spectrum.eigenvalue(k) * std::pow(static_cast<double>(k), a);
    tail += term;
    if (term <= 1e-16 * tail) break;
  }

  return lam / 2.0 + 2.0 * sigma2 / static_cast<double>(n) * filter +
         c1 * (spectrum.eigenvalue(n_trunc + 1) * rkhs_norm2 + tail / static_cast<double>(n_trunc));
}

double rate_bound(const RateParams& params) {
  // sigma2 -> 0 limits are taken explicitly: sigma2 log(n / sigma2) -> 0.
  return std::visit(
      overloaded{
          [](const SincRate& p) {
            if (p.n < 1 || !(p.c > 0.0) || !(p.sigma2 >= 0.0)) throw DomainError("invalid sinc rate parameters");
            if (p.sigma2 == 0.0) return 0.0;
            const double nn = p.n;
            return p.sigma2 * std::max(std::numbers::e * p.c / (2.0 * nn), std::log(nn / p.sigma2) / (2.0 * nn));
          },
          [](const ExponentialRate& p) {
            if (p.n < 1 || !(p.b > 0.0) || p.n_b < 1 || !(p.sigma2 >= 0.0)) {
              throw DomainError("invalid exponential rate parameters");
            }
            if (p.sigma2 == 0.0) return 0.0;
            const double nn = p.n;
            return p.sigma2 * std::max(p.n_b / nn, std::log(nn / p.sigma2) / (p.b * nn));
          },
          [](const PolynomialRate& p) {
            if (p.n < 1 || p.n_s < 1 || !(p.sigma2 > 0.0)) throw DomainError("invalid polynomial rate parameters");
            const double expo = 2.0 * p.s + p.gamma;
            if (!(expo > 0.0)) throw DomainError("polynomial rate requires 2s + gamma > 0");
            const double nn = p.n;
            return std::max(p.sigma2 * p.n_s / nn, std::pow(nn / p.sigma2, -(expo - 1.0) / expo));
          },
          [](const GaussianTableRate& p) {
            if (p.n < 1 || p.n_b < 1 || !(p.lam > 0.0)) throw DomainError("invalid gaussian_table rate parameters");
            return p.lam / 2.0 + 2.0 * p.sigma2 * p.n_b / static_cast<double>(p.n) + p.lambda_n;
          },
      },
      params);
}

double rate_bound(const std::string& kind, const std::map<std::string, double>& params) {
  auto get = [&](const char* key) {
    const auto it = params.find(key);
    if (it == params.end()) throw DomainError("rate_bound(" + kind + "): missing parameter '" + key + "'");
    return it->second;
  };
  auto get_int = [&](const char* key) { return static_cast<int>(std::lround(get(key))); };
  if (kind == "sinc") return rate_bound(SincRate{get("sigma2"), get_int("n"), get("c")});
  if (kind == "exponential") return rate_bound(ExponentialRate{get("sigma2"), get_int("n"), get("b"), get_int("n_b")});
  if (kind == "polynomial") {
    return rate_bound(PolynomialRate{get("sigma2"), get_int("n"), get("s"), get("gamma"), get_int("n_s")});
  }
  if (kind == "gaussian_table") {
    return rate_bound(GaussianTableRate{get("sigma2"), get_int("n"), get("lam"), get_int("n_b"), get("lambda_n")});
  }
  throw DomainError("unknown rate_bound kind '" + kind + "'");
}

}  // namespace tkrr
