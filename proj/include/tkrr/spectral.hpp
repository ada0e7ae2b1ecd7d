#pragma once

#include "tkrr/kernels.hpp"
#include "tkrr/sampling.hpp"

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace tkrr {

enum class TableSource { closed_form, nystrom, bound, empirical };

const char* to_string(TableSource s);

/// Finite, descending, nonnegative list of eigenvalues (or singular values).
/// Index 0 holds lambda_1.
class EigenvalueTable {
 public:
  EigenvalueTable() = default;
  /// Throws DomainError unless `values` is nonincreasing and nonnegative.
  EigenvalueTable(std::vector<double> values, TableSource source);

  const std::vector<double>& values() const { return values_; }
  std::span<const double> view() const { return values_; }
  TableSource source() const { return source_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double sum() const;

 private:
  std::vector<double> values_;
  TableSource source_ = TableSource::empirical;
};

/// lambda_k <= constant * exp(-b k) for k >= n_b.
///
/// `b` is stored exactly as the selection rules consume it. For the Gaussian
/// kernel two conventions exist: the eigenvalue ratio reciprocal
/// (c + xi + gamma) / xi, or its logarithm; see DecayConvention.
struct ExponentialDecay {
  double b;
  int n_b;
  double constant = 1.0;
};

/// lambda_k <= constant * k^(-2 s) for k >= n_s.
struct PolynomialDecay {
  double s;
  int n_s;
  double constant = 1.0;
};

using DecayModel = std::variant<ExponentialDecay, PolynomialDecay>;

enum class DecayConvention { ratio, log_ratio };

/// Spectrum of a kernel integral operator: an eigenvalue generator (1-based),
/// the sup-norm growth exponent a of the eigenfunctions
/// (||phi_k||_inf <~ k^(a/2)) and a decay classification.
class SpectralModel {
 public:
  using Generator = std::function<double(int)>;

  SpectralModel(Generator eigenvalue, double sup_norm_exponent, DecayModel decay);

  /// Closed-form Gaussian spectrum (a = 0, exponential decay from k = 1).
  static SpectralModel gaussian(double xi, double c, bool literal_constant = true,
                                DecayConvention convention = DecayConvention::ratio);

  /// Sinc spectrum (a = 1, b = 2, N_b = ceil(e c / 2)). Values come from
  /// `head` while it lasts and from the non-asymptotic upper bound beyond.
  static SpectralModel sinc(double c, EigenvalueTable head);

  /// Finite spectrum padded with zeros past the end of the table.
  static SpectralModel from_table(EigenvalueTable table, double sup_norm_exponent, DecayModel decay);

  double eigenvalue(int k) const;
  double sup_norm_exponent() const { return a_; }
  const DecayModel& decay() const { return decay_; }
  EigenvalueTable table(int count) const;

 private:
  Generator eigenvalue_;
  double a_;
  DecayModel decay_;
};

/// gamma = sqrt(c^2 + 2 c xi).
double gaussian_gamma(double xi, double c);

/// k-th eigenvalue of the Gaussian kernel operator on L2(dP_c).
///
/// With `literal_constant` the leading constant is sqrt(pi / (xi + c + gamma));
/// otherwise the value matching the normalized measure,
/// sqrt(2c / (c + xi + gamma)). The geometric ratio xi / (c + xi + gamma) is
/// the same in both.
double gaussian_eigenvalue(double xi, double c, int k, bool literal_constant = true);

/// Ratio lambda_{k+1} / lambda_k of the Gaussian spectrum.
double gaussian_eigenvalue_ratio(double xi, double c);

/// Normalized Hermite function psi_k(u), computed by the three-term
/// recurrence. |psi_k| <= pi^(-1/4) everywhere.
double hermite_function(int k, double u);

inline constexpr int kMaxGaussianEigenfunctionIndex = 200;

/// k-th dilated Hermite eigenfunction of the Gaussian kernel, 1 <= k <= 200.
double gaussian_eigenfunction(double xi, double c, int k, double x);

/// exp(-(2m+1) log(2(m+1) / (e c))), valid for m >= e c / 2.
double sinc_eigenvalue_upper_bound(double c, int m);

/// Landau's asymptotic count 2c/pi + log((1-eps)/eps) log(2c/pi) / pi^2.
double sinc_dof_estimate(double c, double eps);

/// min{k : table[k] <= eps}, 1-based. Throws DomainError if every entry
/// exceeds eps.
int degrees_of_freedom(const EigenvalueTable& table, double eps);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int order);
/// Gauss-Hermite rule for the weight exp(-u^2) on the real line.
QuadratureRule gauss_hermite(int order);

/// Reference measure of the discretized integral operator.
///
/// `probability` integrates against the sampling law itself. `lebesgue`
/// integrates against dx over the compact support, which is the convention
/// under which the Sinc operator reproduces the classical prolate
/// eigenvalues in (0, 1).
enum class OperatorMeasure { probability, lebesgue };

/// Top `count` eigenvalues of the Nystrom discretization
/// [sqrt(w_i) K(t_i, t_j) sqrt(w_j)] of the kernel integral operator.
EigenvalueTable nystrom_eigenvalues(const KernelSpec& kernel, const MeasureSpec& measure, int quad_order,
                                    int count, OperatorMeasure convention = OperatorMeasure::probability);

enum class TailPolicy {
  /// `base` is the whole spectrum; products are drawn from it alone.
  complete,
  /// `base` is the head of a longer spectrum; the result must be certified
  /// against products that involve unseen values.
  truncated,
};

/// The m largest d-fold products base[i1] * ... * base[id], descending, by
/// best-first search over the index lattice.
EigenvalueTable tensor_top_eigenvalues(const EigenvalueTable& base, int d, int m,
                                       TailPolicy policy = TailPolicy::complete);

}  // namespace tkrr
