#pragma once

#include "tkrr/kernels.hpp"
#include "tkrr/spectral.hpp"

namespace tkrr {

/// B_n = (1/n) [K(X_i, X_j)], the full random Gram matrix.
struct GramFull {
  Matrix entries;
  Samples samples;
  /// sup of the kernel diagonal; scale for roundoff thresholds.
  double kappa1 = 1.0;

  int n() const { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.trace(); }

  /// Wraps an arbitrary symmetric matrix (no generating samples).
  static GramFull from_matrix(Matrix m, double kappa1);
};

/// A_N: the first N columns of B_n.
struct GramTruncated {
  Matrix entries;
  double kappa1 = 1.0;

  int n() const { return static_cast<int>(entries.rows()); }
  int n_trunc() const { return static_cast<int>(entries.cols()); }
};

GramFull build_full(const KernelSpec& kernel, const Samples& samples);
GramTruncated build_truncated(const KernelSpec& kernel, const Samples& samples, int n_trunc);
GramTruncated truncate(const GramFull& full, int n_trunc);

/// All eigenvalues of B_n, descending. Negative values within
/// 1e-10 * kappa1 of zero are clamped to 0; larger ones raise InvariantError.
EigenvalueTable eigvals_desc(const GramFull& g);

/// Singular values of A_N, descending, from the eigenvalues of A_N^T A_N.
EigenvalueTable singvals_desc(const GramTruncated& a);

/// sum_{j >= k} table[j] (1-based k, 1 <= k <= size + 1).
double trace_tail(const EigenvalueTable& table, int k);

/// All tails T_1, ..., T_size.
std::vector<double> trace_tails(const EigenvalueTable& table);

/// sum_j table[j] / (table[j] + lam).
double statistical_dimension(const EigenvalueTable& table, double lam);

/// mu[i] <= lam_full[i] + tol for every i < size(mu).
bool interlacing_holds(const EigenvalueTable& mu, const EigenvalueTable& lam_full, double tol);

}  // namespace tkrr
