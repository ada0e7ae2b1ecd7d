#pragma once

#include "tkrr/kernels.hpp"

namespace tkrr {

/// Truncated kernel ridge regression: f(x) = sum_j w_j (1/n) K(X_j, x) over
/// the first N samples, with w = (A_N^T A_N + lam I_N)^{-1} A_N^T Y.
struct TkrrModel {
  KernelSpec kernel;
  Samples basis_points;
  Vector weights;
  double lam;
  int n;
  /// Ridge actually used; differs from `lam` only after the ill-conditioning
  /// retry.
  double lam_used;

  int n_trunc() const { return static_cast<int>(weights.size()); }
};

/// Full kernel ridge regression: f(x) = sum_i C_i K(X_i, x) with
/// C = (K + n lam I_n)^{-1} Y on the unscaled kernel matrix K.
struct KrrModel {
  KernelSpec kernel;
  Samples points;
  Vector coeffs;
  double lam;
  double lam_used;
};

TkrrModel fit_tkrr(const KernelSpec& kernel, const Samples& samples, const Vector& y, int n_trunc, double lam);
double predict_tkrr(const TkrrModel& model, const Point& x);
Vector predict_tkrr(const TkrrModel& model, const Samples& xs);

KrrModel fit_krr(const KernelSpec& kernel, const Samples& samples, const Vector& y, double lam);
double predict_krr(const KrrModel& model, const Point& x);
Vector predict_krr(const KrrModel& model, const Samples& xs);

/// Minimizer of ||K1 w - Y||_n^2 + lam w^T K2 w, i.e.
/// w = (K1^T K1 + n lam K2)^{-1} K1^T Y.
Vector fit_generalized_ridge(const Matrix& k1, const Matrix& k2, const Vector& y, double lam, int n);

/// Hat matrix A (A^T A + lam I)^{-1} A^T mapping observations to fitted
/// values at the training points.
Matrix tkrr_hat_matrix(const Matrix& a, double lam);

}  // namespace tkrr
