#include "tkrr/estimators.hpp"

#include "tkrr/error.hpp"
#include "tkrr/gram.hpp"

#include <cmath>
#include <sstream>

namespace tkrr {

namespace {

void check_fit_inputs(const KernelSpec& kernel, const Samples& samples, const Vector& y, double lam) {
  if (samples.empty()) throw DomainError("fit needs at least one sample");
  if (static_cast<std::size_t>(y.size()) != samples.size()) throw DomainError("length(y) must equal n");
  if (!(lam > 0.0) || !std::isfinite(lam)) throw DomainError("lam must be a positive finite number");
  if (!y.allFinite()) throw DomainError("observations must be finite");
  for (const auto& x : samples) {
    if (x.size() != kernel.dim()) throw DomainError("sample dimension does not match kernel dimension");
    if (!x.allFinite()) throw DomainError("samples must be finite");
  }
}

struct RidgeSolve {
  Vector solution;
  double lam_used;
};

// Solves (gram + lam * scale * I) x = rhs by Cholesky. If the factorization
// fails, retries once with lam inflated by 1e-12 * trace(gram).
RidgeSolve solve_ridge(const Matrix& gram, const Vector& rhs, double lam, double scale) {
  const auto m = gram.rows();
  double lam_try = lam;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Matrix sys = gram;
    sys.diagonal().array() += lam_try * scale;
    Eigen::LLT<Matrix> llt(sys);
    if (llt.info() == Eigen::Success) {
      Vector x = llt.solve(rhs);
      if (x.allFinite()) return {std::move(x), lam_try};
    }
    lam_try = lam + 1e-12 * gram.trace() / scale;
  }
  std::ostringstream os;
  os << "ridge system of size " << m << " is not numerically positive definite (lam=" << lam << ")";
  throw NumericalError(os.str());
}

}  // namespace

TkrrModel fit_tkrr(const KernelSpec& kernel, const Samples& samples, const Vector& y, int n_trunc, double lam) {
  check_fit_inputs(kernel, samples, y, lam);
  const auto a = build_truncated(kernel, samples, n_trunc);
  const Matrix ata = a.entries.transpose() * a.entries;
  const Vector rhs = a.entries.transpose() * y;
  auto solved = solve_ridge(ata, rhs, lam, 1.0);
  Samples basis(samples.begin(), samples.begin() + n_trunc);
  return TkrrModel{kernel, std::move(basis), std::move(solved.solution), lam, static_cast<int>(samples.size()),
                   solved.lam_used};
}

double predict_tkrr(const TkrrModel& model, const Point& x) {
  if (x.size() != model.kernel.dim()) throw DomainError("query dimension does not match kernel dimension");
  double s = 0.0;
  for (int j = 0; j < model.n_trunc(); ++j) {
    s += model.weights[j] * eval(model.kernel, model.basis_points[static_cast<std::size_t>(j)], x);
  }
  return s / static_cast<double>(model.n);
}

Vector predict_tkrr(const TkrrModel& model, const Samples& xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = predict_tkrr(model, xs[i]);
  return out;
}

KrrModel fit_krr(const KernelSpec& kernel, const Samples& samples, const Vector& y, double lam) {
  check_fit_inputs(kernel, samples, y, lam);
  const auto n = static_cast<double>(samples.size());
  // build_full scales by 1/n; undo it to get the plain kernel matrix.
  const Matrix k = build_full(kernel, samples).entries * n;
  auto solved = solve_ridge(k, y, lam, n);
  return KrrModel{kernel, samples, std::move(solved.solution), lam, solved.lam_used};
}

double predict_krr(const KrrModel& model, const Point& x) {
  if (x.size() != model.kernel.dim()) throw DomainError("query dimension does not match kernel dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    s += model.coeffs[static_cast<Eigen::Index>(i)] * eval(model.kernel, model.points[i], x);
  }
  return s;
}

Vector predict_krr(const KrrModel& model, const Samples& xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out[static_cast<Eigen::Index>(i)] = predict_krr(model, xs[i]);
  return out;
}

Vector fit_generalized_ridge(const Matrix& k1, const Matrix& k2, const Vector& y, double lam, int n) {
  if (k1.rows() != y.size()) throw DomainError("K1 rows must equal length(y)");
  if (k2.rows() != k2.cols() || k2.rows() != k1.cols()) throw DomainError("K2 must be square with size cols(K1)");
  if (!(lam > 0.0) || n < 1) throw DomainError("generalized ridge requires lam > 0 and n >= 1");
  const Matrix sys = k1.transpose() * k1 + (static_cast<double>(n) * lam) * k2;
  const Vector rhs = k1.transpose() * y;
  Eigen::LDLT<Matrix> ldlt(sys);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-15) {
    throw NumericalError("generalized ridge system is singular");
  }
  Vector w = ldlt.solve(rhs);
  if (!w.allFinite()) throw NumericalError("generalized ridge solution is not finite");
  return w;
}

Matrix tkrr_hat_matrix(const Matrix& a, double lam) {
  Matrix sys = a.transpose() * a;
  sys.diagonal().array() += lam;
  Eigen::LLT<Matrix> llt(sys);
  if (llt.info() != Eigen::Success) throw NumericalError("hat matrix system is not positive definite");
  return a * llt.solve(a.transpose());
}

}  // namespace tkrr
