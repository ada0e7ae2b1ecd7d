#include "tkrr/gram.hpp"

#include "tkrr/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tkrr {

namespace {

void check_samples(const KernelSpec& kernel, const Samples& samples) {
  if (samples.empty()) throw DomainError("Gram matrix needs at least one sample");
  for (const auto& x : samples) {
    if (x.size() != kernel.dim()) throw DomainError("sample dimension does not match kernel dimension");
  }
}

std::vector<double> sorted_clamped(const Eigen::VectorXd& ev, double kappa1, const char* what) {
  if (!ev.allFinite()) throw NumericalError(std::string(what) + ": non-finite eigenvalues");
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  const double floor = 1e-10 * kappa1;
  for (double& v : out) {
    if (v < 0.0) {
      if (-v >= floor) {
        std::ostringstream os;
        os << what << ": eigenvalue " << v << " below -1e-10*kappa1 (matrix not PSD)";
        throw InvariantError(os.str());
      }
      v = 0.0;
    }
  }
  return out;
}

}  // namespace

GramFull GramFull::from_matrix(Matrix m, double kappa1) {
  if (m.rows() != m.cols()) throw DomainError("Gram matrix must be square");
  GramFull g;
  g.entries = std::move(m);
  g.kappa1 = kappa1;
  return g;
}

GramFull build_full(const KernelSpec& kernel, const Samples& samples) {
  check_samples(kernel, samples);
  const auto n = static_cast<Eigen::Index>(samples.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  GramFull g;
  g.entries.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = inv_n * eval(kernel, samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(j)]);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  g.samples = samples;
  g.kappa1 = kappa1(kernel);
  return g;
}

GramTruncated build_truncated(const KernelSpec& kernel, const Samples& samples, int n_trunc) {
  check_samples(kernel, samples);
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n_trunc < 1 || n_trunc > n) throw DomainError("truncation order N must satisfy 1 <= N <= n");
  const double inv_n = 1.0 / static_cast<double>(n);
  GramTruncated a;
  a.entries.resize(n, n_trunc);
  for (Eigen::Index j = 0; j < n_trunc; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      a.entries(i, j) = inv_n * eval(kernel, samples[static_cast<std::size_t>(i)], samples[static_cast<std::size_t>(j)]);
    }
  }
  a.kappa1 = kappa1(kernel);
  return a;
}

GramTruncated truncate(const GramFull& full, int n_trunc) {
  if (n_trunc < 1 || n_trunc > full.n()) throw DomainError("truncation order N must satisfy 1 <= N <= n");
  GramTruncated a;
  a.entries = full.entries.leftCols(n_trunc);
  a.kappa1 = full.kappa1;
  return a;
}

EigenvalueTable eigvals_desc(const GramFull& g) {
  if (!g.entries.allFinite()) throw NumericalError("Gram matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
  return {sorted_clamped(es.eigenvalues(), g.kappa1, "eigvals_desc"), TableSource::empirical};
}

EigenvalueTable singvals_desc(const GramTruncated& a) {
  if (!a.entries.allFinite()) throw NumericalError("truncated Gram matrix has non-finite entries");
  const Matrix gram = a.entries.transpose() * a.entries;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
  // Eigenvalues of A^T A scale like kappa1^2.
  auto sq = sorted_clamped(es.eigenvalues(), a.kappa1 * a.kappa1, "singvals_desc");
  for (double& v : sq) v = std::sqrt(v);
  return {std::move(sq), TableSource::empirical};
}

double trace_tail(const EigenvalueTable& table, int k) {
  const auto len = static_cast<int>(table.size());
  if (k < 1 || k > len + 1) throw DomainError("trace_tail index must satisfy 1 <= k <= size + 1");
  double s = 0.0;
  // Sum from the small end for accuracy.
  for (int j = len; j >= k; --j) s += table[static_cast<std::size_t>(j - 1)];
  return s;
}

std::vector<double> trace_tails(const EigenvalueTable& table) {
  std::vector<double> out(table.size());
  double s = 0.0;
  for (std::size_t j = table.size(); j-- > 0;) {
    s += table[j];
    out[j] = s;
  }
  return out;
}

double statistical_dimension(const EigenvalueTable& table, double lam) {
  if (!(lam > 0.0)) throw DomainError("statistical_dimension requires lam > 0");
  double s = 0.0;
  for (double v : table.values()) s += v / (v + lam);
  return s;
}

bool interlacing_holds(const EigenvalueTable& mu, const EigenvalueTable& lam_full, double tol) {
  if (mu.size() > lam_full.size()) throw DomainError("interlacing check needs size(mu) <= size(lam_full)");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > lam_full[i] + tol) return false;
  }
  return true;
}

}  // namespace tkrr
