#include "tkrr/spectral.hpp"

#include "tkrr/error.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>

namespace tkrr {

const char* to_string(TableSource s) {
  switch (s) {
    case TableSource::closed_form: return "closed-form";
    case TableSource::nystrom: return "nystrom";
    case TableSource::bound: return "bound";
    case TableSource::empirical: return "empirical";
  }
  return "unknown";
}

EigenvalueTable::EigenvalueTable(std::vector<double> values, TableSource source)
    : values_(std::move(values)), source_(source) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("eigenvalue table entries must be finite and nonnegative");
    }
    if (i > 0 && values_[i] > values_[i - 1]) throw DomainError("eigenvalue table must be nonincreasing");
  }
}

double EigenvalueTable::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

SpectralModel::SpectralModel(Generator eigenvalue, double sup_norm_exponent, DecayModel decay)
    : eigenvalue_(std::move(eigenvalue)), a_(sup_norm_exponent), decay_(decay) {
  if (!eigenvalue_) throw DomainError("spectral model needs an eigenvalue generator");
  if (!(a_ >= 0.0)) throw DomainError("sup-norm exponent a must be >= 0");
}

SpectralModel SpectralModel::gaussian(double xi, double c, bool literal_constant, DecayConvention convention) {
  const double gamma = gaussian_gamma(xi, c);
  const double ratio_inv = (c + xi + gamma) / xi;
  const double b = convention == DecayConvention::ratio ? ratio_inv : std::log(ratio_inv);
  const double lead = gaussian_eigenvalue(xi, c, 1, literal_constant);
  // lambda_k = lead * ratio^(k-1) = (lead * ratio_inv) * exp(-log(ratio_inv) k)
  return SpectralModel([=](int k) { return gaussian_eigenvalue(xi, c, k, literal_constant); }, 0.0,
                       ExponentialDecay{b, 1, lead * ratio_inv});
}

SpectralModel SpectralModel::sinc(double c, EigenvalueTable head) {
  const int n_b = static_cast<int>(std::ceil(std::numbers::e * c / 2.0));
  auto values = std::make_shared<const EigenvalueTable>(std::move(head));
  auto gen = [=](int k) {
    if (k < 1) throw DomainError("eigenvalue index must be >= 1");
    const auto idx = static_cast<std::size_t>(k - 1);
    if (idx < values->size()) return (*values)[idx];
    if (k < n_b) throw DomainError("sinc spectrum head too short to reach the bound's validity range");
    const double bound = sinc_eigenvalue_upper_bound(c, k);
    return values->empty() ? bound : std::min(bound, values->values().back());
  };
  return SpectralModel(gen, 1.0, ExponentialDecay{2.0, n_b, 1.0});
}

SpectralModel SpectralModel::from_table(EigenvalueTable table, double sup_norm_exponent, DecayModel decay) {
  auto values = std::make_shared<const EigenvalueTable>(std::move(table));
  auto gen = [=](int k) {
    if (k < 1) throw DomainError("eigenvalue index must be >= 1");
    const auto idx = static_cast<std::size_t>(k - 1);
    return idx < values->size() ? (*values)[idx] : 0.0;
  };
  return SpectralModel(gen, sup_norm_exponent, decay);
}

double SpectralModel::eigenvalue(int k) const {
  if (k < 1) throw DomainError("eigenvalue index must be >= 1");
  return eigenvalue_(k);
}

EigenvalueTable SpectralModel::table(int count) const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 1; k <= count; ++k) v.push_back(eigenvalue(k));
  return {std::move(v), TableSource::closed_form};
}

double gaussian_gamma(double xi, double c) { return std::sqrt(c * c + 2.0 * c * xi); }

double gaussian_eigenvalue_ratio(double xi, double c) {
  if (!(xi > 0.0) || !(c > 0.0)) throw DomainError("xi and c must be positive");
  return xi / (c + xi + gaussian_gamma(xi, c));
}

double gaussian_eigenvalue(double xi, double c, int k, bool literal_constant) {
  if (k < 1) throw DomainError("eigenvalue index must be >= 1");
  const double ratio = gaussian_eigenvalue_ratio(xi, c);
  const double denom = xi + c + gaussian_gamma(xi, c);
  const double lead = literal_constant ? std::sqrt(std::numbers::pi / denom) : std::sqrt(2.0 * c / denom);
  return lead * std::pow(ratio, k - 1);
}

double hermite_function(int k, double u) {
  if (k < 0) throw DomainError("Hermite index must be >= 0");
  const double psi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * u * u);
  if (k == 0) return psi0;
  double prev = psi0;
  double cur = std::numbers::sqrt2 * u * psi0;
  for (int j = 2; j <= k; ++j) {
    const double next = u * std::sqrt(2.0 / j) * cur - std::sqrt((j - 1.0) / j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double gaussian_eigenfunction(double xi, double c, int k, double x) {
  if (k < 1 || k > kMaxGaussianEigenfunctionIndex) {
    throw DomainError("gaussian eigenfunction index must lie in [1, 200]");
  }
  const double scale = std::sqrt(2.0 * gaussian_gamma(xi, c));
  return hermite_function(k - 1, scale * x) / scale;
}

double sinc_eigenvalue_upper_bound(double c, int m) {
  if (!(c > 0.0)) throw DomainError("sinc bandwidth must be positive");
  const double threshold = std::numbers::e * c / 2.0;
  if (static_cast<double>(m) < threshold) {
    std::ostringstream os;
    os << "sinc eigenvalue bound requires m >= e c / 2 = " << threshold << " (got m=" << m << ")";
    throw DomainError(os.str());
  }
  return std::exp(-(2.0 * m + 1.0) * std::log(2.0 * (m + 1.0) / (std::numbers::e * c)));
}

double sinc_dof_estimate(double c, double eps) {
  if (!(c >= 1.0)) throw DomainError("sinc_dof_estimate requires c >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  const double plateau = 2.0 * c / std::numbers::pi;
  return plateau + std::log((1.0 - eps) / eps) * std::log(plateau) / (std::numbers::pi * std::numbers::pi);
}

int degrees_of_freedom(const EigenvalueTable& table, double eps) {
  if (table.empty()) throw DomainError("degrees_of_freedom needs a nonempty table");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const auto& v = table.values();
  // Descending table: first position with value <= eps.
  const auto it = std::find_if(v.begin(), v.end(), [eps](double x) { return x <= eps; });
  if (it == v.end()) {
    std::ostringstream os;
    os << "all " << v.size() << " table values exceed eps=" << eps;
    throw DomainError(os.str());
  }
  return static_cast<int>(it - v.begin()) + 1;
}

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed");
  const auto n = diag.size();
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

std::vector<double> clamp_descending(Eigen::VectorXd ev, double scale, const char* what) {
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  const double floor = 1e-10 * std::max(scale, 0.0);
  for (double& v : out) {
    if (v < 0.0) {
      if (-v > floor) {
        std::ostringstream os;
        os << what << ": eigenvalue " << v << " is negative beyond roundoff";
        throw InvariantError(os.str());
      }
      v = 0.0;
    }
  }
  return out;
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, sub, 2.0);
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(diag, sub, std::sqrt(std::numbers::pi));
}

EigenvalueTable nystrom_eigenvalues(const KernelSpec& kernel, const MeasureSpec& measure, int quad_order,
                                    int count, OperatorMeasure convention) {
  if (!kernel.is_univariate() || measure.dim() != 1) {
    throw DomainError("nystrom_eigenvalues supports univariate kernels and measures only");
  }
  if (count < 1 || quad_order < count) throw DomainError("nystrom_eigenvalues requires quad_order >= count >= 1");

  std::vector<double> nodes;
  std::vector<double> weights;
  if (const auto* g = std::get_if<GaussianMeasure>(&measure.variant())) {
    if (convention == OperatorMeasure::lebesgue) {
      throw DomainError("Lebesgue convention needs a measure with compact support");
    }
    // u = x sqrt(2c) maps exp(-u^2)/sqrt(pi) du onto the measure.
    auto rule = gauss_hermite(quad_order);
    const double scale = 1.0 / std::sqrt(2.0 * g->c);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes.push_back(rule.nodes[i] * scale);
      weights.push_back(rule.weights[i] / std::sqrt(std::numbers::pi));
    }
  } else if (measure.is_compact()) {
    auto rule = gauss_legendre(quad_order);
    nodes = rule.nodes;
    weights = rule.weights;
    if (convention == OperatorMeasure::probability) {
      for (std::size_t i = 0; i < nodes.size(); ++i) weights[i] *= density(measure, nodes[i]);
    }
  } else {
    throw DomainError("nystrom_eigenvalues: unsupported measure " + measure.describe());
  }

  const auto q = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd sw(q);
  for (Eigen::Index i = 0; i < q; ++i) sw[i] = std::sqrt(weights[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd m(q, q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const Point tj = make_point(nodes[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = j; i < q; ++i) {
      const double v = sw[i] * eval(kernel, make_point(nodes[static_cast<std::size_t>(i)]), tj) * sw[j];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Nystrom eigensolve failed");
  auto all = clamp_descending(es.eigenvalues(), es.eigenvalues().cwiseAbs().maxCoeff(), "nystrom");
  all.resize(static_cast<std::size_t>(count));
  return {std::move(all), TableSource::nystrom};
}

EigenvalueTable tensor_top_eigenvalues(const EigenvalueTable& base, int d, int m, TailPolicy policy) {
  if (base.empty()) throw DomainError("tensor_top_eigenvalues needs a nonempty base table");
  if (d < 1 || m < 1) throw DomainError("tensor_top_eigenvalues requires d >= 1 and m >= 1");
  const auto len = static_cast<int>(base.size());
  if (policy == TailPolicy::complete && std::pow(static_cast<double>(len), d) < m) {
    throw DomainError("base table has fewer than m d-fold products");
  }

  using Index = std::vector<int>;
  auto product = [&](const Index& idx) {
    double p = 1.0;
    for (int i : idx) p *= base[static_cast<std::size_t>(i)];
    return p;
  };
  // Max-heap on the product; ties broken by the lexicographically smaller
  // index tuple so the traversal order is deterministic.
  using Entry = std::pair<double, Index>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
  std::set<Index> seen;
  Index start(static_cast<std::size_t>(d), 0);
  frontier.emplace(product(start), start);
  seen.insert(start);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  while (static_cast<int>(out.size()) < m && !frontier.empty()) {
    auto [value, idx] = frontier.top();
    frontier.pop();
    out.push_back(value);
    for (int axis = 0; axis < d; ++axis) {
      if (idx[static_cast<std::size_t>(axis)] + 1 >= len) continue;
      Index next = idx;
      ++next[static_cast<std::size_t>(axis)];
      if (seen.insert(next).second) frontier.emplace(product(next), next);
    }
  }
  if (static_cast<int>(out.size()) < m) throw DomainError("base table has fewer than m d-fold products");

  if (policy == TailPolicy::truncated) {
    // Any product touching an index past the table is at most this.
    const double unseen = base.values().back() * std::pow(base[0], d - 1);
    if (!(unseen < out.back())) {
      std::ostringstream os;
      os << "base table too short: unseen products may reach " << unseen << " >= m-th value " << out.back();
      throw DomainError(os.str());
    }
  }
  return {std::move(out), base.source()};
}

}  // namespace tkrr
