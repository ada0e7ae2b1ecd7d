#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace tkrr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the covariate space; its size is the ambient dimension d.
using Point = Eigen::VectorXd;
using Samples = std::vector<Point>;

Point make_point(double x);

/// K(x, y) = sin(c (x - y)) / (pi (x - y)), bandlimited to [-c, c].
struct SincKernel {
  double c;
};

/// K(x, y) = exp(-xi (x - y)^2).
struct GaussianKernel {
  double xi;
};

using UnivariateKernel = std::variant<SincKernel, GaussianKernel>;

/// d-fold product of a univariate kernel applied coordinate-wise.
struct TensorProductKernel {
  UnivariateKernel base;
  int d;
};

/// Immutable description of a Mercer kernel. Construction validates the
/// parameters, so every live KernelSpec is well formed.
class KernelSpec {
 public:
  using Variant = std::variant<SincKernel, GaussianKernel, TensorProductKernel>;

  static KernelSpec sinc(double c);
  static KernelSpec gaussian(double xi);
  static KernelSpec tensor(const KernelSpec& base, int d);

  const Variant& variant() const { return v_; }
  int dim() const;
  bool is_sinc() const;
  bool is_gaussian() const;
  bool is_univariate() const { return dim() == 1 && !std::holds_alternative<TensorProductKernel>(v_); }

  /// Short human-readable form, e.g. "sinc(c=25)".
  std::string describe() const;

  /// Bandwidth of the (base) Sinc kernel; throws DomainError otherwise.
  double sinc_c() const;
  /// Shape of the (base) Gaussian kernel; throws DomainError otherwise.
  double gaussian_xi() const;

 private:
  explicit KernelSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Sinc kernel value at lag h with the removable singularity at h = 0 filled.
double sinc_value(double c, double h);

double eval(const KernelSpec& kernel, const Point& x, const Point& y);

/// sup_x K(x, x).
double kappa1(const KernelSpec& kernel);

}  // namespace tkrr
