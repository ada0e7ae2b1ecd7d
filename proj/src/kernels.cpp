#include "tkrr/kernels.hpp"

#include "tkrr/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tkrr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double eval_univariate(const UnivariateKernel& k, double x, double y) {
  return std::visit(
      overloaded{
          [&](const SincKernel& s) { return sinc_value(s.c, x - y); },
          [&](const GaussianKernel& g) {
            const double h = x - y;
            return std::exp(-g.xi * h * h);
          },
      },
      k);
}

double kappa1_univariate(const UnivariateKernel& k) {
  return std::visit(overloaded{
                        [](const SincKernel& s) { return s.c / std::numbers::pi; },
                        [](const GaussianKernel&) { return 1.0; },
                    },
                    k);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be a positive finite number");
  }
}

}  // namespace

Point make_point(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

KernelSpec KernelSpec::sinc(double c) {
  check_positive(c, "sinc bandwidth c");
  return KernelSpec(SincKernel{c});
}

KernelSpec KernelSpec::gaussian(double xi) {
  check_positive(xi, "gaussian shape xi");
  return KernelSpec(GaussianKernel{xi});
}

KernelSpec KernelSpec::tensor(const KernelSpec& base, int d) {
  if (d < 1) throw DomainError("tensor-product dimension must be >= 1");
  if (const auto* s = std::get_if<SincKernel>(&base.v_)) return KernelSpec(TensorProductKernel{*s, d});
  if (const auto* g = std::get_if<GaussianKernel>(&base.v_)) return KernelSpec(TensorProductKernel{*g, d});
  throw DomainError("tensor-product base kernel must be univariate");
}

int KernelSpec::dim() const {
  if (const auto* t = std::get_if<TensorProductKernel>(&v_)) return t->d;
  return 1;
}

bool KernelSpec::is_sinc() const {
  if (const auto* t = std::get_if<TensorProductKernel>(&v_)) return std::holds_alternative<SincKernel>(t->base);
  return std::holds_alternative<SincKernel>(v_);
}

bool KernelSpec::is_gaussian() const {
  if (const auto* t = std::get_if<TensorProductKernel>(&v_)) return std::holds_alternative<GaussianKernel>(t->base);
  return std::holds_alternative<GaussianKernel>(v_);
}

double KernelSpec::sinc_c() const {
  if (const auto* s = std::get_if<SincKernel>(&v_)) return s->c;
  if (const auto* t = std::get_if<TensorProductKernel>(&v_)) {
    if (const auto* s = std::get_if<SincKernel>(&t->base)) return s->c;
  }
  throw DomainError("kernel is not a Sinc kernel");
}

double KernelSpec::gaussian_xi() const {
  if (const auto* g = std::get_if<GaussianKernel>(&v_)) return g->xi;
  if (const auto* t = std::get_if<TensorProductKernel>(&v_)) {
    if (const auto* g = std::get_if<GaussianKernel>(&t->base)) return g->xi;
  }
  throw DomainError("kernel is not a Gaussian kernel");
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  auto uni = [&](const UnivariateKernel& k) {
    std::visit(overloaded{
                   [&](const SincKernel& s) { os << "sinc(c=" << s.c << ")"; },
                   [&](const GaussianKernel& g) { os << "gaussian(xi=" << g.xi << ")"; },
               },
               k);
  };
  std::visit(overloaded{
                 [&](const SincKernel& s) { uni(s); },
                 [&](const GaussianKernel& g) { uni(g); },
                 [&](const TensorProductKernel& t) {
                   uni(t.base);
                   os << "^" << t.d;
                 },
             },
             v_);
  return os.str();
}

double sinc_value(double c, double h) {
  const double diag = c / std::numbers::pi;
  if (std::abs(h) < 1e-12) return diag;
  const double ch = c * h;
  if (std::abs(ch) < 1e-4) return diag * (1.0 - ch * ch / 6.0);
  return std::sin(ch) / (std::numbers::pi * h);
}

double eval(const KernelSpec& kernel, const Point& x, const Point& y) {
  const int d = kernel.dim();
  if (x.size() != d || y.size() != d) {
    throw DomainError("point dimension does not match kernel dimension " + std::to_string(d));
  }
  return std::visit(overloaded{
                        [&](const SincKernel& s) { return sinc_value(s.c, x[0] - y[0]); },
                        [&](const GaussianKernel& g) { return eval_univariate(g, x[0], y[0]); },
                        [&](const TensorProductKernel& t) {
                          double v = 1.0;
                          for (int i = 0; i < t.d; ++i) v *= eval_univariate(t.base, x[i], y[i]);
                          return v;
                        },
                    },
                    kernel.variant());
}

double kappa1(const KernelSpec& kernel) {
  return std::visit(overloaded{
                        [](const SincKernel& s) { return kappa1_univariate(s); },
                        [](const GaussianKernel& g) { return kappa1_univariate(g); },
                        [](const TensorProductKernel& t) { return std::pow(kappa1_univariate(t.base), t.d); },
                    },
                    kernel.variant());
}

}  // namespace tkrr
