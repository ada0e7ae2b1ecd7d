#include "doctest.h"
#include "test_support.hpp"

#include "tkrr/error.hpp"
#include "tkrr/estimators.hpp"
#include "tkrr/gram.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <random>

using namespace tkrr;
using tkrr::testing::close_rel;

namespace {

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

struct Instance {
  KernelSpec kernel;
  Samples xs;
  Vector y;
  int n_trunc;
  double lam;
};

Instance random_instance(std::mt19937_64& rng, int max_n) {
  const auto k = tkrr::testing::random_kernel(rng);
  const auto m = tkrr::testing::random_measure(rng);
  const int n = std::uniform_int_distribution<int>(2, max_n)(rng);
  const int n_trunc = std::uniform_int_distribution<int>(1, n)(rng);
  const double lam = std::pow(10.0, std::uniform_real_distribution<double>(-6.0, 0.0)(rng));
  const std::uint64_t s = rng();
  Samples xs = draw(m, n, {s, 1});
  Vector y = draw_scalars(MeasureSpec::centered_normal(1.0), n, {s, 2});
  return {k, std::move(xs), std::move(y), n_trunc, lam};
}

}  // namespace

TEST_CASE("zero response gives zero weights") {
  const Samples xs = draw(MeasureSpec::uniform_cube(1), 10, {1, 1});
  const auto m = fit_tkrr(KernelSpec::sinc(25.0), xs, Vector::Zero(10), 5, 1e-3);
  CHECK(m.weights.isZero(0.0));
  CHECK(predict_tkrr(m, make_point(0.3)) == 0.0);
  const auto full = fit_krr(KernelSpec::sinc(25.0), xs, Vector::Zero(10), 1e-3);
  CHECK(full.coeffs.isZero(0.0));
}

TEST_CASE("scalar tkrr") {
  const auto k = KernelSpec::gaussian(2.0);
  const Vector y = Vector::Constant(1, 0.7);
  const auto m = fit_tkrr(k, {make_point(0.1)}, y, 1, 0.5);
  CHECK(m.weights(0) == doctest::Approx(1.0 * 0.7 / (1.0 + 0.5)).epsilon(1e-15));
  const auto krr = fit_krr(k, {make_point(0.1)}, y, 0.5);
  CHECK(krr.coeffs(0) == doctest::Approx(0.7 / 1.5).epsilon(1e-15));
}

TEST_CASE("prediction is the weighted scaled kernel expansion") {
  const auto k = KernelSpec::sinc(5.0);
  const Samples xs = draw(MeasureSpec::uniform_cube(1), 8, {2, 1});
  TkrrModel m{k, {xs[0]}, Vector::Constant(1, 8.0), 1e-3, 8, 1e-3};
  const auto x = make_point(0.25);
  CHECK(predict_tkrr(m, x) == doctest::Approx(eval(k, xs[0], x)).epsilon(1e-15));

  const Vector y = draw_scalars(MeasureSpec::centered_normal(1.0), 8, {2, 2});
  const Vector y2 = draw_scalars(MeasureSpec::centered_normal(1.0), 8, {2, 3});
  const auto a = fit_tkrr(k, xs, y, 4, 1e-2);
  const auto b = fit_tkrr(k, xs, y2, 4, 1e-2);
  const auto ab = fit_tkrr(k, xs, 2.0 * y + y2, 4, 1e-2);
  CHECK(std::abs(predict_tkrr(ab, x) - 2.0 * predict_tkrr(a, x) - predict_tkrr(b, x)) < 1e-10);
  const Vector batch = predict_tkrr(a, xs);
  for (int i = 0; i < 8; ++i) CHECK(batch(i) == predict_tkrr(a, xs[i]));
}

TEST_CASE("krr interpolates noise-free data") {
  const auto k = KernelSpec::gaussian(25.0);
  Samples xs;
  Vector y(10);
  for (int i = 0; i < 10; ++i) {
    xs.push_back(make_point(-0.9 + 0.2 * i));
    y(i) = std::sin(3.0 * xs.back()(0));
  }
  const auto m = fit_krr(k, xs, y, 1e-10);
  CHECK((predict_krr(m, xs) - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("krr residual identity") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(rng, 40);
    const int n = static_cast<int>(inst.xs.size());
    const auto m = fit_krr(inst.kernel, inst.xs, inst.y, inst.lam);
    Matrix kmat = build_full(inst.kernel, inst.xs).entries * n;
    const Vector resid = inst.y - kmat * m.coeffs;
    CHECK((resid - n * m.lam_used * m.coeffs).norm() <= 1e-8 * std::max(1.0, inst.y.norm()));
  }
}

TEST_CASE("ridge shrinkage") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    auto inst = random_instance(rng, 60);
    double prev = std::numeric_limits<double>::infinity();
    for (double lam : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
      const double w = fit_tkrr(inst.kernel, inst.xs, inst.y, inst.n_trunc, lam).weights.norm();
      CHECK(w <= prev * (1 + 1e-10));
      prev = w;
    }
  }
}

TEST_CASE("hat matrix is a contraction") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(rng, 60);
    const Matrix a = build_truncated(inst.kernel, inst.xs, inst.n_trunc).entries;
    const Matrix h = tkrr_hat_matrix(a, inst.lam);
    const int n = static_cast<int>(a.rows());
    CHECK(spectral_norm(h) <= 1.0 + 1e-10);
    const double r = spectral_norm((h - Matrix::Identity(n, n)) * a);
    CHECK(r * r <= inst.lam / 4.0 + 1e-8);
  }
}

TEST_CASE("generalized ridge reductions") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(rng, 40);
    const int n = static_cast<int>(inst.xs.size());
    const double scale = std::max(1.0, inst.y.norm());

    const Vector plain = fit_generalized_ridge(Matrix::Identity(n, n), Matrix::Identity(n, n), inst.y, inst.lam, n);
    CHECK((plain - inst.y / (1.0 + n * inst.lam)).norm() <= 1e-8 * scale);

    const Matrix a = build_truncated(inst.kernel, inst.xs, inst.n_trunc).entries;
    const int nt = inst.n_trunc;
    const Vector w = fit_generalized_ridge(a, Matrix::Identity(nt, nt) / n, inst.y, inst.lam, n);
    const Vector w_tkrr = fit_tkrr(inst.kernel, inst.xs, inst.y, nt, inst.lam).weights;
    CHECK((w - w_tkrr).norm() <= 1e-8 * std::max(1.0, w_tkrr.norm()));

    Matrix b(n, n);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = nd(rng);
    const Matrix kmat = b * b.transpose() / n + 0.5 * Matrix::Identity(n, n);
    const Vector c = fit_generalized_ridge(kmat, kmat, inst.y, inst.lam, n);
    const Vector c_ref = (kmat + n * inst.lam * Matrix::Identity(n, n)).llt().solve(inst.y);
    CHECK((c - c_ref).norm() <= 1e-8 * std::max(1.0, c_ref.norm()));
  }
}

TEST_CASE("filter factors lie in [0, 1)") {
  const Samples xs = draw(MeasureSpec::truncated_std_normal(), 50, {4, 1});
  const Matrix a = build_truncated(KernelSpec::sinc(25.0), xs, 20).entries;
  const Eigen::JacobiSVD<Matrix> svd(a);
  for (double lam : {1e-6, 1e-3, 1.0})
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      const double s2 = svd.singularValues()(i) * svd.singularValues()(i);
      const double f = s2 / (s2 + lam);
      CHECK(f >= 0.0);
      CHECK(f < 1.0);
    }
}

TEST_CASE("fits are deterministic") {
  const Samples xs = draw(MeasureSpec::truncated_std_normal(), 100, {6, 1});
  const Vector y = draw_scalars(MeasureSpec::centered_normal(1.0), 100, {6, 2});
  const auto a = fit_tkrr(KernelSpec::sinc(25.0), xs, y, 25, 2.47e-4);
  const auto b = fit_tkrr(KernelSpec::sinc(25.0), xs, y, 25, 2.47e-4);
  CHECK((a.weights.array() == b.weights.array()).all());
}

TEST_CASE("duplicated samples with a tiny ridge still solve") {
  Samples xs(6, make_point(0.3));
  const Vector y = Vector::Ones(6);
  const auto m = fit_tkrr(KernelSpec::gaussian(1.0), xs, y, 6, 1e-30);
  CHECK(m.weights.allFinite());
  CHECK(m.lam_used >= m.lam);
}

TEST_CASE("estimator errors") {
  const Samples xs = draw(MeasureSpec::uniform_cube(1), 5, {1, 1});
  const auto k = KernelSpec::sinc(2.0);
  CHECK_THROWS_AS(fit_tkrr(k, xs, Vector::Ones(5), 0, 1e-3), DomainError);
  CHECK_THROWS_AS(fit_tkrr(k, xs, Vector::Ones(5), 6, 1e-3), DomainError);
  CHECK_THROWS_AS(fit_tkrr(k, xs, Vector::Ones(4), 3, 1e-3), DomainError);
  CHECK_THROWS_AS(fit_tkrr(k, xs, Vector::Ones(5), 3, 0.0), DomainError);
  Vector bad = Vector::Ones(5);
  bad(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_tkrr(k, xs, bad, 3, 1e-3), DomainError);
  CHECK_THROWS_AS(fit_krr(k, xs, Vector::Ones(5), -1.0), DomainError);
  CHECK_THROWS_AS(fit_generalized_ridge(Matrix::Identity(3, 3), Matrix::Identity(2, 2), Vector::Ones(3), 0.1, 3),
                  DomainError);
}
