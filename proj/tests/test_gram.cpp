#include "doctest.h"
#include "test_support.hpp"

#include "tkrr/error.hpp"
#include "tkrr/gram.hpp"

#include <Eigen/SVD>

#include <numbers>
#include <random>

using namespace tkrr;
using tkrr::testing::close_rel;

TEST_CASE("single sample gram") {
  const auto g = build_full(KernelSpec::sinc(25.0), {make_point(0.2)});
  REQUIRE(g.n() == 1);
  CHECK(g.entries(0, 0) == doctest::Approx(25.0 / std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("duplicated sample gives rank one") {
  const auto g = build_full(KernelSpec::gaussian(3.0), {make_point(0.4), make_point(0.4)});
  CHECK(g.entries.isApprox(Matrix::Constant(2, 2, 0.5)));
  const auto ev = eigvals_desc(g);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(ev[1]) < 1e-15);
}

TEST_CASE("gram symmetry and trace identity") {
  const auto k = KernelSpec::sinc(25.0);
  const Samples xs = draw(MeasureSpec::truncated_std_normal(), 200, {1, 1});
  const auto g = build_full(k, xs);
  CHECK(g.entries == g.entries.transpose());
  CHECK(g.trace() == doctest::Approx(25.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(g.trace() <= kappa1(k) * (1 + 1e-12));
  const auto ev = eigvals_desc(g);
  CHECK(close_rel(ev.sum(), g.trace(), 1e-8));
}

TEST_CASE("truncation slices the full matrix") {
  const auto k = KernelSpec::gaussian(25.0);
  const Samples xs = draw(MeasureSpec::uniform_cube(1), 30, {2, 1});
  const auto g = build_full(k, xs);
  CHECK(truncate(g, 30).entries == g.entries);
  for (int n_trunc : {1, 7, 30}) {
    const auto a = build_truncated(k, xs, n_trunc);
    CHECK(a.n_trunc() == n_trunc);
    CHECK(a.entries == g.entries.leftCols(n_trunc));
  }
  CHECK_THROWS_AS(truncate(g, 0), DomainError);
  CHECK_THROWS_AS(truncate(g, 31), DomainError);
}

TEST_CASE("eigenvalues of simple matrices") {
  const auto id = eigvals_desc(GramFull::from_matrix(Matrix::Identity(2, 2), 1.0));
  CHECK(id.values() == std::vector<double>{1.0, 1.0});
  Matrix r1(2, 2);
  r1 << 1, 1, 1, 1;
  const auto ev = eigvals_desc(GramFull::from_matrix(r1 / 2.0, 1.0));
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == 0.0);
  CHECK_THROWS_AS(eigvals_desc(GramFull::from_matrix(-Matrix::Identity(2, 2), 1.0)), InvariantError);
}

TEST_CASE("singular values") {
  const auto k = KernelSpec::gaussian(4.0);
  const Samples xs = draw(MeasureSpec::uniform_cube(1), 20, {3, 1});
  const auto g = build_full(k, xs);
  const auto sv = singvals_desc(truncate(g, 20));
  const auto ev = eigvals_desc(g);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(sv[i] - ev[i]) < 1e-8);

  GramTruncated zero{Matrix::Zero(4, 2), 1.0};
  CHECK(singvals_desc(zero).values() == std::vector<double>{0.0, 0.0});

  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Matrix m(5, 3);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    const auto ours = singvals_desc(GramTruncated{m, 1.0});
    const Eigen::JacobiSVD<Matrix> svd(m);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(ours[i] - svd.singularValues()(i)) < 1e-10);
  }
}

TEST_CASE("trace tails") {
  const EigenvalueTable t({3.0, 2.0, 1.0}, TableSource::empirical);
  CHECK(trace_tail(t, 1) == 6.0);
  CHECK(trace_tail(t, 3) == 1.0);
  CHECK(trace_tail(t, 4) == 0.0);
  CHECK(trace_tails(t) == std::vector<double>{6.0, 3.0, 1.0});
  CHECK_THROWS_AS(trace_tail(t, 0), DomainError);
  CHECK_THROWS_AS(trace_tail(t, 5), DomainError);
}

TEST_CASE("statistical dimension") {
  CHECK(statistical_dimension(EigenvalueTable({1.0, 1.0}, TableSource::empirical), 1.0) == 1.0);
  CHECK(statistical_dimension(EigenvalueTable({0.0, 0.0}, TableSource::empirical), 0.3) == 0.0);
  const EigenvalueTable t({2.0, 0.5, 0.1, 0.01}, TableSource::empirical);
  double prev = 5.0;
  for (double lam : {1e-6, 1e-4, 1e-2, 1.0, 100.0}) {
    const double d = statistical_dimension(t, lam);
    CHECK(d < prev);
    CHECK(d <= 4.0);
    prev = d;
  }
  CHECK_THROWS_AS(statistical_dimension(t, 0.0), DomainError);
}

TEST_CASE("interlacing and trace domination on random instances") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(2, 100);
  for (int t = 0; t < 100; ++t) {
    const auto k = tkrr::testing::random_kernel(rng);
    const auto m = tkrr::testing::random_measure(rng);
    const int n = size(rng);
    const int n_trunc = std::uniform_int_distribution<int>(1, n)(rng);
    const Samples xs = draw(m, n, {static_cast<std::uint64_t>(t), 1});
    const auto g = build_full(k, xs);
    const auto ev = eigvals_desc(g);
    const auto sv = singvals_desc(truncate(g, n_trunc));
    const double k1 = kappa1(k);
    CHECK(interlacing_holds(sv, ev, 1e-8 * k1));
    const auto tf = trace_tails(ev);
    const auto tt = trace_tails(sv);
    // Summing the per-index interlacing slack.
    for (int j = 0; j < n_trunc; ++j) CHECK(tt[j] <= tf[j] + (n_trunc - j) * 1e-8 * k1);
    for (int j = 0; j < n; ++j) CHECK((j + 1) * ev[j] <= g.trace() + 1e-8 * k1);
    CHECK(g.trace() <= k1 * (1 + 1e-12));
    const Eigen::SelfAdjointEigenSolver<Matrix> raw(g.entries, Eigen::EigenvaluesOnly);
    CHECK(raw.eigenvalues().minCoeff() >= -1e-10 * n * k1);
  }
}

TEST_CASE("interlacing examples") {
  const EigenvalueTable full({1.0, 0.5, 0.1}, TableSource::empirical);
  CHECK(interlacing_holds(EigenvalueTable({0.9, 0.4}, TableSource::empirical), full, 0.0));
  CHECK_FALSE(interlacing_holds(EigenvalueTable({0.9, 0.6}, TableSource::empirical), full, 1e-8));
}

TEST_CASE("sinc gram spectrum decays past the plunge") {
  const auto k = KernelSpec::sinc(25.0);
  std::vector<double> mean(35, 0.0);
  for (int r = 1; r <= 10; ++r) {
    const auto ev = eigvals_desc(build_full(k, draw(MeasureSpec::truncated_std_normal(), 200, {0, static_cast<std::uint64_t>(r)})));
    for (int j = 0; j < 35; ++j) mean[j] += ev[j] / 10.0;
  }
  CHECK(mean[33] <= 1e-2 * mean[0]);
}
