#include "tkrr/sampling.hpp"

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

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mass of the standard normal on [-1, 1].
double truncated_normal_mass() { return std::erf(1.0 / std::numbers::sqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double draw_one(const MeasureSpec::Variant& v, std::mt19937_64& eng) {
  return std::visit(overloaded{
                        [&](const UniformCube&) {
                          std::uniform_real_distribution<double> u(-1.0, 1.0);
                          return u(eng);
                        },
                        [&](const TruncatedStdNormal&) {
                          std::normal_distribution<double> g(0.0, 1.0);
                          for (;;) {
                            const double x = g(eng);
                            if (std::abs(x) <= 1.0) return x;
                          }
                        },
                        [&](const GaussianMeasure& m) {
                          std::normal_distribution<double> g(0.0, 0.5 / std::sqrt(m.c));
                          return g(eng);
                        },
                        [&](const CenteredNormal& m) {
                          if (m.sigma == 0.0) return 0.0;
                          std::normal_distribution<double> g(0.0, m.sigma);
                          return g(eng);
                        },
                    },
                    v);
}

}  // namespace

MeasureSpec MeasureSpec::uniform_cube(int d) {
  if (d < 1) throw DomainError("uniform cube dimension must be >= 1");
  return MeasureSpec(UniformCube{d});
}

MeasureSpec MeasureSpec::truncated_std_normal() { return MeasureSpec(TruncatedStdNormal{}); }

MeasureSpec MeasureSpec::gaussian(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("gaussian measure scale c must be positive");
  return MeasureSpec(GaussianMeasure{c});
}

MeasureSpec MeasureSpec::centered_normal(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be >= 0");
  return MeasureSpec(CenteredNormal{sigma});
}

int MeasureSpec::dim() const {
  if (const auto* u = std::get_if<UniformCube>(&v_)) return u->d;
  return 1;
}

bool MeasureSpec::is_compact() const {
  return std::holds_alternative<UniformCube>(v_) || std::holds_alternative<TruncatedStdNormal>(v_);
}

std::optional<std::pair<double, double>> MeasureSpec::support_interval() const {
  if (dim() != 1) throw DomainError("support_interval requires a univariate measure");
  if (is_compact()) return std::pair{-1.0, 1.0};
  return std::nullopt;
}

bool MeasureSpec::in_support(const Point& x) const {
  if (x.size() != dim()) return false;
  if (!x.allFinite()) return false;
  if (is_compact()) return (x.array().abs() <= 1.0).all();
  return true;
}

std::string MeasureSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const UniformCube& u) { os << "uniform_cube(d=" << u.d << ")"; },
                 [&](const TruncatedStdNormal&) { os << "truncated_std_normal"; },
                 [&](const GaussianMeasure& m) { os << "gaussian_measure(c=" << m.c << ")"; },
                 [&](const CenteredNormal& m) { os << "centered_normal(sigma=" << m.sigma << ")"; },
             },
             v_);
  return os.str();
}

std::mt19937_64 make_engine(const RngSeed& seed) {
  const std::uint64_t a = splitmix64(seed.master);
  const std::uint64_t b = splitmix64(seed.stream ^ 0x5851f42d4c957f2dULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

Samples draw(const MeasureSpec& measure, int n, const RngSeed& seed) {
  if (n < 1) throw DomainError("draw requires n >= 1");
  auto eng = make_engine(seed);
  const int d = measure.dim();
  Samples out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = draw_one(measure.variant(), eng);
    out.push_back(std::move(p));
  }
  return out;
}

Vector draw_scalars(const MeasureSpec& measure, int n, const RngSeed& seed) {
  if (measure.dim() != 1) throw DomainError("draw_scalars requires a univariate measure");
  if (n < 1) throw DomainError("draw requires n >= 1");
  auto eng = make_engine(seed);
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = draw_one(measure.variant(), eng);
  return out;
}

double density(const MeasureSpec& measure, const Point& x) {
  if (x.size() != measure.dim()) throw DomainError("point dimension does not match measure dimension");
  if (const auto* u = std::get_if<UniformCube>(&measure.variant())) {
    return (x.array().abs() <= 1.0).all() ? std::ldexp(1.0, -u->d) : 0.0;
  }
  return density(measure, x[0]);
}

double density(const MeasureSpec& measure, double x) {
  if (measure.dim() != 1) throw DomainError("scalar density requires a univariate measure");
  return std::visit(overloaded{
                        [&](const UniformCube&) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; },
                        [&](const TruncatedStdNormal&) {
                          return std::abs(x) <= 1.0 ? std_normal_pdf(x) / truncated_normal_mass() : 0.0;
                        },
                        [&](const GaussianMeasure& m) {
                          return std::sqrt(2.0 * m.c / std::numbers::pi) * std::exp(-2.0 * m.c * x * x);
                        },
                        [&](const CenteredNormal& m) {
                          if (m.sigma == 0.0) throw DomainError("degenerate normal has no density");
                          const double z = x / m.sigma;
                          return std_normal_pdf(z) / m.sigma;
                        },
                    },
                    measure.variant());
}

double density_ratio_bound(const MeasureSpec& rho, const MeasureSpec& p, int grid_size) {
  if (rho.dim() != 1 || p.dim() != 1) throw DomainError("density_ratio_bound requires univariate measures");
  if (grid_size < 2) throw DomainError("grid_size must be >= 2");
  const auto support = rho.support_interval();
  if (!support) throw DomainError("density_ratio_bound requires rho with compact support");
  const auto [lo, hi] = *support;
  double best = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double num = density(rho, x);
    if (num == 0.0) continue;
    const double den = density(p, x);
    if (den == 0.0) {
      std::ostringstream os;
      os << "reference density vanishes at x=" << x << " where rho is positive (not absolutely continuous)";
      throw DomainError(os.str());
    }
    best = std::max(best, num / den);
  }
  return best;
}

}  // namespace tkrr
