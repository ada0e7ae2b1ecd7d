#pragma once

#include "tkrr/kernels.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>

namespace tkrr {

/// Uniform probability on [-1, 1]^d.
struct UniformCube {
  int d = 1;
};

/// Standard normal conditioned on [-1, 1].
struct TruncatedStdNormal {};

/// Probability with density sqrt(2c/pi) exp(-2 c x^2) on the real line.
struct GaussianMeasure {
  double c;
};

/// Centered normal N(0, sigma^2); used for additive observation noise.
struct CenteredNormal {
  double sigma;
};

class MeasureSpec {
 public:
  using Variant = std::variant<UniformCube, TruncatedStdNormal, GaussianMeasure, CenteredNormal>;

  static MeasureSpec uniform_cube(int d = 1);
  static MeasureSpec truncated_std_normal();
  static MeasureSpec gaussian(double c);
  static MeasureSpec centered_normal(double sigma);

  const Variant& variant() const { return v_; }
  int dim() const;
  bool is_compact() const;
  /// Support of a univariate measure; nullopt when unbounded.
  std::optional<std::pair<double, double>> support_interval() const;
  bool in_support(const Point& x) const;
  std::string describe() const;

 private:
  explicit MeasureSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Identifies one reproducible random stream: `stream` is the realization
/// index under a fixed `master` seed.
struct RngSeed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
};

/// Offset added to a realization index to obtain its noise stream.
inline constexpr std::uint64_t kNoiseStreamOffset = std::uint64_t{1} << 32;

/// Engine for a (master, stream) pair. Both words are mixed through
/// SplitMix64 before seeding so neighbouring streams decorrelate.
std::mt19937_64 make_engine(const RngSeed& seed);

Samples draw(const MeasureSpec& measure, int n, const RngSeed& seed);

/// Scalar draws from a univariate measure.
Vector draw_scalars(const MeasureSpec& measure, int n, const RngSeed& seed);

double density(const MeasureSpec& measure, const Point& x);
double density(const MeasureSpec& measure, double x);

/// Largest value of density(rho)/density(p) on a uniform grid over rho's
/// (compact) support. Throws DomainError if p vanishes where rho does not.
double density_ratio_bound(const MeasureSpec& rho, const MeasureSpec& p, int grid_size);

}  // namespace tkrr
