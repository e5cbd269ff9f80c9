#include <cmath>
#include <numbers>
#include <random>

#include "posyid/errors.hpp"
#include "posyid/pipeline.hpp"

namespace posyid {
namespace {

// Distribution maps are written out so the stream does not depend on the
// standard library's distribution implementations.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; both variates of a pair are used.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

PosynomialModel example1_truth() {
  return PosynomialModel(3, {
                                {1.0, {0.0, 1.5, 3.0}},
                                {2.0, {2.0, 0.0, -1.0}},
                                {3.0, {0.0, 3.2, 0.0}},
                                {4.0, {0.5, -2.0, 1.0}},
                            });
}

ExponentGrid example1_grid() {
  return ExponentGrid({
      ExponentGrid::expand({0.0, 4.0, 0.5}),
      ExponentGrid::expand({-2.0, 4.0, 0.1}),
      ExponentGrid::expand({-1.0, 4.0, 1.0}),
  });
}

ExponentGrid example2_grid() {
  const std::vector<double> q{-2.0, -1.0, 0.0, 1.0, 2.0};
  return ExponentGrid({q, q, q, q});
}

Dataset generate_example1(std::uint64_t seed, Index m, double noise_ratio) {
  if (m < 1) throw ConfigError("example 1 needs at least one sample");
  if (!(noise_ratio >= 0.0) || !std::isfinite(noise_ratio)) {
    throw ConfigError("noise ratio must be finite and >= 0");
  }
  constexpr double kLow = 0.2;
  constexpr double kHigh = 3.2;
  PortableRng rng(seed);
  RowMatrix samples(m, 3);
  for (Index k = 0; k < m; ++k) {
    for (Index j = 0; j < 3; ++j) samples(k, j) = kLow + (kHigh - kLow) * rng.uniform();
  }
  const PosynomialModel truth = example1_truth();
  Eigen::VectorXd clean(m);
  for (Index k = 0; k < m; ++k) {
    clean[k] = predict(truth, {samples.row(k).data(), 3});
  }
  Eigen::VectorXd y = clean;
  if (noise_ratio > 0.0 && m > 1) {
    const double mean = clean.mean();
    const double signal_std =
        std::sqrt((clean.array() - mean).square().sum() / static_cast<double>(m - 1));
    const double noise_std = noise_ratio * signal_std;
    for (Index k = 0; k < m; ++k) y[k] += noise_std * rng.normal();
  }
  return Dataset(std::move(samples), std::move(y));
}

}  // namespace posyid
