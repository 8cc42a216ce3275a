#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sdc {

// Deterministic Gaussian stream.  Box-Muller over std::mt19937_64 so that
// the generated sequence is identical across platforms and standard-library
// implementations (std::normal_distribution is not pinned by the standard).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  // Stream derived from (seed, index); used for per-target RNG streams so
  // concurrent generation is schedule-independent.
  GaussianStream(std::uint64_t seed, std::uint64_t index)
      : engine_(mix(seed, index)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = next();
    return v;
  }

 private:
  double uniform01() {
    // (0,1]: keeps log() finite.
    std::uint64_t r = engine_();
    return (static_cast<double>(r >> 11) + 1.0) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sdc
