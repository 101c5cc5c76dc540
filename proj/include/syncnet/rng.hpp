#pragma once

// Seeded random numbers for experiments. The engine is std::mt19937_64, whose
// output sequence is fixed by the C++ standard, and uniforms are built from
// the top 53 bits by hand instead of std::uniform_real_distribution (whose
// algorithm is implementation-defined). Results are therefore identical across
// platforms and standard libraries.

#include <cstdint>
#include <random>
#include <vector>

namespace syncnet {

/// One round of the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent stream seed for one trial of one grid point.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t trial) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [a, b).
  double uniform(double a, double b);
  /// n draws on [a, b).
  std::vector<double> uniform_vector(std::size_t n, double a, double b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace syncnet
