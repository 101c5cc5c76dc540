#include "syncnet/rng.hpp"

namespace syncnet {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ n) ^ trial);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

std::vector<double> Rng::uniform_vector(std::size_t n, double a, double b) {
  std::vector<double> out(n);
  for (double& x : out) {
    x = uniform(a, b);
  }
  return out;
}

}  // namespace syncnet
