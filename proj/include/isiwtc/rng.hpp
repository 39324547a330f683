#ifndef ISIWTC_RNG_HPP
#define ISIWTC_RNG_HPP

#include <cstdint>
#include <random>
#include <span>

namespace isiwtc {

/// One splitmix64 step; used to derive independent stream seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic k-th derived seed of a master seed (k = 0, 1, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeds of the three independent streams used by one secure-rate estimate.
struct SeedBundle {
  std::uint64_t source = 0;
  std::uint64_t bob = 0;
  std::uint64_t eve = 0;

  static SeedBundle derive(std::uint64_t master) {
    return SeedBundle{derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3)};
  }
};

/// Seeded generator producing bit-reproducible uniforms and Gaussians.
///
/// mt19937_64 output is fixed by the C++ standard. Doubles are formed from the
/// top 53 bits, Gaussians by an explicit Box-Muller transform; the library
/// distributions are avoided because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard Gaussian via Box-Muller; pairs are generated and one is cached.
  double gaussian();

  /// Index sampled from the given (not necessarily normalized) weights via
  /// cumulative scan in index order.
  std::size_t categorical(std::span<const double> weights);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace isiwtc

#endif
