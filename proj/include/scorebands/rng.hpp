#pragma once

#include <array>
#include <cstdint>

#include "scorebands/errors.hpp"
#include "scorebands/normal.hpp"

namespace scorebands::rng {

namespace detail {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output mixer.
inline constexpr std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace detail

/// SplitMix64: a counter-based 64-bit generator. Used for seeding and for
/// deriving substream seeds.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += detail::kGamma;
    return detail::mix(state_);
  }

 private:
  std::uint64_t state_;
};

/// Seed of substream `stream` under master `seed`: the (stream+1)-th
/// SplitMix64 output of the master state. Derivations nest, so hierarchies
/// like experiment -> cell -> replicate -> bootstrap draw clean seeds without
/// any shared state, and every consumer gets the same stream no matter which
/// thread runs it or in which order.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return detail::mix(seed + (stream + 1) * detail::kGamma);
}

/// xoshiro256++ (Blackman & Vigna, public domain reference implementation),
/// state expanded from a 64-bit seed with SplitMix64 as its authors recommend.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Generator for substream `stream` of `seed`.
inline Xoshiro256pp make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Xoshiro256pp(derive_seed(seed, stream));
}

/// Uniform draw on the open interval (0, 1); 53-bit resolution, never 0 or 1.
inline double uniform01(Xoshiro256pp& gen) {
  return (static_cast<double>(gen.next() >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Lemire multiply-shift with rejection: exactly
/// uniform and independent of any standard-library distribution internals.
inline std::uint64_t uniform_below(Xoshiro256pp& gen, std::uint64_t n) {
  if (n == 0) throw InvalidInputError("uniform_below: n must be positive");
  unsigned __int128 m = static_cast<unsigned __int128>(gen.next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(gen.next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Standard normal draw by inversion; one uniform per normal keeps streams
/// easy to reason about.
inline double standard_normal(Xoshiro256pp& gen) {
  return normal_quantile(uniform01(gen));
}

}  // namespace scorebands::rng
