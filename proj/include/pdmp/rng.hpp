#pragma once
// Random streams. Every consumer takes a RandomSource& so that simulations can
// be replayed exactly from (master_seed, chain_index) and so that coupled runs
// can share keyed sub-streams.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pdmp {

/// splitmix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a key tuple into a 64-bit seed.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) noexcept;

/// Abstract 64-bit generator; also a UniformRandomBitGenerator.
class RandomSource {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  virtual ~RandomSource() = default;
  virtual result_type operator()() = 0;

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_(*this); }
  double exponential(double rate);
  /// -1 or +1 with equal probability.
  double sign() { return ((*this)() >> 63) != 0 ? 1.0 : -1.0; }

 protected:
  RandomSource() = default;
  RandomSource(const RandomSource&) = default;
  RandomSource& operator=(const RandomSource&) = default;

 private:
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Main simulation stream backed by mt19937_64.
class RandomStream final : public RandomSource {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0);

  result_type operator()() override { return engine_(); }

  /// Independent child stream; deterministic in (this stream's key, index).
  RandomStream split(std::uint64_t index) const { return RandomStream(key_, index + 1); }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

/// Cheap keyed stream (splitmix64 sequence). Constructing one per
/// (window, channel, band) key is what lets coupled simulations consume
/// identical randomness wherever their channels coincide.
class CounterStream final : public RandomSource {
 public:
  explicit CounterStream(std::uint64_t key) : state_(key) {}
  CounterStream(std::initializer_list<std::uint64_t> key) : state_(derive_seed(key)) {}

  result_type operator()() override {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace pdmp
