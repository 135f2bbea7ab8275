#include "pdmp/rng.hpp"

#include <cmath>

#include "pdmp/errors.hpp"

namespace pdmp {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t k : key) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

double RandomSource::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
  return -std::log(uniform_open()) / rate;
}

namespace {
std::mt19937_64 seeded_engine(std::uint64_t key) {
  const std::uint64_t a = mix64(key);
  const std::uint64_t b = mix64(a);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}
}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : key_(derive_seed({seed, stream_index})), engine_(seeded_engine(key_)) {}

}  // namespace pdmp
