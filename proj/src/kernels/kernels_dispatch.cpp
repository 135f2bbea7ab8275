#include <atomic>
#include <cstdlib>
#include <string>

#include "pdmp/errors.hpp"
#include "pdmp/kernels.hpp"

namespace pdmp::kernels {

#if !defined(PDMP_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(PDMP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("PDMP_SIMD"); env != nullptr && std::string(env) == "scalar")
    return Backend::Scalar;
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

const KernelTable& table_for(Backend b) { return b == Backend::Avx2 ? *avx2_table() : scalar_table(); }

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{&table_for(detect())};
  return current;
}

}  // namespace

bool backend_available(Backend b) {
  if (b == Backend::Scalar) return true;
  return avx2_table() != nullptr && cpu_has_avx2();
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

Backend active_backend() { return &active() == &scalar_table() ? Backend::Scalar : Backend::Avx2; }

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void force_backend(Backend b) {
  if (!backend_available(b))
    throw Error("kernel backend not available: " + std::string(backend_name(b)));
  slot().store(&table_for(b), std::memory_order_relaxed);
}

}  // namespace pdmp::kernels
