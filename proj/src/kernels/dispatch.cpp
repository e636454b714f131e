#include <atomic>
#include <stdexcept>

#include "imex/kernels/kernels.hpp"

namespace imex::kernels {

#if !IMEX_HAVE_AVX2
const Table& avx2_table() { throw std::runtime_error("kernels: built without the AVX2 variant"); }
#endif

bool avx2_available() {
#if IMEX_HAVE_AVX2 && (defined(__x86_64__) || defined(__i386__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

namespace {

std::atomic<const Table*>& slot() {
  static std::atomic<const Table*> s{avx2_available() ? &avx2_table() : &scalar_table()};
  return s;
}

}  // namespace

const Table& active() { return *slot().load(std::memory_order_relaxed); }

Backend active_backend() { return &active() == &scalar_table() ? Backend::Scalar : Backend::Avx2; }

void set_backend(Backend b) {
  if (b == Backend::Avx2) {
    if (!avx2_available()) throw std::runtime_error("kernels: AVX2/FMA not available on this CPU");
    slot().store(&avx2_table());
  } else {
    slot().store(&scalar_table());
  }
}

std::string to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

}  // namespace imex::kernels
