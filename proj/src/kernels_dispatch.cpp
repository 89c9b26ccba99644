#include "squidcav/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace squidcav::kernels {

namespace detail {
const KernelTable* scalar_table();
const KernelTable* avx2_table();
}  // namespace detail

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Selection {
  const KernelTable* table;
  Backend backend;
};

Selection resolve() {
  const bool avx2_ok = avx2_available();
  if (const char* env = std::getenv("SQUIDCAV_SIMD"); env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) {
      return {detail::scalar_table(), Backend::scalar};
    }
    if (std::strcmp(env, "avx2") == 0) {
      if (!avx2_ok) {
        throw std::runtime_error(
            "SQUIDCAV_SIMD=avx2 requested but AVX2+FMA is unavailable");
      }
      return {detail::avx2_table(), Backend::avx2};
    }
    // Any other value (including "auto") falls through to auto-detection.
  }
  if (avx2_ok) return {detail::avx2_table(), Backend::avx2};
  return {detail::scalar_table(), Backend::scalar};
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

void ensure_resolved() {
  if (g_table.load(std::memory_order_acquire) == nullptr) {
    const Selection sel = resolve();
    g_backend.store(sel.backend, std::memory_order_relaxed);
    g_table.store(sel.table, std::memory_order_release);
  }
}

}  // namespace

bool avx2_available() {
  return detail::avx2_table() != nullptr && cpu_has_avx2_fma();
}

const KernelTable& active() {
  ensure_resolved();
  return *g_table.load(std::memory_order_acquire);
}

Backend active_backend() {
  ensure_resolved();
  return g_backend.load(std::memory_order_relaxed);
}

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& table(Backend backend) {
  switch (backend) {
    case Backend::scalar: return *detail::scalar_table();
    case Backend::avx2:
      if (!avx2_available()) {
        throw std::runtime_error("AVX2 kernel table unavailable on this machine");
      }
      return *detail::avx2_table();
  }
  throw std::runtime_error("unknown kernel backend");
}

void force_backend(Backend backend) {
  const KernelTable& t = table(backend);  // throws if unavailable
  g_backend.store(backend, std::memory_order_relaxed);
  g_table.store(&t, std::memory_order_release);
}

}  // namespace squidcav::kernels
