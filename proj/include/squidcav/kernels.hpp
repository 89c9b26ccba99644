#pragma once

#include <complex>
#include <cstddef>

namespace squidcav::kernels {

using cplx = std::complex<double>;

/// Dense complex linear-algebra kernels used by the time-evolution inner
/// loops. Two implementations exist: a scalar reference and an AVX2+FMA
/// variant; the active one is chosen once at runtime from CPU capabilities
/// (overridable via the SQUIDCAV_SIMD environment variable, values
/// "scalar" | "avx2" | "auto"). Both are exercised against each other by the
/// equivalence tests, and matrices are column-major throughout (leading
/// dimension = number of rows), matching Eigen's default storage.
struct KernelTable {
  /// y += a * x
  void (*zaxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// out[i] = a[i] * b[i]
  void (*zvmul)(std::size_t n, const cplx* a, const cplx* b, cplx* out);
  /// sum_i conj(a[i]) * b[i]
  cplx (*zdotc)(std::size_t n, const cplx* a, const cplx* b);
  /// sum_i |x[i]|^2
  double (*znrm2sq)(std::size_t n, const cplx* x);
  /// y = A*x (accumulate=false) or y += A*x (accumulate=true); A is m-by-n.
  void (*zgemv_n)(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                  cplx* y, bool accumulate);
  /// y = A^H * x; A is m-by-n, x has m entries, y has n entries.
  void (*zgemv_c)(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                  cplx* y);
};

enum class Backend { scalar, avx2 };

/// Kernel table selected for this process (resolved on first use).
[[nodiscard]] const KernelTable& active();
[[nodiscard]] Backend active_backend();
[[nodiscard]] const char* backend_name(Backend backend);

/// True when the AVX2 variant was compiled in and the CPU supports it.
[[nodiscard]] bool avx2_available();

/// Table for a specific backend (test hook); throws std::runtime_error when
/// the requested backend is unavailable on this machine.
[[nodiscard]] const KernelTable& table(Backend backend);

/// Force a backend for the rest of the process (test hook).
void force_backend(Backend backend);

}  // namespace squidcav::kernels
