#include "squidcav/kernels.hpp"

// Scalar reference kernels. These are the ground truth the SIMD variants are
// tested against, so they stay deliberately straightforward.

namespace squidcav::kernels::detail {

namespace {

void zaxpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void zvmul_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

cplx zdotc_scalar(std::size_t n, const cplx* a, const cplx* b) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double znrm2sq_scalar(std::size_t n, const cplx* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(x[i]);
  return acc;
}

void zgemv_n_scalar(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                    cplx* y, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m; ++i) y[i] = cplx{0.0, 0.0};
  }
  for (std::size_t j = 0; j < n; ++j) {
    const cplx xj = x[j];
    const cplx* col = a + j * m;
    for (std::size_t i = 0; i < m; ++i) y[i] += col[i] * xj;
  }
}

void zgemv_c_scalar(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                    cplx* y) {
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = zdotc_scalar(m, a + j * m, x);
  }
}

}  // namespace

const KernelTable* scalar_table() {
  static const KernelTable t{zaxpy_scalar, zvmul_scalar, zdotc_scalar,
                             znrm2sq_scalar, zgemv_n_scalar, zgemv_c_scalar};
  return &t;
}

}  // namespace squidcav::kernels::detail
