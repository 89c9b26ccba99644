#include "squidcav/kernels.hpp"

// AVX2+FMA kernels. This translation unit is built with -mavx2 -mfma on
// x86-64; the dispatcher only routes here after a runtime CPU check, so no
// illegal instruction can leak onto older machines. On other architectures
// (or compilers without AVX2 support) it degrades to a null table and the
// scalar reference takes over.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace squidcav::kernels::detail {

namespace {

// One __m256d holds two complex<double> values laid out [re0, im0, re1, im1].

// Component-wise complex product of the two packed pairs.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);        // [re0, re0, re1, re1]
  const __m256d a_im = _mm256_permute_pd(a, 0xF);   // [im0, im0, im1, im1]
  const __m256d b_swap = _mm256_permute_pd(b, 0x5); // [im0', re0', im1', re1']
  // even lanes: re_a*re_b - im_a*im_b ; odd lanes: re_a*im_b + im_a*re_b
  return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

// Component-wise product conj(a) * b.
inline __m256d cmul_conj(__m256d a, __m256d b) {
  const __m256d a_re = _mm256_movedup_pd(a);
  const __m256d a_im = _mm256_permute_pd(a, 0xF);
  const __m256d b_swap = _mm256_permute_pd(b, 0x5);
  // even lanes: re_a*re_b + im_a*im_b ; odd lanes: re_a*im_b - im_a*re_b
  return _mm256_fmsubadd_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

inline cplx reduce_pairs(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d sum = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, sum);
  return {out[0], out[1]};
}

inline __m256d broadcast_cplx(const cplx& v) {
  return _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(&v));
}

void zaxpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d av = broadcast_cplx(a);
  std::size_t i = 0;
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(yv, cmul(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void zvmul_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* out) {
  std::size_t i = 0;
  const auto* ap = reinterpret_cast<const double*>(a);
  const auto* bp = reinterpret_cast<const double*>(b);
  auto* op = reinterpret_cast<double*>(out);
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
    _mm256_storeu_pd(op + 2 * i, cmul(av, bv));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

cplx zdotc_avx2(std::size_t n, const cplx* a, const cplx* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const auto* ap = reinterpret_cast<const double*>(a);
  const auto* bp = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
    acc = _mm256_add_pd(acc, cmul_conj(av, bv));
  }
  cplx result = reduce_pairs(acc);
  for (; i < n; ++i) result += std::conj(a[i]) * b[i];
  return result;
}

double znrm2sq_avx2(std::size_t n, const cplx* x) {
  // |x|^2 over complex entries is a plain sum of squares of the doubles.
  __m256d acc = _mm256_setzero_pd();
  const auto* xp = reinterpret_cast<const double*>(x);
  const std::size_t nd = 2 * n;
  std::size_t i = 0;
  for (; i + 4 <= nd; i += 4) {
    const __m256d v = _mm256_loadu_pd(xp + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d sum = _mm_add_pd(lo, hi);
  sum = _mm_hadd_pd(sum, sum);
  double result = _mm_cvtsd_f64(sum);
  for (; i < nd; ++i) result += xp[i] * xp[i];
  return result;
}

void zgemv_n_avx2(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                  cplx* y, bool accumulate) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m; ++i) y[i] = cplx{0.0, 0.0};
  }
  for (std::size_t j = 0; j < n; ++j) {
    zaxpy_avx2(m, x[j], a + j * m, y);
  }
}

void zgemv_c_avx2(std::size_t m, std::size_t n, const cplx* a, const cplx* x,
                  cplx* y) {
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = zdotc_avx2(m, a + j * m, x);
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t{zaxpy_avx2, zvmul_avx2, zdotc_avx2,
                             znrm2sq_avx2, zgemv_n_avx2, zgemv_c_avx2};
  return &t;
}

}  // namespace squidcav::kernels::detail

#else  // architecture or compiler without AVX2+FMA

namespace squidcav::kernels::detail {

const KernelTable* avx2_table() { return nullptr; }

}  // namespace squidcav::kernels::detail

#endif
