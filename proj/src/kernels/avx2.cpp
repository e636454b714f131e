// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "imex/kernels/kernels.hpp"

namespace imex::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// (a, b) -> (a, a, b, b)
inline __m256d dup_pair(const double* p) {
  const __m128d v = _mm_loadu_pd(p);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(v), 0x50);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void axpby(std::size_t n, double a, const double* x, double b, double* y) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], b * y[i]);
}

void multiply(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_modes(std::size_t n, const double* s, cplx* z) {
  double* zp = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(zp + 2 * i, _mm256_mul_pd(dup_pair(s + i), _mm256_loadu_pd(zp + 2 * i)));
  }
  for (; i < n; ++i) z[i] *= s[i];
}

void ik_accumulate(std::size_t n, const double* k, double sign, const cplx* x, cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  // i * (a + ib) = -b + ia
  const __m256d flip = _mm256_set_pd(sign, -sign, sign, -sign);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xs = _mm256_permute_pd(_mm256_loadu_pd(xp + 2 * i), 0x5);
    const __m256d f = _mm256_mul_pd(dup_pair(k + i), flip);
    _mm256_storeu_pd(yp + 2 * i, _mm256_fmadd_pd(f, xs, _mm256_loadu_pd(yp + 2 * i)));
  }
  for (; i < n; ++i) {
    const double f = sign * k[i];
    y[i] += cplx(-f * x[i].imag(), f * x[i].real());
  }
}

double weighted_dot(std::size_t n, const double* w, const cplx* x, const cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(xp + 2 * i), _mm256_loadu_pd(yp + 2 * i));
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(xp + 2 * i + 4), _mm256_loadu_pd(yp + 2 * i + 4));
    acc0 = _mm256_fmadd_pd(dup_pair(w + i), p0, acc0);
    acc1 = _mm256_fmadd_pd(dup_pair(w + i + 2), p1, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += w[i] * (x[i].real() * y[i].real() + x[i].imag() * y[i].imag());
  return s;
}

void viscosity(std::size_t n, const double* u, const double* v, const double* w, double nu0, double c,
               double* out) {
  const __m256d vn = _mm256_set1_pd(nu0), vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(u + i), b = _mm256_loadu_pd(v + i);
    __m256d q = _mm256_fmadd_pd(b, b, _mm256_mul_pd(a, a));
    if (w) {
      const __m256d d = _mm256_loadu_pd(w + i);
      q = _mm256_fmadd_pd(d, d, q);
    }
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vc, q, vn));
  }
  for (; i < n; ++i) {
    double q = u[i] * u[i] + v[i] * v[i];
    if (w) q += w[i] * w[i];
    out[i] = nu0 + c * q;
  }
}

double max_abs(std::size_t n, const double* x) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d m = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_and_pd(_mm256_loadu_pd(x + i), mask);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, a);
  }
  if (_mm256_movemask_pd(bad)) return std::nan("");
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (std::isnan(a)) return a;
    if (a > r) r = a;
  }
  return r;
}

}  // namespace

const Table& avx2_table() {
  static const Table t{axpy, axpby, multiply, scale_modes, ik_accumulate, weighted_dot, viscosity, max_abs};
  return t;
}

}  // namespace imex::kernels
