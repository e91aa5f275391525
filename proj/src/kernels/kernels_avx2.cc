// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "kernels/kernels.h"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace eegsep::kernels::avx2 {

#define EEGSEP_AVX2 __attribute__((target("avx2,fma")))

namespace {

EEGSEP_AVX2 inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}

EEGSEP_AVX2 inline double hsum256d(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  lo = _mm_add_sd(lo, sh);
  return _mm_cvtsd_f64(lo);
}

}  // namespace

EEGSEP_AVX2 float dot(const float* a, const float* b, size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
  }
  float r = hsum256(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

EEGSEP_AVX2 double dot(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double r = hsum256d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

EEGSEP_AVX2 void axpy(float a, const float* x, float* y, size_t n) {
  __m256 va = _mm256_set1_ps(a);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

EEGSEP_AVX2 void axpy(double a, const double* x, double* y, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

EEGSEP_AVX2 void add(const float* a, const float* b, float* o, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) o[i] = a[i] + b[i];
}

EEGSEP_AVX2 void add(const double* a, const double* b, double* o, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) o[i] = a[i] + b[i];
}

EEGSEP_AVX2 void sub(const float* a, const float* b, float* o, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) o[i] = a[i] - b[i];
}

EEGSEP_AVX2 void sub(const double* a, const double* b, double* o, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) o[i] = a[i] - b[i];
}

EEGSEP_AVX2 void mul(const float* a, const float* b, float* o, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) o[i] = a[i] * b[i];
}

EEGSEP_AVX2 void mul(const double* a, const double* b, double* o, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) o[i] = a[i] * b[i];
}

EEGSEP_AVX2 void mul_acc(const float* a, const float* b, float* o, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vo = _mm256_loadu_ps(o + i);
    vo = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), vo);
    _mm256_storeu_ps(o + i, vo);
  }
  for (; i < n; ++i) o[i] += a[i] * b[i];
}

EEGSEP_AVX2 void mul_acc(const double* a, const double* b, double* o, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vo = _mm256_loadu_pd(o + i);
    vo = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), vo);
    _mm256_storeu_pd(o + i, vo);
  }
  for (; i < n; ++i) o[i] += a[i] * b[i];
}

EEGSEP_AVX2 void scale(float a, float* x, size_t n) {
  __m256 va = _mm256_set1_ps(a);
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(x + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

EEGSEP_AVX2 void scale(double a, double* x, size_t n) {
  __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

EEGSEP_AVX2 float sum(const float* x, size_t n) {
  __m256 acc = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
  float r = hsum256(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

EEGSEP_AVX2 double sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum256d(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

EEGSEP_AVX2 float sum_sq(const float* x, size_t n) {
  __m256 acc = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    acc = _mm256_fmadd_ps(v, v, acc);
  }
  float r = hsum256(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

EEGSEP_AVX2 double sum_sq(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double r = hsum256d(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

#undef EEGSEP_AVX2

}  // namespace eegsep::kernels::avx2

#else  // non-x86 fallback: keep the symbol set, forward to scalar.

namespace eegsep::kernels::avx2 {
float dot(const float* a, const float* b, size_t n) { return scalar::dot(a, b, n); }
double dot(const double* a, const double* b, size_t n) { return scalar::dot(a, b, n); }
void axpy(float a, const float* x, float* y, size_t n) { scalar::axpy(a, x, y, n); }
void axpy(double a, const double* x, double* y, size_t n) { scalar::axpy(a, x, y, n); }
void add(const float* a, const float* b, float* o, size_t n) { scalar::add(a, b, o, n); }
void add(const double* a, const double* b, double* o, size_t n) { scalar::add(a, b, o, n); }
void sub(const float* a, const float* b, float* o, size_t n) { scalar::sub(a, b, o, n); }
void sub(const double* a, const double* b, double* o, size_t n) { scalar::sub(a, b, o, n); }
void mul(const float* a, const float* b, float* o, size_t n) { scalar::mul(a, b, o, n); }
void mul(const double* a, const double* b, double* o, size_t n) { scalar::mul(a, b, o, n); }
void mul_acc(const float* a, const float* b, float* o, size_t n) { scalar::mul_acc(a, b, o, n); }
void mul_acc(const double* a, const double* b, double* o, size_t n) { scalar::mul_acc(a, b, o, n); }
void scale(float a, float* x, size_t n) { scalar::scale(a, x, n); }
void scale(double a, double* x, size_t n) { scalar::scale(a, x, n); }
float sum(const float* x, size_t n) { return scalar::sum(x, n); }
double sum(const double* x, size_t n) { return scalar::sum(x, n); }
float sum_sq(const float* x, size_t n) { return scalar::sum_sq(x, n); }
double sum_sq(const double* x, size_t n) { return scalar::sum_sq(x, n); }
}  // namespace eegsep::kernels::avx2

#endif
