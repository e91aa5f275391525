// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Dense arithmetic inner loops used by the tensor ops. Every kernel exists
// as a scalar reference implementation and, on x86-64, as an AVX2+FMA
// variant. The public entry points dispatch at runtime on CPU capability;
// tests compare the two backends directly.

#ifndef EEGSEP_KERNELS_KERNELS_H_
#define EEGSEP_KERNELS_KERNELS_H_

#include <cstddef>

namespace eegsep::kernels {

enum class Backend { kScalar, kAvx2 };

// True when the running CPU supports the AVX2+FMA variants.
bool avx2_available();

// Backend actually used by the dispatching entry points.
Backend active_backend();

// Force a backend (tests); kAvx2 on unsupported hardware falls back to
// scalar. Call clear_forced_backend() to return to auto-detection.
void force_backend(Backend b);
void clear_forced_backend();

namespace scalar {
float dot(const float* a, const float* b, size_t n);
double dot(const double* a, const double* b, size_t n);
void axpy(float a, const float* x, float* y, size_t n);
void axpy(double a, const double* x, double* y, size_t n);
void add(const float* a, const float* b, float* o, size_t n);
void add(const double* a, const double* b, double* o, size_t n);
void sub(const float* a, const float* b, float* o, size_t n);
void sub(const double* a, const double* b, double* o, size_t n);
void mul(const float* a, const float* b, float* o, size_t n);
void mul(const double* a, const double* b, double* o, size_t n);
void mul_acc(const float* a, const float* b, float* o, size_t n);
void mul_acc(const double* a, const double* b, double* o, size_t n);
void scale(float a, float* x, size_t n);
void scale(double a, double* x, size_t n);
float sum(const float* x, size_t n);
double sum(const double* x, size_t n);
float sum_sq(const float* x, size_t n);
double sum_sq(const double* x, size_t n);
}  // namespace scalar

namespace avx2 {
// Defined on x86-64; elsewhere they forward to the scalar reference.
float dot(const float* a, const float* b, size_t n);
double dot(const double* a, const double* b, size_t n);
void axpy(float a, const float* x, float* y, size_t n);
void axpy(double a, const double* x, double* y, size_t n);
void add(const float* a, const float* b, float* o, size_t n);
void add(const double* a, const double* b, double* o, size_t n);
void sub(const float* a, const float* b, float* o, size_t n);
void sub(const double* a, const double* b, double* o, size_t n);
void mul(const float* a, const float* b, float* o, size_t n);
void mul(const double* a, const double* b, double* o, size_t n);
void mul_acc(const float* a, const float* b, float* o, size_t n);
void mul_acc(const double* a, const double* b, double* o, size_t n);
void scale(float a, float* x, size_t n);
void scale(double a, double* x, size_t n);
float sum(const float* x, size_t n);
double sum(const double* x, size_t n);
float sum_sq(const float* x, size_t n);
double sum_sq(const double* x, size_t n);
}  // namespace avx2

// Dispatching entry points.
float dot(const float* a, const float* b, size_t n);
double dot(const double* a, const double* b, size_t n);
void axpy(float a, const float* x, float* y, size_t n);
void axpy(double a, const double* x, double* y, size_t n);
void add(const float* a, const float* b, float* o, size_t n);
void add(const double* a, const double* b, double* o, size_t n);
void sub(const float* a, const float* b, float* o, size_t n);
void sub(const double* a, const double* b, double* o, size_t n);
void mul(const float* a, const float* b, float* o, size_t n);
void mul(const double* a, const double* b, double* o, size_t n);
void mul_acc(const float* a, const float* b, float* o, size_t n);
void mul_acc(const double* a, const double* b, double* o, size_t n);
void scale(float a, float* x, size_t n);
void scale(double a, double* x, size_t n);
float sum(const float* x, size_t n);
double sum(const double* x, size_t n);
float sum_sq(const float* x, size_t n);
double sum_sq(const double* x, size_t n);

}  // namespace eegsep::kernels

#endif  // EEGSEP_KERNELS_KERNELS_H_
