// Copyright 2026 The eegsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "kernels/kernels.h"

#include <atomic>

namespace eegsep::kernels {

namespace scalar {

template <typename T>
static T dot_impl(const T* a, const T* b, size_t n) {
  T acc = T(0);
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
static void axpy_impl(T a, const T* x, T* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
static T sum_impl(const T* x, size_t n) {
  T acc = T(0);
  for (size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

template <typename T>
static T sum_sq_impl(const T* x, size_t n) {
  T acc = T(0);
  for (size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

float dot(const float* a, const float* b, size_t n) { return dot_impl(a, b, n); }
double dot(const double* a, const double* b, size_t n) { return dot_impl(a, b, n); }
void axpy(float a, const float* x, float* y, size_t n) { axpy_impl(a, x, y, n); }
void axpy(double a, const double* x, double* y, size_t n) { axpy_impl(a, x, y, n); }
void add(const float* a, const float* b, float* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] + b[i];
}
void add(const double* a, const double* b, double* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] + b[i];
}
void sub(const float* a, const float* b, float* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] - b[i];
}
void sub(const double* a, const double* b, double* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] - b[i];
}
void mul(const float* a, const float* b, float* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] * b[i];
}
void mul(const double* a, const double* b, double* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] = a[i] * b[i];
}
void mul_acc(const float* a, const float* b, float* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] += a[i] * b[i];
}
void mul_acc(const double* a, const double* b, double* o, size_t n) {
  for (size_t i = 0; i < n; ++i) o[i] += a[i] * b[i];
}
void scale(float a, float* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}
void scale(double a, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}
float sum(const float* x, size_t n) { return sum_impl(x, n); }
double sum(const double* x, size_t n) { return sum_impl(x, n); }
float sum_sq(const float* x, size_t n) { return sum_sq_impl(x, n); }
double sum_sq(const double* x, size_t n) { return sum_sq_impl(x, n); }

}  // namespace scalar

namespace {

enum Forced : int { kAuto = 0, kForceScalar = 1, kForceAvx2 = 2 };
std::atomic<int> g_forced{kAuto};

inline bool use_avx2() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f == kForceScalar) return false;
  if (f == kForceAvx2) return avx2_available();
  static const bool detected = avx2_available();
  return detected;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Backend active_backend() { return use_avx2() ? Backend::kAvx2 : Backend::kScalar; }

void force_backend(Backend b) {
  g_forced.store(b == Backend::kAvx2 ? kForceAvx2 : kForceScalar,
                 std::memory_order_relaxed);
}

void clear_forced_backend() { g_forced.store(kAuto, std::memory_order_relaxed); }

#define EEGSEP_DISPATCH_RET(name, ...) \
  return use_avx2() ? avx2::name(__VA_ARGS__) : scalar::name(__VA_ARGS__)
#define EEGSEP_DISPATCH_VOID(name, ...)   \
  if (use_avx2()) {                       \
    avx2::name(__VA_ARGS__);              \
  } else {                                \
    scalar::name(__VA_ARGS__);            \
  }

float dot(const float* a, const float* b, size_t n) { EEGSEP_DISPATCH_RET(dot, a, b, n); }
double dot(const double* a, const double* b, size_t n) { EEGSEP_DISPATCH_RET(dot, a, b, n); }
void axpy(float a, const float* x, float* y, size_t n) { EEGSEP_DISPATCH_VOID(axpy, a, x, y, n); }
void axpy(double a, const double* x, double* y, size_t n) { EEGSEP_DISPATCH_VOID(axpy, a, x, y, n); }
void add(const float* a, const float* b, float* o, size_t n) { EEGSEP_DISPATCH_VOID(add, a, b, o, n); }
void add(const double* a, const double* b, double* o, size_t n) { EEGSEP_DISPATCH_VOID(add, a, b, o, n); }
void sub(const float* a, const float* b, float* o, size_t n) { EEGSEP_DISPATCH_VOID(sub, a, b, o, n); }
void sub(const double* a, const double* b, double* o, size_t n) { EEGSEP_DISPATCH_VOID(sub, a, b, o, n); }
void mul(const float* a, const float* b, float* o, size_t n) { EEGSEP_DISPATCH_VOID(mul, a, b, o, n); }
void mul(const double* a, const double* b, double* o, size_t n) { EEGSEP_DISPATCH_VOID(mul, a, b, o, n); }
void mul_acc(const float* a, const float* b, float* o, size_t n) { EEGSEP_DISPATCH_VOID(mul_acc, a, b, o, n); }
void mul_acc(const double* a, const double* b, double* o, size_t n) { EEGSEP_DISPATCH_VOID(mul_acc, a, b, o, n); }
void scale(float a, float* x, size_t n) { EEGSEP_DISPATCH_VOID(scale, a, x, n); }
void scale(double a, double* x, size_t n) { EEGSEP_DISPATCH_VOID(scale, a, x, n); }
float sum(const float* x, size_t n) { EEGSEP_DISPATCH_RET(sum, x, n); }
double sum(const double* x, size_t n) { EEGSEP_DISPATCH_RET(sum, x, n); }
float sum_sq(const float* x, size_t n) { EEGSEP_DISPATCH_RET(sum_sq, x, n); }
double sum_sq(const double* x, size_t n) { EEGSEP_DISPATCH_RET(sum_sq, x, n); }

#undef EEGSEP_DISPATCH_RET
#undef EEGSEP_DISPATCH_VOID

}  // namespace eegsep::kernels
