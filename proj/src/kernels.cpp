#include "relicmp/kernels.hpp"

#include <cstdlib>

namespace relicmp::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~static_cast<std::size_t>(3);
  for (; i < n4; i += 4) {
    l0 += a[i] * b[i];
    l1 += a[i + 1] * b[i + 1];
    l2 += a[i + 2] * b[i + 2];
    l3 += a[i + 3] * b[i + 3];
  }
  double lane[4] = {l0, l1, l2, l3};
  for (std::size_t j = 0; i < n; ++i, ++j) lane[j] += a[i] * b[i];
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double sum_scalar(const double* x, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  const std::size_t n4 = n & ~static_cast<std::size_t>(3);
  for (; i < n4; i += 4) {
    l0 += x[i];
    l1 += x[i + 1];
    l2 += x[i + 2];
    l3 += x[i + 3];
  }
  double lane[4] = {l0, l1, l2, l3};
  for (std::size_t j = 0; i < n; ++i, ++j) lane[j] += x[i];
  return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

namespace {

bool force_scalar() {
  const char* env = std::getenv("RELICMP_FORCE_SCALAR");
  return env != nullptr && env[0] == '1';
}

bool pick_avx2() {
#if defined(RELICMP_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  if (force_scalar()) return false;
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

}  // namespace

bool avx2_selected() {
  static const bool selected = pick_avx2();
  return selected;
}

}  // namespace detail

double dot(const double* a, const double* b, std::size_t n) {
#if defined(RELICMP_HAVE_AVX2_TU)
  if (detail::avx2_selected()) return detail::dot_avx2(a, b, n);
#endif
  return detail::dot_scalar(a, b, n);
}

double sum(const double* x, std::size_t n) {
#if defined(RELICMP_HAVE_AVX2_TU)
  if (detail::avx2_selected()) return detail::sum_avx2(x, n);
#endif
  return detail::sum_scalar(x, n);
}

void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

const char* active_backend() { return detail::avx2_selected() ? "avx2" : "scalar"; }

}  // namespace relicmp::kernels
