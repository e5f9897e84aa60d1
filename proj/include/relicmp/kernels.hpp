#pragma once

#include <cstddef>

// Arithmetic inner-loop kernels with runtime backend selection.
//
// The scalar reference implementations accumulate in four interleaved lanes
// and combine them as (l0+l2)+(l1+l3), which is exactly the order the AVX2
// variants produce. With FP contraction disabled in the AVX2 translation
// unit, the two backends are bit-identical; the equivalence tests assert
// this rather than testing against a tolerance.

namespace relicmp::kernels {

/// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

/// sum_i x[i]
double sum(const double* x, std::size_t n);

/// y = A x for a row-major rows x cols matrix (y has `rows` entries).
void matvec(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);

/// Name of the backend the dispatcher picked ("avx2" or "scalar").
/// Set RELICMP_FORCE_SCALAR=1 to pin the scalar path.
const char* active_backend();

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
#if defined(RELICMP_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
#endif
bool avx2_selected();
}  // namespace detail

}  // namespace relicmp::kernels
