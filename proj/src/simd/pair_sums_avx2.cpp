#include <immintrin.h>

#include "mixmi/simd/pair_sums.hpp"

namespace mixmi::simd {

namespace {

struct Avx2 {
  using reg = __m256d;
  static constexpr std::size_t width = 4;

  static reg loadu(const double* p) noexcept { return _mm256_loadu_pd(p); }
  static void storeu(double* p, reg v) noexcept { _mm256_storeu_pd(p, v); }
  static reg set1(double x) noexcept { return _mm256_set1_pd(x); }
  static reg zero() noexcept { return _mm256_setzero_pd(); }
  static reg add(reg a, reg b) noexcept { return _mm256_add_pd(a, b); }
  static reg sub(reg a, reg b) noexcept { return _mm256_sub_pd(a, b); }
  static reg mul(reg a, reg b) noexcept { return _mm256_mul_pd(a, b); }
  static reg fmadd(reg a, reg b, reg c) noexcept { return _mm256_fmadd_pd(a, b, c); }
  static reg div(reg a, reg b) noexcept { return _mm256_div_pd(a, b); }
  static reg sqrt(reg a) noexcept { return _mm256_sqrt_pd(a); }
  static double hsum(reg v) noexcept {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
  }
};

}  // namespace

#include "pair_sums_vec.inl"

namespace {
constexpr TileKernels kAvx2{&off_diagonal_any<Avx2>, &diagonal_any<Avx2>};
}

const TileKernels* detail::avx2_kernels() noexcept { return &kAvx2; }

}  // namespace mixmi::simd
