#include <immintrin.h>

#include "mixmi/simd/pair_sums.hpp"

namespace mixmi::simd {

namespace {

struct Avx512 {
  using reg = __m512d;
  static constexpr std::size_t width = 8;

  static reg loadu(const double* p) noexcept { return _mm512_loadu_pd(p); }
  static void storeu(double* p, reg v) noexcept { _mm512_storeu_pd(p, v); }
  static reg set1(double x) noexcept { return _mm512_set1_pd(x); }
  static reg zero() noexcept { return _mm512_setzero_pd(); }
  static reg add(reg a, reg b) noexcept { return _mm512_add_pd(a, b); }
  static reg sub(reg a, reg b) noexcept { return _mm512_sub_pd(a, b); }
  static reg mul(reg a, reg b) noexcept { return _mm512_mul_pd(a, b); }
  static reg fmadd(reg a, reg b, reg c) noexcept { return _mm512_fmadd_pd(a, b, c); }
  static reg div(reg a, reg b) noexcept { return _mm512_div_pd(a, b); }
  static reg sqrt(reg a) noexcept { return _mm512_sqrt_pd(a); }
  static double hsum(reg v) noexcept {
    alignas(64) double lanes[8];
    _mm512_store_pd(lanes, v);
    double s = lanes[0];
    for (int i = 1; i < 8; ++i) s += lanes[i];
    return s;
  }
};

}  // namespace

#include "pair_sums_vec.inl"

namespace {
constexpr TileKernels kAvx512{&off_diagonal_any<Avx512>, &diagonal_any<Avx512>};
}

const TileKernels* detail::avx512_kernels() noexcept { return &kAvx512; }

}  // namespace mixmi::simd
