#include <cmath>
#include <cstdlib>
#include <string>

#include "mixmi/simd/pair_sums.hpp"

namespace mixmi::simd {

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Avx512:
      return "avx512";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view text) noexcept {
  if (text == "scalar") return Isa::Scalar;
  if (text == "avx2") return Isa::Avx2;
  if (text == "avx512") return Isa::Avx512;
  return std::nullopt;
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
#if defined(MIXMI_HAVE_X86_SIMD)
    case Isa::Avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::Avx512:
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("fma");
#else
    default:
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (supported(Isa::Avx512)) return Isa::Avx512;
  if (supported(Isa::Avx2)) return Isa::Avx2;
  return Isa::Scalar;
}

Isa active_isa() noexcept {
  if (const char* env = std::getenv("MIXMI_ISA")) {
    if (auto isa = parse_isa(env); isa && supported(*isa)) return *isa;
  }
  return best_isa();
}

PairKernel PairKernel::student_t(double df, std::size_t dim, double h) {
  PairKernel k{};
  k.inv_scale = 1.0 / (df * h * h);
  k.exponent = 0.5 * (df + static_cast<double>(dim));
  const double twice = 2.0 * k.exponent;
  k.whole_power = static_cast<int>(std::floor(k.exponent));
  k.half_power = std::abs(twice - std::round(twice)) == 0.0 &&
                 (static_cast<long long>(std::round(twice)) % 2 == 1);
  return k;
}

bool PairKernel::half_integer() const noexcept {
  return whole_power >= 1 &&
         static_cast<double>(whole_power) + (half_power ? 0.5 : 0.0) == exponent;
}

double PairKernel::operator()(double r2) const noexcept {
  const double q = 1.0 + r2 * inv_scale;
  if (!half_integer()) return std::pow(q, -exponent);
  const double t = 1.0 / q;
  double p = t;
  for (int i = 1; i < whole_power; ++i) p *= t;
  if (half_power) p *= std::sqrt(t);
  return p;
}

const TileKernels& tile_kernels(Isa isa, const PairKernel& profile) noexcept {
  if (!profile.half_integer() || !supported(isa)) return detail::scalar_kernels();
  const TileKernels* chosen = nullptr;
  if (isa == Isa::Avx512) chosen = detail::avx512_kernels();
  if (isa == Isa::Avx2) chosen = detail::avx2_kernels();
  return chosen ? *chosen : detail::scalar_kernels();
}

#if !defined(MIXMI_HAVE_X86_SIMD)
namespace detail {
const TileKernels* avx2_kernels() noexcept { return nullptr; }
const TileKernels* avx512_kernels() noexcept { return nullptr; }
}  // namespace detail
#endif

}  // namespace mixmi::simd
