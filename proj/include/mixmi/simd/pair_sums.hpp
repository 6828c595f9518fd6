#pragma once

// Tile kernels for the leave-one-out pair sums. Every instruction-set variant
// computes the same sums; they differ only in summation order within a row,
// so results agree to rounding but not bit for bit across variants.

#include <cstddef>
#include <optional>
#include <string_view>

namespace mixmi::simd {

enum class Isa { Scalar, Avx2, Avx512 };

std::string_view name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view text) noexcept;
bool supported(Isa isa) noexcept;
Isa best_isa() noexcept;
/// best_isa(), unless MIXMI_ISA names a supported variant.
Isa active_isa() noexcept;

/// Kernel profile (1 + r2 * inv_scale)^-exponent, without normalisation.
struct PairKernel {
  double inv_scale;
  double exponent;
  int whole_power;
  bool half_power;

  /// Profile for a Student t kernel with `df` in `dim` dimensions at bandwidth h.
  static PairKernel student_t(double df, std::size_t dim, double h);

  /// Vector variants need exponent = whole_power + half_power/2.
  bool half_integer() const noexcept;
  double operator()(double r2) const noexcept;
};

/// Structure-of-arrays view: axis[a][i] is coordinate a of point i.
struct Axes {
  const double* const* axis;
  std::size_t dim;
};

struct Range {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
};

/// rows x cols tile with disjoint ranges.
/// row_out[r - rows.begin] = sum over c of K(r, c)
/// col_out[c - cols.begin] = sum over r of K(r, c), accumulated in increasing r.
/// Both outputs are overwritten.
using OffDiagonalFn = void (*)(Axes, Range rows, Range cols, const PairKernel&, double* row_out,
                               double* col_out);

/// Square block: out[r - block.begin] = sum over c != r of K(r, c). Overwrites out.
using DiagonalFn = void (*)(Axes, Range block, const PairKernel&, double* out);

struct TileKernels {
  OffDiagonalFn off_diagonal;
  DiagonalFn diagonal;
};

/// Kernels for `isa`. Falls back to the scalar reference when `isa` is not
/// supported by the CPU or the profile is not half-integer.
const TileKernels& tile_kernels(Isa isa, const PairKernel& profile) noexcept;

namespace detail {
const TileKernels& scalar_kernels() noexcept;
const TileKernels* avx2_kernels() noexcept;
const TileKernels* avx512_kernels() noexcept;
}  // namespace detail

}  // namespace mixmi::simd
