// Scalar reference tile kernels. The vector variants are checked against
// these.

#include "mixmi/simd/pair_sums.hpp"

namespace mixmi::simd {

namespace {

template <std::size_t D>
inline double squared_distance(Axes axes, std::size_t r, std::size_t c) noexcept {
  const std::size_t dim = D == 0 ? axes.dim : D;
  double s = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double diff = axes.axis[a][r] - axes.axis[a][c];
    s += diff * diff;
  }
  return s;
}

template <std::size_t D>
void off_diagonal(Axes axes, Range rows, Range cols, const PairKernel& k, double* row_out,
                  double* col_out) {
  for (std::size_t c = cols.begin; c < cols.end; ++c) col_out[c - cols.begin] = 0.0;
  for (std::size_t r = rows.begin; r < rows.end; ++r) {
    double row = 0.0;
    for (std::size_t c = cols.begin; c < cols.end; ++c) {
      const double v = k(squared_distance<D>(axes, r, c));
      row += v;
      col_out[c - cols.begin] += v;
    }
    row_out[r - rows.begin] = row;
  }
}

template <std::size_t D>
void diagonal(Axes axes, Range block, const PairKernel& k, double* out) {
  for (std::size_t i = 0; i < block.size(); ++i) out[i] = 0.0;
  for (std::size_t r = block.begin; r < block.end; ++r) {
    double row = 0.0;
    for (std::size_t c = r + 1; c < block.end; ++c) {
      const double v = k(squared_distance<D>(axes, r, c));
      row += v;
      out[c - block.begin] += v;
    }
    out[r - block.begin] += row;
  }
}

void off_diagonal_any(Axes axes, Range rows, Range cols, const PairKernel& k, double* row_out,
                      double* col_out) {
  switch (axes.dim) {
    case 1:
      return off_diagonal<1>(axes, rows, cols, k, row_out, col_out);
    case 2:
      return off_diagonal<2>(axes, rows, cols, k, row_out, col_out);
    default:
      return off_diagonal<0>(axes, rows, cols, k, row_out, col_out);
  }
}

void diagonal_any(Axes axes, Range block, const PairKernel& k, double* out) {
  switch (axes.dim) {
    case 1:
      return diagonal<1>(axes, block, k, out);
    case 2:
      return diagonal<2>(axes, block, k, out);
    default:
      return diagonal<0>(axes, block, k, out);
  }
}

constexpr TileKernels kScalar{&off_diagonal_any, &diagonal_any};

}  // namespace

const TileKernels& detail::scalar_kernels() noexcept { return kScalar; }

}  // namespace mixmi::simd
