// Vector tile kernels, generic over a register traits type V. Included by one
// translation unit per instruction set, each compiled with its own flags.
//
// V provides: reg, width, loadu, storeu, set1, zero, add, sub, mul, fmadd,
// div, sqrt, and hsum (lane 0 first).

namespace {

template <class V>
inline typename V::reg profile(typename V::reg r2, typename V::reg inv, typename V::reg one,
                               int whole, bool half) noexcept {
  const auto t = V::div(one, V::fmadd(r2, inv, one));
  auto p = t;
  for (int i = 1; i < whole; ++i) p = V::mul(p, t);
  if (half) p = V::mul(p, V::sqrt(t));
  return p;
}

template <class V, std::size_t D>
inline typename V::reg vec_r2(Axes axes, const typename V::reg* centre, std::size_t c) noexcept {
  const std::size_t dim = D == 0 ? axes.dim : D;
  auto s = V::zero();
  for (std::size_t a = 0; a < dim; ++a) {
    const auto diff = V::sub(V::loadu(axes.axis[a] + c), centre[a]);
    s = V::fmadd(diff, diff, s);
  }
  return s;
}

template <std::size_t D>
inline double scalar_r2(Axes axes, std::size_t r, std::size_t c) noexcept {
  const std::size_t dim = D == 0 ? axes.dim : D;
  double s = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double diff = axes.axis[a][r] - axes.axis[a][c];
    s += diff * diff;
  }
  return s;
}

constexpr std::size_t kMaxDim = 16;

// Row r against columns [c0, c1): returns the row sum and adds each term
// into col[c - col_base].
template <class V, std::size_t D>
inline double row_pass(Axes axes, std::size_t r, std::size_t c0, std::size_t c1,
                       const PairKernel& k, double* col, std::size_t col_base) noexcept {
  typename V::reg centre[D == 0 ? kMaxDim : D];
  const std::size_t dim = D == 0 ? axes.dim : D;
  for (std::size_t a = 0; a < dim; ++a) centre[a] = V::set1(axes.axis[a][r]);
  const auto inv = V::set1(k.inv_scale);
  const auto one = V::set1(1.0);
  auto acc = V::zero();
  std::size_t c = c0;
  for (; c + V::width <= c1; c += V::width) {
    const auto p = profile<V>(vec_r2<V, D>(axes, centre, c), inv, one, k.whole_power, k.half_power);
    acc = V::add(acc, p);
    double* dst = col + (c - col_base);
    V::storeu(dst, V::add(V::loadu(dst), p));
  }
  double row = V::hsum(acc);
  for (; c < c1; ++c) {
    const double v = k(scalar_r2<D>(axes, r, c));
    row += v;
    col[c - col_base] += v;
  }
  return row;
}

template <class V, std::size_t D>
void off_diagonal(Axes axes, Range rows, Range cols, const PairKernel& k, double* row_out,
                  double* col_out) {
  for (std::size_t c = cols.begin; c < cols.end; ++c) col_out[c - cols.begin] = 0.0;
  for (std::size_t r = rows.begin; r < rows.end; ++r) {
    row_out[r - rows.begin] = row_pass<V, D>(axes, r, cols.begin, cols.end, k, col_out, cols.begin);
  }
}

template <class V, std::size_t D>
void diagonal(Axes axes, Range block, const PairKernel& k, double* out) {
  for (std::size_t i = 0; i < block.size(); ++i) out[i] = 0.0;
  for (std::size_t r = block.begin; r < block.end; ++r) {
    const double row = row_pass<V, D>(axes, r, r + 1, block.end, k, out, block.begin);
    out[r - block.begin] += row;
  }
}

template <class V>
void off_diagonal_any(Axes axes, Range rows, Range cols, const PairKernel& k, double* row_out,
                      double* col_out) {
  switch (axes.dim) {
    case 1:
      return off_diagonal<V, 1>(axes, rows, cols, k, row_out, col_out);
    case 2:
      return off_diagonal<V, 2>(axes, rows, cols, k, row_out, col_out);
    default:
      if (axes.dim > kMaxDim) {
        return detail::scalar_kernels().off_diagonal(axes, rows, cols, k, row_out, col_out);
      }
      return off_diagonal<V, 0>(axes, rows, cols, k, row_out, col_out);
  }
}

template <class V>
void diagonal_any(Axes axes, Range block, const PairKernel& k, double* out) {
  switch (axes.dim) {
    case 1:
      return diagonal<V, 1>(axes, block, k, out);
    case 2:
      return diagonal<V, 2>(axes, block, k, out);
    default:
      if (axes.dim > kMaxDim) return detail::scalar_kernels().diagonal(axes, block, k, out);
      return diagonal<V, 0>(axes, block, k, out);
  }
}

}  // namespace
