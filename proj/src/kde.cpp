#include "mixmi/kde.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixmi/errors.hpp"
#include "mixmi/parallel.hpp"

namespace mixmi {

DegenerateClass::DegenerateClass(std::size_t class_index, std::size_t class_count,
                                 std::optional<std::size_t> replicate)
    : std::runtime_error(
          (replicate ? "replicate " + std::to_string(*replicate) + ": " : std::string()) +
          "class " + std::to_string(class_index) + " has " + std::to_string(class_count) +
          " member(s); its leave-one-out density needs at least 2"),
      class_index_(class_index),
      class_count_(class_count),
      replicate_(replicate) {}

KernelSpec::KernelSpec(double df, std::size_t dim) : df_(df), dim_(dim) {
  const double d = static_cast<double>(dim);
  log_norm_ = std::lgamma(0.5 * (df + d)) - std::lgamma(0.5 * df) -
              0.5 * d * std::log(df * std::numbers::pi);
  norm_ = std::exp(log_norm_);
}

KernelSpec KernelSpec::student_t(double df, std::size_t dim) {
  if (!(df > 0.0) || !std::isfinite(df)) throw ContractViolation("kernel df must be positive");
  if (dim < 1) throw ContractViolation("kernel dimension must be at least 1");
  return KernelSpec(df, dim);
}

double KernelSpec::radial(double r2) const {
  return std::exp(log_norm_ - exponent() * std::log1p(r2 / df_));
}

double KernelSpec::operator()(std::span<const double> u) const {
  if (u.size() != dim_) throw ContractViolation("kernel argument has the wrong dimension");
  double r2 = 0.0;
  for (double x : u) r2 += x * x;
  return radial(r2);
}

Bandwidth Bandwidth::fixed(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ContractViolation("bandwidth must be positive");
  return Bandwidth(Explicit{h});
}

Bandwidth Bandwidth::power_rule(double exponent, double scale) {
  if (!(exponent < 0.0)) throw ContractViolation("bandwidth power rule needs a negative exponent");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ContractViolation("bandwidth scale must be positive");
  }
  return Bandwidth(PowerRule{exponent, scale});
}

double Bandwidth::resolve(std::size_t n) const {
  if (const auto* e = std::get_if<Explicit>(&rule_)) return e->h;
  const auto& p = std::get<PowerRule>(rule_);
  return p.scale * std::pow(static_cast<double>(n), p.exponent);
}

namespace {

void check_query(const Sample& sample, std::size_t k, std::span<const double> y,
                 const KernelSpec& kernel, double h) {
  if (sample.labels.empty()) throw ContractViolation("sample is empty");
  if (k >= sample.size()) throw ContractViolation("leave-out index out of range");
  if (y.size() != sample.dim) throw ContractViolation("query point has the wrong dimension");
  if (kernel.dim() != sample.dim) throw ContractViolation("kernel and sample dimensions differ");
  if (!(h > 0.0)) throw ContractViolation("bandwidth must be positive");
}

// sum_{j != k, j in class (or all when cls < 0)} K((y - Y_j)/h), without the h^-d factor.
double kernel_sum(const Sample& sample, long cls, std::size_t k, std::span<const double> y,
                  const KernelSpec& kernel, double h) {
  const double inv_h2 = 1.0 / (h * h);
  double s = 0.0;
  for (std::size_t j = 0; j < sample.size(); ++j) {
    if (j == k) continue;
    if (cls >= 0 && sample.labels[j] != cls) continue;
    const auto p = sample.point(j);
    double r2 = 0.0;
    for (std::size_t a = 0; a < sample.dim; ++a) {
      const double diff = y[a] - p[a];
      r2 += diff * diff;
    }
    s += kernel.radial(r2 * inv_h2);
  }
  return s;
}

}  // namespace

double loo_conditional(const Sample& sample, std::size_t cls, std::size_t k,
                       std::span<const double> y, const KernelSpec& kernel, double h) {
  check_query(sample, k, y, kernel, h);
  std::size_t count = 0;
  for (int label : sample.labels) count += static_cast<std::size_t>(label) == cls;
  if (count < 2) throw DegenerateClass(cls, count);
  const double scale = std::pow(h, static_cast<double>(sample.dim)) * static_cast<double>(count - 1);
  return kernel_sum(sample, static_cast<long>(cls), k, y, kernel, h) / scale;
}

double loo_marginal(const Sample& sample, std::size_t k, std::span<const double> y,
                    const KernelSpec& kernel, double h) {
  check_query(sample, k, y, kernel, h);
  if (sample.size() < 2) throw ContractViolation("leave-one-out marginal needs N >= 2");
  const double scale =
      std::pow(h, static_cast<double>(sample.dim)) * static_cast<double>(sample.size() - 1);
  return kernel_sum(sample, -1, k, y, kernel, h) / scale;
}

LooDensities loo_densities_grouped(const Sample& grouped,
                                   std::span<const std::size_t> class_counts,
                                   const KernelSpec& kernel, double h,
                                   const PairSumOptions& options) {
  const std::size_t n = grouped.size();
  const std::size_t dim = grouped.dim;
  if (n < 2) throw ContractViolation("leave-one-out densities need N >= 2");
  if (kernel.dim() != dim) throw ContractViolation("kernel and sample dimensions differ");
  if (!(h > 0.0)) throw ContractViolation("bandwidth must be positive");
  if (options.block == 0) throw ContractViolation("tile block size must be positive");

  // Blocks never straddle a class boundary so a class sum is a contiguous run
  // of block partials.
  struct Block {
    simd::Range rows;
    std::size_t cls;
  };
  std::vector<Block> blocks;
  std::vector<std::size_t> class_first_block(class_counts.size() + 1, 0);
  {
    std::size_t start = 0;
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
      class_first_block[c] = blocks.size();
      const std::size_t end = start + class_counts[c];
      for (std::size_t b = start; b < end; b += options.block) {
        blocks.push_back({{b, std::min(end, b + options.block)}, c});
      }
      start = end;
    }
    class_first_block[class_counts.size()] = blocks.size();
    if (start != n) throw ContractViolation("class counts do not add up to the sample size");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (grouped.labels[k] < grouped.labels[k - 1]) {
      throw ContractViolation("sample is not grouped by label");
    }
  }
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 1) throw DegenerateClass(c, 1);
  }

  std::vector<std::vector<double>> soa(dim, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < dim; ++a) soa[a][k] = grouped.points[k * dim + a];
  }
  std::vector<const double*> axis_ptrs(dim);
  for (std::size_t a = 0; a < dim; ++a) axis_ptrs[a] = soa[a].data();
  const simd::Axes axes{axis_ptrs.data(), dim};

  const auto profile = simd::PairKernel::student_t(kernel.df(), dim, h);
  const auto& tiles = simd::tile_kernels(options.isa, profile);

  const std::size_t nb = blocks.size();
  std::vector<double> partial(n * nb, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  tasks.reserve(nb * (nb + 1) / 2);
  for (std::size_t bi = 0; bi < nb; ++bi) {
    for (std::size_t bj = bi; bj < nb; ++bj) tasks.emplace_back(bi, bj);
  }

  parallel_for(tasks.size(), options.workers, [&](std::size_t t) {
    const auto [bi, bj] = tasks[t];
    const auto rows = blocks[bi].rows;
    if (bi == bj) {
      std::vector<double> out(rows.size());
      tiles.diagonal(axes, rows, profile, out.data());
      for (std::size_t r = 0; r < rows.size(); ++r) partial[(rows.begin + r) * nb + bi] = out[r];
      return;
    }
    const auto cols = blocks[bj].rows;
    std::vector<double> row_out(rows.size());
    std::vector<double> col_out(cols.size());
    tiles.off_diagonal(axes, rows, cols, profile, row_out.data(), col_out.data());
    for (std::size_t r = 0; r < rows.size(); ++r) partial[(rows.begin + r) * nb + bj] = row_out[r];
    for (std::size_t c = 0; c < cols.size(); ++c) partial[(cols.begin + c) * nb + bi] = col_out[c];
  });

  const double h_d = std::pow(h, static_cast<double>(dim));
  const double norm = kernel.norm() / h_d;
  LooDensities out;
  out.marginal.resize(n);
  out.conditional.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t cls = static_cast<std::size_t>(grouped.labels[k]);
    const std::span<const double> row(partial.data() + k * nb, nb);
    out.marginal[k] = norm * pairwise_sum(row) / static_cast<double>(n - 1);
    const std::size_t count = class_counts[cls];
    const std::size_t first = class_first_block[cls];
    const std::size_t last = class_first_block[cls + 1];
    out.conditional[k] =
        norm * pairwise_sum(row.subspan(first, last - first)) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace mixmi
