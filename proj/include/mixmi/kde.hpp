#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "mixmi/distmodel.hpp"
#include "mixmi/simd/pair_sums.hpp"

namespace mixmi {

/// Student t kernel: the pdf of t(df, 0, 1) for dim 1 and of t_df(0, I) for
/// dim >= 2. Polynomial tails of order |u|^-(df + dim).
class KernelSpec {
 public:
  static KernelSpec student_t(double df, std::size_t dim);

  double df() const noexcept { return df_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Exponent e in K(u) = c (1 + |u|^2/df)^-e, e = (df + dim)/2.
  double exponent() const noexcept { return 0.5 * (df_ + static_cast<double>(dim_)); }
  double log_norm() const noexcept { return log_norm_; }
  double norm() const noexcept { return norm_; }

  double operator()(std::span<const double> u) const;
  /// K evaluated at any u with |u|^2 == r2.
  double radial(double r2) const;

  bool operator==(const KernelSpec& o) const noexcept { return df_ == o.df_ && dim_ == o.dim_; }

 private:
  KernelSpec(double df, std::size_t dim);

  double df_;
  std::size_t dim_;
  double log_norm_;
  double norm_;
};

inline double kernel_eval(const KernelSpec& kernel, std::span<const double> u) { return kernel(u); }

class Bandwidth {
 public:
  struct Explicit {
    double h;
    bool operator==(const Explicit&) const = default;
  };
  /// h = scale * N^exponent.
  struct PowerRule {
    double exponent;
    double scale;
    bool operator==(const PowerRule&) const = default;
  };
  using Rule = std::variant<Explicit, PowerRule>;

  static Bandwidth fixed(double h);
  static Bandwidth power_rule(double exponent, double scale = 1.0);

  const Rule& rule() const noexcept { return rule_; }
  double resolve(std::size_t n) const;

  bool operator==(const Bandwidth&) const = default;

 private:
  explicit Bandwidth(Rule rule) : rule_(rule) {}
  Rule rule_;
};

// Indices k below are 0-based positions in the sample.

/// Leave-one-out estimate of f_i at y excluding pair k:
///   { (N p_i - 1) h^d }^-1 sum_{j != k} 1(X_j = i) K((y - Y_j)/h).
/// N p_i - 1 is the class count minus one whatever the label of k.
/// Throws DegenerateClass when that denominator is not positive.
double loo_conditional(const Sample& sample, std::size_t cls, std::size_t k,
                       std::span<const double> y, const KernelSpec& kernel, double h);

/// Leave-one-out marginal estimate { (N - 1) h^d }^-1 sum_{j != k} K((y - Y_j)/h).
double loo_marginal(const Sample& sample, std::size_t k, std::span<const double> y,
                    const KernelSpec& kernel, double h);

/// Leave-one-out densities at every sample point: marginal[k] = f_k(Y_k) and
/// conditional[k] = f_{X_k,k}(Y_k).
struct LooDensities {
  std::vector<double> marginal;
  std::vector<double> conditional;
};

struct PairSumOptions {
  std::size_t workers = 1;
  simd::Isa isa = simd::active_isa();
  /// Rows per tile. Results depend on it (reduction order) but never on workers.
  std::size_t block = 1024;
};

/// Evaluates all leave-one-out densities at the sample points with the
/// symmetric tiled pair-sum engine. The sample must be grouped by label
/// (labels non-decreasing); `class_counts[i]` is the size of class i.
LooDensities loo_densities_grouped(const Sample& grouped, std::span<const std::size_t> class_counts,
                                   const KernelSpec& kernel, double h,
                                   const PairSumOptions& options = {});

}  // namespace mixmi
