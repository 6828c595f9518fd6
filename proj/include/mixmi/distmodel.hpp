#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mixmi/rng.hpp"

namespace mixmi {

/// Location-scale Student t, t(df, loc, scale).
struct StudentT {
  double df;
  double loc;
  double scale;
};

/// Pareto with density alpha x_m^alpha y^-(alpha+1) on [x_m, inf).
struct Pareto {
  double x_m;
  double alpha;
};

/// d-variate t with df degrees of freedom, location `loc` and shape matrix
/// `shape` (row-major d x d, symmetric positive definite). The shape matrix is
/// not the covariance; the covariance is df/(df-2) * shape when df > 2.
class MultivariateT {
 public:
  MultivariateT(double df, std::vector<double> loc, std::vector<double> shape);

  double df() const noexcept { return df_; }
  std::size_t dim() const noexcept { return loc_.size(); }
  const std::vector<double>& loc() const noexcept { return loc_; }
  const std::vector<double>& shape() const noexcept { return shape_; }
  /// Lower Cholesky factor of the shape matrix, row-major.
  const std::vector<double>& cholesky() const noexcept { return chol_; }
  double log_det_shape() const noexcept { return log_det_; }

  /// (y - loc)^T shape^-1 (y - loc).
  double mahalanobis_sq(std::span<const double> y) const;

 private:
  double df_;
  std::vector<double> loc_;
  std::vector<double> shape_;
  std::vector<double> chol_;
  double log_det_ = 0.0;
};

/// Log density of a point outside the support: pdf(y) == 0.
inline constexpr std::nullopt_t kNegSupport = std::nullopt;

class ContinuousDensity {
 public:
  using Params = std::variant<StudentT, Pareto, MultivariateT>;

  explicit ContinuousDensity(Params params);

  static ContinuousDensity student_t(double df, double loc, double scale) {
    return ContinuousDensity(StudentT{df, loc, scale});
  }
  static ContinuousDensity pareto(double x_m, double alpha) {
    return ContinuousDensity(Pareto{x_m, alpha});
  }
  static ContinuousDensity multivariate_t(double df, std::vector<double> loc,
                                          std::vector<double> shape) {
    return ContinuousDensity(MultivariateT(df, std::move(loc), std::move(shape)));
  }

  const Params& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return dim_; }

  /// log pdf(y), or kNegSupport where the density is exactly zero.
  std::optional<double> log_pdf(std::span<const double> y) const;
  double pdf(std::span<const double> y) const;

  /// Draws one point into `out` (size dim()).
  void draw(Xoshiro256& rng, std::span<double> out) const;

  /// Exponent a of the polynomial tail decay |y|^-a of the density.
  double tail_index() const noexcept;

  /// Lower end of the support when bounded below (Pareto), else nullopt.
  std::optional<double> support_lower_bound() const noexcept;

 private:
  Params params_;
  std::size_t dim_;
  double log_norm_;
};

inline std::optional<double> log_pdf(const ContinuousDensity& density, std::span<const double> y) {
  return density.log_pdf(y);
}
inline double pdf(const ContinuousDensity& density, std::span<const double> y) {
  return density.pdf(y);
}

/// Discrete label X in {0..m} with probabilities `probs`, and Y | X=i ~ conditionals[i].
class MixedPairModel {
 public:
  MixedPairModel(std::vector<double> probs, std::vector<ContinuousDensity> conditionals);

  std::size_t dim() const noexcept { return conditionals_.front().dim(); }
  std::size_t num_classes() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<ContinuousDensity>& conditionals() const noexcept { return conditionals_; }

  /// f(y) = sum_i p_i f_i(y).
  double marginal_pdf(std::span<const double> y) const;

 private:
  std::vector<double> probs_;
  std::vector<ContinuousDensity> conditionals_;
};

inline double marginal_pdf(const MixedPairModel& model, std::span<const double> y) {
  return model.marginal_pdf(y);
}

/// N pairs (label, point). Points are stored row-major, `dim` values each.
struct Sample {
  std::size_t dim = 1;
  std::vector<int> labels;
  std::vector<double> points;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> point(std::size_t k) const noexcept {
    return {points.data() + k * dim, dim};
  }
  /// Throws ContractViolation unless sizes agree, N >= 1 and labels lie in [0, num_classes).
  void validate(std::size_t num_classes) const;

  bool operator==(const Sample&) const = default;
};

/// n i.i.d. draws; a deterministic function of (model, n, seed).
Sample sample(const MixedPairModel& model, std::size_t n, std::uint64_t seed);

}  // namespace mixmi
