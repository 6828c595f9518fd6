#include "mixmi/distmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mixmi/errors.hpp"

namespace mixmi {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ContractViolation(what);
}

void require_dim(std::span<const double> y, std::size_t dim) {
  if (y.size() != dim) {
    throw ContractViolation("point has dimension " + std::to_string(y.size()) +
                            ", density expects " + std::to_string(dim));
  }
}

// log of Gamma((df+d)/2) / (Gamma(df/2) (df pi)^(d/2))
double t_log_norm(double df, std::size_t d) {
  const double dd = static_cast<double>(d);
  return std::lgamma(0.5 * (df + dd)) - std::lgamma(0.5 * df) -
         0.5 * dd * std::log(df * std::numbers::pi);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

MultivariateT::MultivariateT(double df, std::vector<double> loc, std::vector<double> shape)
    : df_(df), loc_(std::move(loc)), shape_(std::move(shape)) {
  const std::size_t d = loc_.size();
  require(df_ > 0.0 && std::isfinite(df_), "multivariate t: df must be positive");
  require(d >= 1, "multivariate t: location must have at least one component");
  require(shape_.size() == d * d, "multivariate t: shape must be d x d");
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < r; ++c) {
      const double a = shape_[r * d + c];
      const double b = shape_[c * d + r];
      require(std::abs(a - b) <= 1e-12 * (std::abs(a) + std::abs(b) + 1.0),
              "multivariate t: shape matrix must be symmetric");
    }
  }
  chol_.assign(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = shape_[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= chol_[j * d + k] * chol_[j * d + k];
    require(diag > 0.0, "multivariate t: shape matrix must be positive definite");
    const double ljj = std::sqrt(diag);
    chol_[j * d + j] = ljj;
    log_det_ += 2.0 * std::log(ljj);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = shape_[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= chol_[i * d + k] * chol_[j * d + k];
      chol_[i * d + j] = v / ljj;
    }
  }
}

double MultivariateT::mahalanobis_sq(std::span<const double> y) const {
  const std::size_t d = dim();
  // Forward substitution L z = y - loc; the result is |z|^2.
  double sum = 0.0;
  double z_small[4];
  std::vector<double> z_big;
  double* z = z_small;
  if (d > 4) {
    z_big.resize(d);
    z = z_big.data();
  }
  for (std::size_t i = 0; i < d; ++i) {
    double v = y[i] - loc_[i];
    for (std::size_t k = 0; k < i; ++k) v -= chol_[i * d + k] * z[k];
    z[i] = v / chol_[i * d + i];
    sum += z[i] * z[i];
  }
  return sum;
}

ContinuousDensity::ContinuousDensity(Params params) : params_(std::move(params)) {
  std::visit(overloaded{
                 [&](const StudentT& t) {
                   require(t.df > 0.0 && std::isfinite(t.df), "student t: df must be positive");
                   require(std::isfinite(t.loc), "student t: location must be finite");
                   require(t.scale > 0.0 && std::isfinite(t.scale),
                           "student t: scale must be positive");
                   dim_ = 1;
                   log_norm_ = t_log_norm(t.df, 1) - std::log(t.scale);
                 },
                 [&](const Pareto& p) {
                   require(p.x_m > 0.0 && std::isfinite(p.x_m), "pareto: x_m must be positive");
                   require(p.alpha > 0.0 && std::isfinite(p.alpha),
                           "pareto: alpha must be positive");
                   dim_ = 1;
                   log_norm_ = std::log(p.alpha) + p.alpha * std::log(p.x_m);
                 },
                 [&](const MultivariateT& t) {
                   dim_ = t.dim();
                   log_norm_ = t_log_norm(t.df(), dim_) - 0.5 * t.log_det_shape();
                 },
             },
             params_);
}

std::optional<double> ContinuousDensity::log_pdf(std::span<const double> y) const {
  require_dim(y, dim_);
  return std::visit(
      overloaded{
          [&](const StudentT& t) -> std::optional<double> {
            const double z = (y[0] - t.loc) / t.scale;
            return log_norm_ - 0.5 * (t.df + 1.0) * std::log1p(z * z / t.df);
          },
          [&](const Pareto& p) -> std::optional<double> {
            if (!(y[0] >= p.x_m)) return kNegSupport;
            return log_norm_ - (p.alpha + 1.0) * std::log(y[0]);
          },
          [&](const MultivariateT& t) -> std::optional<double> {
            const double q = t.mahalanobis_sq(y);
            return log_norm_ -
                   0.5 * (t.df() + static_cast<double>(dim_)) * std::log1p(q / t.df());
          },
      },
      params_);
}

double ContinuousDensity::pdf(std::span<const double> y) const {
  const auto lp = log_pdf(y);
  return lp ? std::exp(*lp) : 0.0;
}

void ContinuousDensity::draw(Xoshiro256& rng, std::span<double> out) const {
  require_dim(out, dim_);
  std::visit(overloaded{
                 [&](const StudentT& t) {
                   const double z = standard_normal(rng);
                   const double u = chi_squared(rng, t.df);
                   out[0] = t.loc + t.scale * z * std::sqrt(t.df / u);
                 },
                 [&](const Pareto& p) { out[0] = p.x_m * std::pow(rng.uniform(), -1.0 / p.alpha); },
                 [&](const MultivariateT& t) {
                   const std::size_t d = dim_;
                   double z_small[4];
                   std::vector<double> z_big;
                   double* z = z_small;
                   if (d > 4) {
                     z_big.resize(d);
                     z = z_big.data();
                   }
                   for (std::size_t i = 0; i < d; ++i) z[i] = standard_normal(rng);
                   const double w = std::sqrt(t.df() / chi_squared(rng, t.df()));
                   const auto& chol = t.cholesky();
                   for (std::size_t i = 0; i < d; ++i) {
                     double v = 0.0;
                     for (std::size_t k = 0; k <= i; ++k) v += chol[i * d + k] * z[k];
                     out[i] = t.loc()[i] + v * w;
                   }
                 },
             },
             params_);
}

double ContinuousDensity::tail_index() const noexcept {
  return std::visit(overloaded{
                        [](const StudentT& t) { return t.df + 1.0; },
                        [](const Pareto& p) { return p.alpha + 1.0; },
                        [&](const MultivariateT& t) { return t.df() + static_cast<double>(dim_); },
                    },
                    params_);
}

std::optional<double> ContinuousDensity::support_lower_bound() const noexcept {
  if (const auto* p = std::get_if<Pareto>(&params_)) return p->x_m;
  return std::nullopt;
}

MixedPairModel::MixedPairModel(std::vector<double> probs,
                               std::vector<ContinuousDensity> conditionals)
    : probs_(std::move(probs)), conditionals_(std::move(conditionals)) {
  require(!probs_.empty(), "model needs at least one class");
  require(probs_.size() == conditionals_.size(),
          "model needs one conditional density per class probability");
  double total = 0.0;
  for (double p : probs_) {
    require(p > 0.0 && p <= 1.0, "class probabilities must lie in (0, 1]");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "class probabilities must sum to 1");
  for (const auto& c : conditionals_) {
    require(c.dim() == conditionals_.front().dim(), "all conditionals must share one dimension");
  }
}

double MixedPairModel::marginal_pdf(std::span<const double> y) const {
  double f = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) f += probs_[i] * conditionals_[i].pdf(y);
  return f;
}

void Sample::validate(std::size_t num_classes) const {
  require(dim >= 1, "sample dimension must be at least 1");
  require(!labels.empty(), "sample must hold at least one pair");
  require(points.size() == labels.size() * dim, "sample labels and points disagree in length");
  for (int label : labels) {
    require(label >= 0 && static_cast<std::size_t>(label) < num_classes,
            "sample label outside {0..m}");
  }
}

Sample sample(const MixedPairModel& model, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample size must be at least 1");
  const std::size_t d = model.dim();
  const auto& probs = model.probs();
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) cumulative[i] = (acc += probs[i]);

  Sample out;
  out.dim = d;
  out.labels.resize(n);
  out.points.resize(n * d);
  Xoshiro256 rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform();
    std::size_t label = probs.size() - 1;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      if (u < cumulative[i]) {
        label = i;
        break;
      }
    }
    out.labels[k] = static_cast<int>(label);
    model.conditionals()[label].draw(rng, {out.points.data() + k * d, d});
  }
  return out;
}

}  // namespace mixmi
