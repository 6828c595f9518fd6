#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixmi/distmodel.hpp"
#include "mixmi/quadrature.hpp"

namespace mixmi {

/// How integrals over R^2 (and higher) are computed.
enum class MultiDimMethod {
  Auto,      ///< radial when eligible, iterated otherwise
  Radial,    ///< all conditionals elliptical about one centre with proportional shapes
  Iterated,  ///< nested adaptive 1D, d == 2 only
};

/// Integrates functions of y over R^d for a given set of densities, choosing
/// break points (Pareto lower bounds) in 1D and a radial reduction in higher
/// dimensions when every density is a multivariate t about the same centre
/// with proportional shape matrices.
class DomainIntegrator {
 public:
  using Function = std::function<double(std::span<const double>)>;

  DomainIntegrator(std::span<const ContinuousDensity> densities, QuadratureSpec spec,
                   MultiDimMethod method = MultiDimMethod::Auto);

  std::size_t dim() const noexcept { return dim_; }
  bool radial() const noexcept { return radial_; }

  QuadResult integrate(const Function& f) const;
  /// Integral over the ball (1D: interval, iterated 2D: box) of `radius`
  /// about the centre. Radial radii are measured in whitened coordinates.
  QuadResult integrate_within(const Function& f, double radius) const;

 private:
  QuadResult integrate_1d(const Function& f, double lo, double hi) const;
  QuadResult integrate_radial(const Function& f, double radius) const;
  QuadResult integrate_iterated(const Function& f, double radius) const;

  std::size_t dim_;
  QuadratureSpec spec_;
  bool radial_ = false;
  std::vector<double> breaks_;
  std::vector<double> centre_;
  std::vector<double> direction_;  // first column of the common Cholesky factor
  double radial_jacobian_ = 1.0;   // sqrt(det S) * surface area of the unit sphere
};

struct OracleErrors {
  double mi = 0.0;
  double mi_kl = 0.0;
  double mi_3h = 0.0;
  double h_y = 0.0;
  std::vector<double> h_cond;
  double h_z = 0.0;
  double var_clt = 0.0;
  double var_clt_direct = 0.0;
};

/// Ground truth for a mixed-pair model by quadrature.
struct OracleResult {
  double mi = 0.0;                ///< H(Y) - sum_i p_i H(Y | X = i)
  double mi_kl = 0.0;             ///< sum_i p_i KL(f_i || f)
  double mi_3h = 0.0;             ///< H(X) + H(Y) - H(Z)
  double h_y = 0.0;
  std::vector<double> h_cond;     ///< H(Y | X = i)
  double h_x = 0.0;
  double h_z = 0.0;
  double var_clt = 0.0;           ///< a' Sigma a, term by term
  double var_clt_direct = 0.0;    ///< sum_i p_i E_i[log(f/f_i)^2] - MI^2
  bool radial = false;            ///< radial reduction was used
  OracleErrors quad_error;
};

/// Differential entropy -int f log f.
QuadResult entropy(const ContinuousDensity& density, const QuadratureSpec& spec = {},
                   MultiDimMethod method = MultiDimMethod::Auto);
/// Entropy of the marginal of Y.
QuadResult entropy(const MixedPairModel& model, const QuadratureSpec& spec = {},
                   MultiDimMethod method = MultiDimMethod::Auto);

/// H(Z) = -sum_i int p_i f_i log(p_i f_i), integrated directly.
QuadResult mixed_entropy(const MixedPairModel& model, const QuadratureSpec& spec = {},
                         MultiDimMethod method = MultiDimMethod::Auto);

OracleResult mutual_information(const MixedPairModel& model, const QuadratureSpec& spec = {},
                                MultiDimMethod method = MultiDimMethod::Auto);

/// Asymptotic variance a' Sigma a assembled from the moment terms
///   var(log f) + sum p_i E_i[(log f_i)^2] - sum p_i^2 (E_i log f_i)^2
///   - 2 sum p_i (E_i[log f_i log f] - E_i[log f_i] E[log f])
///   - 2 sum_{i<j} p_i p_j E_i[log f_i] E_j[log f_j].
/// Throws NegativeVariance when the value is below -10 * error.
QuadResult clt_variance(const MixedPairModel& model, const QuadratureSpec& spec = {},
                        MultiDimMethod method = MultiDimMethod::Auto);

/// The same variance as var(log f(Y) - sum_i 1(X=i) log f_i(Y)).
QuadResult clt_variance_direct(const MixedPairModel& model, const QuadratureSpec& spec = {},
                               MultiDimMethod method = MultiDimMethod::Auto);

struct GoodPairCheck {
  bool good = false;
  std::optional<std::size_t> offending_class;
  /// partials[i][r]: int |g_i log g_i| over the r-th expanding domain.
  std::vector<std::vector<double>> partials;
  std::vector<double> totals;
  std::string diagnostic;
};

/// Numerically checks that sum_i int |g_i log g_i| < inf, g_i = p_i f_i:
/// the integrals over expanding domains must settle on the full integral.
GoodPairCheck check_good_pair(const MixedPairModel& model, const QuadratureSpec& spec = {});

}  // namespace mixmi
