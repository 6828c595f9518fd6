#pragma once

#include <functional>
#include <limits>

namespace mixmi {

/// How an infinite end of the integration range is mapped onto a finite one.
enum class TailMap {
  Rational,  ///< y = a + t/(1-t), y = t/(1-t^2): suited to polynomial tails
  Exp,       ///< y = a - log(1-t), y = log(t/(1-t)): suited to exponential tails
};

struct QuadratureSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
  TailMap tail_map = TailMap::Rational;

  bool operator==(const QuadratureSpec&) const = default;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [lo, hi]; either end
/// may be infinite, in which case the range is first compactified per
/// `spec.tail_map`. Integrand values that are not finite at a node are treated
/// as 0 (zero-density points of x log x style integrands).
/// Throws NonConvergence when `max_subdivisions` is exhausted.
QuadResult integrate(const Integrand& f, double lo, double hi, const QuadratureSpec& spec = {});

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace mixmi
