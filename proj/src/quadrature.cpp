#include "mixmi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "mixmi/errors.hpp"

namespace mixmi {

namespace {

// 21-point Kronrod abscissae (positive half, descending) and weights; the
// odd-indexed abscissae are the 10-point Gauss nodes.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208969184823, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

double safe(const Integrand& f, double x) {
  const double v = f(x);
  return std::isfinite(v) ? v : 0.0;
}

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = safe(f, centre);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  double fv1[10];
  double fv2[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = safe(f, centre - dx);
    fv2[j] = safe(f, centre + dx);
    const double pair = fv1[j] + fv2[j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double value = kronrod * half;
  const double abs_h = std::abs(half);
  asc *= abs_h;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  const double resabs = abs_sum * abs_h;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return {a, b, value, err};
}

QuadResult adaptive(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  const Segment first = gauss_kronrod(f, a, b);
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int subdivisions = 1;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw NonConvergence("quadrature did not reach tolerance within " +
                               std::to_string(spec.max_subdivisions) +
                               " subdivisions (estimated error " + std::to_string(error) + ")",
                           total, error);
    }
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // Intervals this narrow cannot be split further in double precision.
    if (!(mid > worst.a && mid < worst.b) ||
        std::abs(worst.b - worst.a) <= 4.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      throw NonConvergence("quadrature hit the resolution limit of double precision", total,
                           error);
    }
    heap.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift of the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err};
}

}  // namespace

QuadResult integrate(const Integrand& f, double lo, double hi, const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw ContractViolation("quadrature tolerances must be positive");
  }
  if (std::isnan(lo) || std::isnan(hi)) throw ContractViolation("quadrature bounds are NaN");
  if (lo == hi) return {0.0, 0.0};
  if (lo > hi) {
    const auto r = integrate(f, hi, lo, spec);
    return {-r.value, r.error};
  }
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  const bool rational = spec.tail_map == TailMap::Rational;

  if (!lo_inf && !hi_inf) return adaptive(f, lo, hi, spec);

  if (lo_inf && hi_inf) {
    if (rational) {
      // y = t / (1 - t^2), t in (-1, 1)
      return adaptive(
          [&](double t) {
            const double d = 1.0 - t * t;
            return f(t / d) * (1.0 + t * t) / (d * d);
          },
          -1.0, 1.0, spec);
    }
    // y = log(t / (1 - t)), t in (0, 1)
    return adaptive(
        [&](double t) { return f(std::log(t / (1.0 - t))) / (t * (1.0 - t)); }, 0.0, 1.0, spec);
  }

  // Half line; reflect [-inf, hi] onto [-hi, inf].
  const double sign = lo_inf ? -1.0 : 1.0;
  const double anchor = lo_inf ? hi : lo;
  if (rational) {
    // y = anchor + sign * t / (1 - t), t in [0, 1)
    return adaptive(
        [&](double t) {
          const double d = 1.0 - t;
          return f(anchor + sign * t / d) / (d * d);
        },
        0.0, 1.0, spec);
  }
  // y = anchor - sign * log(1 - t), t in [0, 1)
  return adaptive([&](double t) { return f(anchor - sign * std::log1p(-t)) / (1.0 - t); }, 0.0,
                  1.0, spec);
}

}  // namespace mixmi
