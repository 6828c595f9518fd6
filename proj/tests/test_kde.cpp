#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mixmi/errors.hpp"
#include "mixmi/kde.hpp"
#include "mixmi/quadrature.hpp"

using namespace mixmi;

namespace {

Sample make_1d(std::vector<int> labels, std::vector<double> points) {
  Sample s;
  s.dim = 1;
  s.labels = std::move(labels);
  s.points = std::move(points);
  return s;
}

double k1(const KernelSpec& kernel, double u) { return kernel(std::span<const double>(&u, 1)); }

}  // namespace

TEST_CASE("t3 kernel values") {
  const auto kernel = KernelSpec::student_t(3, 1);
  CHECK(k1(kernel, 0.0) == doctest::Approx(2.0 / (std::numbers::pi * std::sqrt(3.0))).epsilon(1e-14));
  CHECK(kernel.exponent() == 2.0);
  CHECK(KernelSpec::student_t(3, 2).exponent() == 2.5);
  for (double u : {0.1, 1.0, 3.7, 50.0}) {
    CHECK(k1(kernel, u) == k1(kernel, -u));
    CHECK(kernel.radial(u * u) == doctest::Approx(k1(kernel, u)).epsilon(1e-15));
  }
  CHECK(k1(kernel, 1e6) > 0.0);
  const auto k2 = KernelSpec::student_t(3, 2);
  const double zero[2] = {0, 0};
  CHECK(k2(zero) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(KernelSpec::student_t(0, 1), ContractViolation);
  CHECK_THROWS_AS(k2(std::span<const double>(zero, 1)), ContractViolation);
}

TEST_CASE("kernel integrates to one") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto r = integrate([&](double u) { return k1(kernel, u); }, -kInf, kInf);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bandwidth rules") {
  CHECK(Bandwidth::fixed(0.3).resolve(10) == 0.3);
  CHECK(Bandwidth::power_rule(-0.2).resolve(100000) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(Bandwidth::power_rule(-0.2, 0.5).resolve(100000) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK_THROWS_AS(Bandwidth::fixed(0), ContractViolation);
  CHECK_THROWS_AS(Bandwidth::power_rule(0.1), ContractViolation);
}

TEST_CASE("leave-one-out estimates on two points") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto s = make_1d({0, 0}, {0.0, 1.0});
  const double y0 = 0.0;
  // Only the other point remains: K(-1) / h with h = 1.
  CHECK(loo_conditional(s, 0, 0, std::span<const double>(&y0, 1), kernel, 1.0) ==
        doctest::Approx(k1(kernel, 1.0)).epsilon(1e-15));
  CHECK(loo_marginal(s, 0, std::span<const double>(&y0, 1), kernel, 1.0) ==
        doctest::Approx(k1(kernel, 1.0)).epsilon(1e-15));
  CHECK(loo_marginal(s, 0, std::span<const double>(&y0, 1), kernel, 2.0) ==
        doctest::Approx(k1(kernel, 0.5) / 2.0).epsilon(1e-15));
  // Class 1 is absent: denominator N p_1 - 1 = -1.
  CHECK_THROWS_AS(loo_conditional(s, 1, 0, std::span<const double>(&y0, 1), kernel, 1.0), DegenerateClass);
  const auto one = make_1d({0}, {0.0});
  CHECK_THROWS_AS(loo_marginal(one, 0, std::span<const double>(&y0, 1), kernel, 1.0), ContractViolation);
}

TEST_CASE("leave-one-out marginal is the count-weighted mixture of the class estimates") {
  const auto kernel = KernelSpec::student_t(3, 1);
  Xoshiro256 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + static_cast<std::size_t>(rng.uniform() * 30);
    Sample s;
    s.dim = 1;
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const int label = k < 6 ? static_cast<int>(k % 3) : static_cast<int>(rng.uniform() * 3);
      s.labels.push_back(label);
      s.points.push_back(standard_normal(rng) * 2.0);
      ++counts[static_cast<std::size_t>(label)];
    }
    const double h = 0.2 + rng.uniform();
    for (std::size_t k = 0; k < n; ++k) {
      const auto y = s.point(k);
      double mix = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        const double denom = static_cast<double>(counts[c]) - 1.0;
        mix += denom * loo_conditional(s, c, k, y, kernel, h);
      }
      // Every class estimate divides by n_c - 1, so undoing that recovers the raw pair sum.
      double direct = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) direct += k1(kernel, (y[0] - s.points[j]) / h);
      }
      CHECK(mix * h == doctest::Approx(direct).epsilon(1e-12));
      CHECK(loo_marginal(s, k, y, kernel, h) * (static_cast<double>(n) - 1) * h ==
            doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("translation equivariance") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto s = make_1d({0, 1, 0, 1, 0}, {0.1, -0.4, 2.0, 0.9, -1.3});
  auto shifted = s;
  for (auto& p : shifted.points) p += 7.25;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double y = s.points[k];
    const double ys = shifted.points[k];
    CHECK(loo_marginal(s, k, std::span<const double>(&y, 1), kernel, 0.7) ==
          doctest::Approx(loo_marginal(shifted, k, std::span<const double>(&ys, 1), kernel, 0.7)).epsilon(1e-12));
    CHECK(loo_conditional(s, 1, k, std::span<const double>(&y, 1), kernel, 0.7) ==
          doctest::Approx(loo_conditional(shifted, 1, k, std::span<const double>(&ys, 1), kernel, 0.7))
              .epsilon(1e-12));
  }
}

TEST_CASE("leave-one-out marginal integrates to one over y") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto s = make_1d({0, 1, 0, 1, 0, 1, 1, 0, 0, 1}, {0.1, -0.4, 2.0, 0.9, -1.3, 3.3, 0.0, 0.5, -2.2, 1.1});
  const auto r = integrate(
      [&](double y) { return loo_marginal(s, 3, std::span<const double>(&y, 1), kernel, 0.4); }, -kInf, kInf);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("wide bandwidth flattens the estimate to K(0)/h^d") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto s = make_1d({0, 1, 0}, {0.1, -0.4, 2.0});
  const double y = 0.1;
  const double h = 1e6;
  CHECK(loo_marginal(s, 0, std::span<const double>(&y, 1), kernel, h) * h ==
        doctest::Approx(k1(kernel, 0.0)).epsilon(1e-9));
}

TEST_CASE("engine matches the direct leave-one-out sums") {
  const auto kernel = KernelSpec::student_t(3, 2);
  Xoshiro256 rng(5);
  Sample s;
  s.dim = 2;
  const std::vector<std::size_t> counts = {37, 61};
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k) {
      s.labels.push_back(static_cast<int>(c));
      s.points.push_back(standard_normal(rng));
      s.points.push_back(standard_normal(rng) + static_cast<double>(c));
    }
  }
  const double h = 0.6;
  for (const std::size_t block : {std::size_t{8}, std::size_t{13}, std::size_t{1024}}) {
    const auto d = loo_densities_grouped(s, counts, kernel, h, {.workers = 3, .isa = simd::Isa::Scalar, .block = block});
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto cls = static_cast<std::size_t>(s.labels[k]);
      CHECK(d.marginal[k] == doctest::Approx(loo_marginal(s, k, s.point(k), kernel, h)).epsilon(1e-12));
      CHECK(d.conditional[k] == doctest::Approx(loo_conditional(s, cls, k, s.point(k), kernel, h)).epsilon(1e-12));
    }
  }
}
