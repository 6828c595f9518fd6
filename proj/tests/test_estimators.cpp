#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "mixmi/errors.hpp"
#include "mixmi/estimators.hpp"
#include "mixmi/oracle.hpp"

using namespace mixmi;

namespace {

MixedPairModel shift_model() {
  return MixedPairModel({0.3, 0.7}, {ContinuousDensity::student_t(3, 0, 1), ContinuousDensity::student_t(3, 2, 1)});
}

Sample make_1d(std::vector<int> labels, std::vector<double> points) {
  Sample s;
  s.labels = std::move(labels);
  s.points = std::move(points);
  return s;
}

}  // namespace

TEST_CASE("p_hat examples") {
  const auto p = p_hat(make_1d({0, 0, 1, 1, 1}, {0, 0, 0, 0, 0}), 1);
  CHECK(p == std::vector<double>{0.4, 0.6});
  const auto q = p_hat(make_1d({0, 0, 0}, {1, 2, 3}), 2);
  CHECK(q == std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(p_hat(Sample{}, 1), ContractViolation);
}

TEST_CASE("combine examples") {
  CHECK(combine(0.5, std::vector<double>{0.2, 0.3}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(combine(1.0, std::vector<double>{}) == 1.0);
  CHECK(combine(0.202, std::vector<double>{0.001, 0.0005}) == doctest::Approx(0.2005).epsilon(1e-14));
}

TEST_CASE("known-density estimator examples") {
  // Pareto(1, 1) has density 1 at y = 1, so log f_0 = 0.
  const MixedPairModel unit({1.0}, {ContinuousDensity::pareto(1, 1)});
  const auto r = bar_estimate(make_1d({0}, {1.0}), unit);
  CHECK(r.class_terms[0] == 0.0);
  CHECK(r.zero_density_hits == 0);

  const auto model = shift_model();
  const auto s = make_1d({0, 1}, {0.4, 1.9});
  const auto two = bar_estimate(s, model);
  const double y1 = 0.4;
  const double y2 = 1.9;
  const double h = -(std::log(model.marginal_pdf(std::span<const double>(&y1, 1))) +
                     std::log(model.marginal_pdf(std::span<const double>(&y2, 1)))) / 2.0;
  CHECK(two.h_hat == doctest::Approx(h).epsilon(1e-15));
  CHECK(two.mi_hat == combine(two.h_hat, two.class_terms));
}

TEST_CASE("known-density estimator applies log 0 = 0 and counts the hits") {
  const MixedPairModel model({0.5, 0.5}, {ContinuousDensity::pareto(1, 2), ContinuousDensity::pareto(1, 3)});
  const auto r = bar_estimate(make_1d({0, 1}, {0.5, 2.0}), model);
  CHECK(r.zero_density_hits == 2);
  CHECK(std::isfinite(r.mi_hat));
}

TEST_CASE("known-density estimator vanishes under independence") {
  const auto t3 = ContinuousDensity::student_t(3, 0, 1);
  const MixedPairModel model({0.3, 0.7}, {t3, t3});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = sample(model, 2000, seed);
    // 0.3 f + 0.7 f equals f only up to rounding.
    CHECK(std::abs(bar_estimate(s, model).mi_hat) < 1e-13);
  }
}

TEST_CASE("kernel estimator rejects single-member classes") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto bw = Bandwidth::fixed(0.5);
  try {
    hat_estimate(make_1d({0, 0, 1}, {0.1, 0.2, 0.3}), kernel, bw);
    FAIL("expected DegenerateClass");
  } catch (const DegenerateClass& e) {
    CHECK(e.class_index() == 1);
    CHECK(e.class_count() == 1);
  }
  CHECK_THROWS_AS(hat_estimate(make_1d({0}, {0.1}), kernel, bw), ContractViolation);
}

TEST_CASE("kernel estimator matches the direct leave-one-out sums") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto s = sample(shift_model(), 300, 8);
  const double h = 0.4;
  const auto r = hat_estimate(s, kernel, Bandwidth::fixed(h), {.workers = 2});
  const auto n = static_cast<double>(s.size());
  double hy = 0.0;
  std::vector<double> terms(2, 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto cls = static_cast<std::size_t>(s.labels[k]);
    hy -= std::log(loo_marginal(s, k, s.point(k), kernel, h)) / n;
    terms[cls] -= std::log(loo_conditional(s, cls, k, s.point(k), kernel, h)) / n;
  }
  CHECK(r.h_hat == doctest::Approx(hy).epsilon(1e-12));
  CHECK(r.class_terms[0] == doctest::Approx(terms[0]).epsilon(1e-12));
  CHECK(r.class_terms[1] == doctest::Approx(terms[1]).epsilon(1e-12));
  CHECK(r.mi_hat == combine(r.h_hat, r.class_terms));
  CHECK(r.bandwidth_used == h);
}

TEST_CASE("kernel estimator is permutation invariant and worker independent") {
  const auto kernel = KernelSpec::student_t(3, 1);
  const auto bw = Bandwidth::power_rule(-0.2);
  const auto s = sample(shift_model(), 5000, 21);
  const auto base = hat_estimate(s, kernel, bw, {.workers = 1});

  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  Sample shuffled;
  for (std::size_t k : perm) {
    shuffled.labels.push_back(s.labels[k]);
    shuffled.points.push_back(s.points[k]);
  }
  const auto permuted = hat_estimate(shuffled, kernel, bw, {.workers = 1});
  CHECK(permuted.mi_hat == base.mi_hat);
  CHECK(permuted.h_hat == base.h_hat);
  CHECK(permuted.class_terms == base.class_terms);

  const auto parallel = hat_estimate(s, kernel, bw, {.workers = 4});
  CHECK(parallel.mi_hat == base.mi_hat);
  CHECK(parallel.class_terms == base.class_terms);
}

TEST_CASE("kernel estimator variants agree to rounding") {
  const auto kernel = KernelSpec::student_t(3, 2);
  const MixedPairModel model({0.3, 0.7}, {ContinuousDensity::multivariate_t(5, {0, 0}, {1, 0, 0, 1}),
                                          ContinuousDensity::multivariate_t(5, {0, 0}, {9, 0, 0, 9})});
  const auto s = sample(model, 3000, 9);
  const auto ref = hat_estimate(s, kernel, Bandwidth::power_rule(-0.2), {.isa = simd::Isa::Scalar});
  for (auto isa : {simd::Isa::Avx2, simd::Isa::Avx512}) {
    const auto r = hat_estimate(s, kernel, Bandwidth::power_rule(-0.2), {.isa = isa});
    CHECK(r.mi_hat == doctest::Approx(ref.mi_hat).epsilon(1e-12));
  }
}

TEST_CASE("known-density estimator is centred on the true MI") {
  const auto model = shift_model();
  const auto truth = mutual_information(model);
  const std::size_t n = 10000;
  const std::size_t m = 200;
  double sum = 0.0;
  for (std::size_t r = 0; r < m; ++r) sum += bar_estimate(sample(model, n, stream_seed(77, r)), model).mi_hat;
  const double bound = 4.0 * std::sqrt(truth.var_clt / static_cast<double>(n)) / std::sqrt(static_cast<double>(m));
  CHECK(std::abs(sum / static_cast<double>(m) - truth.mi) <= bound);
}

TEST_CASE("kernel and known-density estimators agree on one large sample") {
  const auto model = shift_model();
  const auto s = sample(model, 50000, 31);
  const auto hat = hat_estimate(s, KernelSpec::student_t(3, 1), Bandwidth::power_rule(-0.2),
                                {.workers = 0});
  const auto bar = bar_estimate(s, model);
  CHECK(std::abs(hat.mi_hat - bar.mi_hat) <= 0.01);
}
