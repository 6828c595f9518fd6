// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mixmi/errors.hpp"
#include "mixmi/estimators.hpp"
#include "mixmi/harness.hpp"
#include "mixmi/oracle.hpp"
#include "mixmi/repro.hpp"

using namespace mixmi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [miss] " << what << ";";
    } else {
      detail << " " << what << ";";
    }
  }
};

std::string fmt(double v, int digits = 8) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::size_t multi_workers() { return std::max<std::size_t>(4, std::thread::hardware_concurrency()); }

std::vector<ReproCase> cases_of_dim(std::size_t dim) {
  std::vector<ReproCase> out;
  for (auto& c : list_cases()) {
    if (c.config.model.dim() == dim) out.push_back(std::move(c));
  }
  return out;
}

ExperimentConfig shift_case() {
  for (auto& c : list_cases()) {
    if (c.id == "t3-t3shift2") return c.config;
  }
  throw std::logic_error("t3-t3shift2 missing");
}

// Published aSa for the shift case, used as the reference scale in criteria 4 and 5.
constexpr double kShiftMi = 0.20023;
constexpr double kShiftVar = 0.3092179;

Check oracle_mi(std::size_t dim, double budget_s) {
  Check c;
  const auto t0 = Clock::now();
  for (const auto& rc : cases_of_dim(dim)) {
    const auto r = mutual_information(rc.config.model);
    const double diff = std::abs(r.mi - *rc.expected.mi);
    c.expect(diff <= 5e-5, rc.id + " MI " + fmt(r.mi) + " vs " + fmt(*rc.expected.mi) + " |d|=" + fmt(diff, 3));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < budget_s, "time " + fmt(elapsed, 3) + " s < " + fmt(budget_s, 3) + " s");
  return c;
}

Check oracle_variance() {
  Check c;
  const double n = 50000.0;
  for (const auto& rc : list_cases()) {
    const auto r = mutual_information(rc.config.model);
    const double sd = std::sqrt(r.var_clt / n);
    if (rc.expected.var_clt) {
      const double diff = std::abs(r.var_clt - *rc.expected.var_clt);
      c.expect(diff <= 1e-5, rc.id + " aSa " + fmt(r.var_clt) + " vs " + fmt(*rc.expected.var_clt) +
                                 " |d|=" + fmt(diff, 3));
    }
    const double published = *rc.expected.asymptotic_sd;
    double tol = 1e-6;
    if (rc.config.model.dim() == 1) {
      // printed precision of the table entry: 0.0006617 -> 1e-7, 0.0025 -> 1e-4
      int decimals = 0;
      for (double scaled = published; std::abs(scaled - std::round(scaled)) > 1e-9; scaled *= 10) ++decimals;
      tol = std::pow(10.0, -decimals);
    }
    const double diff = std::abs(sd - published);
    c.expect(diff <= tol, rc.id + " sd " + fmt(sd, 7) + " vs " + fmt(published, 7) + " |d|=" + fmt(diff, 3) +
                              " tol " + fmt(tol, 2));
  }
  return c;
}

struct DeskRun {
  ExperimentRun run;
  double seconds = 0.0;
};

DeskRun desk_run() {
  auto config = desk_variant(shift_case());
  const auto t0 = Clock::now();
  DeskRun d{run_experiment(config), 0.0};
  d.seconds = seconds_since(t0);
  return d;
}

Check desk_scale(const DeskRun& d) {
  Check c;
  const auto& s = d.run.summary;
  const double scale = std::sqrt(kShiftVar / 10000.0);
  const double bound = 4.0 * scale / std::sqrt(100.0) + 0.005;
  c.expect(std::abs(s.mean_estimate - kShiftMi) <= bound,
           "mean " + fmt(s.mean_estimate, 6) + " |d|=" + fmt(std::abs(s.mean_estimate - kShiftMi), 3) + " <= " +
               fmt(bound, 3));
  c.expect(s.sample_sd >= 0.6 * scale && s.sample_sd <= 1.5 * scale,
           "sd " + fmt(s.sample_sd, 4) + " in [" + fmt(0.6 * scale, 3) + ", " + fmt(1.5 * scale, 3) + "]");
  c.detail << " time " << fmt(d.seconds, 3) << " s;";
  return c;
}

Check full_scale() {
  auto config = shift_case();
  config.m_reps = 50;
  const auto t0 = Clock::now();
  const auto run = run_experiment(config);
  Check c;
  const auto& s = run.summary;
  c.expect(std::abs(s.mean_estimate - kShiftMi) <= 0.003,
           "mean " + fmt(s.mean_estimate, 6) + " |d|=" + fmt(std::abs(s.mean_estimate - kShiftMi), 3) + " <= 0.003");
  c.expect(std::abs(s.sample_sd - 0.0025) <= 0.3 * 0.0025, "sd " + fmt(s.sample_sd, 4) + " within 30% of 0.0025");
  c.detail << " time " << fmt(seconds_since(t0), 3) << " s;";
  return c;
}

Check normality(const DeskRun& d) {
  Check c;
  const auto& qq = d.run.summary.qq_correlation;
  c.expect(qq && *qq >= 0.97, "desk qq " + (qq ? fmt(*qq, 5) : std::string("undefined")) + " >= 0.97");
  Xoshiro256 rng(stream_seed(2024, 0));
  std::vector<double> draws(400);
  for (auto& x : draws) x = 0.2 + 0.0025 * standard_normal(rng);
  const auto synthetic = qq_correlation(draws);
  c.expect(synthetic && *synthetic >= 0.99, "synthetic qq " + fmt(synthetic.value_or(0.0), 5) + " >= 0.99");
  return c;
}

Check independence() {
  Check c;
  const auto t3 = ContinuousDensity::student_t(3, 0, 1);
  const MixedPairModel model({0.3, 0.7}, {t3, t3});
  const auto r = mutual_information(model);
  c.expect(std::abs(r.mi) <= 1e-8, "oracle MI " + fmt(r.mi, 3));
  c.expect(std::abs(r.var_clt) <= 1e-8, "oracle aSa " + fmt(r.var_clt, 3));
  auto config = shift_case();
  config.id = "independent";
  config.model = model;
  config.m_reps = 10;
  const auto run = run_experiment(config);
  double worst = 0.0;
  for (const auto& e : run.estimates) worst = std::max(worst, std::abs(e.mi_hat));
  c.expect(worst <= 0.005, "max |I_hat| over 10 replicates " + fmt(worst, 3) + " <= 0.005");
  return c;
}

Check structural() {
  Check c;
  Xoshiro256 rng(stream_seed(8, 0));

  // Leave-one-out marginal as the count-weighted mixture of class estimates.
  double worst_mix = 0.0;
  bool combine_exact = true;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t classes = 2 + static_cast<std::size_t>(rng.uniform() * 3);
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * 2);
    const std::size_t n = 2 * classes + static_cast<std::size_t>(rng.uniform() * 40);
    Sample s;
    s.dim = dim;
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto label = k < 2 * classes ? k % classes : static_cast<std::size_t>(rng.uniform() * classes);
      s.labels.push_back(static_cast<int>(label));
      ++counts[label];
      for (std::size_t a = 0; a < dim; ++a) s.points.push_back(3.0 * standard_normal(rng));
    }
    const auto kernel = KernelSpec::student_t(3, dim);
    const double h = 0.1 + 2.0 * rng.uniform();
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> y(dim);
      for (auto& v : y) v = 4.0 * standard_normal(rng);
      const double lhs = loo_marginal(s, k, y, kernel, h);
      double rhs = 0.0;
      for (std::size_t i = 0; i < classes; ++i) {
        rhs += (static_cast<double>(counts[i]) - 1.0) / (static_cast<double>(n) - 1.0) *
               loo_conditional(s, i, k, y, kernel, h);
      }
      worst_mix = std::max(worst_mix, std::abs(lhs - rhs) / lhs);
    }
    const auto r = hat_estimate(s, kernel, Bandwidth::fixed(h));
    double mi = r.h_hat;
    for (double t : r.class_terms) mi -= t;
    combine_exact = combine_exact && (r.mi_hat == mi);
  }
  c.expect(worst_mix <= 1e-12, "mixture identity max rel err " + fmt(worst_mix, 3));
  c.expect(combine_exact, "mi_hat == h_hat - sum(class_terms) bitwise");

  // Entropy decomposition and the three MI forms on random models.
  double worst_z = 0.0;
  double worst_mi = 0.0;
  bool within = true;
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<ContinuousDensity> conds;
    std::vector<double> probs;
    const bool pareto = trial % 3 == 2;
    for (int i = 0; i < 2; ++i) {
      if (pareto) conds.push_back(ContinuousDensity::pareto(0.5 + rng.uniform(), 1.5 + 8.0 * rng.uniform()));
      else conds.push_back(ContinuousDensity::student_t(2.0 + 10.0 * rng.uniform(), 4.0 * rng.uniform() - 2.0,
                                                        0.3 + 3.0 * rng.uniform()));
    }
    const double p0 = 0.1 + 0.8 * rng.uniform();
    probs = {p0, 1.0 - p0};
    const MixedPairModel model(probs, conds);
    const auto r = mutual_information(model);
    double cond = 0.0;
    double cond_err = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      cond += probs[i] * r.h_cond[i];
      cond_err += r.quad_error.h_cond[i];
    }
    const double dz = std::abs(r.h_z - (r.h_x + cond));
    const double mi_err = r.quad_error.mi + r.quad_error.mi_kl + r.quad_error.mi_3h;
    const double dmi = std::max(std::abs(r.mi - r.mi_kl), std::abs(r.mi - r.mi_3h));
    worst_z = std::max(worst_z, dz);
    worst_mi = std::max(worst_mi, dmi);
    within = within && dz <= r.quad_error.h_z + cond_err + 1e-12 && dmi <= mi_err + 1e-12;
  }
  c.expect(within, "H(Z) decomposition max |d| " + fmt(worst_z, 3) + ", three-way MI max |d| " + fmt(worst_mi, 3) +
                       " within summed quadrature error");
  return c;
}

Check determinism() {
  auto config = desk_variant(shift_case());
  config.m_reps = 16;
  const auto one = run_experiment(config, {.workers = 1});
  const std::size_t workers = multi_workers();
  const auto many = run_experiment(config, {.workers = workers});
  Check c;
  c.expect(estimates_csv(one.estimates) == estimates_csv(many.estimates),
           "estimates.csv identical for 1 and " + std::to_string(workers) + " workers");
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::function<Check()>& run) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << " exception: " << e.what();
    }
    std::printf("%s criterion %d:%s\n", c.ok ? "PASS" : "FAIL", id, c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
  };

  report(1, [] { return oracle_mi(1, 10.0); });
  report(2, [] { return oracle_mi(2, 60.0); });
  report(3, oracle_variance);
  DeskRun desk;
  bool desk_ok = true;
  try {
    desk = desk_run();
  } catch (const std::exception& e) {
    desk_ok = false;
    std::printf("desk run failed: %s\n", e.what());
  }
  report(4, [&] {
    if (!desk_ok) throw std::runtime_error("desk run unavailable");
    return desk_scale(desk);
  });
  report(5, full_scale);
  report(6, [&] {
    if (!desk_ok) throw std::runtime_error("desk run unavailable");
    return normality(desk);
  });
  report(7, independence);
  report(8, structural);
  report(9, determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
