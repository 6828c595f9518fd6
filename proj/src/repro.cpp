#include "mixmi/repro.hpp"

#include <cmath>

namespace mixmi {

namespace {

constexpr double kP0 = 0.3;
constexpr double kP1 = 0.7;
constexpr std::size_t kN = 50000;

ContinuousDensity t1(double df, double loc, double scale) {
  return ContinuousDensity::student_t(df, loc, scale);
}

ContinuousDensity t2(double df, double shape_diag) {
  return ContinuousDensity::multivariate_t(df, {0.0, 0.0}, {shape_diag, 0.0, 0.0, shape_diag});
}

ReproCase make(std::string id, ContinuousDensity f0, ContinuousDensity f1, std::size_t m_reps,
               double bandwidth_scale, std::uint64_t seed, ReferenceValues expected) {
  const std::size_t dim = f0.dim();
  MixedPairModel model({kP0, kP1}, {std::move(f0), std::move(f1)});
  ExperimentConfig config{.id = id,
                          .model = std::move(model),
                          .n = kN,
                          .m_reps = m_reps,
                          .kernel = KernelSpec::student_t(3.0, dim),
                          .bandwidth = Bandwidth::power_rule(-0.2, bandwidth_scale),
                          .seed = seed};
  config.expected = expected;
  return ReproCase{std::move(id), std::move(config), expected};
}

}  // namespace

std::vector<ReproCase> list_cases() {
  std::vector<ReproCase> cases;
  cases.push_back(make("t3-t12", t1(3, 0, 1), t1(12, 0, 1), 400, 1.0, 101,
                       {0.011819, 0.02189236, 0.0006617, 0.01167391, 0.0006616724}));
  cases.push_back(make("t3-t3shift2", t1(3, 0, 1), t1(3, 2, 1), 400, 1.0, 102,
                       {0.20023, 0.3092179, 0.0025, 0.1991132, 0.002345997}));
  cases.push_back(make("t3-t3scale3", t1(3, 0, 1), t1(3, 0, 3), 400, 1.0, 103,
                       {0.102063, 0.1540501, 0.0018, 0.1014199, 0.001819982}));
  cases.push_back(make("pareto2-pareto10", ContinuousDensity::pareto(1, 2),
                       ContinuousDensity::pareto(1, 10), 400, 1.0 / 24.0, 104,
                       {0.201123, 0.2748102, 0.0023, 0.2010447, 0.002349275}));
  // The scale-3 component is t_5(0, 9I): per-axis scale 3.
  cases.push_back(make("mvt5-mvt25", t2(5, 1.0), t2(25, 1.0), 200, 1.0, 105,
                       {0.01158, std::nullopt, 0.0006577826, 0.0112381, 0.0008356947}));
  cases.push_back(make("mvt5-mvt5scale3", t2(5, 1.0), t2(5, 9.0), 200, 1.0, 106,
                       {0.202516, std::nullopt, 0.002312909, 0.2022715, 0.002315134}));
  return cases;
}

ExperimentConfig desk_variant(const ExperimentConfig& full) {
  ExperimentConfig desk = full;
  desk.id = full.id + "-desk";
  desk.n = 10000;
  desk.m_reps = 100;
  // Published mean and sd belong to N = 50,000; only the model constants carry over.
  if (desk.expected) desk.expected = ReferenceValues{desk.expected->mi, desk.expected->var_clt};
  return desk;
}

}  // namespace mixmi
