#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixmi/config.hpp"
#include "mixmi/estimators.hpp"
#include "mixmi/oracle.hpp"

namespace mixmi {

struct ExperimentSummary {
  std::size_t m_reps = 0;
  std::size_t n = 0;
  double mean_estimate = 0.0;
  double sample_sd = 0.0;          ///< divisor M - 1; 0 when M == 1
  double oracle_mi = 0.0;
  double var_clt = 0.0;
  double asymptotic_sd = 0.0;      ///< sqrt(a'Sigma a / N)
  std::optional<double> qq_correlation;  ///< only for M >= 10 and non-constant estimates
  std::size_t zero_density_hits = 0;
  double bandwidth = 0.0;
  std::vector<std::string> condition_flags;
};

/// Mean, sd, asymptotic sd and normal Q-Q correlation of replicate estimates.
ExperimentSummary summarize(std::span<const double> estimates, const OracleResult& oracle,
                            std::size_t n);

/// Pearson correlation of the ordered estimates with standard normal
/// quantiles at (k - 0.5)/M. nullopt for fewer than 2 or constant estimates.
std::optional<double> qq_correlation(std::span<const double> estimates);

/// (Phi^-1((k - 0.5)/M), x_(k)) for k = 1..M. Needs M >= 2.
std::vector<std::pair<double, double>> qq_data(std::span<const double> estimates);

struct HistBin {
  double left;
  double right;
  std::size_t count;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// Identical estimates give one bin holding all of them.
std::vector<HistBin> hist_data(std::span<const double> estimates, std::size_t bins);

/// ceil(log2 M) + 1
std::size_t sturges_bins(std::size_t m);

/// Conditions of the kernel CLT the configuration violates (tail index of a
/// conditional too small for the dimension, bandwidth decaying too slowly).
std::vector<std::string> condition_flags(const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::size_t> workers;  ///< overrides config.parallelism
  simd::Isa isa = simd::active_isa();
};

struct ExperimentRun {
  std::vector<EstimateResult> estimates;
  ExperimentSummary summary;
  OracleResult oracle;
};

/// M replicates of sample -> kernel estimate. Replicate r draws from
/// stream_seed(config.seed, r); output does not depend on the worker count.
/// A DegenerateClass in any replicate aborts the run, tagged with the
/// replicate index.
ExperimentRun run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string estimates_csv(std::span<const EstimateResult> estimates);
std::string hist_csv(std::span<const HistBin> bins);
std::string qq_csv(std::span<const std::pair<double, double>> pairs);
Json to_json(const ExperimentSummary& summary);

/// Writes the artifacts listed in config.outputs into `dir` (created if needed).
void write_outputs(const ExperimentConfig& config, const ExperimentRun& run,
                   const std::filesystem::path& dir);

/// Side-by-side comparison of every summary.json under `dir` with its published values.
std::string render_report(const std::filesystem::path& dir);

}  // namespace mixmi
