#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mixmi/distmodel.hpp"
#include "mixmi/estimators.hpp"
#include "mixmi/kde.hpp"
#include "mixmi/oracle.hpp"
#include "mixmi/quadrature.hpp"

namespace mixmi {

enum class OutputKind { EstimatesCsv, SummaryJson, HistCsv, QqCsv };

/// Published reference values attached to a shipped case.
struct ReferenceValues {
  std::optional<double> mi{};
  std::optional<double> var_clt{};
  std::optional<double> asymptotic_sd{};
  std::optional<double> mean{};
  std::optional<double> sd{};

  bool operator==(const ReferenceValues&) const = default;
};

struct ExperimentConfig {
  std::string id;
  MixedPairModel model;
  std::size_t n;
  std::size_t m_reps;
  KernelSpec kernel;
  Bandwidth bandwidth;
  std::uint64_t seed = 0;
  std::size_t parallelism = 0;  ///< 0 = one worker per hardware thread
  std::vector<OutputKind> outputs{OutputKind::EstimatesCsv, OutputKind::SummaryJson,
                                  OutputKind::HistCsv, OutputKind::QqCsv};
  std::optional<std::size_t> hist_bins{};
  QuadratureSpec quadrature{};
  std::optional<ReferenceValues> expected{};
};

using Json = nlohmann::ordered_json;

Json to_json(const ContinuousDensity& density);
Json to_json(const MixedPairModel& model);
Json to_json(const Bandwidth& bandwidth);
Json to_json(const ExperimentConfig& config);
Json to_json(const OracleResult& oracle);
Json to_json(const EstimateResult& estimate);

// Parsers throw ConfigError with the offending key in the message.
ContinuousDensity density_from_json(const Json& j, std::size_t dim);
MixedPairModel model_from_json(const Json& j);
Bandwidth bandwidth_from_json(const Json& j);
QuadratureSpec quadrature_from_json(const Json& j);
ExperimentConfig config_from_json(const Json& j);

/// Reads a JSON config file. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// "power:-0.2", "power:-0.2:0.0416", "explicit:0.05" or a bare number.
Bandwidth parse_bandwidth_rule(const std::string& text);

/// "t3" or "t:3" (any positive df).
KernelSpec parse_kernel_name(const std::string& text, std::size_t dim);

/// Reads "label,y1[,y2,...]" rows; an optional non-numeric header is skipped.
Sample read_sample_csv(const std::filesystem::path& path);

}  // namespace mixmi
