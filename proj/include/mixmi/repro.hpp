#pragma once

#include <string>
#include <vector>

#include "mixmi/config.hpp"

namespace mixmi {

/// One of the six published simulation settings.
struct ReproCase {
  std::string id;
  ExperimentConfig config;  ///< full scale: N = 50,000, M = 400 (1D) or 200 (2D)
  ReferenceValues expected;
};

/// The six published cases, four 1D then two 2D.
std::vector<ReproCase> list_cases();

/// Same model, kernel and bandwidth at n = 10,000 and m_reps = 100.
ExperimentConfig desk_variant(const ExperimentConfig& full);

}  // namespace mixmi
