#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mixmi/distmodel.hpp"
#include "mixmi/kde.hpp"

namespace mixmi {

/// One estimate of I(X, Y) with its entropy components.
struct EstimateResult {
  double mi_hat = 0.0;                 ///< h_hat - sum(class_terms)
  double h_hat = 0.0;                  ///< estimate of H(Y)
  std::vector<double> class_terms;     ///< estimates of p_i H(Y | X = i)
  std::vector<double> p_hat;           ///< class frequencies
  std::size_t n = 0;
  double bandwidth_used = 0.0;         ///< 0 for the known-density estimator
  std::size_t zero_density_hits = 0;   ///< points where a true density was 0
};

/// Class frequencies count_i / N for labels 0..max_label.
std::vector<double> p_hat(const Sample& sample, std::size_t max_label);

/// h_hat - sum(class_terms), summed left to right.
double combine(double h_hat, std::span<const double> class_terms);

/// Estimator with the true densities plugged in. Only usable when the model is
/// known; serves as the reference the kernel estimator is checked against.
/// Points of zero true density contribute log 0 = 0 and are counted.
EstimateResult bar_estimate(const Sample& sample, const MixedPairModel& model);

struct HatOptions {
  std::size_t workers = 1;
  simd::Isa isa = simd::active_isa();
};

/// Kernel estimator with leave-one-out density estimates. The sample is put in
/// a canonical order (label, then coordinates) first, so the result does not
/// depend on the order of pairs or on `workers`.
/// Throws DegenerateClass when a present class has a single member.
EstimateResult hat_estimate(const Sample& sample, const KernelSpec& kernel,
                            const Bandwidth& bandwidth, const HatOptions& options = {});

}  // namespace mixmi
