#include "mixmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mixmi/errors.hpp"
#include "mixmi/parallel.hpp"

namespace mixmi {

namespace {

std::size_t max_label_of(const Sample& sample) {
  int m = 0;
  for (int label : sample.labels) m = std::max(m, label);
  return static_cast<std::size_t>(m);
}

std::vector<std::size_t> class_counts(const Sample& sample, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (int label : sample.labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

// -N^-1 sum of the selected log terms, pairwise summed.
double negative_mean(std::vector<double>& logs, std::size_t n) {
  return -pairwise_sum(logs) / static_cast<double>(n);
}

}  // namespace

std::vector<double> p_hat(const Sample& sample, std::size_t max_label) {
  sample.validate(max_label + 1);
  const auto counts = class_counts(sample, max_label + 1);
  std::vector<double> p(counts.size());
  const double n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
  return p;
}

double combine(double h_hat, std::span<const double> class_terms) {
  double mi = h_hat;
  for (double t : class_terms) mi -= t;
  return mi;
}

EstimateResult bar_estimate(const Sample& sample, const MixedPairModel& model) {
  sample.validate(model.num_classes());
  if (sample.dim != model.dim()) throw ContractViolation("sample and model dimensions differ");
  const std::size_t n = sample.size();
  const std::size_t classes = model.num_classes();

  EstimateResult r;
  r.n = n;
  r.p_hat = p_hat(sample, classes - 1);

  std::vector<double> marginal_logs(n);
  std::vector<std::vector<double>> class_logs(classes);
  for (std::size_t k = 0; k < n; ++k) {
    const auto y = sample.point(k);
    const double f = model.marginal_pdf(y);
    if (f > 0.0) {
      marginal_logs[k] = std::log(f);
    } else {
      ++r.zero_density_hits;
    }
    const auto cls = static_cast<std::size_t>(sample.labels[k]);
    const auto lf = model.conditionals()[cls].log_pdf(y);
    if (lf) {
      class_logs[cls].push_back(*lf);
    } else {
      ++r.zero_density_hits;
    }
  }
  r.h_hat = negative_mean(marginal_logs, n);
  r.class_terms.resize(classes);
  for (std::size_t i = 0; i < classes; ++i) r.class_terms[i] = negative_mean(class_logs[i], n);
  r.mi_hat = combine(r.h_hat, r.class_terms);
  return r;
}

EstimateResult hat_estimate(const Sample& sample, const KernelSpec& kernel,
                            const Bandwidth& bandwidth, const HatOptions& options) {
  const std::size_t classes = sample.labels.empty() ? 0 : max_label_of(sample) + 1;
  sample.validate(std::max<std::size_t>(classes, 1));
  const std::size_t n = sample.size();
  const std::size_t dim = sample.dim;
  if (n < 2) throw ContractViolation("kernel estimator needs N >= 2");
  if (kernel.dim() != dim) throw ContractViolation("kernel and sample dimensions differ");

  const auto counts = class_counts(sample, classes);
  for (std::size_t i = 0; i < classes; ++i) {
    if (counts[i] == 1) throw DegenerateClass(i, 1);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sample.labels[a] != sample.labels[b]) return sample.labels[a] < sample.labels[b];
    const auto pa = sample.point(a);
    const auto pb = sample.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  Sample grouped;
  grouped.dim = dim;
  grouped.labels.resize(n);
  grouped.points.resize(n * dim);
  for (std::size_t k = 0; k < n; ++k) {
    grouped.labels[k] = sample.labels[order[k]];
    const auto p = sample.point(order[k]);
    std::copy(p.begin(), p.end(), grouped.points.begin() + static_cast<std::ptrdiff_t>(k * dim));
  }

  const double h = bandwidth.resolve(n);
  PairSumOptions pair_options;
  pair_options.workers = options.workers;
  pair_options.isa = options.isa;
  const auto loo = loo_densities_grouped(grouped, counts, kernel, h, pair_options);

  EstimateResult r;
  r.n = n;
  r.bandwidth_used = h;
  r.p_hat.resize(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    r.p_hat[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }

  std::vector<double> logs(n);
  for (std::size_t k = 0; k < n; ++k) logs[k] = std::log(loo.marginal[k]);
  r.h_hat = negative_mean(logs, n);

  r.class_terms.assign(classes, 0.0);
  std::size_t start = 0;
  for (std::size_t i = 0; i < classes; ++i) {
    std::vector<double> class_logs(counts[i]);
    for (std::size_t k = 0; k < counts[i]; ++k) class_logs[k] = std::log(loo.conditional[start + k]);
    r.class_terms[i] = negative_mean(class_logs, n);
    start += counts[i];
  }
  r.mi_hat = combine(r.h_hat, r.class_terms);
  return r;
}

}  // namespace mixmi
