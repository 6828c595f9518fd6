#include "mixmi/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "mixmi/errors.hpp"
#include "mixmi/parallel.hpp"
#include "mixmi/rng.hpp"

namespace mixmi {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double normal_quantile(double p) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, p);
}

double mean_of(std::span<const double> x) {
  return pairwise_sum(x) / static_cast<double>(x.size());
}

}  // namespace

std::optional<double> qq_correlation(std::span<const double> estimates) {
  const std::size_t m = estimates.size();
  if (m < 2) return std::nullopt;
  std::vector<double> sorted(estimates.begin(), estimates.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return std::nullopt;
  std::vector<double> q(m);
  for (std::size_t k = 0; k < m; ++k) {
    q[k] = normal_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(m));
  }
  const double mx = mean_of(sorted);
  const double mq = mean_of(q);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double dx = sorted[k] - mx;
    const double dq = q[k] - mq;
    sxy += dx * dq;
    sxx += dx * dx;
    syy += dq * dq;
  }
  return sxy / std::sqrt(sxx * syy);
}

ExperimentSummary summarize(std::span<const double> estimates, const OracleResult& oracle,
                            std::size_t n) {
  if (estimates.empty()) throw ContractViolation("summarize needs at least one estimate");
  if (n == 0) throw ContractViolation("summarize needs the per-replicate sample size");
  ExperimentSummary s;
  s.m_reps = estimates.size();
  s.n = n;
  s.mean_estimate = mean_of(estimates);
  if (s.m_reps >= 2) {
    // Deviations taken about the first estimate, so constant input gives exactly 0.
    std::vector<double> shifted(estimates.size());
    for (std::size_t k = 0; k < estimates.size(); ++k) shifted[k] = estimates[k] - estimates[0];
    const double shift_mean = mean_of(shifted);
    std::vector<double> sq(estimates.size());
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      const double d = shifted[k] - shift_mean;
      sq[k] = d * d;
    }
    s.sample_sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(s.m_reps - 1));
  } else {
    s.condition_flags.emplace_back("single replicate: sample sd undefined, reported as 0");
  }
  s.oracle_mi = oracle.mi;
  s.var_clt = oracle.var_clt;
  s.asymptotic_sd = std::sqrt(std::max(0.0, oracle.var_clt) / static_cast<double>(n));
  if (s.m_reps < 10) {
    s.condition_flags.emplace_back("fewer than 10 replicates: qq correlation not computed");
  } else {
    s.qq_correlation = qq_correlation(estimates);
    if (!s.qq_correlation) {
      s.condition_flags.emplace_back("constant estimates: qq correlation undefined");
    }
  }
  return s;
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> estimates) {
  const std::size_t m = estimates.size();
  if (m < 2) throw ContractViolation("Q-Q data needs at least two estimates");
  std::vector<double> sorted(estimates.begin(), estimates.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = {normal_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(m)), sorted[k]};
  }
  return out;
}

std::vector<HistBin> hist_data(std::span<const double> estimates, std::size_t bins) {
  if (bins < 1) throw ContractViolation("histogram needs at least one bin");
  if (estimates.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(estimates.begin(), estimates.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) return {HistBin{lo, hi, estimates.size()}};
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].left = lo + width * static_cast<double>(b);
    out[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    out[b].count = 0;
  }
  for (double x : estimates) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    if (b >= bins) b = bins - 1;
    // Keep the edges consistent with the reported left/right values.
    while (b > 0 && x < out[b].left) --b;
    while (b + 1 < bins && x >= out[b + 1].left) ++b;
    ++out[b].count;
  }
  return out;
}

std::size_t sturges_bins(std::size_t m) {
  if (m <= 1) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(m)))) + 1;
}

std::vector<std::string> condition_flags(const ExperimentConfig& config) {
  std::vector<std::string> flags;
  const std::size_t d = config.model.dim();
  std::optional<double> threshold;
  if (d == 1) threshold = 7.0 / 3.0;
  if (d == 2) threshold = 6.0;
  if (d == 3) threshold = 15.0;
  const auto& conds = config.model.conditionals();
  for (std::size_t i = 0; i < conds.size(); ++i) {
    const double alpha = conds[i].tail_index();
    std::ostringstream msg;
    if (!threshold) {
      msg << "no tail-index condition is known for dimension " << d;
      flags.push_back(msg.str());
      break;
    }
    if (!(alpha > *threshold)) {
      msg << "tail index violation: class " << i << " density decays like |y|^-" << alpha
          << ", the kernel CLT needs an index above " << *threshold << " in dimension " << d;
      flags.push_back(msg.str());
    } else if (d == 1 && !(alpha - 1.0 > *threshold)) {
      // Read as the decay of P(|Y| > y) instead, the index drops by one.
      msg << "tail index violation (survival-function reading): class " << i
          << " has P(|Y| > y) ~ y^-" << alpha - 1.0 << ", at or below " << *threshold
          << "; the density index " << alpha << " passes";
      flags.push_back(msg.str());
    }
  }
  if (const auto* p = std::get_if<Bandwidth::PowerRule>(&config.bandwidth.rule())) {
    if (!(p->exponent < -0.125)) {
      std::ostringstream msg;
      msg << "bandwidth exponent " << p->exponent << " is not o(N^-1/8)";
      flags.push_back(msg.str());
    }
  }
  return flags;
}

ExperimentRun run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  if (config.n < 2) throw ContractViolation("experiment needs n >= 2");
  if (config.m_reps < 1) throw ContractViolation("experiment needs m_reps >= 1");
  if (config.kernel.dim() != config.model.dim()) {
    throw ContractViolation("kernel and model dimensions differ");
  }
  ExperimentRun run;
  run.oracle = mutual_information(config.model, config.quadrature);

  const std::size_t workers = options.workers.value_or(config.parallelism);
  run.estimates.resize(config.m_reps);
  parallel_for(config.m_reps, workers, [&](std::size_t r) {
    const auto s = sample(config.model, config.n, stream_seed(config.seed, r));
    try {
      run.estimates[r] = hat_estimate(s, config.kernel, config.bandwidth, {1, options.isa});
    } catch (const DegenerateClass& e) {
      throw e.in_replicate(r);
    }
  });

  std::vector<double> mi(config.m_reps);
  for (std::size_t r = 0; r < config.m_reps; ++r) mi[r] = run.estimates[r].mi_hat;
  run.summary = summarize(mi, run.oracle, config.n);
  run.summary.bandwidth = config.bandwidth.resolve(config.n);
  for (const auto& e : run.estimates) run.summary.zero_density_hits += e.zero_density_hits;
  auto flags = condition_flags(config);
  run.summary.condition_flags.insert(run.summary.condition_flags.end(), flags.begin(), flags.end());
  return run;
}

std::string estimates_csv(std::span<const EstimateResult> estimates) {
  std::ostringstream out;
  const std::size_t classes = estimates.empty() ? 0 : estimates.front().class_terms.size();
  out << "replicate,mi_hat,h_hat";
  for (std::size_t i = 0; i < classes; ++i) out << ",i_hat_" << i;
  out << '\n';
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    const auto& e = estimates[r];
    out << r << ',' << fmt17(e.mi_hat) << ',' << fmt17(e.h_hat);
    for (double t : e.class_terms) out << ',' << fmt17(t);
    out << '\n';
  }
  return out.str();
}

std::string hist_csv(std::span<const HistBin> bins) {
  std::ostringstream out;
  out << "bin_left,bin_right,count\n";
  for (const auto& b : bins) out << fmt17(b.left) << ',' << fmt17(b.right) << ',' << b.count << '\n';
  return out.str();
}

std::string qq_csv(std::span<const std::pair<double, double>> pairs) {
  std::ostringstream out;
  out << "theoretical_quantile,ordered_estimate\n";
  for (const auto& [q, x] : pairs) out << fmt17(q) << ',' << fmt17(x) << '\n';
  return out.str();
}

Json to_json(const ExperimentSummary& s) {
  return Json{{"m_reps", s.m_reps},
              {"n", s.n},
              {"mean_estimate", s.mean_estimate},
              {"sample_sd", s.sample_sd},
              {"oracle_mi", s.oracle_mi},
              {"var_clt", s.var_clt},
              {"asymptotic_sd", s.asymptotic_sd},
              {"qq_correlation", s.qq_correlation ? Json(*s.qq_correlation) : Json(nullptr)},
              {"zero_density_hits", s.zero_density_hits},
              {"bandwidth", s.bandwidth},
              {"condition_flags", s.condition_flags}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_outputs(const ExperimentConfig& config, const ExperimentRun& run,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<double> mi(run.estimates.size());
  for (std::size_t r = 0; r < mi.size(); ++r) mi[r] = run.estimates[r].mi_hat;
  for (auto kind : config.outputs) {
    switch (kind) {
      case OutputKind::EstimatesCsv:
        write_file(dir / "estimates.csv", estimates_csv(run.estimates));
        break;
      case OutputKind::SummaryJson: {
        Json j = to_json(run.summary);
        Json doc;
        if (!config.id.empty()) doc["id"] = config.id;
        doc["summary"] = j;
        doc["oracle"] = to_json(run.oracle);
        doc["config"] = to_json(config);
        write_file(dir / "summary.json", doc.dump(2) + "\n");
        break;
      }
      case OutputKind::HistCsv:
        write_file(dir / "hist.csv",
                   hist_csv(hist_data(mi, config.hist_bins.value_or(sturges_bins(mi.size())))));
        break;
      case OutputKind::QqCsv:
        if (mi.size() >= 2) write_file(dir / "qq.csv", qq_csv(qq_data(mi)));
        break;
    }
  }
}

std::string render_report(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(dir / "summary.json")) files.push_back(dir / "summary.json");
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "summary.json")) {
        files.push_back(entry.path() / "summary.json");
      }
    }
  }
  if (files.empty()) throw ConfigError("no summary.json found under " + dir.string());
  std::sort(files.begin(), files.end());

  struct Column {
    std::string id;
    Json summary;
    Json expected;
  };
  std::vector<Column> columns;
  for (const auto& f : files) {
    std::ifstream in(f);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(f.string() + ": " + e.what());
    }
    Column c;
    c.id = doc.value("id", f.parent_path().filename().string());
    c.summary = doc.at("summary");
    if (doc.contains("config") && doc["config"].contains("expected")) {
      c.expected = doc["config"]["expected"];
    }
    columns.push_back(std::move(c));
  }

  auto cell = [](const Json& j, const char* key, int precision) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::string("-");
    std::ostringstream s;
    s << std::setprecision(precision) << j.at(key).get<double>();
    return s.str();
  };
  struct Row {
    std::string label;
    std::function<std::string(const Column&)> value;
  };
  const std::vector<Row> rows = {
      {"MI (oracle)", [&](const Column& c) { return cell(c.summary, "oracle_mi", 7); }},
      {"MI (published)", [&](const Column& c) { return cell(c.expected, "mi", 7); }},
      {"mean of estimates", [&](const Column& c) { return cell(c.summary, "mean_estimate", 7); }},
      {"mean (published)", [&](const Column& c) { return cell(c.expected, "mean", 7); }},
      {"(a'Sigma a/N)^1/2", [&](const Column& c) { return cell(c.summary, "asymptotic_sd", 7); }},
      {"(a'Sigma a/N)^1/2 (published)",
       [&](const Column& c) { return cell(c.expected, "asymptotic_sd", 7); }},
      {"sample sd", [&](const Column& c) { return cell(c.summary, "sample_sd", 7); }},
      {"sample sd (published)", [&](const Column& c) { return cell(c.expected, "sd", 7); }},
      {"qq correlation", [&](const Column& c) { return cell(c.summary, "qq_correlation", 5); }},
      {"N", [&](const Column& c) { return std::to_string(c.summary.value("n", 0)); }},
      {"M", [&](const Column& c) { return std::to_string(c.summary.value("m_reps", 0)); }},
  };

  std::size_t label_w = std::string("case").size();
  for (const auto& r : rows) label_w = std::max(label_w, r.label.size());
  std::vector<std::size_t> widths;
  for (const auto& c : columns) {
    std::size_t w = c.id.size();
    for (const auto& r : rows) w = std::max(w, r.value(c).size());
    widths.push_back(w);
  }
  std::ostringstream out;
  auto line = [&](const std::string& label, auto&& value_of) {
    out << std::left << std::setw(static_cast<int>(label_w)) << label;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      out << "  " << std::right << std::setw(static_cast<int>(widths[i])) << value_of(i);
    }
    out << '\n';
  };
  line("case", [&](std::size_t i) { return columns[i].id; });
  for (const auto& r : rows) line(r.label, [&](std::size_t i) { return r.value(columns[i]); });
  for (const auto& c : columns) {
    if (!c.summary.contains("condition_flags")) continue;
    for (const auto& flag : c.summary["condition_flags"]) {
      out << "note [" << c.id << "]: " << flag.get<std::string>() << '\n';
    }
  }
  return out.str();
}

}  // namespace mixmi
