// mixmi: mutual information between a discrete label and a continuous
// variable, with a quadrature oracle and a Monte Carlo CLT harness.
//
// Exit codes: 0 success, 1 other failure, 2 config error, 3 degenerate class,
// 4 quadrature non-convergence.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mixmi/config.hpp"
#include "mixmi/errors.hpp"
#include "mixmi/estimators.hpp"
#include "mixmi/harness.hpp"
#include "mixmi/oracle.hpp"
#include "mixmi/repro.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitNonConvergence = 4;

void print_oracle_text(const mixmi::OracleResult& o) {
  std::cout << std::setprecision(10);
  std::cout << "mi              " << o.mi << "  (+/- " << o.quad_error.mi << ")\n";
  std::cout << "mi (KL form)    " << o.mi_kl << "  (+/- " << o.quad_error.mi_kl << ")\n";
  std::cout << "mi (H(X)+H(Y)-H(Z)) " << o.mi_3h << "  (+/- " << o.quad_error.mi_3h << ")\n";
  std::cout << "H(Y)            " << o.h_y << '\n';
  for (std::size_t i = 0; i < o.h_cond.size(); ++i) {
    std::cout << "H(Y|X=" << i << ")        " << o.h_cond[i] << '\n';
  }
  std::cout << "H(X)            " << o.h_x << '\n';
  std::cout << "H(Z)            " << o.h_z << '\n';
  std::cout << "a'Sigma a       " << o.var_clt << "  (+/- " << o.quad_error.var_clt << ")\n";
  std::cout << "a'Sigma a direct " << o.var_clt_direct << '\n';
}

std::optional<mixmi::simd::Isa> isa_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto isa = mixmi::simd::parse_isa(text);
  if (!isa) throw mixmi::ConfigError("unknown --isa '" + text + "' (scalar, avx2, avx512)");
  if (!mixmi::simd::supported(*isa)) {
    throw mixmi::ConfigError("--isa " + text + " is not supported by this CPU");
  }
  return isa;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel mutual information for mixed discrete-continuous pairs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string data_path;
  std::string kernel_name = "t3";
  std::string bandwidth_rule = "power:-0.2";
  std::string isa_name;
  bool json = false;
  std::size_t workers = 0;
  bool desk = false;

  auto* oracle = app.add_subcommand("oracle", "Quadrature ground truth for a model");
  oracle->add_option("--config", config_path, "Experiment or model config (JSON)")->required();
  oracle->add_flag("--json", json, "Print the result as JSON");

  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo replicates of a config");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--workers", workers, "Worker threads (default: config parallelism)");
  simulate->add_option("--isa", isa_name, "Force pair-sum kernels: scalar, avx2, avx512");

  auto* estimate = app.add_subcommand("estimate", "Estimate MI from a data file");
  estimate->add_option("--data", data_path, "CSV rows: label,y1[,y2...]")->required();
  estimate->add_option("--kernel", kernel_name, "Kernel, tNU (default t3)");
  estimate->add_option("--bandwidth", bandwidth_rule,
                       "power:E[:S] (h = S N^E), explicit:H or a number (default power:-0.2)");
  estimate->add_option("--workers", workers, "Worker threads (0 = all)");
  estimate->add_option("--isa", isa_name, "Force pair-sum kernels: scalar, avx2, avx512");

  auto* report = app.add_subcommand("report", "Compare simulate outputs with published values");
  report->add_option("--out", out_dir, "Directory holding summary.json files")->required();

  auto* cases = app.add_subcommand("cases", "Write the shipped reproduction configs");
  cases->add_option("--out", out_dir, "Directory to write <id>.json into")->required();
  cases->add_flag("--desk", desk, "Write the desk-scale variants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed()) {
      const auto config = mixmi::load_config(config_path);
      const auto result = mixmi::mutual_information(config.model, config.quadrature);
      if (json) {
        std::cout << mixmi::to_json(result).dump(2) << '\n';
      } else {
        print_oracle_text(result);
      }
    } else if (simulate->parsed()) {
      const auto config = mixmi::load_config(config_path);
      mixmi::RunOptions options;
      if (simulate->count("--workers") > 0) options.workers = workers;
      if (auto isa = isa_option(isa_name)) options.isa = *isa;
      const auto run = mixmi::run_experiment(config, options);
      mixmi::write_outputs(config, run, out_dir);
      std::cout << mixmi::to_json(run.summary).dump(2) << '\n';
    } else if (estimate->parsed()) {
      const auto sample = mixmi::read_sample_csv(data_path);
      const auto kernel = mixmi::parse_kernel_name(kernel_name, sample.dim);
      const auto bandwidth = mixmi::parse_bandwidth_rule(bandwidth_rule);
      mixmi::HatOptions options;
      options.workers = workers;
      if (auto isa = isa_option(isa_name)) options.isa = *isa;
      const auto result = mixmi::hat_estimate(sample, kernel, bandwidth, options);
      std::cout << mixmi::to_json(result).dump(2) << '\n';
    } else if (report->parsed()) {
      std::cout << mixmi::render_report(out_dir);
    } else if (cases->parsed()) {
      std::filesystem::create_directories(out_dir);
      for (const auto& c : mixmi::list_cases()) {
        const auto config = desk ? mixmi::desk_variant(c.config) : c.config;
        const auto path = std::filesystem::path(out_dir) / (config.id + ".json");
        std::ofstream file(path);
        file << mixmi::to_json(config).dump(2) << '\n';
        std::cout << path.string() << '\n';
      }
    }
  } catch (const mixmi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mixmi::DegenerateClass& e) {
    std::cerr << "degenerate class: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const mixmi::NonConvergence& e) {
    std::cerr << "quadrature did not converge: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const mixmi::ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
