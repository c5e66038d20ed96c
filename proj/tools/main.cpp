#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "qlyap/config.hpp"
#include "qlyap/experiment.hpp"
#include "qlyap/p_design.hpp"

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::optional<qlyap::ExperimentConfig> load_config(
    const std::string& path, const std::optional<std::uint64_t>& seed) {
  qlyap::ParseResult parsed = qlyap::load_config_file(path);
  for (const auto& w : parsed.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (!parsed.config) {
    std::cerr << "invalid config " << path << ":\n";
    for (const auto& e : parsed.errors) {
      std::cerr << "  - " << e << "\n";
    }
    return std::nullopt;
  }
  if (seed) {
    if (auto* rnd = std::get_if<qlyap::RandomPSpec>(&parsed.config->p_spec)) {
      rnd->seed = *seed;
    } else {
      std::cerr << "warning: --seed ignored, the weight operator in this "
                   "config is not random\n";
    }
  }
  return parsed.config;
}

int run_check(const qlyap::ExperimentConfig& cfg) {
  const qlyap::CheckSummary summary = qlyap::check_experiment(cfg);
  std::cout << summary.text;
  return summary.ok() ? 0 : 2;
}

int run_simulate(const qlyap::ExperimentConfig& cfg, const std::string& out,
                 bool override_assumptions) {
  const qlyap::ExperimentResult res =
      qlyap::run_experiment(cfg, out, override_assumptions);
  for (const auto& f : res.written) {
    std::cout << "wrote " << f << "\n";
  }
  if (!res.ran_simulation) {
    std::cerr << "assumption checks failed, simulation skipped (see the "
                 "report; --override-assumptions runs it anyway)\n";
    return 2;
  }
  const double fid = res.trajectory.fidelity.back();
  std::cout << "V(0) = " << fmt6(res.v_initial)
            << ", V(T) = " << fmt6(res.v_final) << "\n"
            << "final fidelity = " << fmt6(fid) << " (fidelity^2 = "
            << fmt6(fid * fid) << ")\n";
  if (res.trajectory.aborted) {
    std::cerr << "numeric abort: " << res.trajectory.abort_reason << "\n";
    return 3;
  }
  return 0;
}

int run_compare(const qlyap::ExperimentConfig& cfg, const std::string& out,
                bool override_assumptions) {
  const qlyap::ComparisonResult res =
      qlyap::compare_modes(cfg, out, override_assumptions);
  for (const auto& f : res.written) {
    std::cout << "wrote " << f << "\n";
  }
  std::printf("%-18s %16s %14s %16s\n", "mode", "final_fidelity",
              "min_lyapunov", "max_abs_control");
  bool any_aborted = false;
  for (const auto& row : res.rows) {
    std::printf("%-18s %16s %14s %16s%s\n", qlyap::to_string(row.mode),
                fmt6(row.final_fidelity).c_str(),
                fmt6(row.min_lyapunov).c_str(),
                fmt6(row.max_abs_control).c_str(),
                row.aborted ? "  (aborted)" : "");
    any_aborted = any_aborted || row.aborted;
  }
  if (any_aborted) {
    std::cerr << "numeric abort in at least one mode\n";
    return 3;
  }
  return 0;
}

int run_design_p(const qlyap::ExperimentConfig& cfg, const std::string& out) {
  const qlyap::HermitianOperator p = qlyap::build_p(cfg.system, cfg.p_spec);
  const std::string text = qlyap::serialize_p_operator(p, cfg.system);
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::filesystem::create_directories(out);
  const std::string path =
      (std::filesystem::path(out) / cfg.outputs.p_operator_json).string();
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) {
    throw qlyap::ValidationError("cannot write output file: " + path);
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lyapunov feedback control for closed quantum systems: assumption "
      "checks, closed-loop simulation, controller-mode comparison and "
      "weight-operator design"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string design_out;
  std::optional<std::uint64_t> seed;
  bool override_assumptions = false;

  CLI::App* check = app.add_subcommand(
      "check", "Run the structural checks for a config, without simulating");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the closed loop and write trajectory, plots, report");
  CLI::App* compare = app.add_subcommand(
      "compare", "Run all controller modes over one horizon and tabulate");
  CLI::App* design_p = app.add_subcommand(
      "design-p", "Build the weight operator and emit it as JSON");

  for (CLI::App* sub : {check, simulate, compare, design_p}) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    sub->add_option("--seed", seed,
                    "Override the seed of a random weight operator");
  }
  for (CLI::App* sub : {simulate, compare}) {
    sub->add_option("--out", out_dir, "Output directory")
        ->capture_default_str();
    sub->add_flag("--override-assumptions", override_assumptions,
                  "Simulate even when the structural checks fail");
  }
  design_p->add_option("--out", design_out,
                       "Output directory (omit to print to stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::optional<qlyap::ExperimentConfig> cfg =
      load_config(config_path, seed);
  if (!cfg) {
    return 2;
  }

  try {
    if (app.got_subcommand(check)) {
      return run_check(*cfg);
    }
    if (app.got_subcommand(simulate)) {
      return run_simulate(*cfg, out_dir, override_assumptions);
    }
    if (app.got_subcommand(compare)) {
      return run_compare(*cfg, out_dir, override_assumptions);
    }
    return run_design_p(*cfg, design_out);
  } catch (const qlyap::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qlyap::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
}
