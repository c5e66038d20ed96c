#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlyap/controller.hpp"
#include "qlyap/core.hpp"
#include "qlyap/p_design.hpp"
#include "qlyap/simulate.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

// File names for everything an experiment writes, relative to the output
// directory. All have sensible defaults; configs may override.
struct OutputNames {
  std::string trajectory_csv = "trajectory.csv";
  std::string populations_svg = "populations.svg";
  std::string lyapunov_svg = "lyapunov.svg";
  std::string controls_svg = "controls.svg";
  std::string report_txt = "report.txt";
  std::string comparison_csv = "comparison.csv";
  std::string comparison_svg = "comparison_fidelity.svg";
  std::string p_operator_json = "p_operator.json";
};

// A fully validated experiment description: system, initial and target
// states, weight operator recipe, feedback parameters, integration settings.
struct ExperimentConfig {
  ControlledSystem system;
  QuantumState initial;
  QuantumState target;
  PSpec p_spec;
  std::vector<double> gains;
  std::vector<OddFunction> odd;
  ControlMode mode = ControlMode::full;
  SimulationConfig sim;
  OutputNames outputs;
  std::string notes;  // free-form provenance, carried through untouched

  ControllerConfig make_controller() const;
};

// Parsing never throws for content problems; every issue is collected so a
// bad config reports all of its mistakes at once. config is set only when
// errors is empty. warnings covers accepted-but-adjusted inputs (for
// example, state vectors renormalized from within 1e-6 of unit norm).
struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

ParseResult parse_config(const std::string& json_text);
ParseResult load_config_file(const std::string& path);

// Lossless JSON round trip: parse_config(serialize_config(c)) reproduces c
// field by field.
std::string serialize_config(const ExperimentConfig& cfg, int indent = 2);

// JSON for a built weight operator: an explicit p_spec block that can be
// pasted into a config verbatim, annotated with its eigenvalues and the
// off-diagonal coupling check against the given system.
std::string serialize_p_operator(const HermitianOperator& p,
                                 const ControlledSystem& sys, int indent = 2);

}  // namespace qlyap
