#pragma once

#include <string>
#include <vector>

#include "qlyap/config.hpp"
#include "qlyap/invariant.hpp"
#include "qlyap/p_design.hpp"
#include "qlyap/simulate.hpp"
#include "qlyap/system.hpp"

namespace qlyap {

// Shortest decimal string that parses back to exactly the same double.
std::string format_shortest(double v);

// Header row plus one row per recorded step: time, Re/Im of every
// amplitude, populations, controls, V, fidelity.
std::string render_trajectory_csv(const Trajectory& traj);

// Static analysis of a config: assumption checks, case classification and
// the off-diagonal coupling condition, without running a simulation. The
// off-diagonal condition only gates ok() in the non-commuting case; a
// commuting weight has no off-diagonals by construction.
struct CheckSummary {
  AssumptionReport assumptions;
  CaseClassification case_info;
  OffdiagonalCheck offdiagonal;
  std::string text;

  bool ok() const {
    return assumptions.all_ok() &&
           (case_info.kind == CaseKind::commuting || offdiagonal.ok);
  }
};

CheckSummary check_experiment(const ExperimentConfig& cfg);

struct ExperimentResult {
  AssumptionReport assumptions;
  CaseClassification case_info;
  OffdiagonalCheck offdiagonal;
  bool assumptions_ok = false;
  bool ran_simulation = false;
  Trajectory trajectory;
  LimitClassification limit;
  double v_initial = 0.0;
  double v_final = 0.0;
  std::vector<std::string> written;  // paths of files produced
};

// Full pipeline: assumption checks, weight-operator construction, case
// classification, simulation, artifact emission (trajectory CSV, three SVG
// plots, text report) into out_dir. When the assumption checks fail the
// simulation is skipped and the report says so, unless override_assumptions
// is set. Repeated runs produce byte-identical files.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir,
                                bool override_assumptions = false);

struct ComparisonRow {
  ControlMode mode = ControlMode::full;
  double final_fidelity = 0.0;
  double min_lyapunov = 0.0;
  double max_abs_control = 0.0;
  bool aborted = false;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;  // full, drop_target_term, identity_p_half
  std::vector<std::string> written;
};

// Runs all three controller modes over the identical horizon and writes a
// comparison CSV plus an overlay plot of the fidelity curves.
ComparisonResult compare_modes(const ExperimentConfig& cfg,
                               const std::string& out_dir,
                               bool override_assumptions = false);

}  // namespace qlyap
