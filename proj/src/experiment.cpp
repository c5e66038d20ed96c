#include "qlyap/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlyap/svg.hpp"

namespace qlyap {

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const char* verdict(bool ok) { return ok ? "[pass]" : "[FAIL]"; }

void write_text_file(const std::string& path, const std::string& content,
                     std::vector<std::string>* written) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    throw ValidationError("cannot write output file: " + path);
  }
  out.close();
  written->push_back(path);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

SvgSeries series_of(std::string label, const std::vector<double>& x,
                    std::vector<double> y) {
  SvgSeries s;
  s.label = std::move(label);
  s.x = x;
  s.y = std::move(y);
  return s;
}

void emit_plots(const ExperimentConfig& cfg, const Trajectory& traj,
                const std::string& out_dir,
                std::vector<std::string>* written) {
  const Eigen::Index n = cfg.system.dim();
  const int r = cfg.system.num_controls();
  const std::size_t rows = traj.size();

  std::vector<SvgSeries> pops;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> y(rows);
    for (std::size_t row = 0; row < rows; ++row) {
      y[row] = std::norm(traj.states[row](i));
    }
    pops.push_back(series_of("level " + std::to_string(i + 1), traj.times,
                             std::move(y)));
  }
  write_text_file(join_path(out_dir, cfg.outputs.populations_svg),
                  render_line_chart("level populations", "time", "population",
                                    pops),
                  written);

  std::vector<SvgSeries> lyap;
  lyap.push_back(series_of("V", traj.times, traj.lyapunov));
  write_text_file(join_path(out_dir, cfg.outputs.lyapunov_svg),
                  render_line_chart("Lyapunov function", "time", "V", lyap),
                  written);

  std::vector<SvgSeries> ctrls;
  for (int k = 0; k < r; ++k) {
    std::vector<double> y(rows);
    for (std::size_t row = 0; row < rows; ++row) {
      y[row] = traj.controls[row](k);
    }
    ctrls.push_back(series_of("u_" + std::to_string(k + 1), traj.times,
                              std::move(y)));
  }
  write_text_file(join_path(out_dir, cfg.outputs.controls_svg),
                  render_line_chart("control inputs", "time", "u", ctrls),
                  written);
}

void report_header(std::ostringstream& os, const ExperimentConfig& cfg) {
  os << "closed-loop stabilization report\n"
     << "================================\n\n";
  os << "system\n------\n";
  os << "dimension:       " << cfg.system.dim() << "\n";
  os << "control fields:  " << cfg.system.num_controls() << "\n";
  os << "hbar:            " << fmt6(cfg.system.hbar()) << "\n";
  os << "controller mode: " << to_string(cfg.mode) << "\n";
  os << "gains:           ";
  for (std::size_t k = 0; k < cfg.gains.size(); ++k) {
    os << (k ? ", " : "") << fmt6(cfg.gains[k]);
  }
  os << "\n";
  os << "time step:       " << fmt6(cfg.sim.dt) << "\n";
  os << "horizon:         " << fmt6(cfg.sim.t_final) << "\n";
  if (!cfg.notes.empty()) {
    os << "notes:           " << cfg.notes << "\n";
  }
  os << "\n";
}

void report_assumptions(std::ostringstream& os, const AssumptionReport& rep) {
  os << "assumption checks\n-----------------\n";
  os << verdict(rep.gaps.ok) << " nondegenerate transition gaps: min gap "
     << fmt6(rep.gaps.min_eigenvalue_gap) << ", min gap separation "
     << fmt6(rep.gaps.min_gap_separation);
  if (!rep.gaps.degenerate_pairs.empty()) {
    os << "; degenerate level pairs:";
    for (const auto& p : rep.gaps.degenerate_pairs) {
      os << " (" << p[0] + 1 << "," << p[1] + 1 << ")";
    }
  }
  if (!rep.gaps.colliding_gap_pairs.empty()) {
    os << "; colliding transition pairs:";
    for (const auto& p : rep.gaps.colliding_gap_pairs) {
      os << " (" << p[0] + 1 << "," << p[1] + 1 << ")~(" << p[2] + 1 << ","
         << p[3] + 1 << ")";
    }
  }
  os << "\n";

  os << verdict(rep.lie.ok) << " controllability: Lie algebra rank "
     << rep.lie.rank << " / " << rep.lie.required;
  if (rep.lie.budget_exhausted) {
    os << " (iteration budget exhausted, rank is a lower bound)";
  }
  os << "\n";

  os << verdict(rep.target.ok) << " target state: drift residual "
     << fmt6(rep.target.h0_residual) << ", energy "
     << fmt6(rep.target.lambda_f) << "; control residuals";
  for (double resid : rep.target.control_residuals) {
    os << " " << fmt6(resid);
  }
  if (!rep.target.control_eigenstate_of.empty()) {
    os << "; target is an eigenvector of control";
    for (int k : rep.target.control_eigenstate_of) {
      os << " " << k + 1;
    }
  }
  os << "\n";

  os << verdict(rep.common.ok) << " no common control eigenvector: ";
  if (rep.common.vacuous) {
    os << "single control field, nothing to check";
  } else {
    os << "worst margin " << fmt6(rep.common.worst_margin);
    if (rep.common.degenerate_flag) {
      os << " (degenerate control eigenspace, review manually)";
    }
    if (rep.common.offending_index >= 0) {
      os << ", eigenvector " << rep.common.offending_index + 1
         << " is shared by every control";
    }
  }
  os << "\n";

  os << "overall: "
     << (rep.all_ok() ? "all assumptions hold" : "assumption checks FAILED")
     << "\n\n";
}

void report_weight(std::ostringstream& os, const CaseClassification& cls,
                   const OffdiagonalCheck& offdiag) {
  os << "weight operator\n---------------\n";
  os << "case: "
     << (cls.kind == CaseKind::commuting ? "commuting" : "non-commuting")
     << " (max |[H0, W]| entry " << fmt6(cls.commutator_norm) << ", tol "
     << fmt6(cls.tol) << ")\n";
  if (cls.kind == CaseKind::commuting) {
    os << "off-diagonal coupling: not applicable (a commuting weight is "
          "diagonal in the drift eigenbasis)\n\n";
    return;
  }
  if (offdiag.row < 0) {
    os << "off-diagonal coupling: not evaluated (degenerate drift spectrum, "
          "no unique eigenbasis)\n\n";
    return;
  }
  os << "off-diagonal coupling: " << (offdiag.ok ? "satisfied" : "VIOLATED")
     << "; min |W_mj| over the drift eigenbasis "
     << fmt6(offdiag.min_offdiagonal) << " at (" << offdiag.row + 1 << ", "
     << offdiag.col + 1 << "), threshold " << fmt6(offdiag.threshold) << "\n\n";
}

// Commuting weight operators admit extra invariant states whenever any cross
// transition amplitude |c_m||c_j||<m|Hk|j>| survives. Scan the recorded
// states and report how widespread the violations are.
void report_structural(std::ostringstream& os, const ExperimentConfig& cfg,
                       const ControllerConfig& ctrl, const Trajectory& traj) {
  os << "commuting-case restriction\n--------------------------\n";
  std::size_t violating = 0;
  double worst = 0.0;
  double worst_time = 0.0;
  StructuralViolation worst_violation;
  for (std::size_t row = 0; row < traj.size(); ++row) {
    const StructuralCheck chk = case1_structural_condition(
        ctrl, cfg.system, QuantumState(traj.states[row]));
    if (!chk.ok) {
      ++violating;
      if (chk.max_magnitude > worst) {
        worst = chk.max_magnitude;
        worst_time = traj.times[row];
        for (const auto& v : chk.violations) {
          if (v.magnitude == chk.max_magnitude) {
            worst_violation = v;
            break;
          }
        }
      }
    }
  }
  if (violating == 0) {
    os << "cross transition terms vanish at every recorded state\n\n";
    return;
  }
  os << "cross transition terms |c_m||c_j||<m|Hk|j>| are nonzero at "
     << violating << " of " << traj.size() << " recorded states\n";
  os << "worst magnitude " << fmt6(worst) << " at t = " << fmt6(worst_time)
     << " (control " << worst_violation.control + 1 << ", levels "
     << worst_violation.m + 1 << " <-> " << worst_violation.j + 1 << ")\n";
  os << "the invariant set therefore contains states outside the target "
        "equivalence class\n\n";
}

void report_simulation(std::ostringstream& os, const ExperimentConfig& cfg,
                       const ExperimentResult& res) {
  os << "simulation\n----------\n";
  if (!res.ran_simulation) {
    os << "status: skipped (assumption checks failed; rerun with "
          "--override-assumptions to simulate anyway)\n";
    return;
  }
  const Trajectory& traj = res.trajectory;
  if (traj.aborted) {
    os << "status: ABORTED (" << traj.abort_reason << ")\n";
  } else {
    os << "status: completed\n";
  }
  os << "time step " << fmt6(cfg.sim.dt) << ", horizon "
     << fmt6(cfg.sim.t_final) << ", recorded " << traj.size()
     << " states (stride " << cfg.sim.record_stride << ")\n";
  os << "V(0) = " << fmt6(res.v_initial) << "\n";
  os << "V(T) = " << fmt6(res.v_final);
  if (res.v_initial > 0.0) {
    os << "  (ratio " << fmt6(res.v_final / res.v_initial) << ")";
  }
  os << "\n";
  const double fid = traj.fidelity.back();
  os << "final fidelity = " << fmt6(fid) << "  (fidelity^2 = "
     << fmt6(fid * fid) << ")\n";
  os << "max |u| = " << fmt6(traj.max_abs_control) << "\n";
  os << "max norm drift = " << fmt6(traj.max_norm_drift) << "\n";
  os << "largest control part of dV/dt = " << fmt6(traj.max_control_rate)
     << " (dissipative when <= 0)\n\n";

  os << "limit classification\n--------------------\n";
  os << "dominant drift eigenstate: level " << res.limit.dominant_index + 1
     << " (population " << fmt6(res.limit.overlaps(res.limit.dominant_index))
     << ")\n";
  os << "target fidelity: " << fmt6(res.limit.target_fidelity) << "\n";
  os << "populations by level:";
  for (Eigen::Index i = 0; i < res.limit.overlaps.size(); ++i) {
    os << "  " << i + 1 << ": " << fmt6(res.limit.overlaps(i));
  }
  os << "\n";
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string render_trajectory_csv(const Trajectory& traj) {
  if (traj.size() == 0) {
    throw ValidationError("cannot render an empty trajectory");
  }
  const Eigen::Index n = traj.states.front().size();
  const Eigen::Index r = traj.controls.front().size();

  std::ostringstream os;
  os << "time";
  for (Eigen::Index i = 0; i < n; ++i) {
    os << ",re_c" << i + 1 << ",im_c" << i + 1;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    os << ",pop_" << i + 1;
  }
  for (Eigen::Index k = 0; k < r; ++k) {
    os << ",u_" << k + 1;
  }
  os << ",lyapunov,fidelity\n";

  for (std::size_t row = 0; row < traj.size(); ++row) {
    os << format_shortest(traj.times[row]);
    const Vector& psi = traj.states[row];
    for (Eigen::Index i = 0; i < n; ++i) {
      os << "," << format_shortest(psi(i).real()) << ","
         << format_shortest(psi(i).imag());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      os << "," << format_shortest(std::norm(psi(i)));
    }
    for (Eigen::Index k = 0; k < r; ++k) {
      os << "," << format_shortest(traj.controls[row](k));
    }
    os << "," << format_shortest(traj.lyapunov[row]) << ","
       << format_shortest(traj.fidelity[row]) << "\n";
  }
  return os.str();
}

CheckSummary check_experiment(const ExperimentConfig& cfg) {
  CheckSummary out;
  out.assumptions = check_all_assumptions(cfg.system, cfg.target);
  const ControllerConfig ctrl = cfg.make_controller();
  const HermitianOperator weight(ctrl.weight());
  out.case_info = classify_case(weight, cfg.system);
  if (out.assumptions.gaps.degenerate_pairs.empty()) {
    out.offdiagonal = check_offdiagonal_condition(weight, cfg.system);
  }

  std::ostringstream os;
  report_header(os, cfg);
  report_assumptions(os, out.assumptions);
  report_weight(os, out.case_info, out.offdiagonal);
  os << "verdict: " << (out.ok() ? "ready to simulate" : "NOT SATISFIED")
     << "\n";
  out.text = os.str();
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir,
                                bool override_assumptions) {
  std::filesystem::create_directories(out_dir);

  ExperimentResult res;
  res.assumptions = check_all_assumptions(cfg.system, cfg.target);
  res.assumptions_ok = res.assumptions.all_ok();

  const ControllerConfig ctrl = cfg.make_controller();
  res.case_info = classify_case(HermitianOperator(ctrl.weight()), cfg.system);
  if (res.assumptions.gaps.degenerate_pairs.empty()) {
    res.offdiagonal = check_offdiagonal_condition(
        HermitianOperator(ctrl.weight()), cfg.system);
  }

  if (res.assumptions_ok || override_assumptions) {
    res.trajectory =
        simulate(cfg.system, ctrl, cfg.sim, cfg.initial, false);
    res.ran_simulation = true;
    res.v_initial = lyapunov_value(ctrl, cfg.initial);
    res.v_final = res.trajectory.lyapunov.back();
    res.limit = classify_limit(res.trajectory, cfg.system, cfg.target);

    write_text_file(join_path(out_dir, cfg.outputs.trajectory_csv),
                    render_trajectory_csv(res.trajectory), &res.written);
    emit_plots(cfg, res.trajectory, out_dir, &res.written);
  }

  std::ostringstream report;
  report_header(report, cfg);
  report_assumptions(report, res.assumptions);
  report_weight(report, res.case_info, res.offdiagonal);
  if (res.ran_simulation && res.case_info.kind == CaseKind::commuting) {
    report_structural(report, cfg, ctrl, res.trajectory);
  }
  report_simulation(report, cfg, res);
  write_text_file(join_path(out_dir, cfg.outputs.report_txt), report.str(),
                  &res.written);
  return res;
}

ComparisonResult compare_modes(const ExperimentConfig& cfg,
                               const std::string& out_dir,
                               bool override_assumptions) {
  std::filesystem::create_directories(out_dir);

  const AssumptionReport rep = check_all_assumptions(cfg.system, cfg.target);
  if (!rep.all_ok() && !override_assumptions) {
    throw ValidationError(
        "assumption checks failed; rerun with --override-assumptions to "
        "compare anyway");
  }

  const HermitianOperator p = build_p(cfg.system, cfg.p_spec);
  const ControlMode modes[] = {ControlMode::full,
                               ControlMode::drop_target_term,
                               ControlMode::identity_p_half};

  ComparisonResult out;
  std::vector<SvgSeries> fidelity_curves;
  std::ostringstream csv;
  csv << "mode,final_fidelity,min_lyapunov,max_abs_control\n";

  for (ControlMode mode : modes) {
    const ControllerConfig ctrl(p, cfg.target, cfg.gains, cfg.odd, mode);
    const Trajectory traj =
        simulate(cfg.system, ctrl, cfg.sim, cfg.initial, false);

    ComparisonRow row;
    row.mode = mode;
    row.final_fidelity = traj.fidelity.back();
    row.min_lyapunov =
        *std::min_element(traj.lyapunov.begin(), traj.lyapunov.end());
    row.max_abs_control = traj.max_abs_control;
    row.aborted = traj.aborted;
    out.rows.push_back(row);

    csv << to_string(mode) << "," << format_shortest(row.final_fidelity)
        << "," << format_shortest(row.min_lyapunov) << ","
        << format_shortest(row.max_abs_control) << "\n";

    fidelity_curves.push_back(
        series_of(to_string(mode), traj.times, traj.fidelity));
  }

  write_text_file(join_path(out_dir, cfg.outputs.comparison_csv), csv.str(),
                  &out.written);
  write_text_file(join_path(out_dir, cfg.outputs.comparison_svg),
                  render_line_chart("fidelity by controller mode", "time",
                                    "fidelity", fidelity_curves),
                  &out.written);
  return out;
}

}  // namespace qlyap
