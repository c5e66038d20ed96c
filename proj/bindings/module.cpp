#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "qlyap/config.hpp"
#include "qlyap/experiment.hpp"
#include "qlyap/invariant.hpp"
#include "qlyap/p_design.hpp"
#include "qlyap/simulate.hpp"

namespace py = pybind11;
using namespace qlyap;

namespace {

std::vector<OddFunction> parse_odd(const py::object& spec, std::size_t r) {
  if (spec.is_none()) {
    return std::vector<OddFunction>(r, OddFunction::identity());
  }
  std::vector<OddFunction> out;
  for (const auto& item : spec.cast<py::list>()) {
    std::string kind;
    double param = 1.0;
    if (py::isinstance<py::str>(item)) {
      kind = item.cast<std::string>();
    } else {
      const auto pair = item.cast<py::tuple>();
      kind = pair[0].cast<std::string>();
      param = pair[1].cast<double>();
    }
    if (kind == "identity") {
      out.push_back(OddFunction::identity());
    } else if (kind == "tanh-scaled") {
      out.push_back(OddFunction::tanh_scaled(param));
    } else if (kind == "saturated-linear") {
      out.push_back(OddFunction::saturated_linear(param));
    } else {
      throw ValidationError("unknown odd function kind: " + kind);
    }
  }
  return out;
}

ControlMode parse_mode(const std::string& mode) {
  const auto parsed = control_mode_from_string(mode);
  if (!parsed) {
    throw ValidationError("unknown controller mode: " + mode);
  }
  return *parsed;
}

py::dict gap_dict(const GapCheck& g) {
  py::dict d;
  d["ok"] = g.ok;
  d["min_eigenvalue_gap"] = g.min_eigenvalue_gap;
  d["min_gap_separation"] = g.min_gap_separation;
  return d;
}

py::dict assumptions_dict(const AssumptionReport& rep) {
  py::dict d;
  d["ok"] = rep.all_ok();
  d["gaps"] = gap_dict(rep.gaps);
  py::dict lie;
  lie["ok"] = rep.lie.ok;
  lie["rank"] = rep.lie.rank;
  lie["required"] = rep.lie.required;
  d["lie"] = lie;
  py::dict target;
  target["ok"] = rep.target.ok;
  target["h0_residual"] = rep.target.h0_residual;
  target["lambda_f"] = rep.target.lambda_f;
  target["control_residuals"] = rep.target.control_residuals;
  d["target"] = target;
  py::dict common;
  common["ok"] = rep.common.ok;
  common["vacuous"] = rep.common.vacuous;
  common["worst_margin"] = rep.common.worst_margin;
  d["common"] = common;
  return d;
}

py::dict trajectory_dict(const Trajectory& traj) {
  const auto rows = static_cast<Eigen::Index>(traj.size());
  const Eigen::Index n = rows ? traj.states.front().size() : 0;
  const Eigen::Index r = rows ? traj.controls.front().size() : 0;

  Eigen::VectorXd times(rows), lyap(rows), fid(rows), rate(rows);
  Matrix states(rows, n);
  Eigen::MatrixXd controls(rows, r);
  for (Eigen::Index i = 0; i < rows; ++i) {
    times(i) = traj.times[i];
    lyap(i) = traj.lyapunov[i];
    fid(i) = traj.fidelity[i];
    rate(i) = traj.rate_control_part[i];
    states.row(i) = traj.states[i].transpose();
    controls.row(i) = traj.controls[i].transpose();
  }

  py::dict d;
  d["times"] = times;
  d["states"] = states;
  d["controls"] = controls;
  d["lyapunov"] = lyap;
  d["fidelity"] = fid;
  d["rate_control_part"] = rate;
  d["max_control_rate"] = traj.max_control_rate;
  d["max_abs_control"] = traj.max_abs_control;
  d["max_norm_drift"] = traj.max_norm_drift;
  d["aborted"] = traj.aborted;
  d["abort_reason"] = traj.abort_reason;
  return d;
}

ExperimentConfig load_config_or_throw(const std::string& path) {
  ParseResult parsed = load_config_file(path);
  if (!parsed.config) {
    std::string msg = "invalid config " + path + ":";
    for (const auto& e : parsed.errors) {
      msg += "\n  - " + e;
    }
    throw ValidationError(msg);
  }
  return *parsed.config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Lyapunov feedback control for closed quantum systems: system and "
      "controller construction, closed-loop simulation, structural checks "
      "and weight-operator design";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError",
                                          PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError",
                                       PyExc_ArithmeticError);

  py::class_<ControlledSystem>(m, "System",
                               "Drift plus control Hamiltonians; dynamics "
                               "i hbar dpsi/dt = (H0 + sum_k u_k Hk) psi")
      .def(py::init([](const Matrix& h0, const std::vector<Matrix>& controls,
                       double hbar) {
             std::vector<HermitianOperator> hk;
             hk.reserve(controls.size());
             for (const auto& c : controls) {
               hk.emplace_back(c);
             }
             return ControlledSystem(HermitianOperator(h0), std::move(hk),
                                     hbar);
           }),
           py::arg("h0"), py::arg("controls"), py::arg("hbar") = 1.0)
      .def_property_readonly("dim", &ControlledSystem::dim)
      .def_property_readonly("num_controls", &ControlledSystem::num_controls)
      .def_property_readonly("hbar", &ControlledSystem::hbar)
      .def("h0", [](const ControlledSystem& s) { return s.h0().mat(); })
      .def("control",
           [](const ControlledSystem& s, int k) { return s.control(k).mat(); },
           py::arg("k"));

  py::class_<ControllerConfig>(m, "Controller",
                               "Weight operator, target state, gains and "
                               "odd shaping functions for the feedback law")
      .def(py::init([](const Matrix& p, const Vector& target,
                       const std::vector<double>& gains,
                       const std::string& mode, const py::object& odd) {
             return ControllerConfig(HermitianOperator(p),
                                     QuantumState(target), gains,
                                     parse_odd(odd, gains.size()),
                                     parse_mode(mode));
           }),
           py::arg("p"), py::arg("target"), py::arg("gains"),
           py::arg("mode") = "full", py::arg("odd") = py::none())
      .def_property_readonly(
          "mode",
          [](const ControllerConfig& c) { return to_string(c.mode()); })
      .def("p", [](const ControllerConfig& c) { return c.p().mat(); })
      .def("weight", [](const ControllerConfig& c) { return c.weight(); })
      .def("target",
           [](const ControllerConfig& c) { return c.target().vec(); });

  m.def(
      "check_assumptions",
      [](const ControlledSystem& sys, const Vector& target) {
        return assumptions_dict(
            check_all_assumptions(sys, QuantumState(target)));
      },
      py::arg("system"), py::arg("target"),
      "Gap, controllability, target and common-eigenvector checks");

  m.def(
      "lyapunov_value",
      [](const ControllerConfig& cfg, const Vector& psi) {
        return lyapunov_value(cfg, QuantumState(psi));
      },
      py::arg("controller"), py::arg("psi"));

  m.def(
      "equivalence_class_min_value",
      [](const ControllerConfig& cfg, const Vector& psi) {
        return equivalence_class_min_value(cfg, QuantumState(psi));
      },
      py::arg("controller"), py::arg("psi"),
      "min over a global phase of the Lyapunov distance to the target ray");

  m.def(
      "control_terms",
      [](const ControllerConfig& cfg, const ControlledSystem& sys,
         const Vector& psi) {
        return control_terms(cfg, sys, QuantumState(psi));
      },
      py::arg("controller"), py::arg("system"), py::arg("psi"));

  m.def(
      "control_law",
      [](const ControllerConfig& cfg, const ControlledSystem& sys,
         const Vector& psi) {
        return control_law(cfg, sys, QuantumState(psi));
      },
      py::arg("controller"), py::arg("system"), py::arg("psi"));

  m.def(
      "lyapunov_derivative",
      [](const ControllerConfig& cfg, const ControlledSystem& sys,
         const Vector& psi, const Eigen::VectorXd& u) {
        const LyapunovRate rate =
            lyapunov_derivative(cfg, sys, QuantumState(psi), u);
        py::dict d;
        d["total"] = rate.total;
        d["drift"] = rate.drift;
        d["control"] = rate.control;
        return d;
      },
      py::arg("controller"), py::arg("system"), py::arg("psi"), py::arg("u"));

  m.def(
      "simulate",
      [](const ControlledSystem& sys, const ControllerConfig& cfg,
         const Vector& psi0, double dt, double t_final, int record_stride,
         bool renormalize, bool enforce_assumptions) {
        SimulationConfig sim;
        sim.dt = dt;
        sim.t_final = t_final;
        sim.record_stride = record_stride;
        sim.renormalize = renormalize;
        return trajectory_dict(simulate(sys, cfg, sim, QuantumState(psi0),
                                        enforce_assumptions));
      },
      py::arg("system"), py::arg("controller"), py::arg("psi0"),
      py::arg("dt"), py::arg("t_final"), py::arg("record_stride") = 1,
      py::arg("renormalize") = true, py::arg("enforce_assumptions") = true,
      "Closed-loop run; returns a dict of numpy series");

  m.def(
      "step_doubling_check",
      [](const ControlledSystem& sys, const ControllerConfig& cfg,
         const Vector& psi0, double dt, double t_final, int record_stride) {
        SimulationConfig sim;
        sim.dt = dt;
        sim.t_final = t_final;
        sim.record_stride = record_stride;
        const StepDoublingResult r =
            step_doubling_check(sys, cfg, sim, QuantumState(psi0));
        py::dict d;
        d["max_state_diff"] = r.max_state_diff;
        d["time_of_max"] = r.time_of_max;
        return d;
      },
      py::arg("system"), py::arg("controller"), py::arg("psi0"),
      py::arg("dt"), py::arg("t_final"), py::arg("record_stride") = 1);

  m.def(
      "build_commuting_p",
      [](const ControlledSystem& sys, const Eigen::VectorXd& eigenvalues) {
        return build_commuting_p(sys, eigenvalues).mat();
      },
      py::arg("system"), py::arg("eigenvalues"));

  m.def(
      "build_spectral_p",
      [](const Matrix& vectors, const Eigen::VectorXd& eigenvalues) {
        const SpectralSynthesis s = build_spectral_p(vectors, eigenvalues);
        return py::make_tuple(s.p.mat(), s.orthonormal_basis);
      },
      py::arg("vectors"), py::arg("eigenvalues"),
      "vectors are columns; returns (p, orthonormal_basis)");

  m.def(
      "generate_random_p",
      [](const ControlledSystem& sys, std::uint64_t seed, double min_offdiag,
         double min_eigenvalue) {
        return generate_random_p(sys, seed, min_offdiag, min_eigenvalue)
            .mat();
      },
      py::arg("system"), py::arg("seed") = 1, py::arg("min_offdiag") = 0.1,
      py::arg("min_eigenvalue") = 0.1);

  m.def(
      "check_offdiagonal",
      [](const Matrix& p, const ControlledSystem& sys, double tol) {
        const OffdiagonalCheck chk =
            check_offdiagonal_condition(HermitianOperator(p), sys, tol);
        py::dict d;
        d["ok"] = chk.ok;
        d["min_offdiagonal"] = chk.min_offdiagonal;
        d["threshold"] = chk.threshold;
        d["row"] = chk.row;
        d["col"] = chk.col;
        return d;
      },
      py::arg("p"), py::arg("system"), py::arg("tol") = -1.0);

  m.def(
      "classify_case",
      [](const Matrix& p, const ControlledSystem& sys, double tol) {
        const CaseClassification cls =
            classify_case(HermitianOperator(p), sys, tol);
        py::dict d;
        d["commuting"] = cls.kind == CaseKind::commuting;
        d["commutator_norm"] = cls.commutator_norm;
        return d;
      },
      py::arg("p"), py::arg("system"), py::arg("tol") = 1e-10);

  m.def(
      "drift_sampling_oracle",
      [](const ControllerConfig& cfg, const ControlledSystem& sys,
         const Vector& psi, int samples) {
        const DriftSamplingResult r =
            drift_sampling_oracle(cfg, sys, QuantumState(psi), samples);
        py::dict d;
        d["max_residual"] = r.max_residual;
        d["time_of_max"] = r.time_of_max;
        d["period"] = r.period;
        return d;
      },
      py::arg("controller"), py::arg("system"), py::arg("psi"),
      py::arg("samples") = 256,
      "max |<psi(t)|[H0,W]|psi(t)>| under the drift over one slow period");

  m.def("load_config", &load_config_or_throw, py::arg("path"),
        "Parse a JSON experiment config; raises ValidationError listing "
        "every problem");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_property_readonly(
          "dim", [](const ExperimentConfig& c) { return c.system.dim(); })
      .def_property_readonly(
          "mode",
          [](const ExperimentConfig& c) { return to_string(c.mode); })
      .def_property_readonly(
          "notes", [](const ExperimentConfig& c) { return c.notes; })
      .def("serialize",
           [](const ExperimentConfig& c) { return serialize_config(c); });

  m.def(
      "run_experiment",
      [](const ExperimentConfig& cfg, const std::string& out_dir,
         bool override_assumptions) {
        const ExperimentResult res =
            run_experiment(cfg, out_dir, override_assumptions);
        py::dict d;
        d["assumptions_ok"] = res.assumptions_ok;
        d["ran_simulation"] = res.ran_simulation;
        d["commuting_case"] = res.case_info.kind == CaseKind::commuting;
        d["offdiagonal_ok"] = res.offdiagonal.ok;
        d["v_initial"] = res.v_initial;
        d["v_final"] = res.v_final;
        if (res.ran_simulation) {
          d["final_fidelity"] = res.trajectory.fidelity.back();
          d["dominant_level"] = res.limit.dominant_index + 1;
          d["aborted"] = res.trajectory.aborted;
        }
        d["written"] = res.written;
        return d;
      },
      py::arg("config"), py::arg("out_dir"),
      py::arg("override_assumptions") = false,
      "Full pipeline: checks, simulation, CSV + SVG + report artifacts");

  m.def(
      "compare_modes",
      [](const ExperimentConfig& cfg, const std::string& out_dir,
         bool override_assumptions) {
        const ComparisonResult res =
            compare_modes(cfg, out_dir, override_assumptions);
        py::list rows;
        for (const auto& row : res.rows) {
          py::dict d;
          d["mode"] = to_string(row.mode);
          d["final_fidelity"] = row.final_fidelity;
          d["min_lyapunov"] = row.min_lyapunov;
          d["max_abs_control"] = row.max_abs_control;
          d["aborted"] = row.aborted;
          rows.append(d);
        }
        return rows;
      },
      py::arg("config"), py::arg("out_dir"),
      py::arg("override_assumptions") = false);
}
