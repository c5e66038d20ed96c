#include "qlyap/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace qlyap {

namespace {

// exp(-i H dt / hbar) psi without forming the exponential.
Vector evolve(const Matrix& h, const Vector& psi, double dt, double hbar) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed while propagating a step");
  }
  const Eigen::VectorXd& lam = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  Vector coeffs = v.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::polar(1.0, -lam[i] * dt / hbar);
  }
  return v * coeffs;
}

void validate_sim(const SimulationConfig& sim) {
  if (!(sim.dt > 0.0) || !std::isfinite(sim.dt)) {
    throw ValidationError("dt must be positive and finite");
  }
  if (!(sim.t_final >= 0.0) || !std::isfinite(sim.t_final)) {
    throw ValidationError("t_final must be nonnegative and finite");
  }
  if (sim.record_stride < 1) {
    throw ValidationError("record_stride must be at least 1");
  }
}

std::string describe_failures(const AssumptionReport& rep) {
  std::ostringstream os;
  os << "system fails structural assumptions:";
  if (!rep.gaps.ok) os << " [transition frequencies not distinct]";
  if (!rep.lie.ok)
    os << " [Lie rank " << rep.lie.rank << " < " << rep.lie.required << "]";
  if (!rep.target.ok) os << " [target not a usable eigenstate]";
  if (!rep.common.ok) os << " [controls share an eigenvector]";
  os << " (pass enforce_assumptions=false or --override-assumptions to run anyway)";
  return os.str();
}

}  // namespace

QuantumState propagate_step(const ControlledSystem& sys,
                            const QuantumState& psi, const Eigen::VectorXd& u,
                            double dt) {
  const HermitianOperator h = hamiltonian_at(sys, u);
  return QuantumState(evolve(h.mat(), psi.vec(), dt, sys.hbar()));
}

Trajectory simulate(const ControlledSystem& sys, const ControllerConfig& cfg,
                    const SimulationConfig& sim, const QuantumState& psi0,
                    bool enforce_assumptions) {
  validate_sim(sim);
  if (psi0.dim() != sys.dim()) {
    throw ValidationError("initial state dimension does not match the system");
  }
  if (enforce_assumptions) {
    const AssumptionReport rep = check_all_assumptions(sys, cfg.target());
    if (!rep.all_ok()) {
      throw ValidationError(describe_failures(rep));
    }
  }

  const long n_full = static_cast<long>(
      std::floor(sim.t_final / sim.dt + 1e-9));
  double rem = sim.t_final - static_cast<double>(n_full) * sim.dt;
  if (rem <= 1e-12 * std::max(1.0, sim.t_final)) {
    rem = 0.0;
  }

  Trajectory traj;
  Vector psi = psi0.vec();

  auto record = [&](double t, const Vector& state, const Eigen::VectorXd& u,
                    double v, double fid, double control_rate) {
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.controls.push_back(u);
    traj.lyapunov.push_back(v);
    traj.fidelity.push_back(fid);
    traj.rate_control_part.push_back(control_rate);
  };

  const long last = n_full + (rem > 0.0 ? 1 : 0);
  for (long i = 0; i <= last; ++i) {
    const double t =
        (i <= n_full) ? static_cast<double>(i) * sim.dt : sim.t_final;

    QuantumState state(psi);
    const Eigen::VectorXd u = control_law(cfg, sys, state);
    if (!u.allFinite()) {
      traj.aborted = true;
      traj.abort_reason = "control signal went non-finite at t = " +
                          std::to_string(t);
      break;
    }
    const LyapunovRate rate = lyapunov_derivative(cfg, sys, state, u);
    traj.max_control_rate = std::max(traj.max_control_rate, rate.control);
    if (u.size() > 0) {
      traj.max_abs_control =
          std::max(traj.max_abs_control, u.cwiseAbs().maxCoeff());
    }

    if (i % sim.record_stride == 0 || i == last) {
      record(t, psi, u, lyapunov_value(cfg, state),
             fidelity(state, cfg.target()), rate.control);
    }
    if (i == last) {
      break;
    }

    const double step_dt = (i < n_full) ? sim.dt : rem;
    const HermitianOperator h = hamiltonian_at(sys, u);
    psi = evolve(h.mat(), psi, step_dt, sys.hbar());
    if (!psi.allFinite()) {
      traj.aborted = true;
      traj.abort_reason =
          "state went non-finite during the step after t = " +
          std::to_string(t);
      break;
    }
    const double norm = psi.norm();
    traj.max_norm_drift =
        std::max(traj.max_norm_drift, std::abs(norm - 1.0));
    if (sim.renormalize) {
      psi /= norm;
    }
  }
  return traj;
}

StepDoublingResult step_doubling_check(const ControlledSystem& sys,
                                       const ControllerConfig& cfg,
                                       const SimulationConfig& sim,
                                       const QuantumState& psi0) {
  SimulationConfig half = sim;
  half.dt = 0.5 * sim.dt;
  half.record_stride = 2 * sim.record_stride;

  const Trajectory coarse = simulate(sys, cfg, sim, psi0, false);
  const Trajectory fine = simulate(sys, cfg, half, psi0, false);

  StepDoublingResult out;
  const std::size_t m = std::min(coarse.size(), fine.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(coarse.times[i] - fine.times[i]) > 1e-9) {
      continue;  // partial-step tails may not line up; skip those records
    }
    const double diff = (coarse.states[i] - fine.states[i]).norm();
    if (diff > out.max_state_diff) {
      out.max_state_diff = diff;
      out.time_of_max = coarse.times[i];
    }
  }
  return out;
}

}  // namespace qlyap
