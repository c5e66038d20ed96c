#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qlyap/invariant.hpp"
#include "qlyap/p_design.hpp"

using namespace qlyap;
using namespace testutil;

namespace {

ControllerConfig commuting_five_level_controller() {
  const ControlledSystem sys = five_level_system();
  Eigen::VectorXd vals(5);
  vals << 1, 2, 3, 4, 5;
  return ControllerConfig(build_commuting_p(sys, vals),
                          QuantumState(basis_state(4, 5)), {0.05},
                          {OddFunction::identity()});
}

// 3-level instance whose drift eigenbasis is the standard basis, so the
// eigenbasis expansion below can be written down directly
ControlledSystem toy_three_level() {
  Matrix h0 = Matrix::Zero(3, 3);
  h0(0, 0) = 1.0;
  h0(1, 1) = 2.0;
  h0(2, 2) = 3.5;
  Matrix h1 = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) {
        h1(i, j) = 1.0;
      }
    }
  }
  return ControlledSystem(HermitianOperator(h0), {HermitianOperator(h1)});
}

}  // namespace

TEST_CASE("case classification separates commuting from noncommuting weights") {
  const ControlledSystem sys = five_level_system();

  const CaseClassification nc =
      classify_case(HermitianOperator(five_level_p()), sys);
  CHECK(nc.kind == CaseKind::noncommuting);
  // largest |[H0, P]| entry is (lambda_3 - lambda_5) P_35 = -0.8 * 2.8
  CHECK(nc.commutator_norm == doctest::Approx(2.24).epsilon(1e-12));

  Eigen::VectorXd vals(5);
  vals << 1, 2, 3, 4, 5;
  const CaseClassification c = classify_case(build_commuting_p(sys, vals), sys);
  CHECK(c.kind == CaseKind::commuting);
  CHECK(c.commutator_norm < 1e-10);

  CHECK_THROWS_AS(
      classify_case(HermitianOperator(Matrix::Identity(4, 4)), sys),
      ValidationError);
}

TEST_CASE("commuting-case residuals vanish on the target ray") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = commuting_five_level_controller();

  const Case1Residuals at_target =
      case1_residuals(cfg.target(), cfg, sys);
  CHECK(at_target.commutator_terms.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(at_target.target_imag_terms.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(at_target.overlap_imag < 1e-12);
  CHECK(at_target.overlap_magnitude == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(at_target.zero_overlap_branch);

  // rotating by i moves the overlap onto the imaginary axis
  const QuantumState rotated(Complex(0.0, 1.0) * basis_state(4, 5));
  const Case1Residuals at_rotated = case1_residuals(rotated, cfg, sys);
  CHECK(at_rotated.overlap_imag == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_rotated.commutator_terms.cwiseAbs().maxCoeff() < 1e-12);
  // <i e5|H1|e5> = -i (H1)_55 = 0, so the target term stays zero here
  CHECK(at_rotated.target_imag_terms.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("commuting-case residuals refuse a noncommuting weight") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();
  CHECK_THROWS_AS(
      case1_residuals(QuantumState(basis_state(0, 5)), cfg, sys),
      ValidationError);
}

TEST_CASE("commuting-case residual equals the eigenbasis double sum") {
  const ControlledSystem sys = toy_three_level();
  Eigen::VectorXd pvals(3);
  pvals << 1, 2, 3;
  const ControllerConfig cfg(build_commuting_p(sys, pvals),
                             QuantumState(basis_state(2, 3)), {1.0},
                             {OddFunction::identity()});
  const Eigen::Vector3d lambda(1.0, 2.0, 3.5);

  Vector c0 = Vector::Zero(3);
  c0(0) = 1.0 / std::sqrt(2.0);
  c0(1) = 1.0 / std::sqrt(2.0);

  for (int s = 0; s < 50; ++s) {
    const double t = 2.0 * M_PI * s / 50.0;
    Vector c(3);
    for (int m = 0; m < 3; ++m) {
      c(m) = c0(m) * std::polar(1.0, -lambda(m) * t);
    }
    const QuantumState psi(c);
    const double residual =
        case1_residuals(psi, cfg, sys).commutator_terms(0);

    Complex sum(0.0, 0.0);
    for (int m = 0; m < 3; ++m) {
      for (int j = 0; j < 3; ++j) {
        if (m == j) {
          continue;
        }
        // <m|H1|j> = 1 off the diagonal for this coupling
        sum += std::conj(c0(m)) * c0(j) * (pvals(j) - pvals(m)) *
               std::polar(1.0, (lambda(m) - lambda(j)) * t);
      }
    }
    CHECK(residual == doctest::Approx(std::abs(sum)).epsilon(1e-10));
  }
}

TEST_CASE("commuting-case residual double sum on random instances") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + static_cast<int>(uniform01(rng) * 2);  // 3..4
    const Matrix h0 = random_nondegenerate_diag(n, rng);
    const Matrix h1 = random_hermitian(n, rng);
    const ControlledSystem sys(HermitianOperator(h0), {HermitianOperator(h1)});

    Eigen::VectorXd pvals(n);
    for (int i = 0; i < n; ++i) {
      pvals(i) = 0.5 + uniform01(rng);
    }
    const ControllerConfig cfg(build_commuting_p(sys, pvals),
                               QuantumState(basis_state(n - 1, n)), {1.0},
                               {OddFunction::identity()});

    // h0 is diagonal with ascending entries, so eigen-coefficients are the
    // vector components themselves (up to a sign that cancels in the sum)
    const Vector c0 = random_unit_state(n, rng);
    for (int s = 0; s < 50; ++s) {
      const double t = 0.37 * s;
      Vector c(n);
      for (int m = 0; m < n; ++m) {
        c(m) = c0(m) * std::polar(1.0, -h0(m, m).real() * t);
      }
      const double residual =
          case1_residuals(QuantumState(c), cfg, sys).commutator_terms(0);

      Complex sum(0.0, 0.0);
      for (int m = 0; m < n; ++m) {
        for (int j = 0; j < n; ++j) {
          if (m == j) {
            continue;
          }
          sum += std::conj(c(m)) * c(j) * (pvals(j) - pvals(m)) * h1(m, j);
        }
      }
      CHECK(residual == doctest::Approx(std::abs(sum)).epsilon(1e-10));
    }
  }
}

TEST_CASE("cross-transition condition flags coupled superpositions") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = commuting_five_level_controller();

  const StructuralCheck at_basis = case1_structural_condition(
      cfg, sys, QuantumState(basis_state(0, 5)));
  CHECK(at_basis.ok);
  CHECK(at_basis.max_magnitude < 1e-12);

  // levels 1 and 4 are coupled by H1, so an equal superposition leaves a
  // cross term |c_1||c_4||<1|H1|4>| = (1/sqrt 2)(1/sqrt 2)(1) = 0.5
  Vector mixed = (basis_state(0, 5) + basis_state(3, 5)) / std::sqrt(2.0);
  const StructuralCheck coupled =
      case1_structural_condition(cfg, sys, QuantumState(mixed));
  CHECK_FALSE(coupled.ok);
  CHECK(coupled.max_magnitude == doctest::Approx(0.5).epsilon(1e-10));
  REQUIRE(coupled.violations.size() == 2);  // (m,j) and (j,m)
  CHECK(coupled.violations[0].control == 0);
  CHECK(coupled.violations[0].m == 0);
  CHECK(coupled.violations[0].j == 3);
  CHECK(coupled.violations[0].magnitude == doctest::Approx(0.5).epsilon(1e-10));

  // levels 1 and 2 are NOT coupled by H1; their superposition is fine
  Vector uncoupled = (basis_state(0, 5) + basis_state(1, 5)) / std::sqrt(2.0);
  CHECK(case1_structural_condition(cfg, sys, QuantumState(uncoupled)).ok);
}

TEST_CASE("noncommuting-case residuals at stationary-looking states") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();

  const Case2Residuals at_target = case2_residuals(cfg.target(), cfg, sys);
  CHECK(at_target.drift_commutator < 1e-12);
  CHECK(at_target.control_commutators.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(at_target.drift_target_imag < 1e-12);
  CHECK(at_target.control_target_imag.cwiseAbs().maxCoeff() < 1e-12);

  // the initial level also zeroes every residual at t = 0; invariance is a
  // statement about the whole drift orbit, not one snapshot
  const Case2Residuals at_start =
      case2_residuals(QuantumState(basis_state(0, 5)), cfg, sys);
  CHECK(at_start.drift_commutator < 1e-12);
  CHECK(at_start.control_commutators.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(at_start.control_target_imag.cwiseAbs().maxCoeff() < 1e-12);

  // a moment later the drift phase exposes the target term:
  // |Im e^{i t} <e1|H1 P|e5>| = 2 |sin t|
  const double t = 0.6;
  const QuantumState drifted(std::polar(1.0, -1.0 * t) * basis_state(0, 5));
  const Case2Residuals later = case2_residuals(drifted, cfg, sys);
  CHECK(later.control_target_imag(0) ==
        doctest::Approx(2.0 * std::abs(std::sin(t))).epsilon(1e-12));
}

TEST_CASE("noncommuting-case drift residual follows the two-level beat") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();

  // drift evolution of (e1 + e2)/sqrt(2): coefficient phases e^{-i lambda t};
  // |<psi|[H0,P]|psi>| = 2 |lambda_1 - lambda_2| |P_12| |sin((lambda_2 -
  // lambda_1) t)| / 2 = 0.16 |sin(0.2 t)|
  for (double t : {0.0, 1.0, 3.0, M_PI / 0.4, 10.0}) {
    Vector c = Vector::Zero(5);
    c(0) = std::polar(1.0 / std::sqrt(2.0), -1.0 * t);
    c(1) = std::polar(1.0 / std::sqrt(2.0), -1.2 * t);
    const Case2Residuals r = case2_residuals(QuantumState(c), cfg, sys);
    CHECK(r.drift_commutator ==
          doctest::Approx(0.16 * std::abs(std::sin(0.2 * t))).epsilon(1e-12));
  }
}

TEST_CASE("drift sampling oracle separates eigenstates from superpositions") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();

  for (int i = 0; i < 5; ++i) {
    const DriftSamplingResult r =
        drift_sampling_oracle(cfg, sys, QuantumState(basis_state(i, 5)));
    CHECK(r.max_residual < 1e-10);
  }

  // (e1 + e5)/sqrt(2): residual 0.345 |sin(1.15 t)|, so the sampled max
  // lands just under 0.345
  Vector mix = (basis_state(0, 5) + basis_state(4, 5)) / std::sqrt(2.0);
  const DriftSamplingResult two =
      drift_sampling_oracle(cfg, sys, QuantumState(mix));
  CHECK(two.max_residual > 0.34);
  CHECK(two.max_residual < 0.3451);

  const QuantumState uniform(Vector::Ones(5) / std::sqrt(5.0));
  const DriftSamplingResult all = drift_sampling_oracle(cfg, sys, uniform);
  CHECK(all.max_residual > 1e-3);

  // one full period of the slowest transition (min gap 0.1)
  CHECK(two.period == doctest::Approx(2.0 * M_PI / 0.1).epsilon(1e-12));
  CHECK(two.samples == 256);

  // global phase does not matter
  const QuantumState rotated(std::polar(1.0, 1.1) * mix);
  const DriftSamplingResult rot =
      drift_sampling_oracle(cfg, sys, rotated);
  CHECK(std::abs(rot.max_residual - two.max_residual) < 1e-12);

  CHECK_THROWS_AS(drift_sampling_oracle(cfg, sys, uniform, 1),
                  ValidationError);
}

TEST_CASE("limit classification reads the final record") {
  const ControlledSystem sys = five_level_system();
  const QuantumState target(basis_state(4, 5));

  Trajectory traj;
  traj.times = {0.0, 1.0};
  traj.states = {basis_state(0, 5), basis_state(4, 5)};
  const LimitClassification at_target = classify_limit(traj, sys, target);
  for (int m = 0; m < 4; ++m) {
    CHECK(at_target.overlaps(m) < 1e-12);
  }
  CHECK(at_target.overlaps(4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at_target.dominant_index == 4);
  CHECK(at_target.target_fidelity == doctest::Approx(1.0).epsilon(1e-12));

  // overlap weights sum to one for any unit state
  std::mt19937_64 rng(73);
  traj.states.back() = random_unit_state(5, rng);
  const LimitClassification random = classify_limit(traj, sys, target);
  CHECK(random.overlaps.sum() == doctest::Approx(1.0).epsilon(1e-8));

  Trajectory empty;
  CHECK_THROWS_AS(classify_limit(empty, sys, target), ValidationError);
}
