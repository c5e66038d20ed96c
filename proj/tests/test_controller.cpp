#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qlyap/controller.hpp"
#include "qlyap/p_design.hpp"
#include "qlyap/simulate.hpp"

using namespace qlyap;
using namespace testutil;

TEST_CASE("odd functions are odd and sign preserving") {
  const OddFunction id = OddFunction::identity();
  const OddFunction th = OddFunction::tanh_scaled(0.5);
  const OddFunction sat = OddFunction::saturated_linear(0.2);
  for (double x = -3.0; x <= 3.0; x += 0.37) {
    for (const OddFunction& f : {id, th, sat}) {
      CHECK(f(-x) == -f(x));
      CHECK(x * f(x) >= 0.0);
    }
    CHECK(std::abs(th(x)) <= 0.5 + 1e-15);
    CHECK(std::abs(sat(x)) <= 0.2);
  }
  CHECK(id(1.7) == 1.7);
  CHECK(sat(1.0) == 0.2);
  CHECK(th(10.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(OddFunction::tanh_scaled(0.0), ValidationError);
  CHECK_THROWS_AS(OddFunction::saturated_linear(-1.0), ValidationError);
}

TEST_CASE("controller config validation") {
  Matrix indef = Matrix::Zero(2, 2);
  indef(0, 0) = 1.0;
  indef(1, 1) = -1.0;
  const QuantumState tgt2(basis_state(1, 2));
  CHECK_THROWS_AS(ControllerConfig(HermitianOperator(indef), tgt2, {1.0},
                                   {OddFunction::identity()}),
                  ValidationError);
  CHECK_THROWS_AS(
      ControllerConfig(HermitianOperator(Matrix::Identity(2, 2)), tgt2,
                       {-1.0}, {OddFunction::identity()}),
      ValidationError);
  CHECK_THROWS_AS(
      ControllerConfig(HermitianOperator(Matrix::Identity(2, 2)), tgt2,
                       {1.0, 2.0}, {OddFunction::identity()}),
      ValidationError);
  CHECK_THROWS_AS(
      ControllerConfig(HermitianOperator(Matrix::Identity(3, 3)), tgt2, {1.0},
                       {OddFunction::identity()}),
      ValidationError);
}

TEST_CASE("lyapunov distance value") {
  const ControllerConfig cfg = five_level_controller();
  CHECK(lyapunov_value(cfg, cfg.target()) == 0.0);
  // <e1-e5|P|e1-e5> = P11 + P55 - 2 P15
  CHECK(lyapunov_value(cfg, QuantumState(basis_state(0, 5))) ==
        doctest::Approx(6.3).epsilon(1e-14));

  // the identity-p-half mode replaces P by I/2 no matter what p says
  const ControllerConfig half =
      five_level_controller(0.05, ControlMode::identity_p_half);
  CHECK(lyapunov_value(half, QuantumState(basis_state(0, 5))) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("equivalence-class minimum over the target phase") {
  const ControllerConfig cfg = five_level_controller();
  for (double phi : {0.0, 0.4, M_PI / 2, M_PI, 5.0}) {
    const Vector rotated = std::polar(1.0, phi) * basis_state(4, 5);
    CHECK(equivalence_class_min_value(cfg, QuantumState(rotated)) < 1e-12);
  }

  // orthogonal state with <psi|P|psif> = 0: both quadratic terms survive
  const ControllerConfig id_cfg(
      HermitianOperator(Matrix::Identity(5, 5)),
      QuantumState(basis_state(4, 5)), {1.0}, {OddFunction::identity()});
  CHECK(equivalence_class_min_value(id_cfg, QuantumState(basis_state(0, 5))) ==
        doctest::Approx(2.0).epsilon(1e-14));

  // brute force over the phase grid on random 3-level instances
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix p = random_hermitian(3, rng);
    p += (std::abs(eigendecompose(HermitianOperator(p)).eigenvalues(0)) + 0.5) *
         Matrix::Identity(3, 3);
    const QuantumState target(random_unit_state(3, rng));
    const ControllerConfig c3(HermitianOperator(p), target, {1.0},
                              {OddFunction::identity()});
    const QuantumState psi(random_unit_state(3, rng));
    const double closed = equivalence_class_min_value(c3, psi);
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
      const double beta = 2.0 * M_PI * k / 10000.0;
      const Vector shifted =
          psi.vec() - std::polar(1.0, beta) * target.vec();
      grid = std::min(grid, shifted.dot(p * shifted).real());
    }
    // the grid quantizes the optimal phase to pi/10000, which costs up to
    // |<psi|P|psif>| * (pi/10000)^2 ~ 4e-7 relative to the closed form
    CHECK(closed == doctest::Approx(grid).epsilon(1e-6));
    CHECK(closed <= grid + 1e-12);

    // invariant under a global phase on psi
    const Vector rotated = std::polar(1.0, 1.234) * psi.vec();
    CHECK(std::abs(equivalence_class_min_value(c3, QuantumState(rotated)) -
                   closed) < 1e-10);
  }
}

TEST_CASE("equivalence-class minimum vanishes exactly on the target ray") {
  const ControllerConfig cfg = five_level_controller();
  // a nearby but distinct state keeps a strictly positive value
  Vector near = basis_state(4, 5);
  near(0) = 0.04;
  near /= near.norm();
  CHECK(equivalence_class_min_value(cfg, QuantumState(near)) > 1e-5);
  CHECK(fidelity(QuantumState(near), cfg.target()) < 1.0 - 1e-10);
}

TEST_CASE("feedback signal at the bundled initial state") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();

  const Eigen::VectorXd x0 =
      control_terms(cfg, sys, QuantumState(basis_state(0, 5)));
  REQUIRE(x0.size() == 1);
  CHECK(std::abs(x0(0)) < 1e-14);
  CHECK(control_law(cfg, sys, QuantumState(basis_state(0, 5)))(0) == 0.0);

  // rotating the initial state by a global phase exposes the target term:
  // x1(e^{i phi} e1) = -4 sin(phi) because <e1|H1 P|e5> = 2 is real
  for (double phi : {0.3, -0.9, M_PI / 4, 2.0}) {
    const Vector rotated = std::polar(1.0, phi) * basis_state(0, 5);
    const Eigen::VectorXd x = control_terms(cfg, sys, QuantumState(rotated));
    CHECK(x(0) == doctest::Approx(-4.0 * std::sin(phi)).epsilon(1e-12));
  }
}

TEST_CASE("feedback signal against a naive complex evaluation") {
  const ControlledSystem sys = five_level_system();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p = random_hermitian(5, rng);
    p += (std::abs(eigendecompose(HermitianOperator(p)).eigenvalues(0)) + 0.4) *
         Matrix::Identity(5, 5);
    const QuantumState target(random_unit_state(5, rng));
    const ControllerConfig cfg(HermitianOperator(p), target, {1.0},
                               {OddFunction::identity()});
    const QuantumState psi(random_unit_state(5, rng));

    // i<psi|[H1,P]|psi> + 2 Im<psi|H1 P|psif>, evaluated the slow way
    const Matrix comm = commutator(sys.control(0).mat(), p);
    const Complex quad = Complex(0.0, 1.0) * psi.vec().dot(comm * psi.vec());
    CHECK(std::abs(quad.imag()) < 1e-10);
    const double direct =
        quad.real() + 2.0 * std::imag(psi.vec().dot(sys.control(0).mat() *
                                                    (p * target.vec())));

    const Eigen::VectorXd x = control_terms(cfg, sys, psi);
    CHECK(x(0) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("ablation modes change the feedback signal as advertised") {
  const ControlledSystem sys = five_level_system();
  std::mt19937_64 rng(29);
  const QuantumState psi(random_unit_state(5, rng));
  const QuantumState target(basis_state(4, 5));

  // drop_target_term keeps only the quadratic commutator term
  const ControllerConfig drop =
      five_level_controller(0.05, ControlMode::drop_target_term);
  const Matrix comm = commutator(sys.control(0).mat(), five_level_p());
  const double quad_only =
      (Complex(0.0, 1.0) * psi.vec().dot(comm * psi.vec())).real();
  CHECK(control_terms(drop, sys, psi)(0) ==
        doctest::Approx(quad_only).epsilon(1e-12));
  // at the target itself the quadratic term vanishes too
  CHECK(std::abs(control_terms(drop, sys, target)(0)) < 1e-14);

  // identity_p_half turns the signal into Im<psi|H1|psif> ([H1, I/2] = 0)
  const ControllerConfig half =
      five_level_controller(0.05, ControlMode::identity_p_half);
  const double expected =
      std::imag(psi.vec().dot(sys.control(0).mat() * target.vec()));
  CHECK(control_terms(half, sys, psi)(0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rate decomposition stays exact in the ablation modes") {
  const ControlledSystem sys = five_level_system();
  std::mt19937_64 rng(43);
  for (ControlMode mode :
       {ControlMode::drop_target_term, ControlMode::identity_p_half}) {
    const ControllerConfig cfg = five_level_controller(0.05, mode);
    for (int trial = 0; trial < 10; ++trial) {
      const QuantumState psi(random_unit_state(5, rng));
      const Eigen::VectorXd u = control_law(cfg, sys, psi);
      const LyapunovRate rate = lyapunov_derivative(cfg, sys, psi, u);
      CHECK(rate.total ==
            doctest::Approx(rate.drift + rate.control).epsilon(1e-12));
    }
  }
}

TEST_CASE("first feedback term ignores the global phase") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg =
      five_level_controller(0.05, ControlMode::drop_target_term);
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector psi = random_unit_state(5, rng);
    const Eigen::VectorXd x = control_terms(cfg, sys, QuantumState(psi));
    const Vector rotated = std::polar(1.0, 2.0 * uniform01(rng)) * psi;
    const Eigen::VectorXd xr = control_terms(cfg, sys, QuantumState(rotated));
    CHECK(std::abs(x(0) - xr(0)) < 1e-12);
  }
}

TEST_CASE("control law sign and gain") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller(0.05);

  // x(e^{-i pi/2} e1) = 4, so u = -K x = -0.2
  const Vector rotated = std::polar(1.0, -M_PI / 2) * basis_state(0, 5);
  const Eigen::VectorXd u = control_law(cfg, sys, QuantumState(rotated));
  CHECK(u(0) == doctest::Approx(-0.2).epsilon(1e-12));

  const ControllerConfig stronger = five_level_controller(0.5);
  const Eigen::VectorXd u10 = control_law(stronger, sys, QuantumState(rotated));
  CHECK(u10(0) == doctest::Approx(10.0 * u(0)).epsilon(1e-12));
}

TEST_CASE("lyapunov rate decomposes into drift plus control") {
  const ControlledSystem sys = five_level_system();
  const ControllerConfig cfg = five_level_controller();
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const QuantumState psi(random_unit_state(5, rng));
    const Eigen::VectorXd u = control_law(cfg, sys, psi);
    const LyapunovRate rate = lyapunov_derivative(cfg, sys, psi, u);
    CHECK(rate.total == doctest::Approx(rate.drift + rate.control)
                            .epsilon(1e-12));
    // u_k = -K x_k with identity shaping makes the control part -K x^2
    const Eigen::VectorXd x = control_terms(cfg, sys, psi);
    CHECK(rate.control ==
          doctest::Approx(-0.05 * x(0) * x(0)).epsilon(1e-10));
    CHECK(rate.control <= 1e-15);
  }
}

TEST_CASE("lyapunov rate matches a finite-difference oracle") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix h0 = random_hermitian(3, rng);
    const Matrix h1 = random_hermitian(3, rng);
    const ControlledSystem sys(HermitianOperator(h0),
                               {HermitianOperator(h1)});
    Matrix p = random_hermitian(3, rng);
    p += (std::abs(eigendecompose(HermitianOperator(p)).eigenvalues(0)) + 0.5) *
         Matrix::Identity(3, 3);
    const ControllerConfig cfg(HermitianOperator(p),
                               QuantumState(random_unit_state(3, rng)), {0.7},
                               {OddFunction::identity()});
    const QuantumState psi(random_unit_state(3, rng));
    const Eigen::VectorXd u = control_law(cfg, sys, psi);

    const double h = 1e-6;
    const QuantumState fwd = propagate_step(sys, psi, u, h);
    const QuantumState bwd = propagate_step(sys, psi, u, -h);
    const double fd =
        (lyapunov_value(cfg, fwd) - lyapunov_value(cfg, bwd)) / (2.0 * h);

    const LyapunovRate rate = lyapunov_derivative(cfg, sys, psi, u);
    CHECK(rate.total == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("planck constant scales every rate") {
  const Matrix h0 = five_level_h0();
  const Matrix h1 = five_level_h1();
  const ControlledSystem unit(HermitianOperator(h0), {HermitianOperator(h1)});
  const ControlledSystem doubled(HermitianOperator(h0),
                                 {HermitianOperator(h1)}, 2.0);
  const ControllerConfig cfg = five_level_controller();
  std::mt19937_64 rng(53);
  const QuantumState psi(random_unit_state(5, rng));
  Eigen::VectorXd u(1);
  u(0) = 0.3;
  const LyapunovRate a = lyapunov_derivative(cfg, unit, psi, u);
  const LyapunovRate b = lyapunov_derivative(cfg, doubled, psi, u);
  CHECK(b.total == doctest::Approx(a.total / 2.0).epsilon(1e-12));
  CHECK(b.drift == doctest::Approx(a.drift / 2.0).epsilon(1e-12));
  CHECK(b.control == doctest::Approx(a.control / 2.0).epsilon(1e-12));
}

TEST_CASE("commuting weight reduces the law to the eigenvalue form") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(uniform01(rng) * 3);  // 3..5
    const Matrix h0 = random_nondegenerate_diag(n, rng);
    const Matrix h1 = random_hermitian(n, rng);
    const ControlledSystem sys(HermitianOperator(h0), {HermitianOperator(h1)});

    Eigen::VectorXd spectrum(n);
    for (int i = 0; i < n; ++i) {
      spectrum(i) = 0.2 + uniform01(rng);
    }
    const HermitianOperator p = build_commuting_p(sys, spectrum);

    const int target_index = static_cast<int>(uniform01(rng) * n);
    const QuantumState target(basis_state(target_index, n));
    const double p_f = target.vec().dot(p.mat() * target.vec()).real();

    const ControllerConfig cfg(p, target, {0.4}, {OddFunction::identity()});
    const QuantumState psi(random_unit_state(n, rng));

    const Matrix comm = commutator(sys.control(0).mat(), p.mat());
    const double reduced_x =
        (Complex(0.0, 1.0) * psi.vec().dot(comm * psi.vec())).real() +
        2.0 * p_f * std::imag(psi.vec().dot(h1 * target.vec()));
    const double reduced_u = -0.4 * reduced_x;

    const Eigen::VectorXd u = control_law(cfg, sys, psi);
    CHECK(std::abs(u(0) - reduced_u) < 1e-12);
  }
}
