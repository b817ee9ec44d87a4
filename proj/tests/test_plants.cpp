#include "isid/errors.hpp"
#include "isid/plants.hpp"
#include "isid/realization.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace isid;
using testing::Gen;

namespace {

std::vector<LtvSystem> all_plants() {
    return {make_scalar_plant(0.5, 1.0, 1.0, 20), make_double_integrator(20), make_spring_mass_3dof(),
            make_ltv_oscillator(), make_cartpole_linearized()};
}

Matrix stack_outputs(const Rollout& ro, int t, int q) {
    const auto m = ro.outputs.rows();
    Matrix z(m * q, 1);
    for (int i = 1; i <= q; ++i) z.middleRows((i - 1) * m, m) = ro.outputs.col(t - i);
    return z;
}

Matrix stack_inputs(const Rollout& ro, int t, int q) {
    const auto r = ro.inputs.rows();
    Matrix u(r * q, 1);
    for (int i = 1; i <= q; ++i) u.middleRows((i - 1) * r, r) = ro.inputs.col(t - i);
    return u;
}

}  // namespace

TEST_SUITE("plants") {

TEST_CASE("zero state and zero inputs give zero outputs") {
    const LtvSystem sys = make_spring_mass_3dof();
    const Rollout ro = simulate(sys, Vector::Zero(6), Matrix::Zero(1, 40));
    CHECK(ro.outputs.cols() == 41);
    CHECK(testing::max_abs(ro.outputs) == 0.0);
}

TEST_CASE("scalar plant by hand") {
    const LtvSystem sys = make_scalar_plant(0.5, 1.0, 1.0, 2);
    Matrix u(1, 2);
    u << 1.0, 0.0;
    const Rollout ro = simulate(sys, Vector::Zero(1), u);
    REQUIRE(ro.outputs.cols() == 3);
    CHECK(ro.outputs(0, 0) == 0.0);
    CHECK(ro.outputs(0, 1) == 1.0);
    CHECK(ro.outputs(0, 2) == 0.5);
}

TEST_CASE("free response of an LTI plant is C A^t e1") {
    const LtvSystem sys = make_spring_mass_3dof(20);
    Vector e1 = Vector::Zero(6);
    e1(0) = 1.0;
    const Rollout ro = simulate(sys, e1, Matrix::Zero(1, 20));
    Matrix power = Matrix::Identity(6, 6);
    for (int t = 0; t <= 20; ++t) {
        const Vector expect = sys.C(t) * power * e1;
        CHECK((ro.outputs.col(t) - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
        power = sys.A(0) * power;
    }
}

TEST_CASE("simulate rejects bad arguments") {
    const LtvSystem sys = make_double_integrator(5);
    CHECK_THROWS_AS(simulate(sys, Vector::Zero(3), Matrix::Zero(1, 5)), ShapeError);
    CHECK_THROWS_AS(simulate(sys, Vector::Zero(2), Matrix::Zero(2, 5)), ShapeError);
    CHECK_THROWS_AS(simulate(sys, Vector::Zero(2), Matrix::Zero(1, 6)), ShapeError);
    Vector bad = Vector::Zero(2);
    bad(0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(simulate(sys, bad, Matrix::Zero(1, 5)), ShapeError);
}

TEST_CASE("shorter input sequences simulate a prefix") {
    const LtvSystem sys = make_double_integrator(10);
    const Rollout ro = simulate(sys, Vector::Ones(2), Matrix::Ones(1, 3));
    CHECK(ro.outputs.cols() == 4);
    CHECK(ro.states.cols() == 4);
}

TEST_CASE("linearity and superposition") {
    Gen g(11);
    for (const LtvSystem& sys : all_plants()) {
        CAPTURE(sys.name());
        for (int trial = 0; trial < 5; ++trial) {
            const Vector x1 = g.vector(sys.n()), x2 = g.vector(sys.n());
            const Matrix u1 = g.matrix(sys.r(), sys.horizon()), u2 = g.matrix(sys.r(), sys.horizon());
            const double a = g.uniform(-3, 3), b = g.uniform(-3, 3);
            const Matrix z1 = simulate(sys, x1, u1).outputs;
            const Matrix z2 = simulate(sys, x2, u2).outputs;
            const Matrix zc = simulate(sys, a * x1 + b * x2, a * u1 + b * u2).outputs;
            CHECK(testing::rel_diff(zc, a * z1 + b * z2) <= 1e-12);
            const Matrix za = simulate(sys, a * x1, a * u1).outputs;
            CHECK(testing::rel_diff(za, a * z1) <= 1e-12);
        }
    }
}

TEST_CASE("free plus forced decomposition") {
    Gen g(12);
    for (const LtvSystem& sys : all_plants()) {
        CAPTURE(sys.name());
        const Vector x0 = g.vector(sys.n());
        const Matrix u = g.matrix(sys.r(), sys.horizon());
        const Matrix both = simulate(sys, x0, u).outputs;
        const Matrix free = simulate(sys, x0, Matrix::Zero(sys.r(), sys.horizon())).outputs;
        const Matrix forced = simulate(sys, Vector::Zero(sys.n()), u).outputs;
        CHECK(testing::rel_diff(both, free + forced) <= 1e-12);
    }
}

TEST_CASE("stacked outputs equal O x + G U on stored states") {
    for (const LtvSystem& sys : all_plants()) {
        CAPTURE(sys.name());
        const RolloutBatch batch = generate_batch(sys, 5, GaussianInputs{1.0}, GaussianInit{1.0}, std::nullopt, 3);
        for (const Rollout& ro : batch.rollouts) {
            for (int t = 1; t <= sys.horizon(); ++t) {
                for (int q = 1; q <= std::min(t, 5); ++q) {
                    const Matrix z = stack_outputs(ro, t, q);
                    const Matrix model = observability_matrix(sys, t, q) * ro.states.col(t - q) +
                                         forced_response_matrix(sys, t, q) * stack_inputs(ro, t, q);
                    CHECK((z - model).norm() <= 1e-10 * std::max(1.0, z.norm()));
                }
            }
        }
    }
}

TEST_CASE("generate_batch is deterministic and order independent") {
    const LtvSystem sys = make_ltv_oscillator();
    const RolloutBatch a = generate_batch(sys, 6, GaussianInputs{1.0}, GaussianInit{0.5}, std::nullopt, 99);
    const RolloutBatch b = generate_batch(sys, 6, GaussianInputs{1.0}, GaussianInit{0.5}, std::nullopt, 99);
    const RolloutBatch c = generate_batch(sys, 3, GaussianInputs{1.0}, GaussianInit{0.5}, std::nullopt, 99);
    for (int i = 0; i < 6; ++i) {
        CHECK(a.rollouts[i].outputs == b.rollouts[i].outputs);
        CHECK(a.rollouts[i].inputs == b.rollouts[i].inputs);
    }
    for (int i = 0; i < 3; ++i) CHECK(a.rollouts[i].outputs == c.rollouts[i].outputs);
    const RolloutBatch d = generate_batch(sys, 6, GaussianInputs{1.0}, GaussianInit{0.5}, std::nullopt, 100);
    CHECK(a.rollouts[0].inputs != d.rollouts[0].inputs);
    CHECK(a.nonzero_initial_conditions);
}

TEST_CASE("single rollout with zero excitation is zero") {
    const LtvSystem sys = make_spring_mass_3dof();
    const RolloutBatch b = generate_batch(sys, 1, GaussianInputs{0.0}, ZeroInit{}, std::nullopt, 1);
    REQUIRE(b.size() == 1);
    CHECK(testing::max_abs(b.rollouts[0].outputs) == 0.0);
    CHECK_FALSE(b.nonzero_initial_conditions);
    CHECK_THROWS_AS(generate_batch(sys, 0, GaussianInputs{1.0}, ZeroInit{}, std::nullopt, 1), ShapeError);
}

TEST_CASE("noisy simulation keeps its draws") {
    const LtvSystem sys = make_double_integrator(10);
    NoiseSpec ns{Matrix::Identity(1, 1) * 0.1, Matrix::Identity(1, 1) * 0.2};
    const RolloutBatch b = generate_batch(sys, 2, GaussianInputs{1.0}, ZeroInit{}, ns, 5);
    const Rollout& ro = b.rollouts[0];
    REQUIRE(ro.process_noise.cols() == 10);
    REQUIRE(ro.measurement_noise.cols() == 11);
    const Rollout clean = simulate(sys, Vector::Zero(2), ro.inputs + ro.process_noise);
    CHECK(testing::rel_diff(clean.outputs + ro.measurement_noise, ro.outputs) <= 1e-12);

    NoiseSpec bad{Matrix::Identity(2, 2), Matrix::Identity(1, 1)};
    CHECK_THROWS_AS(generate_batch(sys, 1, GaussianInputs{1.0}, ZeroInit{}, bad, 5), ShapeError);
    NoiseSpec indefinite{-Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    CHECK_THROWS_AS(indefinite.validate(1, 1), ShapeError);
}

TEST_CASE("observability matrix examples") {
    const LtvSystem di = make_double_integrator(10);
    CHECK(observability_matrix(di, 1, 1) == di.C(0));
    Matrix expect(2, 2);
    expect << 1, 1, 1, 0;
    for (int t = 2; t <= 10; ++t) CHECK(observability_matrix(di, t, 2) == expect);

    const LtvSystem zero_c = LtvSystem::time_invariant("zc", Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                                                       Matrix::Zero(1, 2), 5);
    CHECK(matrix_rank(observability_matrix(zero_c, 3, 2)) == 0);

    CHECK_THROWS_AS(observability_matrix(di, 2, 3), RangeError);
    CHECK_THROWS_AS(observability_matrix(di, 2, 0), RangeError);
    CHECK_NOTHROW(observability_matrix(di, 11, 1));
    CHECK_THROWS_AS(observability_matrix(di, 12, 1), RangeError);
}

TEST_CASE("forced response matrix examples") {
    const LtvSystem di = make_double_integrator(10);
    CHECK(forced_response_matrix(di, 3, 1) == Matrix::Zero(1, 1));
    CHECK(forced_response_matrix(di, 3, 2) == Matrix::Zero(2, 2));

    const LtvSystem sc = make_scalar_plant(0.5, 1.0, 1.0, 10);
    Matrix expect(2, 2);
    expect << 0, 1, 0, 0;
    CHECK(forced_response_matrix(sc, 4, 2) == expect);
    CHECK_THROWS_AS(forced_response_matrix(sc, 1, 2), RangeError);
}

TEST_CASE("true Markov parameters") {
    const auto sc = true_markov(make_scalar_plant(0.5, 1.0, 1.0, 10), 3);
    CHECK(sc[0](0, 0) == 1.0);
    CHECK(sc[1](0, 0) == 0.5);
    CHECK(sc[2](0, 0) == 0.25);

    const auto di = true_markov(make_double_integrator(10), 6);
    for (int k = 0; k < 6; ++k) CHECK(di[k](0, 0) == doctest::Approx(k));

    const LtvSystem no_b = LtvSystem::time_invariant("nb", Matrix::Identity(2, 2), Matrix::Zero(2, 1),
                                                     Matrix::Ones(1, 2), 5);
    for (const Matrix& y : true_markov(no_b, 4)) CHECK(y.isZero(0.0));

    CHECK_THROWS_AS(true_markov(make_ltv_oscillator(), 3), ShapeError);
}

TEST_CASE("state transform examples") {
    const LtvSystem sc = make_scalar_plant(0.7, 2.0, 1.0, 10);
    CHECK(state_transform(sc, 4, 1)(0, 0) == doctest::Approx(1.0));

    const LtvSystem id = LtvSystem::time_invariant("id", Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                                                   Matrix::Identity(2, 2), 8);
    const Matrix t = state_transform(id, 3, 1);
    CHECK(testing::max_abs(t - Matrix::Identity(2, 2)) <= 1e-12);

    const LtvSystem di = make_double_integrator(20);
    const RolloutBatch b = generate_batch(di, 100, GaussianInputs{1.0}, GaussianInit{1.0}, std::nullopt, 8);
    for (const Rollout& ro : b.rollouts) {
        for (int step = 1; step <= 20; ++step) {
            const Matrix tt = state_transform(di, step, 2);
            const Vector x = tt * info_state_from_rollout(ro, step, 2).value;
            CHECK((x - ro.states.col(step)).norm() <= 1e-10 * std::max(1.0, ro.states.col(step).norm()));
        }
    }

    const LtvSystem zero_c = LtvSystem::time_invariant("zc", Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                                                       Matrix::Zero(1, 2), 5);
    CHECK_THROWS_AS(state_transform(zero_c, 3, 2), RankError);
    CHECK_THROWS_AS(state_transform(di, 0, 2), RangeError);
}

TEST_CASE("state transform reconstructs every stored state") {
    for (const LtvSystem& sys : all_plants()) {
        CAPTURE(sys.name());
        const int q = minimal_order(sys.n(), sys.m());
        const RolloutBatch b = generate_batch(sys, 10, GaussianInputs{1.0}, GaussianInit{1.0}, std::nullopt, 21);
        for (int step = q - 1; step <= sys.horizon(); ++step) {
            const Matrix tt = state_transform(sys, step, q);
            for (const Rollout& ro : b.rollouts) {
                const Vector x = tt * info_state_from_rollout(ro, step, q).value;
                CHECK((x - ro.states.col(step)).norm() <= 1e-10 * std::max(1.0, ro.states.col(step).norm()));
            }
        }
    }
}

TEST_CASE("built-in plant dimensions") {
    const LtvSystem sm = make_spring_mass_3dof();
    CHECK(sm.n() == 6);
    CHECK(sm.m() == 2);
    CHECK(sm.r() == 1);
    CHECK(sm.horizon() == 40);
    const LtvSystem os = make_ltv_oscillator();
    CHECK(os.n() == 4);
    CHECK(os.m() == 2);
    CHECK(os.r() == 2);
    CHECK(os.horizon() == 30);
    const LtvSystem cp = make_cartpole_linearized();
    CHECK(cp.n() == 4);
    CHECK(cp.m() == 2);
    CHECK(cp.r() == 1);
    CHECK(cp.horizon() == 31);
    for (const char* name : {"spring_mass", "oscillator", "cartpole"}) CHECK(default_order(name) == 4);
    CHECK_THROWS_AS(make_builtin_plant("pendulum"), ValidationError);
}

TEST_CASE("built-in plants are uniformly observable") {
    for (const LtvSystem& sys : all_plants()) {
        CAPTURE(sys.name());
        for (int t = 1; t <= sys.horizon(); ++t) {
            for (int q = 1; q <= t; ++q) {
                if (sys.m() * q < sys.n()) continue;
                CHECK(matrix_rank(observability_matrix(sys, t, q)) == sys.n());
            }
        }
    }
}

TEST_CASE("oscillator data matrix rank is n + rq") {
    const LtvSystem sys = make_ltv_oscillator();
    const RolloutBatch b = generate_batch(sys, 200, GaussianInputs{1.0}, GaussianInit{1.0}, std::nullopt, 4);
    const int q = 4;
    Matrix x(static_cast<Eigen::Index>((sys.m() + sys.r()) * q), b.size());
    for (int i = 0; i < b.size(); ++i) {
        x.col(i) << stack_outputs(b.rollouts[i], q, q), stack_inputs(b.rollouts[i], q, q);
    }
    CHECK(matrix_rank(x) == sys.n() + sys.r() * q);
}

TEST_CASE("cart-pole equilibria are fixed points") {
    const CartpoleParams p;
    for (double angle : {0.0, std::numbers::pi}) {
        Vector x0 = Vector::Zero(4);
        x0(2) = angle;
        const Rollout ro = simulate_cartpole_nonlinear(p, x0, Matrix::Zero(1, 50), 0.02);
        for (int t = 0; t <= 50; ++t) CHECK((ro.states.col(t) - x0).norm() <= 1e-12);
    }
    CHECK_THROWS_AS(simulate_cartpole_nonlinear(p, Vector::Zero(4), Matrix::Zero(1, 3), 0.0), ShapeError);
}

TEST_CASE("cart-pole energy is conserved without forcing") {
    const CartpoleParams p;
    Vector x0 = Vector::Zero(4);
    x0(2) = std::numbers::pi - 0.3;
    const Rollout ro = simulate_cartpole_nonlinear(p, x0, Matrix::Zero(1, 500), 0.01);
    const double e0 = cartpole_energy(p, x0);
    double worst = 0.0;
    for (int t = 0; t <= 500; ++t) worst = std::max(worst, std::abs(cartpole_energy(p, ro.states.col(t)) - e0));
    CHECK(worst <= 0.01 * std::abs(e0));
}

namespace {

// Largest output deviation between the nonlinear cart-pole and its
// linearization along `nom` for a perturbation scaled by `scale`.
double linearization_error(const CartpoleNominal& nom, const Vector& dx, const Matrix& du, double scale) {
    const CartpoleParams p;
    const LtvSystem lin = make_cartpole_linearized(nom, 0.02, p);
    const Rollout ref = simulate_cartpole_nonlinear(p, nom.x0, nom.inputs, 0.02);
    const Rollout nl = simulate_cartpole_nonlinear(p, nom.x0 + scale * dx, nom.inputs + scale * du, 0.02);
    const Rollout li = simulate(lin, scale * dx, scale * du);
    return testing::max_abs(nl.outputs - ref.outputs - li.outputs);
}

}  // namespace

TEST_CASE("linearization error is second order") {
    Gen g(5);
    const Vector dx = g.vector(4);
    const Matrix du = g.matrix(1, 31);

    CartpoleNominal swing = hanging_nominal(31);
    swing.x0(2) -= 0.4;
    swing.inputs = 0.5 * g.matrix(1, 31);
    const double ratio = linearization_error(swing, dx, du, 1e-2) / linearization_error(swing, dx, du, 5e-3);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));

    // Odd symmetry about the hanging equilibrium: third-order error.
    const CartpoleNominal hang = hanging_nominal(31);
    const double odd = linearization_error(hang, dx, du, 1e-2) / linearization_error(hang, dx, du, 5e-3);
    CHECK(odd >= 4.0);
}

TEST_CASE("hanging linearization has a constant Jacobian") {
    const CartpoleParams p;
    const LtvSystem lin = make_cartpole_linearized(hanging_nominal(31), 0.02, p);
    Vector xbar = Vector::Zero(4);
    xbar(2) = std::numbers::pi;
    Matrix jac(4, 4);
    const double h = 1e-5;
    for (int j = 0; j < 4; ++j) {
        Vector xp = xbar, xm = xbar;
        xp(j) += h;
        xm(j) -= h;
        jac.col(j) = (cartpole_step(p, xp, 0.0, 0.02) - cartpole_step(p, xm, 0.0, 0.02)) / (2 * h);
    }
    for (int t = 0; t < 31; ++t) {
        CHECK(testing::max_abs(lin.A(t) - jac) <= 1e-8);
        CHECK(testing::max_abs(lin.A(t) - lin.A(0)) <= 1e-12);
        CHECK(testing::max_abs(lin.B(t) - lin.B(0)) <= 1e-12);
    }
}

TEST_CASE("plant construction validates shapes") {
    CHECK_THROWS_AS(LtvSystem::time_invariant("bad", Matrix::Identity(2, 2), Matrix::Ones(3, 1),
                                              Matrix::Ones(1, 2), 5),
                    ShapeError);
    const LtvSystem os = make_ltv_oscillator();
    CHECK_THROWS_AS(os.A(30), RangeError);
    CHECK_NOTHROW(os.C(30));
    CHECK_THROWS_AS(os.with_horizon(10), ShapeError);
    CHECK(make_double_integrator(5).with_horizon(9).horizon() == 9);
}

}  // TEST_SUITE
