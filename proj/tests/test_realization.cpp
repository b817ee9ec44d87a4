#include "isid/arma.hpp"
#include "isid/errors.hpp"
#include "isid/okid.hpp"
#include "isid/plants.hpp"
#include "isid/realization.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace isid;

namespace {

ArmaCoefficients scalar_coeffs(std::vector<double> alpha, std::vector<double> beta) {
    ArmaCoefficients c;
    c.q = static_cast<int>(alpha.size());
    c.t = c.q;
    c.alpha = Eigen::Map<Matrix>(alpha.data(), 1, c.q);
    c.beta = Eigen::Map<Matrix>(beta.data(), 1, c.q);
    return c;
}

TvArmaModel constant_model(const ArmaCoefficients& c, int horizon) {
    TvArmaModel model;
    model.q = c.q;
    model.m = c.m();
    model.r = c.r();
    model.horizon = horizon;
    for (int t = c.q; t <= horizon; ++t) {
        ArmaCoefficients step = c;
        step.t = t;
        model.coefficients.push_back(step);
    }
    return model;
}

RolloutBatch training(const LtvSystem& sys, int count, std::uint64_t seed, bool gaussian_init = true) {
    return gaussian_init ? generate_batch(sys, count, GaussianInputs{1.0}, GaussianInit{1.0}, std::nullopt, seed)
                         : generate_batch(sys, count, GaussianInputs{1.0}, ZeroInit{}, std::nullopt, seed);
}

}  // namespace

TEST_SUITE("realization") {

TEST_CASE("q = 1 scalar realization") {
    const InfoStateModel model = realize_tv(constant_model(scalar_coeffs({0.5}, {1.0}), 5));
    CHECK(model.dim() == 1);
    const InfoStateStep& s = model.into(3);
    CHECK(s.a(0, 0) == 0.5);
    CHECK(s.b(0, 0) == 1.0);
    CHECK(model.output_matrix() == Matrix::Identity(1, 1));
}

TEST_CASE("q = 2 transcription") {
    const InfoStateModel model = realize_tv(constant_model(scalar_coeffs({0.3, -0.2}, {0.7, 1.1}), 6));
    Matrix a(3, 3);
    a << 0.3, -0.2, 1.1, 1, 0, 0, 0, 0, 0;
    Matrix b(3, 1);
    b << 0.7, 0, 1;
    Matrix c(1, 3);
    c << 1, 0, 0;
    CHECK(model.into(4).a == a);
    CHECK(model.into(4).b == b);
    CHECK(model.output_matrix() == c);
    CHECK_NOTHROW(verify_structure(model));
}

TEST_CASE("oscillator information-state dimension") {
    const LtvSystem sys = make_ltv_oscillator();
    const InfoStateModel model = realize_tv(fit_all(training(sys, 200, 1), 4));
    CHECK(model.dim() == 14);
    CHECK(model.first_state_step() == 3);
    CHECK(model.last_state_step() == 30);
    CHECK_NOTHROW(verify_structure(model));
}

TEST_CASE("structure is exact on fitted models") {
    const LtvSystem sys = make_spring_mass_3dof();
    const InfoStateModel model = realize_tv(fit_all(training(sys, 100, 2), 4));
    const int m = 2, r = 1, q = 4;
    for (const InfoStateStep& s : model.steps()) {
        for (int k = 1; k < q; ++k) {
            CHECK(s.a.block(k * m, (k - 1) * m, m, m) == Matrix::Identity(m, m));
        }
        CHECK(s.b.block(m * q, 0, r, r) == Matrix::Identity(r, r));
        CHECK(s.b.bottomRows(s.b.rows() - m).sum() == 1.0);
    }
    std::vector<InfoStateStep> steps = model.steps();
    steps[2].a(m, 0) = 1.0 + 1e-15;
    CHECK_THROWS_AS(verify_structure(InfoStateModel(q, m, r, steps)), ShapeError);
}

TEST_CASE("missing steps are rejected") {
    TvArmaModel model = constant_model(scalar_coeffs({0.5}, {1.0}), 6);
    model.coefficients.erase(model.coefficients.begin() + 2);
    CHECK_THROWS_AS(realize_tv(model), RangeError);
    const InfoStateModel ok = realize_tv(constant_model(scalar_coeffs({0.5}, {1.0}), 6));
    CHECK_THROWS_AS(ok.into(7), RangeError);
}

TEST_CASE("canonical form examples") {
    const LtiCanonicalModel one = realize_lti_canonical(scalar_coeffs({0.5}, {1.0}));
    CHECK(one.a(0, 0) == 0.5);
    CHECK(one.b(0, 0) == 1.0);

    const LtiCanonicalModel two = realize_lti_canonical(scalar_coeffs({2.0, -1.0}, {0.0, 1.0}));
    Matrix a(2, 2);
    a << 2, 1, -1, 0;
    Matrix b(2, 1);
    b << 0, 1;
    CHECK(two.a == a);
    CHECK(two.b == b);
    const auto y = markov_of(two.a, two.b, two.c, 5);
    for (int k = 0; k < 5; ++k) CHECK(y[k](0, 0) == doctest::Approx(k));

    const LtiCanonicalModel zero = realize_lti_canonical(scalar_coeffs({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}));
    Matrix shift = Matrix::Zero(3, 3);
    shift(0, 1) = shift(1, 2) = 1.0;
    CHECK(zero.a == shift);
    CHECK(zero.b.isZero(0.0));
}

TEST_CASE("information-state from a history") {
    const InfoState zero = info_state_from_history({Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)},
                                                   {Vector::Zero(1), Vector::Zero(1)});
    CHECK(zero.value.size() == 8);
    CHECK(zero.value.isZero(0.0));

    const InfoState s = info_state_from_history({Vector::Constant(1, 3.0), Vector::Constant(1, 2.0)},
                                                {Vector::Constant(1, 5.0)});
    REQUIRE(s.value.size() == 3);
    CHECK(s.value(0) == 3.0);
    CHECK(s.value(1) == 2.0);
    CHECK(s.value(2) == 5.0);

    CHECK_THROWS_AS(info_state_from_history({Vector::Zero(1), Vector::Zero(1)}, {}), ShapeError);
    CHECK(info_state_dim(2, 1, 1) == 2);
}

TEST_CASE("simulating from zero stays at zero") {
    const InfoStateModel model = realize_tv(fundamental_model(make_spring_mass_3dof(), 4));
    InfoState init = info_state_from_history(std::vector<Vector>(4, Vector::Zero(2)),
                                             std::vector<Vector>(3, Vector::Zero(1)), 3);
    const Matrix z = simulate_info_state(model, init, Matrix::Zero(1, 37));
    CHECK(z.isZero(0.0));
    CHECK_THROWS_AS(simulate_info_state(model, init, Matrix::Zero(1, 38)), RangeError);
}

TEST_CASE("realized models reproduce held-out rollouts") {
    const std::vector<LtvSystem> plants = {make_double_integrator(20), make_spring_mass_3dof(),
                                           make_ltv_oscillator(), make_cartpole_linearized()};
    for (const LtvSystem& sys : plants) {
        for (bool nonzero : {false, true}) {
            CAPTURE(sys.name());
            CAPTURE(nonzero);
            const int q = std::max(minimal_order(sys.n(), sys.m()), 2);
            const InfoStateModel model = realize_tv(fit_all(training(sys, 200, 3, nonzero), q));
            const RolloutBatch fresh = training(sys, 20, 4, nonzero);
            for (const Rollout& ro : fresh.rollouts) {
                const InfoState init = info_state_from_rollout(ro, q - 1, q);
                const Matrix z = simulate_info_state(model, init, ro.inputs.rightCols(sys.horizon() - q + 1));
                CHECK(testing::peak_relative(ro.outputs.rightCols(sys.horizon() - q + 2), z) <= 1e-8);
            }
        }
    }
}

TEST_CASE("canonical and time-varying realizations agree") {
    const LtvSystem sys = make_spring_mass_3dof();
    const RolloutBatch b = training(sys, 200, 5);
    const TvArmaModel fit = fit_all(b, 4);
    const auto avg = time_invariant_coefficients(fit, b);
    REQUIRE(avg.has_value());
    const InfoStateModel tv = realize_tv(constant_model(*avg, sys.horizon()));
    const LtiCanonicalModel can = realize_lti_canonical(*avg);
    const RolloutBatch fresh = training(sys, 10, 6);
    for (const Rollout& ro : fresh.rollouts) {
        const InfoState init = info_state_from_rollout(ro, 3, 4);
        const Matrix inputs = ro.inputs.rightCols(sys.horizon() - 3);
        const Matrix a = simulate_info_state(tv, init, inputs);
        const Matrix c = simulate_canonical(can, canonical_state(*avg, init), inputs);
        CHECK(testing::peak_relative(a, c) <= 1e-10);
    }
}

TEST_CASE("time-varying data has no constant coefficients") {
    const LtvSystem sys = make_ltv_oscillator();
    const RolloutBatch b = training(sys, 200, 7);
    CHECK_FALSE(time_invariant_coefficients(fit_all(b, 2), b).has_value());
}

TEST_CASE("Markov parameters from ARMA coefficients") {
    const auto sc = markov_from_arma(scalar_coeffs({0.5}, {1.0}), 4);
    CHECK(sc[0](0, 0) == 1.0);
    CHECK(sc[1](0, 0) == 0.5);
    CHECK(sc[2](0, 0) == 0.25);
    CHECK(sc[3](0, 0) == 0.125);

    const auto di = markov_from_arma(scalar_coeffs({2.0, -1.0}, {0.0, 1.0}), 4);
    for (int k = 0; k < 4; ++k) CHECK(di[k](0, 0) == k);

    for (const Matrix& y : markov_from_arma(scalar_coeffs({0.9, 0.1}, {0.0, 0.0}), 6)) CHECK(y.isZero(0.0));
}

TEST_CASE("Markov recovery from the fundamental ARMA") {
    for (const LtvSystem& sys : {make_spring_mass_3dof(), make_double_integrator(20)}) {
        CAPTURE(sys.name());
        for (int q = minimal_order(sys.n(), sys.m()); q <= 5; ++q) {
            const ArmaCoefficients c = fundamental_arma(sys, q + 2, q);
            const auto est = markov_from_arma(c, 2 * q);
            const auto ref = true_markov(sys, 2 * q);
            for (int k = 0; k < 2 * q; ++k) CHECK(testing::max_abs(est[k] - ref[k]) <= 1e-8 * std::max(1.0, testing::max_abs(ref[k])));
        }
    }
}

TEST_CASE("canonical model Markov parameters match the recursion") {
    const ArmaCoefficients c = fundamental_arma(make_spring_mass_3dof(), 8, 4);
    const LtiCanonicalModel can = realize_lti_canonical(c);
    const auto direct = markov_of(can.a, can.b, can.c, 12);
    const auto rec = markov_from_arma(c, 12);
    for (int k = 0; k < 12; ++k) CHECK(testing::max_abs(direct[k] - rec[k]) <= 1e-10 * std::max(1.0, testing::max_abs(rec[k])));
}

}  // TEST_SUITE
