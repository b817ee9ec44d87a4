#include "isid/errors.hpp"
#include "isid/okid.hpp"
#include "isid/plants.hpp"
#include "isid/realization.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace isid;

namespace {

RolloutBatch zero_ic(const LtvSystem& sys, int count, std::uint64_t seed) {
    return generate_batch(sys, count, GaussianInputs{1.0}, ZeroInit{}, std::nullopt, seed);
}

ArmaCoefficients as_arma(const ObserverMarkov& om) {
    ArmaCoefficients c;
    c.q = om.q;
    c.t = om.q;
    c.alpha.resize(om.m, om.m * om.q);
    c.beta.resize(om.m, om.r * om.q);
    for (int k = 0; k < om.q; ++k) {
        c.alpha.middleCols(k * om.m, om.m) = om.output_part(k);
        c.beta.middleCols(k * om.r, om.r) = om.input_part(k);
    }
    return c;
}

std::vector<Matrix> scalars(std::initializer_list<double> values) {
    std::vector<Matrix> out;
    for (double v : values) out.push_back(Matrix::Constant(1, 1, v));
    return out;
}

struct Pipeline {
    ObserverMarkov om;
    EraRealization real;
    Matrix gain;
    MismatchReport report;
};

Pipeline run_okid(const LtvSystem& sys, int q, int count, std::uint64_t seed) {
    Pipeline p;
    p.om = fit_observer_markov(zero_ic(sys, count, seed), q);
    const int blocks = sys.n() + 2;
    p.real = era(recover_open_loop_markov(p.om, 2 * blocks), 0, blocks, blocks);
    p.gain = recover_observer_gain(p.real, p.om);
    p.report = mismatch_report(p.real, p.gain, p.om, true_markov(sys, q + 1));
    return p;
}

}  // namespace

TEST_SUITE("okid") {

TEST_CASE("zero batch gives zero observer parameters") {
    const LtvSystem sys = make_scalar_plant(0.5, 1.0, 1.0, 10);
    const RolloutBatch b = generate_batch(sys, 5, GaussianInputs{0.0}, ZeroInit{}, std::nullopt, 1);
    const ObserverMarkov om = fit_observer_markov(b, 2);
    for (const Matrix& y : om.blocks) CHECK(y.isZero(0.0));
    for (const Matrix& y : recover_open_loop_markov(om, 5)) CHECK(y.isZero(0.0));
}

TEST_CASE("scalar deadbeat case by hand") {
    const double a = 0.7, b = 1.3;
    const LtvSystem sys = make_scalar_plant(a, b, 1.0, 10);
    const ObserverMarkov om = fit_observer_markov(zero_ic(sys, 20, 2), 1);
    REQUIRE(om.blocks.size() == 1);
    CHECK(om.blocks[0].rows() == 1);
    CHECK(om.blocks[0].cols() == 2);
    CHECK(om.blocks[0](0, 0) == doctest::Approx(b).epsilon(1e-10));
    CHECK(om.blocks[0](0, 1) == doctest::Approx(a).epsilon(1e-10));
    CHECK(om.zero_initial_conditions);

    const auto y = recover_open_loop_markov(om, 4);
    for (int k = 0; k < 4; ++k) CHECK(y[k](0, 0) == doctest::Approx(b * std::pow(a, k)).epsilon(1e-10));

    const EraRealization real = era(y, 1, 2, 2);
    const Matrix gain = recover_observer_gain(real, om);
    CHECK(gain.rows() == 1);
    CHECK(gain.cols() == 1);
    CHECK(std::abs(real.a(0, 0) + gain(0, 0) * real.c(0, 0)) <= 1e-10);

    const MismatchReport rep = mismatch_report(real, gain, om, true_markov(sys, 2));
    CHECK(rep.max_openloop() <= 1e-10);
    CHECK(rep.max_observer() <= 1e-10);
    CHECK(rep.deadbeat_residual <= 1e-10);
    CHECK(rep.max_eig_modulus <= 1e-10);
}

TEST_CASE("observer parameters predict held-out spring-mass data") {
    const LtvSystem sys = make_spring_mass_3dof();
    const int q = 4;
    const ObserverMarkov om = fit_observer_markov(zero_ic(sys, 200, 3), q);
    const RolloutBatch fresh = zero_ic(sys, 20, 4);
    for (const Rollout& ro : fresh.rollouts) {
        for (int t = q; t <= sys.horizon(); ++t) {
            Vector z = Vector::Zero(2);
            for (int k = 1; k <= q; ++k) {
                z += om.input_part(k - 1) * ro.inputs.col(t - k) + om.output_part(k - 1) * ro.outputs.col(t - k);
            }
            CHECK((z - ro.outputs.col(t)).norm() <= 1e-8 * std::max(1.0, ro.outputs.col(t).norm()));
        }
    }
}

TEST_CASE("open-loop recovery follows the ARMA recursion") {
    for (int q : {3, 4, 5}) {
        const ObserverMarkov om = fit_observer_markov(zero_ic(make_spring_mass_3dof(), 200, 5), q);
        const auto a = recover_open_loop_markov(om, 2 * q + 3);
        const auto b = markov_from_arma(as_arma(om), 2 * q + 3);
        for (size_t k = 0; k < a.size(); ++k) CHECK(testing::max_abs(a[k] - b[k]) <= 1e-10 * std::max(1.0, testing::max_abs(b[k])));
    }
    ObserverMarkov zero;
    zero.q = 2;
    zero.m = 1;
    zero.r = 1;
    zero.blocks = {Matrix(1, 2), Matrix(1, 2)};
    zero.blocks[0] << 0.0, 0.4;
    zero.blocks[1] << 0.0, -0.3;
    for (const Matrix& y : recover_open_loop_markov(zero, 6)) CHECK(y.isZero(0.0));
}

TEST_CASE("ERA round trips") {
    const auto sc = true_markov(make_scalar_plant(0.5, 1.0, 1.0, 10), 6);
    const EraRealization r1 = era(sc, 1, 3, 3);
    CHECK(r1.order == 1);
    const auto back1 = markov_of(r1.a, r1.b, r1.c, 6);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(back1[k](0, 0) - sc[k](0, 0)) <= 1e-10);

    const auto di = scalars({0, 1, 2, 3, 4, 5, 6, 7});
    const EraRealization r2 = era(di, 2, 4, 4);
    const auto back2 = markov_of(r2.a, r2.b, r2.c, 8);
    for (int k = 0; k < 8; ++k) CHECK(std::abs(back2[k](0, 0) - k) <= 1e-8 * std::max(1, k));
    CHECK(era(di, 0, 4, 4).order == 2);

    const LtvSystem sm = make_spring_mass_3dof();
    const auto y = true_markov(sm, 16);
    const EraRealization r3 = era(y, 0, 8, 8);
    CHECK(r3.order == 6);
    const auto back3 = markov_of(r3.a, r3.b, r3.c, 16);
    for (int k = 0; k < 16; ++k) CHECK(testing::max_abs(back3[k] - y[k]) <= 1e-8 * std::max(1.0, testing::max_abs(y[k])));
}

TEST_CASE("ERA rejects impossible requests") {
    CHECK_THROWS_AS(era(scalars({0, 0, 0, 0, 0}), 1, 2, 2), RankError);
    CHECK_THROWS_AS(era(scalars({1, 0.5, 0.25, 0.125}), 3, 2, 2), RankError);
    CHECK_THROWS_AS(era(scalars({1, 0.5, 0.25}), 1, 2, 2), ShapeError);
}

TEST_CASE("observer gain shape") {
    const Pipeline p = run_okid(make_spring_mass_3dof(), 4, 200, 6);
    CHECK(p.gain.rows() == p.real.order);
    CHECK(p.gain.cols() == 2);
    CHECK(p.report.err_openloop.size() == 5);
    CHECK(p.report.err_observer.size() == 5);
}

TEST_CASE("spring-mass observer is not deadbeat") {
    const Pipeline p = run_okid(make_spring_mass_3dof(), 4, 200, 7);
    CHECK(p.real.order == 6);
    CHECK(p.report.max_openloop() <= 1e-6);
    CHECK(p.report.max_observer() >= 1e-3);
    CHECK(p.report.max_observer() >= 1e2 * std::max(p.report.max_openloop(), 1e-300));
    CHECK(p.report.deadbeat_residual >= 1e-3);
    CHECK(p.report.max_eig_modulus > 1e-3);
}

TEST_CASE("relative error conventions") {
    Matrix ref(1, 2);
    ref << 1.0, -3.0;
    Matrix est(1, 2);
    est << 1.5, -3.0;
    CHECK(relative_l1_error(est, ref) == doctest::Approx(0.125));
    CHECK(relative_l1_error(est, Matrix::Zero(1, 2)) == doctest::Approx(4.5));
    CHECK(relative_l1_error(ref, ref) == 0.0);
}

TEST_CASE("observer fit needs enough data") {
    const LtvSystem sys = make_spring_mass_3dof(5);
    CHECK_THROWS_AS(fit_observer_markov(zero_ic(sys, 1, 8), 4), ShapeError);
    CHECK_THROWS_AS(fit_observer_markov(zero_ic(sys, 10, 8), 6), RangeError);
}

}  // TEST_SUITE
