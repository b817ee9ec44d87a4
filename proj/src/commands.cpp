#include "isid/commands.hpp"

#include "isid/control.hpp"
#include "isid/errors.hpp"
#include "isid/io.hpp"
#include "isid/noise_id.hpp"
#include "isid/okid.hpp"
#include "isid/realization.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace isid::cli {

namespace fs = std::filesystem;
using io::Json;

std::uint64_t heldout_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

namespace {

InitLaw init_law(const ExperimentConfig& c) {
    if (c.init == "gaussian") return GaussianInit{c.init_sigma};
    return ZeroInit{};
}

RolloutBatch training_batch(const ExperimentConfig& c, const LtvSystem& sys) {
    return generate_batch(sys, c.rollouts, GaussianInputs{c.input_sigma}, init_law(c), c.noise, c.seed);
}

// Noise-free, non-zero initial conditions, independent seed.
RolloutBatch heldout_batch(const ExperimentConfig& c, const LtvSystem& sys) {
    return generate_batch(sys, c.heldout_rollouts, GaussianInputs{c.input_sigma},
                          GaussianInit{c.init_sigma > 0.0 ? c.init_sigma : 1.0}, std::nullopt,
                          heldout_seed(c.seed));
}

Json optional_series(const std::vector<std::optional<double>>& v) {
    Json out = Json::array();
    for (const auto& e : v) out.push_back(e ? Json(*e) : Json(nullptr));
    return out;
}

double max_of(const std::vector<std::optional<double>>& v) {
    double best = 0.0;
    for (const auto& e : v) {
        if (e) best = std::max(best, *e);
    }
    return best;
}

int order_for(const ExperimentConfig& c, const LtvSystem& sys) {
    if (c.q) return *c.q;
    if (!c.plant.empty()) return default_order(c.plant);
    return minimal_order(sys.n(), sys.m());
}

}  // namespace

std::vector<std::optional<double>> one_step_errors(const TvArmaModel& model, const RolloutBatch& batch) {
    if (model.m != batch.m || model.r != batch.r) {
        throw ValidationError("model dimensions (m = " + std::to_string(model.m) + ", r = " +
                              std::to_string(model.r) + ") do not match the batch");
    }
    if (model.coefficients.empty() || model.coefficients.front().t != model.q ||
        model.last_step() < batch.horizon) {
        throw RangeError("model covers steps " + std::to_string(model.coefficients.empty() ? 0 : model.first_step()) +
                         ".." + std::to_string(model.last_step()) + ", batch needs " +
                         std::to_string(model.q) + ".." + std::to_string(batch.horizon));
    }
    std::vector<std::optional<double>> out(static_cast<size_t>(batch.horizon + 1));
    for (int t = model.q; t <= batch.horizon; ++t) {
        Vector err = Vector::Zero(batch.m);
        Vector mag = Vector::Zero(batch.m);
        const ArmaCoefficients& c = model.at(t);
        for (const Rollout& ro : batch.rollouts) {
            Vector pred = Vector::Zero(batch.m);
            for (int k = 1; k <= model.q; ++k) {
                pred += c.alpha_block(k) * ro.outputs.col(t - k) + c.beta_block(k) * ro.inputs.col(t - k);
            }
            err += (ro.outputs.col(t) - pred).cwiseAbs();
            mag += ro.outputs.col(t).cwiseAbs();
        }
        const double denom = mag.sum();
        out[static_cast<size_t>(t)] = denom > 0.0 ? err.sum() / denom : err.sum() / batch.size();
    }
    return out;
}

RolloutBatch truncate_batch(const RolloutBatch& batch, int horizon) {
    if (horizon < 1 || horizon > batch.horizon) throw RangeError("truncate_batch: horizon out of range");
    RolloutBatch out = batch;
    out.horizon = horizon;
    for (Rollout& ro : out.rollouts) {
        ro.inputs = ro.inputs.leftCols(horizon).eval();
        ro.outputs = ro.outputs.leftCols(horizon + 1).eval();
        if (ro.states.size() > 0) ro.states = ro.states.leftCols(horizon + 1).eval();
        if (ro.process_noise.size() > 0) ro.process_noise = ro.process_noise.leftCols(horizon).eval();
        if (ro.measurement_noise.size() > 0) ro.measurement_noise = ro.measurement_noise.leftCols(horizon + 1).eval();
    }
    return out;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& log) {
    const LtvSystem sys = config.make_plant();
    config.validate_against(sys);
    const RolloutBatch batch = training_batch(config, sys);
    io::write_batch_csv(config.out_dir / "batch.csv", batch);
    io::write_batch_metadata(config.out_dir / "batch.json", batch);
    log << "simulate: " << batch.size() << " rollouts of " << sys.name() << ", H = " << batch.horizon
        << " -> " << (config.out_dir / "batch.csv").string() << '\n';
    return kExitOk;
}

namespace {

TvArmaModel fit_noisy_model(const RolloutBatch& batch, int q, const NoiseSpec& noise, double tol) {
    TvArmaModel model;
    model.q = q;
    model.m = batch.m;
    model.r = batch.r;
    model.horizon = batch.horizon;
    for (int t = q; t <= batch.horizon; ++t) {
        NoisyFit fit = fit_arma_noisy(batch, t, q, noise, tol);
        if (fit.indefinite) {
            model.warnings.push_back("t = " + std::to_string(t) +
                                     ": corrected moment matrix is indefinite (min eigenvalue " +
                                     io::format_double(fit.min_eigenvalue) + ")");
        }
        model.coefficients.push_back(std::move(fit.coefficients));
    }
    return model;
}

}  // namespace

int cmd_identify(const ExperimentConfig& config, std::ostream& log) {
    std::optional<LtvSystem> sys;
    RolloutBatch batch;
    if (!config.batch.empty()) {
        batch = io::read_batch(config.batch);
        if (!config.plant.empty() || !config.plant_file.empty()) sys = config.make_plant();
    } else {
        sys = config.make_plant();
        config.validate_against(*sys);
        batch = training_batch(config, *sys);
    }
    const std::optional<NoiseSpec> noise = config.noise ? config.noise : batch.noise;
    const bool noisy = noise && !noise->is_zero();

    Json report;
    int q = 0;
    if (config.q) {
        q = *config.q;
    } else {
        if (noisy) throw ValidationError("identify: automatic order selection needs noise-free data; set q");
        const int cap = std::min({config.q_max, batch.horizon, (batch.size() - 1) / (batch.m + batch.r)});
        if (cap < 1) throw ValidationError("identify: too few rollouts for any order");
        const OrderEstimate est = determine_order(batch, batch.horizon, cap, config.tol);
        q = est.q_star;
        report["n_hat"] = est.n_hat;
        report["rank_table"] = est.ranks;
        log << "identify: n_hat = " << est.n_hat << ", q = " << q << '\n';
    }
    report["q"] = q;
    report["noise_corrected"] = noisy;

    const TvArmaModel model = noisy ? fit_noisy_model(batch, q, *noise, config.tol)
                                    : fit_all(batch, q, config.tol);
    const InfoStateModel info = realize_tv(model);
    io::write_json(config.out_dir / "arma_model.json", io::arma_model_to_json(model));
    io::write_json(config.out_dir / "info_state_model.json", io::info_state_model_to_json(info));

    Json steps = Json::array();
    for (const ArmaCoefficients& c : model.coefficients) {
        steps.push_back({{"t", c.t}, {"residual_norm", c.residual_norm}, {"rhs_norm", c.rhs_norm},
                         {"rank_used", c.rank_used}});
    }
    report["steps"] = std::move(steps);
    report["warnings"] = model.warnings;

    if (!noisy) {
        if (const auto lti = time_invariant_coefficients(model, batch)) {
            io::write_markov_csv(config.out_dir / "markov.csv", markov_from_arma(*lti, 2 * q));
        }
    }

    int code = kExitOk;
    if (sys) {
        const RolloutBatch held = heldout_batch(config, *sys);
        const auto errs = one_step_errors(model, held);
        const double worst = max_of(errs);
        report["heldout"] = {{"rollouts", held.size()},
                             {"seed", held.seed},
                             {"max_rel_error", worst},
                             {"threshold", config.thresholds.prediction_error},
                             {"per_t", optional_series(errs)}};
        log << "identify: held-out max relative error " << io::format_double(worst) << '\n';
        if (!(worst <= config.thresholds.prediction_error)) code = kExitThreshold;
    } else {
        report["heldout"] = nullptr;
    }
    io::write_json(config.out_dir / "identify_report.json", report);
    return code;
}

int cmd_predict(const ExperimentConfig& config, std::ostream& log) {
    if (config.model.empty()) throw ValidationError("predict: config needs 'model'");
    const TvArmaModel model = io::arma_model_from_json(io::read_json(config.model));
    RolloutBatch batch;
    if (!config.batch.empty()) {
        batch = io::read_batch(config.batch);
    } else {
        const LtvSystem sys = config.make_plant();
        config.validate_against(sys);
        batch = heldout_batch(config, sys);
    }
    const auto errs = one_step_errors(model, batch);
    std::string csv = "t,err\n";
    for (size_t t = 0; t < errs.size(); ++t) {
        csv += std::to_string(t) + ',' + (errs[t] ? io::format_double(*errs[t]) : std::string{}) + '\n';
    }
    io::write_text(config.out_dir / "predict.csv", csv);
    const double worst = max_of(errs);
    log << "predict: max relative error " << io::format_double(worst) << '\n';
    return worst <= config.thresholds.prediction_error ? kExitOk : kExitThreshold;
}

int cmd_control(const ExperimentConfig& config, std::ostream& log) {
    const LtvSystem sys = config.make_plant();
    config.validate_against(sys);
    const int q = config.q ? *config.q : minimal_order(sys.n(), sys.m());
    TvArmaModel model;
    if (config.model_source == "fundamental") {
        model = fundamental_model(sys, q, config.tol);
    } else {
        RolloutBatch batch = training_batch(config, sys);
        if (config.model_horizon > 0) batch = truncate_batch(batch, config.model_horizon);
        model = fit_all(batch, q, config.tol);
    }
    const InfoStateModel info = realize_tv(model);
    const Vector x0 = config.x0.value_or(Vector::Ones(sys.n()));
    const Matrix warmup = Matrix::Zero(sys.r(), std::max(q - 1, 0));
    const EquivalenceReport rep = run_equivalence(sys, info, config.cost(sys.m(), sys.r()), x0, warmup);

    io::write_equivalence_csv(config.out_dir / "equivalence.csv", rep);
    Json summary = io::equivalence_summary(rep);
    summary["q"] = q;
    summary["horizon"] = sys.horizon();
    io::write_json(config.out_dir / "equivalence_summary.json", summary);
    log << "control: relative cost gap " << io::format_double(rep.rel_gap) << ", max input difference "
        << io::format_double(rep.max_u_diff()) << '\n';
    const bool ok = rep.rel_gap <= config.thresholds.rel_cost_gap &&
                    rep.max_u_diff() <= config.thresholds.input_difference;
    return ok ? kExitOk : kExitThreshold;
}

int cmd_okid(const ExperimentConfig& config, std::ostream& log) {
    const LtvSystem sys = config.make_plant();
    config.validate_against(sys);
    if (!sys.is_time_invariant()) throw ValidationError("okid: the baseline needs a time-invariant plant");
    const RolloutBatch batch = config.batch.empty() ? training_batch(config, sys) : io::read_batch(config.batch);
    const int q = order_for(config, sys);

    const ObserverMarkov om = fit_observer_markov(batch, q, config.tol);
    const int blocks = sys.n() + 2;
    const std::vector<Matrix> open_loop = recover_open_loop_markov(om, 2 * blocks);
    const EraRealization real = era(open_loop, 0, blocks, blocks, config.tol);
    const Matrix gain = recover_observer_gain(real, om, config.tol);
    const MismatchReport rep = mismatch_report(real, gain, om, true_markov(sys, q + 1));

    io::write_mismatch_csv(config.out_dir / "mismatch.csv", rep);
    Json summary;
    summary["q"] = q;
    summary["order"] = real.order;
    summary["zero_initial_conditions"] = om.zero_initial_conditions;
    summary["deadbeat_residual"] = rep.deadbeat_residual;
    summary["max_eig_modulus"] = rep.max_eig_modulus;
    summary["max_err_openloop_Y"] = rep.max_openloop();
    summary["max_err_observer_Ybar"] = rep.max_observer();
    std::vector<double> sv(real.hankel_singular_values.data(),
                           real.hankel_singular_values.data() + real.hankel_singular_values.size());
    summary["hankel_singular_values"] = sv;
    io::write_json(config.out_dir / "okid_summary.json", summary);
    log << "okid: open-loop error " << io::format_double(rep.max_openloop()) << ", observer error "
        << io::format_double(rep.max_observer()) << ", deadbeat residual "
        << io::format_double(rep.deadbeat_residual) << '\n';
    return rep.max_openloop() <= config.thresholds.okid_openloop ? kExitOk : kExitThreshold;
}

int cmd_noise_identify(const ExperimentConfig& config, std::ostream& log) {
    if (!config.noise) throw ValidationError("noise-identify: config needs 'noise' covariances");
    const LtvSystem sys = config.make_plant();
    config.validate_against(sys);
    const int q = order_for(config, sys);
    const RolloutBatch batch = training_batch(config, sys);
    const RolloutBatch held = heldout_batch(config, sys);

    std::vector<io::NoiseReportRow> rows;
    TvArmaModel model;
    model.q = q;
    model.m = sys.m();
    model.r = sys.r();
    model.horizon = sys.horizon();
    for (int t = q; t <= sys.horizon(); ++t) {
        NoisyFit corrected = fit_arma_noisy(batch, t, q, *config.noise, config.tol);
        const ArmaCoefficients plain = fit_arma_uncorrected(batch, t, q, config.tol);
        const ArmaCoefficients truth = fundamental_arma(sys, t, q, config.tol);
        const DataMatrix dm = assemble(held, t, q);
        const Matrix ref = predict_columns(truth, dm.regressors);
        const double scale = ref.norm() > 0.0 ? ref.norm() : 1.0;
        io::NoiseReportRow row;
        row.t = t;
        row.samples = batch.size();
        row.corrected = (predict_columns(corrected.coefficients, dm.regressors) - ref).norm() / scale;
        row.uncorrected = (predict_columns(plain, dm.regressors) - ref).norm() / scale;
        rows.push_back(row);
        if (corrected.indefinite) {
            model.warnings.push_back("t = " + std::to_string(t) + ": corrected moment matrix is indefinite");
        }
        model.coefficients.push_back(std::move(corrected.coefficients));
    }
    io::write_noise_report(config.out_dir / "noise_report.csv", rows);
    io::write_json(config.out_dir / "arma_model.json", io::arma_model_to_json(model));
    double sum_c = 0.0, sum_u = 0.0;
    for (const auto& r : rows) {
        sum_c += r.corrected;
        sum_u += r.uncorrected;
    }
    log << "noise-identify: mean relative prediction error corrected "
        << io::format_double(sum_c / static_cast<double>(rows.size())) << ", uncorrected "
        << io::format_double(sum_u / static_cast<double>(rows.size())) << '\n';
    for (const std::string& w : model.warnings) log << "warning: " << w << '\n';
    return kExitOk;
}

int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log,
                std::ostream& err) {
    try {
        if (name == "simulate") return cmd_simulate(config, log);
        if (name == "identify") return cmd_identify(config, log);
        if (name == "predict") return cmd_predict(config, log);
        if (name == "control") return cmd_control(config, log);
        if (name == "okid") return cmd_okid(config, log);
        if (name == "noise-identify") return cmd_noise_identify(config, log);
        err << "unknown command '" << name << "'\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace isid::cli
