#include "isid/config.hpp"

#include "isid/errors.hpp"
#include "isid/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace isid {

namespace {

using Json = io::Json;

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ValidationError("config: unknown key '" + where + key + "'");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("config: '" + where + key + "' has the wrong type");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    reject_unknown(j,
                   {"plant", "plant_file", "rollouts", "heldout_rollouts", "horizon", "seed", "inputs",
                    "init", "q", "q_max", "tol", "noise", "cost", "x0", "model_source", "model_horizon",
                    "batch", "model", "out_dir", "thresholds"},
                   "");
    ExperimentConfig c;
    if (j.contains("plant")) c.plant = get<std::string>(j, "plant", "");
    if (j.contains("plant_file")) c.plant_file = resolve(base_dir, get<std::string>(j, "plant_file", ""));
    if (!c.plant.empty() && !c.plant_file.empty()) {
        throw ValidationError("config: give either 'plant' or 'plant_file', not both");
    }
    if (j.contains("rollouts")) c.rollouts = get<int>(j, "rollouts", "");
    if (j.contains("heldout_rollouts")) c.heldout_rollouts = get<int>(j, "heldout_rollouts", "");
    if (j.contains("horizon")) c.horizon = get<int>(j, "horizon", "");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "");
    if (j.contains("inputs")) {
        const Json& in = j["inputs"];
        reject_unknown(in, {"law", "sigma"}, "inputs.");
        if (in.contains("law") && get<std::string>(in, "law", "inputs.") != "gaussian") {
            throw ValidationError("config: inputs.law must be \"gaussian\"");
        }
        if (in.contains("sigma")) c.input_sigma = get<double>(in, "sigma", "inputs.");
    }
    if (j.contains("init")) {
        const Json& in = j["init"];
        reject_unknown(in, {"law", "sigma"}, "init.");
        if (in.contains("law")) c.init = get<std::string>(in, "law", "init.");
        if (c.init != "zero" && c.init != "gaussian") {
            throw ValidationError("config: init.law must be \"zero\" or \"gaussian\"");
        }
        if (in.contains("sigma")) c.init_sigma = get<double>(in, "sigma", "init.");
    }
    if (j.contains("q")) {
        if (j["q"].is_string()) {
            if (j["q"].get<std::string>() != "auto") throw ValidationError("config: q must be \"auto\" or an integer");
        } else {
            c.q = get<int>(j, "q", "");
        }
    }
    if (j.contains("q_max")) c.q_max = get<int>(j, "q_max", "");
    if (j.contains("tol")) c.tol = get<double>(j, "tol", "");
    if (j.contains("noise") && !j["noise"].is_null()) {
        const Json& nz = j["noise"];
        reject_unknown(nz, {"process", "measurement"}, "noise.");
        if (!nz.contains("process") || !nz.contains("measurement")) {
            throw ValidationError("config: noise needs both 'process' and 'measurement' covariances");
        }
        NoiseSpec ns;
        ns.process = io::matrix_from_json(nz["process"], "noise.process");
        ns.measurement = io::matrix_from_json(nz["measurement"], "noise.measurement");
        c.noise = ns;
    }
    if (j.contains("cost")) {
        const Json& cj = j["cost"];
        reject_unknown(cj, {"output_weight", "input_weight", "terminal_weight"}, "cost.");
        if (cj.contains("output_weight")) c.cost_output = io::matrix_from_json(cj["output_weight"], "cost.output_weight");
        if (cj.contains("input_weight")) c.cost_input = io::matrix_from_json(cj["input_weight"], "cost.input_weight");
        if (cj.contains("terminal_weight")) {
            c.cost_terminal = io::matrix_from_json(cj["terminal_weight"], "cost.terminal_weight");
        }
    }
    if (j.contains("x0")) {
        const Matrix v = io::matrix_from_json(j["x0"], "x0");
        if (v.cols() != 1) throw ValidationError("config: x0 must be a flat array");
        c.x0 = Vector(v.col(0));
    }
    if (j.contains("model_source")) {
        c.model_source = get<std::string>(j, "model_source", "");
        if (c.model_source != "identified" && c.model_source != "fundamental") {
            throw ValidationError("config: model_source must be \"identified\" or \"fundamental\"");
        }
    }
    if (j.contains("model_horizon")) c.model_horizon = get<int>(j, "model_horizon", "");
    if (j.contains("batch")) c.batch = resolve(base_dir, get<std::string>(j, "batch", ""));
    if (j.contains("model")) c.model = resolve(base_dir, get<std::string>(j, "model", ""));
    if (j.contains("out_dir")) c.out_dir = get<std::string>(j, "out_dir", "");
    if (j.contains("thresholds")) {
        const Json& th = j["thresholds"];
        reject_unknown(th, {"prediction_error", "rel_cost_gap", "input_difference", "okid_openloop"},
                       "thresholds.");
        if (th.contains("prediction_error")) c.thresholds.prediction_error = get<double>(th, "prediction_error", "thresholds.");
        if (th.contains("rel_cost_gap")) c.thresholds.rel_cost_gap = get<double>(th, "rel_cost_gap", "thresholds.");
        if (th.contains("input_difference")) c.thresholds.input_difference = get<double>(th, "input_difference", "thresholds.");
        if (th.contains("okid_openloop")) c.thresholds.okid_openloop = get<double>(th, "okid_openloop", "thresholds.");
    }

    if (c.rollouts < 1) throw ValidationError("config: rollouts must be at least 1");
    if (c.heldout_rollouts < 1) throw ValidationError("config: heldout_rollouts must be at least 1");
    if (c.horizon < 0) throw ValidationError("config: horizon must be non-negative");
    if (c.q && *c.q < 1) throw ValidationError("config: q must be at least 1");
    if (c.q_max < 1) throw ValidationError("config: q_max must be at least 1");
    if (!(c.tol > 0.0 && c.tol < 1.0)) throw ValidationError("config: tol must lie in (0, 1)");
    if (!(c.input_sigma > 0.0)) throw ValidationError("config: inputs.sigma must be positive");
    if (!(c.init_sigma >= 0.0)) throw ValidationError("config: init.sigma must be non-negative");
    if (c.model_horizon < 0) throw ValidationError("config: model_horizon must be non-negative");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

LtvSystem ExperimentConfig::make_plant() const {
    if (!plant_file.empty()) {
        LtvSystem sys = io::load_plant_json(plant_file);
        if (horizon > 0 && horizon != sys.horizon()) {
            if (!sys.is_time_invariant()) throw ValidationError("config: horizon disagrees with the plant file");
            sys = sys.with_horizon(horizon);
        }
        return sys;
    }
    if (plant.empty()) throw ValidationError("config: no plant given");
    try {
        return make_builtin_plant(plant, horizon);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

QuadraticCost ExperimentConfig::cost(int m, int r) const {
    QuadraticCost c;
    c.output_weight = cost_output.value_or(Matrix::Identity(m, m));
    c.input_weight = cost_input.value_or(Matrix::Identity(r, r));
    c.terminal_weight = cost_terminal.value_or(c.output_weight);
    return c;
}

void ExperimentConfig::validate_against(const LtvSystem& sys) const {
    if (noise) {
        try {
            noise->validate(sys.m(), sys.r());
        } catch (const std::exception& e) {
            throw ValidationError(std::string("config: noise: ") + e.what());
        }
    }
    try {
        cost(sys.m(), sys.r()).validate(sys.m(), sys.r());
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: cost: ") + e.what());
    }
    if (x0 && x0->size() != sys.n()) {
        throw ValidationError("config: x0 has " + std::to_string(x0->size()) + " entries, plant has n = " +
                              std::to_string(sys.n()));
    }
    if (q && *q > sys.horizon()) throw ValidationError("config: q exceeds the horizon");
    if (model_horizon > sys.horizon()) throw ValidationError("config: model_horizon exceeds the horizon");
}

}  // namespace isid
