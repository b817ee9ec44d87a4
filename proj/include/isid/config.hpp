#pragma once

#include "isid/control.hpp"
#include "isid/plants.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace isid {

struct Thresholds {
    double prediction_error = 1e-6;  // identify (held-out) and predict
    double rel_cost_gap = 1e-6;      // control
    double input_difference = 1e-7;  // control, relative per step
    double okid_openloop = 1e-6;     // okid, max open-loop Markov error
};

// One experiment. Parsed from JSON; unknown keys are rejected.
struct ExperimentConfig {
    std::string plant;                     // built-in name
    std::filesystem::path plant_file;      // external plant JSON (exclusive with plant)
    int rollouts = 200;
    int heldout_rollouts = 100;
    int horizon = 0;                       // 0 keeps the plant's default
    std::uint64_t seed = 0;
    double input_sigma = 1.0;              // i.i.d. Gaussian excitation
    std::string init = "zero";             // "zero" or "gaussian"
    double init_sigma = 1.0;
    std::optional<int> q;                  // nullopt = automatic order selection
    int q_max = 10;
    double tol = kDefaultRankTol;
    std::optional<NoiseSpec> noise;
    std::optional<Matrix> cost_output;     // defaults to identity
    std::optional<Matrix> cost_input;
    std::optional<Matrix> cost_terminal;
    std::optional<Vector> x0;              // control initial state; default ones
    std::string model_source = "identified";  // control: "identified" or "fundamental"
    int model_horizon = 0;                 // control: identify on a shorter window when > 0
    std::filesystem::path batch;           // identify / predict / okid input
    std::filesystem::path model;           // predict input (ARMA model JSON)
    std::filesystem::path out_dir = "out";
    Thresholds thresholds;

    // Resolves the plant (built-in or file) with the configured horizon.
    LtvSystem make_plant() const;
    QuadraticCost cost(int m, int r) const;
    // Dimension checks against the plant; throws ValidationError.
    void validate_against(const LtvSystem& sys) const;
};

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace isid
