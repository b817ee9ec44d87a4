#pragma once

#include "isid/arma.hpp"
#include "isid/config.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace isid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitThreshold = 2;

// Each command writes its files under config.out_dir and returns an exit
// code. Library errors propagate; run_command maps them to kExitValidation.
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);
int cmd_identify(const ExperimentConfig& config, std::ostream& log);
int cmd_predict(const ExperimentConfig& config, std::ostream& log);
int cmd_control(const ExperimentConfig& config, std::ostream& log);
int cmd_okid(const ExperimentConfig& config, std::ostream& log);
int cmd_noise_identify(const ExperimentConfig& config, std::ostream& log);

// Dispatches by subcommand name and converts exceptions to exit codes.
int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log,
                std::ostream& err);

// Seed of the held-out batch drawn alongside a training batch.
std::uint64_t heldout_seed(std::uint64_t seed);

// One-step prediction error per step t (index t, empty for t < q):
// sum over channels of the mean |z - z_hat| across rollouts, divided by the
// same sum for |z|.
std::vector<std::optional<double>> one_step_errors(const TvArmaModel& model, const RolloutBatch& batch);

// Keeps steps 0..horizon of every rollout.
RolloutBatch truncate_batch(const RolloutBatch& batch, int horizon);

}  // namespace isid::cli
