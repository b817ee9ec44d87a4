// isid: identification, prediction, control and OKID experiments from a JSON config.
//
//   isid simulate --config exp.json --out runs/a --seed 7
//   isid identify --config exp.json --q auto
//
// Exit codes: 0 success, 1 invalid input or library error, 2 a configured
// threshold was violated (reports are still written).

#include "isid/commands.hpp"
#include "isid/config.hpp"
#include "isid/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string q;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides out_dir)");
    sub->add_option("--seed", opt.seed, "Random seed (overrides seed)");
    sub->add_option("--q", opt.q, "ARMA order: auto or a positive integer");
    sub->add_option("--tol", opt.tol, "Relative rank tolerance");
}

isid::ExperimentConfig resolve(const Options& opt) {
    isid::ExperimentConfig c = isid::load_config(opt.config);
    if (!opt.out.empty()) c.out_dir = opt.out;
    if (opt.seed) c.seed = *opt.seed;
    if (opt.tol) {
        if (!(*opt.tol > 0.0 && *opt.tol < 1.0)) throw isid::ValidationError("--tol must lie in (0, 1)");
        c.tol = *opt.tol;
    }
    if (opt.q == "auto") {
        c.q.reset();
    } else if (!opt.q.empty()) {
        size_t used = 0;
        int q = 0;
        try {
            q = std::stoi(opt.q, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != opt.q.size() || q < 1) throw isid::ValidationError("--q must be auto or a positive integer");
        c.q = q;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-state system identification"};
    app.require_subcommand(1);
    Options opt;
    const char* names[][2] = {
        {"simulate", "Generate a rollout batch"},
        {"identify", "Fit time-varying ARMA and information-state models"},
        {"predict", "One-step prediction error of a fitted model"},
        {"control", "Information-state vs full-state LQR"},
        {"okid", "OKID baseline mismatch report"},
        {"noise-identify", "Noise-corrected ARMA identification report"},
    };
    for (const auto& n : names) add_common(app.add_subcommand(n[0], n[1]), opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : isid::cli::kExitValidation;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    isid::ExperimentConfig config;
    try {
        config = resolve(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return isid::cli::kExitValidation;
    }
    return isid::cli::run_command(name, config, std::cout, std::cerr);
}
