#include "degenpar/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Time-degenerate parabolic equations: solver, estimates and oracles"};
    app.require_subcommand(1);

    std::string config;
    degenpar::RunOptions opts;
    std::uint64_t seed = 0;
    for (const auto& name : degenpar::subcommands()) {
        auto* sub = app.add_subcommand(name, degenpar::describe(name));
        sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--workers", opts.workers, "worker threads for sampling")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "override the experiment seed");
        sub->add_option("--tolerance-scale", opts.tolerance_scale, "multiply declared tolerances")
            ->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : degenpar::exit_invalid_config;
    }
    auto* chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) opts.seed = seed;
    return degenpar::run_file(chosen->get_name(), config, opts, std::cerr);
}
