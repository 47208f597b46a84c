#include "harmonic/app/commands.hpp"
#include "harmonic/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace harmonic::app;

    CLI::App app{"Solution curves of Laplacian(u) + g(u) = mu f with Dirichlet conditions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;

    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario file (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "eigensolver start-vector seed")->each([&](const std::string&) {
            seed_given = true;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    ScenarioConfig config;
    try {
        config = load_config(config_path);
    } catch (const harmonic::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return exit_validation;
    }
    if (seed_given) {
        config.seed = seed;
    }
    return run_command(app.get_subcommands().front()->get_name(), config, out_dir, std::cout, std::cerr);
}
