#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "gammachan/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for the quadratic gamma channel"};
    app.fallthrough();

    gammachan::RunOptions opts;
    std::uint64_t seed_value = 0;
    bool seed_set = false;
    app.add_option("--config", opts.config_path, "configuration file path");
    auto* seed_opt = app.add_option("--seed", seed_value, "override estimation.seed");
    app.add_option("--jobs", opts.jobs, "worker threads for the check queue")
        ->check(CLI::PositiveNumber);
    app.add_flag("--print-config", opts.print_config,
                 "print the effective configuration and exit");

    for (const auto& name : gammachan::subcommand_names()) {
        app.add_subcommand(name);
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    }
    seed_set = seed_opt->count() > 0;
    if (seed_set) opts.seed = seed_value;

    const auto picked = app.get_subcommands();
    if (!picked.empty()) {
        opts.subcommand = picked.front()->get_name();
    } else if (!opts.print_config) {
        std::fprintf(stderr, "a subcommand is required\n%s", app.help().c_str());
        return 2;
    }
    return gammachan::run_cli(opts);
}
