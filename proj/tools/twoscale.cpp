#include "tscp/config.hpp"
#include "tscp/experiments.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <utility>

int main(int argc, char** argv)
{
    CLI::App app{"Two-scale multitype contact process experiments"};
    app.require_subcommand(1, 1);

    std::string config_path;
    tscp::RunOptions opt;
    std::string out = ".";
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "run the process and write densities and snapshots"},
        {"extinction", "extinction time of the 2's from a single 2 in one patch"},
        {"couple", "conditional goodness and the percolation comparison"},
        {"coexist", "persistence of both types against the N=1 control"},
        {"dualstats", "renewal points and the center subsequence of dual trees"},
        {"perc", "survival of oriented site percolation"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--replicates", opt.replicates, "replicate count (overrides exp.replicates)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--threads", opt.threads, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    opt.out = out;

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const tscp::Config cfg = tscp::Config::load(config_path);
        return tscp::run_command(command, cfg, opt);
    } catch (const tscp::ConfigError& e) {
        std::cerr << "twoscale: config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "twoscale: " << e.what() << '\n';
        return 3;
    }
}
