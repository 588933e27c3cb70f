#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chemolab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Parabolic-elliptic chemotaxis simulator with local and nonlocal logistic sources"};
    std::string command;
    std::string config;
    std::string out_dir;
    chemolab::RunOptions opts;
    app.add_option("command", command, "check, simulate, envelope, entire, periodic, steady, sweep or verify")
        ->required()
        ->check(CLI::IsMember(chemolab::command_names()));
    app.add_option("--config,-c", config, "scenario config file");
    app.add_option("--out,-o", out_dir, "output directory (overrides scenario.out_dir)");
    app.add_flag("--strict", opts.strict, "exit with 2 when the hypotheses fail");
    app.add_option("--jobs,-j", opts.jobs, "worker threads for sweep and verify (default: CHEMOLAB_JOBS or all cores)")
        ->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : chemolab::exit_usage;
    }
    if (!out_dir.empty()) opts.out_dir = out_dir;
    const std::optional<std::string> path = config.empty() ? std::nullopt : std::optional<std::string>(config);
    return chemolab::run_from_path(command, path, opts, std::cout, std::cerr);
}
