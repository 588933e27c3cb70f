#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/config.hpp"

namespace chemolab {

/// Exit codes of the command runner.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_hypothesis = 2,
    exit_blowup = 3,
    exit_numerical = 4,
};

/// Worker count from CHEMOLAB_JOBS, else the hardware concurrency (at least 1).
std::size_t default_jobs();

/// Runs fn(0), ..., fn(n - 1) on up to `jobs` threads. Exceptions escaping
/// fn are rethrown after every index has finished.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct RunOptions {
    std::optional<std::string> out_dir;  ///< overrides the scenario out_dir
    bool strict = false;                 ///< hypothesis violation exits with 2
    std::size_t jobs = 0;                ///< 0 selects default_jobs()
};

const std::vector<std::string>& command_names();

/// Dispatches one command. Summaries go to `out`, diagnostics to `err`.
int run(const std::string& command, const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err);

/// Loads the config (optional for verify) and dispatches; config errors exit with 1.
int run_from_path(const std::string& command, const std::optional<std::string>& config_path, const RunOptions& opts,
                  std::ostream& out, std::ostream& err);

/// One sweep cell.
struct SweepRow {
    std::size_t index = 0;
    std::vector<double> axis_values;
    double h2_margin = 0.0;
    double h2_prime_margin_pos = 0.0;
    double h2_prime_margin_dim = 0.0;
    double M = 0.0;  ///< NaN when unavailable
    std::string outcome;         ///< completed, blowup, step_failure, error
    std::string classification;  ///< bounded, growing, blowup, failed
    double final_t = 0.0;
    double final_u_max = 0.0;
    double max_u_max = 0.0;
    double max_mass = 0.0;
    std::size_t accepted_steps = 0;
    std::string message;
    double runtime_seconds = 0.0;  ///< written to the timing sidecar only
};

/// The scenario with the sweep axis values applied.
Params apply_sweep_point(const Params& base, const std::vector<SweepAxis>& axes, const std::vector<double>& values);

/// Evaluates one cell; never throws.
SweepRow run_sweep_cell(const ScenarioConfig& cfg, std::size_t index, const std::vector<double>& values);

/// Cartesian product of the axes, first axis slowest, cells run concurrently.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, std::size_t jobs);

/// index, <axis names>, h2_margin, h2_prime_margin_pos, h2_prime_margin_dim, M,
/// outcome, classification, final_t, final_u_max, max_u_max, max_mass, accepted_steps, message
void write_sweep_csv(std::ostream& out, const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);
/// index, runtime_seconds
void write_sweep_timing(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace chemolab
