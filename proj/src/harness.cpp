#include "chemolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "chemolab/acceptance.hpp"
#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::filesystem::path prepare_out(const ScenarioConfig& cfg, const RunOptions& opts) {
    std::filesystem::path dir = opts.out_dir.value_or(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write '" + p.string() + "'");
    return f;
}

/// Strict mode: (H1) and (H2) must hold on the horizon.
void enforce_strict(const ScenarioConfig& cfg, const RunOptions& opts) {
    if (!opts.strict) return;
    const HypothesisReport rep = evaluate_hypotheses(cfg.params, cfg.min_window);
    if (!rep.h1_ok) throw HypothesisViolated("standing assumption on the coefficients fails");
    if (!(rep.h2_margin > 0.0))
        throw HypothesisViolated("global-existence margin " + csv::num(rep.h2_margin) + " is not positive");
}

int cmd_check(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    const auto dir = prepare_out(cfg, opts);
    const HypothesisReport rep = evaluate_hypotheses(cfg.params, cfg.min_window);
    {
        auto f = open_out(dir / "hypotheses.txt");
        rep.write_key_value(f);
    }
    {
        auto f = open_out(dir / "hypotheses.csv");
        rep.write_csv_header(f);
        rep.write_csv_row(f);
    }
    {
        auto f = open_out(dir / "hypotheses_series.csv");
        rep.write_series_csv(f);
    }
    out << "check " << cfg.name << ": h1_ok=" << (rep.h1_ok ? "true" : "false")
        << " h2_margin=" << csv::num(rep.h2_margin) << " M=" << csv::num(rep.M)
        << " r1=" << csv::num(rep.r1) << " r2=" << csv::num(rep.r2)
        << " interval_valid=" << (rep.interval_valid() ? "true" : "false") << '\n';
    if (opts.strict && !(rep.h1_ok && rep.h2_margin > 0.0)) return exit_hypothesis;
    return exit_ok;
}

int cmd_simulate(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    enforce_strict(cfg, opts);
    const auto dir = prepare_out(cfg, opts);
    const SimulateBlock& b = *cfg.simulate;
    const Field u0 = make_initial_field(*cfg.u0, cfg.params.grid, cfg.seed);
    const PdeSolver solver(cfg.params);
    IntegrateOptions io;
    io.stride = b.stride;
    io.keep_fields = b.snapshots;
    const Trajectory tr = integrate(solver, u0, b.t0, b.t_end, cfg.controller, io);
    {
        auto f = open_out(dir / "trajectory.csv");
        tr.write_csv(f);
    }
    if (b.snapshots) {
        std::filesystem::create_directories(dir / "snapshots");
        tr.dump_snapshots((dir / "snapshots").string());
    }
    if (tr.final_state.u.size() == cfg.params.grid.size()) {
        auto f = open_out(dir / "final_u.csv");
        write_field_csv(f, tr.final_state.u);
        write_field_binary((dir / "final_u.bin").string(), tr.final_state.u);
    }
    out << "simulate " << cfg.name << ": outcome=" << to_string(tr.outcome) << " t=" << csv::num(tr.outcome_time)
        << " max_u_max=" << csv::num(tr.max_u_max) << " final_u_max=" << csv::num(tr.final_state.u_max)
        << " accepted=" << tr.accepted_steps << " rejected=" << tr.rejected_steps << '\n';
    switch (tr.outcome) {
        case Outcome::completed: return exit_ok;
        case Outcome::blow_up: return exit_blowup;
        case Outcome::step_failure: return exit_numerical;
    }
    return exit_numerical;
}

int cmd_envelope(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    enforce_strict(cfg, opts);
    const auto dir = prepare_out(cfg, opts);
    const EnvelopeBlock& b = *cfg.envelope;
    const Field u0 = make_initial_field(*cfg.u0, cfg.params.grid, cfg.seed);
    const double ub0 = b.u_bar0.value_or(u0.max());
    const double uu0 = b.u_under0.value_or(u0.min());
    const EnvelopeSeries s = integrate_envelope(cfg.params, ub0, uu0, b.t0, b.t_end);
    {
        auto f = open_out(dir / "envelope.csv");
        s.write_csv(f);
    }
    const DecayFit fit = fit_log_ratio_decay(s, 0.5 * (b.t0 + b.t_end));
    auto f = open_out(dir / "envelope_report.txt");
    f << "u_bar0=" << csv::num(ub0) << "\nu_under0=" << csv::num(uu0) << "\nfinal_u_bar=" << csv::num(s.states.back().u_bar)
      << "\nfinal_u_under=" << csv::num(s.states.back().u_under)
      << "\nlog_ratio_decay_rate=" << csv::num(fit.samples > 1 ? fit.rate : nan_v) << '\n';
    std::string box_text = "unavailable";
    try {
        const LVBox box = lv_box(envelope_lv_coefficients(cfg.params), effective_horizon(cfg.params.triple, cfg.params.horizon));
        f << "box_u_lo=" << csv::num(box.u_lo) << "\nbox_u_hi=" << csv::num(box.u_hi) << "\nbox_v_lo=" << csv::num(box.v_lo)
          << "\nbox_v_hi=" << csv::num(box.v_hi) << '\n';
        box_text = "[" + csv::num(box.v_lo) + "," + csv::num(box.u_hi) + "]";
    } catch (const HypothesisViolated&) {
        f << "box=unavailable\n";
    }
    out << "envelope " << cfg.name << ": final_u_bar=" << csv::num(s.states.back().u_bar)
        << " final_u_under=" << csv::num(s.states.back().u_under)
        << " decay_rate=" << csv::num(fit.samples > 1 ? fit.rate : nan_v) << " interval=" << box_text << '\n';
    return exit_ok;
}

void write_entire(const std::filesystem::path& dir, const std::string& stem, const EntireSolutionApprox& e) {
    {
        auto f = open_out(dir / (stem + "_report.txt"));
        e.write_report(f);
    }
    {
        auto f = open_out(dir / (stem + "_series.csv"));
        e.write_series_csv(f);
    }
    {
        auto f = open_out(dir / (stem + "_u.csv"));
        write_field_csv(f, e.representative);
    }
    write_field_binary((dir / (stem + "_u.bin")).string(), e.representative);
}

void summarize_entire(std::ostream& out, const char* cmd, const ScenarioConfig& cfg, const EntireSolutionApprox& e) {
    out << cmd << ' ' << cfg.name << ": kind=" << to_string(e.kind) << " residual=" << csv::num(e.residual)
        << " iterations=" << e.iterations << " floor=" << csv::num(e.floor) << " ceiling=" << csv::num(e.ceiling)
        << " M=" << csv::num(e.M) << '\n';
}

int cmd_entire(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    enforce_strict(cfg, opts);
    const auto dir = prepare_out(cfg, opts);
    const EntireBlock& b = *cfg.entire;
    const bool homogeneous = b.method == EntireBlock::Method::homogeneous ||
                             (b.method == EntireBlock::Method::automatic && cfg.params.triple.spatially_homogeneous());
    if (homogeneous) {
        const double t0 = cfg.params.horizon.t_lo;
        LogisticOptions lo;
        lo.dt = b.opts.dt;
        const HomogeneousEntire h = homogeneous_entire(cfg.params, {t0, t0 + b.window}, lo);
        auto f = open_out(dir / "entire_homogeneous.csv");
        h.u_star.write_csv(f, "u_star");
        out << "entire " << cfg.name << ": kind=homogeneous u_min=" << csv::num(h.u_star.min())
            << " u_max=" << csv::num(h.u_star.max()) << '\n';
        return exit_ok;
    }
    const EntireSolutionApprox e = pullback_entire(cfg.params, b.n_max, b.window, b.opts);
    write_entire(dir, "entire", e);
    summarize_entire(out, "entire", cfg, e);
    return exit_ok;
}

int cmd_periodic(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    enforce_strict(cfg, opts);
    const auto dir = prepare_out(cfg, opts);
    const PeriodicBlock& b = *cfg.periodic;
    const auto T = b.T ? b.T : cfg.params.triple.common_period();
    if (!T) throw InvalidArgument("periodic.T is required when the coefficients have no common period");
    const EntireSolutionApprox e = periodic_fixed_point(cfg.params, *T, b.opts);
    write_entire(dir, "periodic", e);
    summarize_entire(out, "periodic", cfg, e);
    return exit_ok;
}

int cmd_steady(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    enforce_strict(cfg, opts);
    const auto dir = prepare_out(cfg, opts);
    const EntireSolutionApprox e = steady_state(cfg.params, cfg.steady->opts, cfg.steady->tol);
    write_entire(dir, "steady", e);
    summarize_entire(out, "steady", cfg, e);
    return exit_ok;
}

int cmd_sweep(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out) {
    const auto dir = prepare_out(cfg, opts);
    const auto rows = run_sweep(cfg, opts.jobs ? opts.jobs : default_jobs());
    {
        auto f = open_out(dir / "sweep.csv");
        write_sweep_csv(f, cfg.sweep->axes, rows);
    }
    {
        auto f = open_out(dir / "sweep_timing.csv");
        write_sweep_timing(f, rows);
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rows) ++counts[r.classification];
    out << "sweep " << cfg.name << ": cells=" << rows.size();
    for (const auto& [k, n] : counts) out << ' ' << k << '=' << n;
    out << '\n';
    return exit_ok;
}

int cmd_verify(const ScenarioConfig* cfg, const RunOptions& opts, std::ostream& out) {
    std::filesystem::path dir = opts.out_dir.value_or(cfg ? cfg->out_dir : std::string("out"));
    std::filesystem::create_directories(dir);
    const auto results = run_acceptance(opts.jobs ? opts.jobs : default_jobs());
    auto f = open_out(dir / "acceptance.txt");
    bool all = true;
    for (const auto& r : results) {
        out << format_result(r) << '\n';
        f << format_result(r) << '\n';
        all = all && r.passed;
    }
    out << "verify: " << (all ? "all criteria passed" : "some criteria failed") << '\n';
    return all ? exit_ok : exit_numerical;
}

int dispatch(const std::string& command, const ScenarioConfig* cfg, const RunOptions& opts, std::ostream& out) {
    if (command == "verify") return cmd_verify(cfg, opts, out);
    if (!cfg) throw MissingBlock("command '" + command + "' needs --config");
    cfg->require(command);
    if (command == "check") return cmd_check(*cfg, opts, out);
    if (command == "simulate") return cmd_simulate(*cfg, opts, out);
    if (command == "envelope") return cmd_envelope(*cfg, opts, out);
    if (command == "entire") return cmd_entire(*cfg, opts, out);
    if (command == "periodic") return cmd_periodic(*cfg, opts, out);
    if (command == "steady") return cmd_steady(*cfg, opts, out);
    if (command == "sweep") return cmd_sweep(*cfg, opts, out);
    throw InvalidArgument("unknown command '" + command + "'");
}

/// Maps an exception to an exit code and reports it on `err`.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const HypothesisViolated& e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return exit_hypothesis;
    } catch (const BlowUpError& e) {
        err << "blow-up: " << e.what() << '\n';
        return exit_blowup;
    } catch (const NoConvergence& e) {
        err << "no convergence: " << e.what() << " (residual " << csv::num(e.residual()) << ")\n";
        return exit_numerical;
    } catch (const StepFailureError& e) {
        err << "step failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const OrderViolation& e) {
        err << "order violation: " << e.what() << '\n';
        return exit_numerical;
    } catch (const NonFiniteInput& e) {
        err << "non-finite data: " << e.what() << '\n';
        return exit_numerical;
    } catch (const StepRejected& e) {
        err << "step rejected: " << e.what() << '\n';
        return exit_numerical;
    } catch (const ParseError& e) {
        err << "config parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const MissingBlock& e) {
        err << "config error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_numerical;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

}  // namespace

std::size_t default_jobs() {
    if (const char* env = std::getenv("CHEMOLAB_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t width = std::max<std::size_t>(1, std::min(jobs, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            try {
                fn(k);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"check", "simulate", "envelope", "entire",
                                                "periodic", "steady", "sweep", "verify"};
    return names;
}

int run(const std::string& command, const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err) {
    return guarded(err, [&] { return dispatch(command, &cfg, opts, out); });
}

int run_from_path(const std::string& command, const std::optional<std::string>& config_path, const RunOptions& opts,
                  std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
            throw InvalidArgument("unknown command '" + command + "'");
        if (!config_path) return dispatch(command, nullptr, opts, out);
        const ScenarioConfig cfg = load_config(*config_path);
        return dispatch(command, &cfg, opts, out);
    });
}

Params apply_sweep_point(const Params& base, const std::vector<SweepAxis>& axes, const std::vector<double>& values) {
    Params p = base;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const std::string& name = axes[k].name;
        const double v = values.at(k);
        if (name == "chi")
            p.chi = v;
        else if (name == "a1_base")
            p.triple[1].add_constant(v - p.triple[1].constant_part());
        else if (name == "a2_base")
            p.triple[2].add_constant(v - p.triple[2].constant_part());
        else if (name == "n")
            p.dim_n = static_cast<int>(v);
        else
            throw InvalidArgument("unknown sweep axis '" + name + "'");
    }
    return p;
}

SweepRow run_sweep_cell(const ScenarioConfig& cfg, std::size_t index, const std::vector<double>& values) {
    const auto t_start = std::chrono::steady_clock::now();
    SweepRow row;
    row.index = index;
    row.axis_values = values;
    row.h2_margin = row.h2_prime_margin_pos = row.h2_prime_margin_dim = row.M = nan_v;
    row.final_t = row.final_u_max = row.max_u_max = row.max_mass = nan_v;
    try {
        const SweepBlock& b = *cfg.sweep;
        const Params p = apply_sweep_point(cfg.params, b.axes, values);
        try {
            const HypothesisReport rep = evaluate_hypotheses(p, cfg.min_window);
            row.h2_margin = rep.h2_margin;
            row.h2_prime_margin_pos = rep.h2_prime_margin_pos;
            row.h2_prime_margin_dim = rep.h2_prime_margin_dim;
            row.M = rep.M;
        } catch (const Error& e) {
            row.message = std::string("hypotheses: ") + e.what();
        }
        const Field u0 = make_initial_field(*cfg.u0, p.grid, cfg.seed);
        const PdeSolver solver(p);
        const double t_mid = 0.5 * (b.t0 + b.t_end);
        double first_half_max = u0.max();
        IntegrateOptions io;
        io.stride = b.stride;
        io.keep_fields = false;
        io.observer = [&](const SimState& s) {
            if (s.t <= t_mid) first_half_max = std::max(first_half_max, s.u_max);
        };
        const Trajectory tr = integrate(solver, u0, b.t0, b.t_end, cfg.controller, io);
        row.outcome = to_string(tr.outcome);
        row.final_t = tr.outcome_time;
        row.final_u_max = tr.final_state.u_max;
        row.max_u_max = tr.max_u_max;
        row.max_mass = tr.max_mass;
        row.accepted_steps = tr.accepted_steps;
        if (tr.outcome == Outcome::blow_up) {
            row.classification = "blowup";
            row.message = tr.reason;
        } else if (tr.outcome == Outcome::step_failure) {
            row.classification = "failed";
            row.message = tr.reason;
        } else {
            const bool within_bound =
                std::isfinite(row.M) && tr.max_u_max <= std::max(u0.max(), row.M) * (1.0 + 1e-4);
            const bool still_growing = tr.final_state.u_max > 1.05 * first_half_max;
            row.classification = within_bound || !still_growing ? "bounded" : "growing";
        }
    } catch (const std::exception& e) {
        row.outcome = "error";
        row.classification = "failed";
        row.message = e.what();
    }
    row.runtime_seconds = seconds_since(t_start);
    return row;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, std::size_t jobs) {
    if (!cfg.sweep) throw MissingBlock("command 'sweep' needs a [sweep] block");
    const auto& axes = cfg.sweep->axes;
    std::vector<std::vector<double>> points{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : points)
            for (double v : axis.values) {
                auto q = prefix;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), jobs, [&](std::size_t k) { rows[k] = run_sweep_cell(cfg, k, points[k]); });
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
    std::vector<std::string> cols{"index"};
    for (const auto& a : axes) cols.push_back(a.name);
    for (const char* c : {"h2_margin", "h2_prime_margin_pos", "h2_prime_margin_dim", "M", "outcome", "classification",
                          "final_t", "final_u_max", "max_u_max", "max_mass", "accepted_steps", "message"})
        cols.emplace_back(c);
    csv::header(out, cols);
    for (const auto& r : rows) {
        out << r.index;
        for (double v : r.axis_values) out << ',' << csv::num(v);
        out << ',' << csv::num(r.h2_margin) << ',' << csv::num(r.h2_prime_margin_pos) << ','
            << csv::num(r.h2_prime_margin_dim) << ',' << csv::num(r.M) << ',' << r.outcome << ',' << r.classification
            << ',' << csv::num(r.final_t) << ',' << csv::num(r.final_u_max) << ',' << csv::num(r.max_u_max) << ','
            << csv::num(r.max_mass) << ',' << r.accepted_steps << ',' << sanitize(r.message) << '\n';
    }
}

void write_sweep_timing(std::ostream& out, const std::vector<SweepRow>& rows) {
    csv::header(out, {"index", "runtime_seconds"});
    for (const auto& r : rows) out << r.index << ',' << csv::num(r.runtime_seconds) << '\n';
}

}  // namespace chemolab
