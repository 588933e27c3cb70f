#include "chemolab/entire_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

const char* to_string(EntireKind k) {
    switch (k) {
        case EntireKind::pullback: return "pullback";
        case EntireKind::periodic: return "periodic";
        case EntireKind::steady: return "steady";
        case EntireKind::homogeneous: return "homogeneous";
    }
    return "unknown";
}

Field advance(const PdeSolver& solver, const Field& u, double t_from, double t_to, double dt, Scheme scheme,
              FluxScheme flux) {
    if (!(t_to > t_from)) return u;
    const double span = t_to - t_from;
    const double steps = std::max(1.0, std::round(span / dt));
    StepController ctrl = StepController::fixed(span / steps, scheme);
    ctrl.flux = flux;
    IntegrateOptions opts;
    opts.stride = std::numeric_limits<std::size_t>::max();
    opts.keep_fields = false;
    Trajectory traj = integrate(solver, u, t_from, t_to, ctrl, opts);
    switch (traj.outcome) {
        case Outcome::completed: break;
        case Outcome::blow_up: throw BlowUpError("trajectory blew up", traj.outcome_time);
        case Outcome::step_failure:
            throw StepFailureError("fixed step rejected: " + traj.reason, traj.outcome_time);
    }
    return std::move(traj.final_state.u);
}

namespace {

void summarize(EntireSolutionApprox& e) {
    e.floor = std::numeric_limits<double>::infinity();
    e.ceiling = -std::numeric_limits<double>::infinity();
    for (const auto& f : e.series) {
        e.floor = std::min(e.floor, f.min());
        e.ceiling = std::max(e.ceiling, f.max());
    }
}

double box_upper(const Params& p) {
    try {
        return compute_M(p);
    } catch (const DenominatorNotPositive&) {
        throw InvalidArgument("the global-existence margin is not positive, no invariant box");
    }
}

/// Sample count and step so that every sample interval holds a whole number of steps.
struct Chunking {
    std::size_t samples;
    double chunk;
};

Chunking chunking(double span, double spacing) {
    const auto m = static_cast<std::size_t>(std::max(1.0, std::round(span / spacing)));
    return {m, span / static_cast<double>(m)};
}

}  // namespace

Field EntireSolutionApprox::at(double t) const {
    if (series.empty()) throw InvalidArgument("entire solution has no stored series");
    if (kind == EntireKind::steady || series.size() == 1) return series.front();
    double s = t;
    if (kind == EntireKind::periodic && period > 0.0) {
        s = std::fmod(t - times.front(), period);
        if (s < 0.0) s += period;
        s += times.front();
    }
    if (s <= times.front()) return series.front();
    if (s >= times.back()) return series.back();
    const auto it = std::lower_bound(times.begin(), times.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double w = (s - times[k - 1]) / (times[k] - times[k - 1]);
    if (std::abs(1.0 - w) < 1e-12) return series[k];
    if (w < 1e-12) return series[k - 1];
    Field out(series[k].grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * series[k - 1][i] + w * series[k][i];
    return out;
}

void EntireSolutionApprox::write_report(std::ostream& out) const {
    out << "kind=" << to_string(kind) << '\n';
    if (kind == EntireKind::periodic) out << "period=" << csv::num(period) << '\n';
    out << "residual=" << csv::num(residual) << '\n';
    out << "floor=" << csv::num(floor) << '\n';
    out << "ceiling=" << csv::num(ceiling) << '\n';
    out << "M=" << csv::num(M) << '\n';
    out << "start_value=" << csv::num(start_value) << '\n';
    out << "iterations=" << iterations << '\n';
    if (kind == EntireKind::periodic) out << "reintegration_residual=" << csv::num(reintegration_residual) << '\n';
}

void EntireSolutionApprox::write_series_csv(std::ostream& out) const {
    csv::header(out, {"t", "u_min", "u_max", "mass"});
    for (std::size_t k = 0; k < series.size(); ++k)
        csv::row(out, {times[k], series[k].min(), series[k].max(), quadrature(series[k])});
}

EntireSolutionApprox pullback_entire(const Params& p, std::size_t n_max, double window, const EntireOptions& opts) {
    if (n_max < 1) throw InvalidArgument("pullback_entire: n_max must be at least 1");
    if (!(window >= 0.0)) throw InvalidArgument("pullback_entire: negative window");
    const PdeSolver solver(p);
    EntireSolutionApprox e;
    e.kind = EntireKind::pullback;
    e.M = box_upper(p);
    e.start_value = opts.start_fraction * e.M;
    const Chunking ch = window > 0.0 ? chunking(window, opts.sample_spacing) : Chunking{0, 0.0};

    std::vector<Field> prev;
    double diff = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1;; n = std::min(2 * n, n_max)) {
        Field u = advance(solver, Field(p.grid, e.start_value), -static_cast<double>(n), 0.0, opts.dt, opts.scheme,
                          opts.flux);
        std::vector<Field> cur{u};
        for (std::size_t k = 0; k < ch.samples; ++k) {
            u = advance(solver, u, static_cast<double>(k) * ch.chunk, static_cast<double>(k + 1) * ch.chunk, opts.dt,
                        opts.scheme, opts.flux);
            cur.push_back(u);
        }
        ++e.iterations;
        if (!prev.empty()) {
            diff = 0.0;
            for (std::size_t k = 0; k < cur.size(); ++k) diff = std::max(diff, sup_distance(cur[k], prev[k]));
        }
        prev = std::move(cur);
        if (diff < opts.tol) break;
        if (n >= n_max) throw NoConvergence("pullback did not converge by n_max", diff);
    }
    e.residual = diff;
    e.series = std::move(prev);
    e.times.resize(e.series.size());
    for (std::size_t k = 0; k < e.times.size(); ++k) e.times[k] = static_cast<double>(k) * ch.chunk;
    e.representative = e.series.front();
    summarize(e);
    return e;
}

bool coefficients_are_periodic(const Params& p, double T) {
    const SampledTriple s(p.triple, p.grid);
    std::vector<double> x(p.grid.size()), y(p.grid.size());
    for (int which = 0; which < 3; ++which)
        for (int k = 0; k < 64; ++k) {
            const double t = p.horizon.t_lo + T * k / 64.0;
            s.fill(which, t, x);
            s.fill(which, t + T, y);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (std::abs(x[i] - y[i]) > 1e-12 * std::max(1.0, std::abs(x[i]))) return false;
        }
    return true;
}

bool coefficients_are_autonomous(const Params& p) {
    const SampledTriple s(p.triple, p.grid);
    std::vector<double> x(p.grid.size()), y(p.grid.size());
    const double probes[] = {0.1234, 1.7, 3.3, 10.9, 37.1, 123.4};
    for (int which = 0; which < 3; ++which) {
        s.fill(which, 0.0, x);
        for (double t : probes) {
            s.fill(which, t, y);
            for (std::size_t i = 0; i < x.size(); ++i)
                if (std::abs(x[i] - y[i]) > 1e-14 * std::max(1.0, std::abs(x[i]))) return false;
        }
    }
    return true;
}

EntireSolutionApprox periodic_fixed_point(const Params& p, double T, const EntireOptions& opts) {
    if (!(T > 0.0)) throw InvalidArgument("periodic_fixed_point: period must be positive");
    if (!coefficients_are_periodic(p, T)) throw NotPeriodicCoefficients("coefficients are not T-periodic");
    const PdeSolver solver(p);
    EntireSolutionApprox e;
    e.kind = EntireKind::periodic;
    e.period = T;
    e.M = box_upper(p);
    e.start_value = opts.start_fraction * e.M;
    const Chunking ch = chunking(T, opts.sample_spacing);

    // One period map application, optionally keeping the sample fields.
    auto period_map = [&](const Field& u0, std::vector<Field>* keep) {
        Field u = u0;
        if (keep) keep->push_back(u);
        for (std::size_t k = 0; k < ch.samples; ++k) {
            u = advance(solver, u, static_cast<double>(k) * ch.chunk, static_cast<double>(k + 1) * ch.chunk, opts.dt,
                        opts.scheme, opts.flux);
            if (keep) keep->push_back(u);
        }
        return u;
    };

    Field u(p.grid, e.start_value);
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
        Field next = period_map(u, nullptr);
        residual = sup_distance(next, u);
        u = std::move(next);
        e.iterations = it + 1;
        if (residual < opts.tol) break;
    }
    if (!(residual < opts.tol)) throw NoConvergence("period map iteration hit the cap", residual);
    e.residual = residual;
    e.representative = u;
    const Field again = period_map(u, &e.series);
    e.series.pop_back();
    e.reintegration_residual = sup_distance(again, u);
    for (std::size_t k = 0; k <= ch.samples; ++k) e.times.push_back(static_cast<double>(k) * ch.chunk);
    e.series.push_back(u);  // closes the period at t = T
    summarize(e);
    return e;
}

EntireSolutionApprox steady_state(const Params& p, const EntireOptions& opts, double tol) {
    if (!coefficients_are_autonomous(p)) throw NotAutonomousCoefficients("coefficients depend on time");
    const PdeSolver solver(p);
    EntireSolutionApprox e;
    e.kind = EntireKind::steady;
    e.M = box_upper(p);
    e.start_value = opts.start_fraction * e.M;
    Field u(p.grid, e.start_value);
    double residual = std::numeric_limits<double>::infinity();
    const auto cap = static_cast<std::size_t>(std::max(1.0, opts.max_time));
    for (std::size_t k = 0; k < cap; ++k) {
        Field next = advance(solver, u, static_cast<double>(k), static_cast<double>(k + 1), opts.dt, opts.scheme,
                             opts.flux);
        residual = sup_distance(next, u);
        u = std::move(next);
        e.iterations = k + 1;
        if (residual < tol) break;
    }
    if (!(residual < tol)) throw NoConvergence("pseudo-time marching did not settle", residual);
    e.residual = residual;
    e.representative = u;
    e.series = {u};
    e.times = {0.0};
    summarize(e);
    return e;
}

HomogeneousEntire homogeneous_entire(const Params& p, std::pair<double, double> t_range, const LogisticOptions& opts) {
    if (!p.triple.spatially_homogeneous()) throw NotSpatiallyHomogeneous("homogeneous_entire needs x-independent coefficients");
    const CoefficientTriple c = p.triple;
    const double m = p.measure();
    const Point origin{0.0, 0.0};
    TimeFunction a = [c, origin](double t) { return eval(c, 0, t, origin); };
    TimeFunction b = [c, origin, m](double t) { return eval(c, 1, t, origin) + m * eval(c, 2, t, origin); };
    HomogeneousEntire out;
    out.u_star = logistic_entire_solution(a, b, p.horizon, t_range, opts);
    out.v_star = out.u_star;
    return out;
}

void StabilityReport::write_report(std::ostream& out) const {
    out << "initials=" << final_distance.size() << '\n';
    out << "tolerance=" << csv::num(tolerance) << '\n';
    for (std::size_t i = 0; i < final_distance.size(); ++i) {
        out << "final_distance_" << i << "=" << csv::num(final_distance[i]) << '\n';
        out << "fitted_rate_" << i << "=" << csv::num(fitted_rate[i]) << '\n';
    }
    out << "success=" << (success ? "true" : "false") << '\n';
}

void StabilityReport::write_csv(std::ostream& out) const {
    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < distances.size(); ++i) cols.push_back("distance_" + std::to_string(i));
    csv::header(out, cols);
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row{times[k]};
        for (const auto& d : distances) row.push_back(d[k]);
        csv::row(out, row);
    }
    out << "fitted_rate";
    for (double r : fitted_rate) out << ',' << csv::num(r);
    out << '\n';
}

StabilityReport stability_experiment(const Params& p, const std::vector<Field>& initial_family, double t0,
                                     double t_end, const std::function<Field(double)>& reference,
                                     const StabilityOptions& opts) {
    if (initial_family.empty()) throw InvalidArgument("stability_experiment: empty initial family");
    if (!(t_end > t0)) throw InvalidArgument("stability_experiment: t_end must exceed t0");
    const PdeSolver solver(p);
    const Chunking ch = chunking(t_end - t0, opts.sample_spacing);

    StabilityReport rep;
    rep.tolerance = opts.tolerance;
    for (std::size_t k = 0; k <= ch.samples; ++k) rep.times.push_back(t0 + static_cast<double>(k) * ch.chunk);
    // Reference fields are computed once, before the workers start.
    std::vector<Field> refs;
    refs.reserve(rep.times.size());
    for (double t : rep.times) refs.push_back(reference(t));

    auto run = [&](const Field& u0) {
        std::vector<double> d{sup_distance(u0, refs[0])};
        Field u = u0;
        for (std::size_t k = 0; k < ch.samples; ++k) {
            u = advance(solver, u, rep.times[k], rep.times[k + 1], opts.dt, opts.scheme);
            d.push_back(sup_distance(u, refs[k + 1]));
        }
        return d;
    };
    std::vector<std::future<std::vector<double>>> jobs;
    for (const auto& u0 : initial_family) jobs.push_back(std::async(std::launch::async, run, std::cref(u0)));
    for (auto& j : jobs) rep.distances.push_back(j.get());

    const double tail_start = t_end - opts.tail_fraction * (t_end - t0);
    rep.success = true;
    for (const auto& d : rep.distances) {
        std::vector<double> tt, dd;
        for (std::size_t k = 0; k < d.size(); ++k)
            if (rep.times[k] >= tail_start) {
                tt.push_back(rep.times[k]);
                dd.push_back(d[k]);
            }
        rep.fitted_rate.push_back(fit_exponential_decay(tt, dd, 1e-13).rate);
        rep.final_distance.push_back(d.back());
        if (!(d.back() < opts.tolerance)) rep.success = false;
    }
    return rep;
}

}  // namespace chemolab
