#include "chemolab/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

double quadrature(const Field& u) {
    if (!u.all_finite()) throw NonFiniteInput("quadrature: non-finite input");
    double s = 0.0;
    for (double x : u.values()) s += x;
    return s * u.grid().cell_volume();
}

void StepController::validate() const {
    if (!(dt_min > 0.0) || !(dt_min <= dt_init) || !(dt_init <= dt_max))
        throw InvalidArgument("controller needs 0 < dt_min <= dt_init <= dt_max");
    if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("controller safety must lie in (0, 1]");
    if (!(growth_cap > 1.0)) throw InvalidArgument("controller growth_cap must exceed 1");
    if (!(negativity_tol > 0.0)) throw InvalidArgument("controller negativity_tol must be positive");
    if (blowup_threshold && !(*blowup_threshold > 0.0))
        throw InvalidArgument("controller blowup_threshold must be positive");
    if (grow_after < 1) throw InvalidArgument("controller grow_after must be at least 1");
}

StepController StepController::fixed(double dt, Scheme scheme) {
    StepController c;
    c.dt_init = c.dt_min = c.dt_max = dt;
    c.scheme = scheme;
    c.safety = 1.0;
    return c;
}

bool SimState::finite() const {
    return std::isfinite(mass) && std::isfinite(u_min) && std::isfinite(u_max) && std::isfinite(v_min) &&
           std::isfinite(v_max);
}

namespace {

struct Range {
    double lo, hi;
    bool finite;
};

Range range_of(const Field& f) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), true};
    for (double x : f.values()) {
        if (!std::isfinite(x)) r.finite = false;
        r.lo = std::min(r.lo, x);
        r.hi = std::max(r.hi, x);
    }
    return r;
}

}  // namespace

PdeSolver::PdeSolver(const Params& p) : params_(p), coefficients_(p.triple, p.grid), elliptic_(p.grid) {}

SimState PdeSolver::make_state(Field u, double t) const {
    SimState s;
    s.t = t;
    const Range ur = range_of(u);
    if (ur.finite) {
        s.v = elliptic_.solve_A_inverse(u);
        const Range vr = range_of(s.v);
        s.v_min = vr.lo;
        s.v_max = vr.hi;
        s.mass = quadrature(u);
    } else {
        s.v = Field(u.grid(), std::numeric_limits<double>::quiet_NaN());
        s.v_min = s.v_max = s.mass = std::numeric_limits<double>::quiet_NaN();
    }
    s.u_min = ur.finite ? ur.lo : std::numeric_limits<double>::quiet_NaN();
    s.u_max = ur.finite ? ur.hi : std::numeric_limits<double>::infinity();
    s.u = std::move(u);
    return s;
}

Field PdeSolver::explicit_rhs(const Field& u, const Field& v, double mass, double t, FluxScheme flux) const {
    const Grid& g = params_.grid;
    const std::size_t n0 = g.count(0);
    const std::size_t n1 = g.count(1);
    const std::size_t n = g.size();
    Field out(g);

    std::vector<double> a0(n), a1(n), a2(n);
    coefficients_.fill(0, t, a0);
    coefficients_.fill(1, t, a1);
    coefficients_.fill(2, t, a2);
    for (std::size_t k = 0; k < n; ++k) out[k] = u[k] * (a0[k] - a1[k] * u[k] - a2[k] * mass);

    const double chi = params_.chi;
    if (chi == 0.0) return out;

    // Face flux F = chi * u_face * dv/dn; the cell gains (F_in - F_out) / h.
    auto face_u = [&](double left, double right, double drift) {
        if (flux == FluxScheme::upwind) return drift > 0.0 ? left : right;
        return 0.5 * (left + right);
    };
    for (int axis = 0; axis < g.dim(); ++axis) {
        const auto dv = elliptic_.face_gradient(v, axis);
        const double ih = 1.0 / g.spacing(axis);
        if (axis == 0) {
            for (std::size_t f = 1; f < n0; ++f)
                for (std::size_t j = 0; j < n1; ++j) {
                    const std::size_t l = (f - 1) * n1 + j, r = f * n1 + j;
                    const double drift = chi * dv[f * n1 + j];
                    const double F = drift * face_u(u[l], u[r], drift) * ih;
                    out[l] -= F;
                    out[r] += F;
                }
        } else {
            for (std::size_t i = 0; i < n0; ++i)
                for (std::size_t f = 1; f < n1; ++f) {
                    const std::size_t l = i * n1 + f - 1, r = i * n1 + f;
                    const double drift = chi * dv[i * (n1 + 1) + f];
                    const double F = drift * face_u(u[l], u[r], drift) * ih;
                    out[l] -= F;
                    out[r] += F;
                }
        }
    }
    return out;
}

double PdeSolver::drift_limit(const SimState& s) const {
    if (params_.chi == 0.0) return std::numeric_limits<double>::infinity();
    const Grid& g = params_.grid;
    double limit = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < g.dim(); ++axis) {
        double speed = 0.0;
        for (double d : elliptic_.face_gradient(s.v, axis)) speed = std::max(speed, std::abs(params_.chi * d));
        if (speed > 0.0) limit = std::min(limit, g.spacing(axis) / speed);
    }
    return limit;
}

SimState PdeSolver::step(const SimState& s, double dt, Scheme scheme, FluxScheme flux, double growth_cap,
                         double negativity_tol) const {
    if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
    const std::size_t n = s.u.size();
    Field next;
    if (scheme == Scheme::imex_euler) {
        Field rhs = explicit_rhs(s.u, s.v, s.mass, s.t, flux);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = s.u[k] + dt * rhs[k];
        next = rhs.all_finite() ? elliptic_.solve_diffusion(rhs, dt) : rhs;
    } else {
        const double gamma = 1.0 - std::sqrt(2.0) / 2.0;
        const double delta = 1.0 - 1.0 / (2.0 * gamma);
        const Field e1 = explicit_rhs(s.u, s.v, s.mass, s.t, flux);
        Field rhs2(s.u.grid());
        for (std::size_t k = 0; k < n; ++k) rhs2[k] = s.u[k] + gamma * dt * e1[k];
        if (!rhs2.all_finite()) return make_state(std::move(rhs2), s.t + dt);
        const Field u2 = elliptic_.solve_diffusion(rhs2, gamma * dt);
        const SimState s2 = make_state(u2, s.t + gamma * dt);
        if (!s2.finite()) return make_state(u2, s.t + dt);
        const Field e2 = explicit_rhs(u2, s2.v, s2.mass, s2.t, flux);
        Field rhs3(s.u.grid());
        for (std::size_t k = 0; k < n; ++k) {
            // Delta_h U2 recovered from the stage equation keeps the scheme exact on steady states.
            const double lap2 = (u2[k] - rhs2[k]) / (gamma * dt);
            rhs3[k] = s.u[k] + dt * (delta * e1[k] + (1.0 - delta) * e2[k] + (1.0 - gamma) * lap2);
        }
        next = rhs3.all_finite() ? elliptic_.solve_diffusion(rhs3, gamma * dt) : rhs3;
    }
    SimState out = make_state(std::move(next), s.t + dt);
    if (!out.finite()) return out;
    const double floor = std::max(s.u_max, negativity_tol);
    if (out.u_max > growth_cap * floor) throw StepRejected("step: sup-norm growth exceeds the cap");
    if (out.u_min < -negativity_tol * std::max(1.0, out.u_max)) throw StepRejected("step: negative undershoot");
    return out;
}

SimState step(const SimState& s, const Params& p, double dt, const StepController& ctrl) {
    const PdeSolver solver(p);
    const SimState consistent = solver.make_state(s.u, s.t);
    return solver.step(consistent, dt, ctrl.scheme, ctrl.flux, ctrl.growth_cap, ctrl.negativity_tol);
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::blow_up: return "blowup";
        case Outcome::step_failure: return "step_failure";
    }
    return "unknown";
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.t);
    return t;
}

void Trajectory::write_csv(std::ostream& out) const {
    csv::header(out, {"t", "mass", "u_min", "u_max", "v_min", "v_max", "dt_accepted"});
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const auto& s = snapshots[k];
        csv::row(out, {s.t, s.mass, s.u_min, s.u_max, s.v_min, s.v_max, dt_accepted[k]});
    }
}

void Trajectory::dump_snapshots(const std::string& out_dir) const {
    std::filesystem::create_directories(out_dir);
    for (std::size_t k = 0; k < snapshots.size(); ++k)
        if (snapshots[k].u.size() > 0)
            write_field_binary((std::filesystem::path(out_dir) / ("snap_" + std::to_string(k) + ".bin")).string(),
                               snapshots[k].u);
}

namespace {

void record(Trajectory& traj, const SimState& s, double dt, bool keep_fields) {
    if (keep_fields) {
        traj.snapshots.push_back(s);
    } else {
        SimState light = s;
        light.u = Field();
        light.v = Field();
        traj.snapshots.push_back(std::move(light));
    }
    traj.dt_accepted.push_back(dt);
}

bool blown_up(const SimState& s, double threshold) { return !s.finite() || s.u_max >= threshold; }

}  // namespace

Trajectory integrate(const PdeSolver& solver, const Field& u0, double t0, double t_end, const StepController& ctrl,
                     const IntegrateOptions& opts) {
    ctrl.validate();
    if (!(t_end > t0)) throw InvalidArgument("integrate: t_end must exceed t0");
    if (!(u0.grid() == solver.params().grid)) throw InvalidArgument("integrate: initial field on a different grid");
    if (!u0.all_finite()) throw InvalidInitial("integrate: non-finite initial field");
    if (u0.min() < -1e-14) throw InvalidInitial("integrate: negative initial field");
    const std::size_t stride = std::max<std::size_t>(1, opts.stride);

    Trajectory traj;
    traj.blowup_threshold = ctrl.blowup_threshold.value_or(1e6 * std::max(1.0, u0.max()));
    SimState s = solver.make_state(u0, t0);
    traj.max_u_max = s.u_max;
    traj.min_u_min = s.u_min;
    traj.max_mass = s.mass;
    record(traj, s, 0.0, opts.keep_fields);
    if (opts.observer) opts.observer(s);

    auto finish = [&](Outcome outcome, std::string reason, double last_dt) {
        traj.outcome = outcome;
        traj.outcome_time = s.t;
        traj.reason = std::move(reason);
        if (traj.snapshots.back().t != s.t) record(traj, s, last_dt, opts.keep_fields);
        traj.final_state = s;
        return traj;
    };

    if (blown_up(s, traj.blowup_threshold)) return finish(Outcome::blow_up, "initial state above threshold", 0.0);

    const bool fixed = ctrl.fixed_step();
    double dt = ctrl.dt_init;
    int streak = 0;
    std::size_t since_record = 0;
    double last_dt = 0.0;
    const double span = t_end - t0;
    while (s.t < t_end) {
        double h = dt;
        if (!fixed) {
            const double cfl = ctrl.safety * solver.drift_limit(s);
            h = std::max(std::min(h, cfl), ctrl.dt_min);
        }
        const double remaining = t_end - s.t;
        bool last = false;
        if (h >= remaining * (1.0 - 1e-10) || remaining <= 1e-13 * span) {
            h = remaining;
            last = true;
        }
        SimState next;
        try {
            next = solver.step(s, h, ctrl.scheme, ctrl.flux, ctrl.growth_cap, ctrl.negativity_tol);
        } catch (const StepRejected& e) {
            ++traj.rejected_steps;
            if (fixed || dt <= ctrl.dt_min) return finish(Outcome::step_failure, e.what(), last_dt);
            dt = std::max(0.5 * std::min(dt, h), ctrl.dt_min);
            streak = 0;
            continue;
        }
        if (last) next.t = t_end;
        s = std::move(next);
        last_dt = h;
        ++traj.accepted_steps;
        ++since_record;
        if (blown_up(s, traj.blowup_threshold)) return finish(Outcome::blow_up, "sup norm crossed threshold", h);
        traj.max_u_max = std::max(traj.max_u_max, s.u_max);
        traj.min_u_min = std::min(traj.min_u_min, s.u_min);
        traj.max_mass = std::max(traj.max_mass, s.mass);
        if (opts.observer) opts.observer(s);
        if (since_record >= stride && s.t < t_end) {
            record(traj, s, h, opts.keep_fields);
            since_record = 0;
        }
        if (!fixed && ++streak >= ctrl.grow_after) {
            dt = std::min(2.0 * dt, ctrl.dt_max);
            streak = 0;
        }
    }
    return finish(Outcome::completed, "", last_dt);
}

Trajectory integrate(const Params& p, const Field& u0, double t0, double t_end, const StepController& ctrl,
                     std::size_t stride) {
    const PdeSolver solver(p);
    IntegrateOptions opts;
    opts.stride = stride;
    return integrate(solver, u0, t0, t_end, ctrl, opts);
}

std::optional<double> detect_blowup(const Trajectory& traj) {
    for (const auto& s : traj.snapshots)
        if (blown_up(s, traj.blowup_threshold)) return s.t;
    return std::nullopt;
}

}  // namespace chemolab
