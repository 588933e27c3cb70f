#include "chemolab/ode_envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <string>

#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

std::size_t step_count(double span, double dt_target) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt_target - 1e-9)));
}

}  // namespace

// ---------------------------------------------------------------- envelope

EnvelopeSystem::EnvelopeSystem(const Params& p)
    : chi_pos_(pos(p.chi)), measure_(p.measure()), coefficients_(p.triple, p.grid) {}

EnvelopeDerivative EnvelopeSystem::rhs(double t, double ub, double uu) const {
    const Extrema a0 = coefficients_.spatial_extrema(0, t);
    const Extrema a1 = coefficients_.spatial_extrema(1, t);
    const Extrema a2 = coefficients_.spatial_extrema(2, t);
    const double m = measure_;
    const double dub = chi_pos_ * ub * (ub - uu) +
                       ub * (a0.sup - a1.inf * ub - m * pos(a2.inf) * uu + m * neg(a2.inf) * ub);
    const double duu = chi_pos_ * uu * (uu - ub) +
                       uu * (a0.inf - a1.sup * uu - m * pos(a2.sup) * ub + m * neg(a2.sup) * uu);
    return {dub, duu};
}

EnvelopeDerivative envelope_rhs(const EnvelopeState& s, const Params& p) {
    return EnvelopeSystem(p).rhs(s.t, s.u_bar, s.u_under);
}

namespace {

EnvelopeSeries integrate_envelope_steps(const EnvelopeSystem& sys, double ub0, double uu0, double t0, double t_end,
                                        std::size_t steps) {
    EnvelopeSeries out;
    out.states.reserve(steps + 1);
    const double dt = (t_end - t0) / static_cast<double>(steps);
    auto f = [&](double t, Vec2 y) {
        const auto d = sys.rhs(t, y.x, y.y);
        return Vec2{d.du_bar, d.du_under};
    };
    Vec2 y{ub0, uu0};
    out.states.push_back({t0, ub0, uu0});
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        y = rk4_step(f, t, y, dt);
        const double tn = k + 1 == steps ? t_end : t0 + static_cast<double>(k + 1) * dt;
        if (!std::isfinite(y.x) || !std::isfinite(y.y))
            throw NoConvergence("envelope integration produced non-finite values at t = " + std::to_string(tn),
                                std::numeric_limits<double>::infinity());
        if (y.y > y.x + 1e-9)
            throw OrderViolation("envelope order lost at t = " + std::to_string(tn) +
                                 ": u_under exceeds u_bar");
        out.states.push_back({tn, y.x, y.y});
    }
    return out;
}

void require_envelope_start(double ub0, double uu0) {
    if (!std::isfinite(ub0) || !std::isfinite(uu0)) throw NonFiniteInput("envelope start must be finite");
    if (uu0 < 0.0 || ub0 < uu0) throw InvalidArgument("envelope start needs u_bar0 >= u_under0 >= 0");
}

}  // namespace

EnvelopeSeries integrate_envelope(const Params& p, double u_bar0, double u_under0, double t0, double t_end) {
    require_envelope_start(u_bar0, u_under0);
    if (!(t_end > t0)) throw InvalidArgument("integrate_envelope: t_end must exceed t0");
    const double span = t_end - t0;
    const double dt = std::min(1e-3, span / 1e5);
    return integrate_envelope_steps(EnvelopeSystem(p), u_bar0, u_under0, t0, t_end, step_count(span, dt));
}

EnvelopeState EnvelopeSeries::at(double t) const {
    if (states.empty()) throw InvalidArgument("empty envelope series");
    if (t <= states.front().t) return states.front();
    if (t >= states.back().t) return states.back();
    const auto it = std::lower_bound(states.begin(), states.end(), t,
                                     [](const EnvelopeState& s, double x) { return s.t < x; });
    const EnvelopeState& b = *it;
    const EnvelopeState& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return {t, a.u_bar + w * (b.u_bar - a.u_bar), a.u_under + w * (b.u_under - a.u_under)};
}

void EnvelopeSeries::write_csv(std::ostream& out) const {
    csv::header(out, {"t", "u_bar", "u_under"});
    for (const auto& s : states) csv::row(out, {s.t, s.u_bar, s.u_under});
}

DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y, double floor) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < t.size() && k < y.size(); ++k) {
        if (!(y[k] > floor) || !std::isfinite(y[k])) continue;
        const double ly = std::log(y[k]);
        st += t[k];
        sy += ly;
        stt += t[k] * t[k];
        sty += t[k] * ly;
        ++n;
    }
    DecayFit fit;
    fit.samples = n;
    if (n < 2) return fit;
    const double dn = static_cast<double>(n);
    const double denom = dn * stt - st * st;
    if (denom <= 0.0) return fit;
    const double slope = (dn * sty - st * sy) / denom;
    fit.rate = -slope;
    fit.intercept = (sy - slope * st) / dn;
    return fit;
}

DecayFit fit_log_ratio_decay(const EnvelopeSeries& s, double t_from, double floor) {
    std::vector<double> t, y;
    for (const auto& e : s.states) {
        if (e.t < t_from || !(e.u_under > 0.0)) continue;
        t.push_back(e.t);
        y.push_back(std::log(e.u_bar / e.u_under));
    }
    return fit_exponential_decay(t, y, floor);
}

PeriodicEnvelope periodic_envelope(const Params& p, double T, double u_bar0, double u_under0, double t0,
                                   std::size_t max_periods, double tol) {
    require_envelope_start(u_bar0, u_under0);
    if (!(T > 0.0)) throw InvalidArgument("periodic_envelope: period must be positive");
    const EnvelopeSystem sys(p);
    const std::size_t steps = step_count(T, 1e-3);
    double ub = u_bar0, uu = u_under0;
    PeriodicEnvelope out;
    for (std::size_t k = 0; k < max_periods; ++k) {
        const double ts = t0 + static_cast<double>(k) * T;
        EnvelopeSeries period = integrate_envelope_steps(sys, ub, uu, ts, ts + T, steps);
        const auto& end = period.states.back();
        out.residual = std::max(std::abs(end.u_bar - ub), std::abs(end.u_under - uu));
        ub = end.u_bar;
        uu = end.u_under;
        out.periods = k + 1;
        out.period = std::move(period);
        if (out.residual < tol) return out;
    }
    throw NoConvergence("periodic envelope did not settle", out.residual);
}

std::optional<double> envelope_entry_time(const EnvelopeSeries& s, double lo, double hi) {
    if (s.states.empty()) return std::nullopt;
    std::optional<double> entry;
    for (const auto& e : s.states) {
        const bool inside = e.u_under >= lo && e.u_bar <= hi;
        if (!inside)
            entry.reset();
        else if (!entry)
            entry = e.t;
    }
    return entry;
}

// ---------------------------------------------------------------- logistic

double ScalarSeries::at(double time) const {
    if (t.empty()) throw InvalidArgument("empty series");
    if (time <= t.front()) return u.front();
    if (time >= t.back()) return u.back();
    const auto it = std::lower_bound(t.begin(), t.end(), time);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return u[k - 1] + w * (u[k] - u[k - 1]);
}

double ScalarSeries::min() const { return *std::min_element(u.begin(), u.end()); }
double ScalarSeries::max() const { return *std::max_element(u.begin(), u.end()); }

void ScalarSeries::write_csv(std::ostream& out, const char* name) const {
    csv::header(out, {"t", name});
    for (std::size_t k = 0; k < t.size(); ++k) csv::row(out, {t[k], u[k]});
}

namespace {

double logistic_rk4(const TimeFunction& a, const TimeFunction& b, double t, double u, double dt) {
    auto f = [&](double s, double y) { return y * (a(s) - b(s) * y); };
    return rk4_step(f, t, u, dt);
}

}  // namespace

ScalarSeries integrate_logistic(const TimeFunction& a, const TimeFunction& b, double u0, double t0, double t_end,
                                double dt) {
    if (!(t_end > t0) || !(dt > 0.0)) throw InvalidArgument("integrate_logistic: need t_end > t0 and dt > 0");
    const std::size_t steps = step_count(t_end - t0, dt);
    const double h = (t_end - t0) / static_cast<double>(steps);
    ScalarSeries out;
    out.t.reserve(steps + 1);
    out.u.reserve(steps + 1);
    out.t.push_back(t0);
    out.u.push_back(u0);
    double u = u0;
    for (std::size_t k = 0; k < steps; ++k) {
        u = logistic_rk4(a, b, t0 + static_cast<double>(k) * h, u, h);
        out.t.push_back(k + 1 == steps ? t_end : t0 + static_cast<double>(k + 1) * h);
        out.u.push_back(u);
    }
    return out;
}

ScalarSeries logistic_entire_solution(const TimeFunction& a, const TimeFunction& b, const Horizon& horizon,
                                      std::pair<double, double> t_eval_range, const LogisticOptions& opts) {
    const auto [lo, hi] = t_eval_range;
    if (!(hi >= lo)) throw InvalidArgument("logistic_entire_solution: empty evaluation range");
    if (!(opts.dt > 0.0) || !(opts.pullback_cap >= 1.0)) throw InvalidArgument("logistic_entire_solution: bad options");
    double a_inf = std::numeric_limits<double>::infinity(), a_sup = -a_inf;
    double b_inf = a_inf, b_sup = -a_inf;
    auto sample = [&](double t) {
        const double av = a(t), bv = b(t);
        a_inf = std::min(a_inf, av);
        a_sup = std::max(a_sup, av);
        b_inf = std::min(b_inf, bv);
        b_sup = std::max(b_sup, bv);
    };
    for (double t : horizon.sample_times()) sample(t);
    for (std::size_t k = 0; k <= 1000; ++k) sample(lo + (hi - lo) * static_cast<double>(k) / 1000.0);
    if (!(a_inf > 0.0) || !(b_inf > 0.0) || !std::isfinite(a_sup) || !std::isfinite(b_sup))
        throw InvalidArgument("logistic_entire_solution: a and b must be bounded below by positive constants");
    const double start = a_inf / b_sup;

    // A common step keeps every pullback on the same evaluation grid.
    const double dt = opts.dt;
    const std::size_t eval_steps = hi > lo ? step_count(hi - lo, dt) : 0;
    const double h = eval_steps > 0 ? (hi - lo) / static_cast<double>(eval_steps) : dt;

    auto pullback = [&](double S) {
        const std::size_t pre = step_count(S, h);
        const double t_start = lo - static_cast<double>(pre) * h;
        double u = start;
        for (std::size_t k = 0; k < pre; ++k) u = logistic_rk4(a, b, t_start + static_cast<double>(k) * h, u, h);
        ScalarSeries s;
        s.t.reserve(eval_steps + 1);
        s.u.reserve(eval_steps + 1);
        s.t.push_back(lo);
        s.u.push_back(u);
        for (std::size_t k = 0; k < eval_steps; ++k) {
            u = logistic_rk4(a, b, lo + static_cast<double>(k) * h, u, h);
            s.t.push_back(k + 1 == eval_steps ? hi : lo + static_cast<double>(k + 1) * h);
            s.u.push_back(u);
        }
        return s;
    };

    ScalarSeries prev = pullback(1.0);
    double diff = std::numeric_limits<double>::infinity();
    for (double S = 2.0;; S = std::min(2.0 * S, opts.pullback_cap)) {
        ScalarSeries next = pullback(S);
        diff = 0.0;
        for (std::size_t k = 0; k < next.u.size(); ++k) diff = std::max(diff, std::abs(next.u[k] - prev.u[k]));
        prev = std::move(next);
        if (diff < opts.tol) return prev;
        if (S >= opts.pullback_cap) break;
    }
    throw NoConvergence("logistic pullback exceeded the cap", diff);
}

// ---------------------------------------------------------- Lotka-Volterra

LVBounds LVBounds::constants(double a1, double b1, double c1, double a2, double b2, double c2) {
    return {a1, a1, b1, b1, c1, c1, a2, a2, b2, b2, c2, c2};
}

LVBounds sample_lv_bounds(const LVCoefficients& c, const Horizon& horizon) {
    const double inf = std::numeric_limits<double>::infinity();
    LVBounds b{inf, -inf, inf, -inf, inf, -inf, inf, -inf, inf, -inf, inf, -inf};
    auto upd = [](double v, double& L, double& M) {
        L = std::min(L, v);
        M = std::max(M, v);
    };
    for (double t : horizon.sample_times()) {
        upd(c.a1(t), b.a1L, b.a1M);
        upd(c.b1(t), b.b1L, b.b1M);
        upd(c.c1(t), b.c1L, b.c1M);
        upd(c.a2(t), b.a2L, b.a2M);
        upd(c.b2(t), b.b2L, b.b2M);
        upd(c.c2(t), b.c2L, b.c2M);
    }
    return b;
}

LVBox lv_box(const LVBounds& b) {
    const double all[] = {b.a1L, b.b1L, b.c1L, b.a2L, b.b2L, b.c2L};
    for (double x : all)
        if (!(x > 0.0)) throw HypothesisViolated("competition coefficients must be bounded below by positive constants");
    if (!(b.a1L > b.c1M * b.a2M / b.c2L)) throw HypothesisViolated("a1^L > c1^M a2^M / c2^L fails");
    if (!(b.a2L > b.a1M * b.b2M / b.b1L)) throw HypothesisViolated("a2^L > a1^M b2^M / b1^L fails");
    LVBox box;
    box.u_lo = (b.a1L * b.c2L - b.c1M * b.a2M) / (b.b1M * b.c2L - b.c1M * b.b2L);
    box.u_hi = (b.a1M * b.c2M - b.c1L * b.a2L) / (b.b1L * b.c2M - b.c1L * b.b2M);
    box.v_lo = (b.b1L * b.a2L - b.a1M * b.b2M) / (b.b1L * b.c2M - b.c1L * b.b2M);
    box.v_hi = (b.b1M * b.a2M - b.a1L * b.b2L) / (b.b1M * b.c2L - b.c1M * b.b2L);
    return box;
}

LVBox lv_box(const LVCoefficients& c, const Horizon& horizon) { return lv_box(sample_lv_bounds(c, horizon)); }

void LVSeries::write_csv(std::ostream& out) const {
    csv::header(out, {"t", "u", "v"});
    for (const auto& s : states) csv::row(out, {s.t, s.u, s.v});
}

LVSeries integrate_lv(const LVCoefficients& c, double u0, double v0, double t0, double t_end, double dt) {
    if (!(t_end > t0) || !(dt > 0.0)) throw InvalidArgument("integrate_lv: need t_end > t0 and dt > 0");
    const std::size_t steps = step_count(t_end - t0, dt);
    const double h = (t_end - t0) / static_cast<double>(steps);
    auto f = [&](double t, Vec2 y) {
        return Vec2{y.x * (c.a1(t) - c.b1(t) * y.x - c.c1(t) * y.y),
                    y.y * (c.a2(t) - c.b2(t) * y.x - c.c2(t) * y.y)};
    };
    LVSeries out;
    out.states.reserve(steps + 1);
    out.states.push_back({t0, u0, v0});
    Vec2 y{u0, v0};
    for (std::size_t k = 0; k < steps; ++k) {
        y = rk4_step(f, t0 + static_cast<double>(k) * h, y, h);
        out.states.push_back({k + 1 == steps ? t_end : t0 + static_cast<double>(k + 1) * h, y.x, y.y});
    }
    return out;
}

LVCoefficients envelope_lv_coefficients(const Params& p) {
    auto sampled = std::make_shared<const SampledTriple>(p.triple, p.grid);
    const double chi = pos(p.chi);
    const double m = p.measure();
    auto ext = [sampled](int which, double t) { return sampled->spatial_extrema(which, t); };
    LVCoefficients c;
    c.a1 = [ext](double t) { return ext(0, t).sup; };
    c.b1 = [ext, chi, m](double t) { return ext(1, t).inf - m * neg(ext(2, t).inf) - chi; };
    c.c1 = [ext, chi, m](double t) { return chi + m * pos(ext(2, t).inf); };
    c.a2 = [ext](double t) { return ext(0, t).inf; };
    c.b2 = [ext, chi, m](double t) { return chi + m * pos(ext(2, t).sup); };
    c.c2 = [ext, chi, m](double t) { return ext(1, t).sup - m * neg(ext(2, t).sup) - chi; };
    return c;
}

}  // namespace chemolab
