#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "chemolab/coefficients.hpp"
#include "chemolab/hypotheses.hpp"

namespace chemolab {

using TimeFunction = std::function<double(double)>;

/// Classic fourth-order Runge-Kutta step for y' = f(t, y).
template <class State, class F>
State rk4_step(const F& f, double t, const State& y, double dt) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
    const State k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
    const State k4 = f(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Planar vector with the arithmetic rk4_step needs.
struct Vec2 {
    double x = 0.0, y = 0.0;
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

// ---------------------------------------------------------------- envelope

struct EnvelopeState {
    double t = 0.0;
    double u_bar = 0.0;
    double u_under = 0.0;
};

struct EnvelopeDerivative {
    double du_bar;
    double du_under;
};

/// Right-hand side of the comparison system bounding max_x u and min_x u.
/// Spatial extrema are taken over the grid nodes.
class EnvelopeSystem {
public:
    explicit EnvelopeSystem(const Params& p);
    EnvelopeDerivative rhs(double t, double u_bar, double u_under) const;

private:
    double chi_pos_;
    double measure_;
    SampledTriple coefficients_;
};

EnvelopeDerivative envelope_rhs(const EnvelopeState& s, const Params& p);

struct EnvelopeSeries {
    std::vector<EnvelopeState> states;

    /// Linear interpolation; t must lie in the integrated range.
    EnvelopeState at(double t) const;
    /// t, u_bar, u_under
    void write_csv(std::ostream& out) const;
};

/// RK4 with dt = min(1e-3, span / 1e5), every step kept. Throws
/// OrderViolation once u_under exceeds u_bar by more than 1e-9.
EnvelopeSeries integrate_envelope(const Params& p, double u_bar0, double u_under0, double t0, double t_end);

/// Slope eps of the least-squares fit ln(ln(u_bar / u_under)) = c - eps t
/// over the samples with t >= t_from and a log ratio above `floor`.
struct DecayFit {
    double rate = 0.0;
    double intercept = 0.0;
    std::size_t samples = 0;
};
DecayFit fit_log_ratio_decay(const EnvelopeSeries& s, double t_from = 0.0, double floor = 1e-12);
/// Least-squares slope of ln(y) = c - rate * t over the positive samples above floor.
DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y, double floor = 1e-14);

/// Long-run periodic envelope (m(t), M(t)) for T-periodic coefficients:
/// integrates whole periods from start_time until the values at successive
/// period ends differ by less than tol, then returns that last period.
struct PeriodicEnvelope {
    EnvelopeSeries period;  ///< covers [t_start, t_start + T]
    double residual = 0.0;
    std::size_t periods = 0;
};
PeriodicEnvelope periodic_envelope(const Params& p, double T, double u_bar0, double u_under0, double t0 = 0.0,
                                   std::size_t max_periods = 2000, double tol = 1e-10);

/// First time after which the series stays inside [lo, hi].
std::optional<double> envelope_entry_time(const EnvelopeSeries& s, double lo, double hi);

// ---------------------------------------------------------------- logistic

struct ScalarSeries {
    std::vector<double> t;
    std::vector<double> u;

    double at(double time) const;
    double min() const;
    double max() const;
    /// t, <name>
    void write_csv(std::ostream& out, const char* name = "u_star") const;
};

/// u' = u (a(t) - b(t) u) by RK4 with fixed dt, every step kept.
ScalarSeries integrate_logistic(const TimeFunction& a, const TimeFunction& b, double u0, double t0, double t_end,
                                double dt = 1e-3);

struct LogisticOptions {
    double dt = 1e-3;
    double tol = 1e-10;
    double pullback_cap = 200.0;
};

/// Bounded entire solution on t_eval_range by pullback from
/// t_eval_range.first - S, S = 1, 2, 4, ... up to the cap, starting at
/// inf a / sup b (extrema sampled on the horizon and the evaluation range).
ScalarSeries logistic_entire_solution(const TimeFunction& a, const TimeFunction& b, const Horizon& horizon,
                                      std::pair<double, double> t_eval_range, const LogisticOptions& opts = {});

// ---------------------------------------------------------- Lotka-Volterra

/// u' = u (a1 - b1 u - c1 v), v' = v (a2 - b2 u - c2 v).
struct LVCoefficients {
    TimeFunction a1, b1, c1, a2, b2, c2;
};

/// Infima (L) and suprema (M) of the six coefficient functions.
struct LVBounds {
    double a1L, a1M, b1L, b1M, c1L, c1M;
    double a2L, a2M, b2L, b2M, c2L, c2M;

    static LVBounds constants(double a1, double b1, double c1, double a2, double b2, double c2);
};

LVBounds sample_lv_bounds(const LVCoefficients& c, const Horizon& horizon);

struct LVBox {
    double u_lo, u_hi, v_lo, v_hi;
};

/// The entire-solution box of the competition system, computed literally.
/// Throws HypothesisViolated naming the failing inequality.
LVBox lv_box(const LVBounds& b);
LVBox lv_box(const LVCoefficients& c, const Horizon& horizon);

struct LVState {
    double t, u, v;
};
struct LVSeries {
    std::vector<LVState> states;
    /// t, u, v
    void write_csv(std::ostream& out) const;
};
LVSeries integrate_lv(const LVCoefficients& c, double u0, double v0, double t0, double t_end, double dt = 1e-3);

/// The comparison system rewritten in competition form with u = u_bar and
/// v = u_under. Coefficients may be non-positive outside the stability regime.
LVCoefficients envelope_lv_coefficients(const Params& p);

}  // namespace chemolab
