#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/coefficients.hpp"
#include "chemolab/elliptic.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/hypotheses.hpp"

namespace chemolab {

/// Midpoint rule: cell volume times the sum of the values.
double quadrature(const Field& u);

enum class Scheme {
    imex_euler,  ///< first order: explicit drift and reaction, implicit diffusion
    ars222,      ///< second-order L-stable IMEX Runge-Kutta (Ascher, Ruuth, Spiteri)
};

enum class FluxScheme { central, upwind };

struct StepController {
    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 0.05;
    /// Fraction of the drift CFL limit h / max|chi grad v| a step may use.
    double safety = 0.9;
    /// Largest accepted ratio u_max(new) / u_max(old).
    double growth_cap = 2.0;
    double negativity_tol = 1e-10;
    /// Default 1e6 * max(1, sup u0) when empty.
    std::optional<double> blowup_threshold;
    Scheme scheme = Scheme::imex_euler;
    FluxScheme flux = FluxScheme::central;
    /// dt doubles after this many consecutive accepted steps.
    int grow_after = 20;

    void validate() const;
    bool fixed_step() const { return dt_min == dt_init && dt_init == dt_max; }
    /// dt_min = dt_init = dt_max = dt; no CFL cap.
    static StepController fixed(double dt, Scheme scheme = Scheme::imex_euler);
};

struct SimState {
    double t = 0.0;
    Field u;
    Field v;
    double mass = 0.0;
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;

    bool finite() const;
};

/// A step-by-step integrator bound to one parameter set. Const member
/// functions may be called concurrently.
class PdeSolver {
public:
    explicit PdeSolver(const Params& p);

    const Params& params() const noexcept { return params_; }
    const EllipticSolver& elliptic() const noexcept { return elliptic_; }

    /// State with v = (I - Delta_h)^{-1} u and the derived scalars.
    SimState make_state(Field u, double t) const;

    /// One step of size dt. Throws StepRejected on excessive growth or
    /// negativity. A non-finite result is returned, not rejected.
    SimState step(const SimState& s, double dt, Scheme scheme = Scheme::imex_euler,
                  FluxScheme flux = FluxScheme::central, double growth_cap = 2.0,
                  double negativity_tol = 1e-10) const;

    /// Largest dt honouring the drift CFL limit at `s` (infinite when chi grad v = 0).
    double drift_limit(const SimState& s) const;

private:
    /// -chi div(u grad v) + u (a0 - a1 u - a2 mass) at time t.
    Field explicit_rhs(const Field& u, const Field& v, double mass, double t, FluxScheme flux) const;

    Params params_;
    SampledTriple coefficients_;
    EllipticSolver elliptic_;
};

SimState step(const SimState& s, const Params& p, double dt, const StepController& ctrl = {});

enum class Outcome { completed, blow_up, step_failure };

const char* to_string(Outcome o);

struct Trajectory {
    /// Initial state, every stride-th accepted step, and the final state.
    /// Fields are empty when integration ran with keep_fields = false.
    std::vector<SimState> snapshots;
    /// dt of the step producing each snapshot (0 for the initial one).
    std::vector<double> dt_accepted;
    SimState final_state;
    Outcome outcome = Outcome::completed;
    double outcome_time = 0.0;
    std::string reason;
    double blowup_threshold = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    /// Running extrema over every accepted step, not only the snapshots.
    double max_u_max = 0.0;
    double min_u_min = 0.0;
    double max_mass = 0.0;

    std::vector<double> times() const;
    /// t, mass, u_min, u_max, v_min, v_max, dt_accepted
    void write_csv(std::ostream& out) const;
    /// Writes out_dir/snap_<index>.bin for every snapshot that kept its fields.
    void dump_snapshots(const std::string& out_dir) const;
};

struct IntegrateOptions {
    std::size_t stride = 10;
    bool keep_fields = true;
    /// Called after every accepted step (and once for the initial state).
    std::function<void(const SimState&)> observer;
};

/// Adaptive integration from (t0, u0) to t_end.
Trajectory integrate(const PdeSolver& solver, const Field& u0, double t0, double t_end,
                     const StepController& ctrl, const IntegrateOptions& opts = {});
Trajectory integrate(const Params& p, const Field& u0, double t0, double t_end,
                     const StepController& ctrl, std::size_t stride = 10);

/// First snapshot time with u_max >= threshold or non-finite data.
std::optional<double> detect_blowup(const Trajectory& traj);

}  // namespace chemolab
