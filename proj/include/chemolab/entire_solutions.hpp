#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/hypotheses.hpp"
#include "chemolab/ode_envelopes.hpp"
#include "chemolab/pde_solver.hpp"

namespace chemolab {

enum class EntireKind { pullback, periodic, steady, homogeneous };

const char* to_string(EntireKind k);

/// Shared numerical settings of the constructions below. Integration uses
/// fixed steps so that every trajectory lands exactly on the anchor times.
struct EntireOptions {
    double dt = 1e-3;
    Scheme scheme = Scheme::ars222;
    FluxScheme flux = FluxScheme::central;
    /// Start value as a fraction of M from compute_M.
    double start_fraction = 0.5;
    /// Spacing of the stored window / period samples.
    double sample_spacing = 0.5;
    double tol = 1e-8;
    std::size_t max_iterations = 500;
    /// Pseudo-time cap for steady-state marching.
    double max_time = 5000.0;
};

struct EntireSolutionApprox {
    EntireKind kind = EntireKind::pullback;
    double period = 0.0;          ///< T for the periodic kind
    Field representative;         ///< u at the anchor time (window start, period start, steady state)
    std::vector<double> times;    ///< sample times of `series`
    std::vector<Field> series;    ///< anchor window / one period; a single field for steady states
    double residual = 0.0;
    double floor = 0.0;           ///< min over stored data, stands in for the a-priori lower bound
    double ceiling = 0.0;         ///< max over stored data
    double M = 0.0;               ///< upper bound of the invariant box
    std::size_t iterations = 0;   ///< pullback doublings, Picard sweeps, or marched unit times
    double start_value = 0.0;
    /// Periodic kind: sup distance after integrating one further period.
    double reintegration_residual = 0.0;

    /// Field at time t: exact on stored samples, linear in between;
    /// periodic kinds wrap t into [0, T).
    Field at(double t) const;

    void write_report(std::ostream& out) const;
    /// t, u_min, u_max, mass
    void write_series_csv(std::ostream& out) const;
};

/// Pullback limit: from u = start_fraction * M at t = -n for n = 1, 2, 4, ..., n_max,
/// compared on [0, window] in sup norm until successive values differ by < tol.
EntireSolutionApprox pullback_entire(const Params& p, std::size_t n_max, double window,
                                     const EntireOptions& opts = {});

/// Picard iteration of the period map from start_fraction * M.
EntireSolutionApprox periodic_fixed_point(const Params& p, double T, const EntireOptions& opts = {});

/// Pseudo-time marching until ||u(t + 1) - u(t)|| < tol (default 1e-9 here).
EntireSolutionApprox steady_state(const Params& p, const EntireOptions& opts = {}, double tol = 1e-9);

/// Sampled check that every coefficient is T-periodic to 1e-12.
bool coefficients_are_periodic(const Params& p, double T);
/// Sampled check that no coefficient depends on time.
bool coefficients_are_autonomous(const Params& p);

struct HomogeneousEntire {
    ScalarSeries u_star;
    ScalarSeries v_star;  ///< equal to u_star for spatially constant u
};

/// Spatially homogeneous entire solution through the reduced logistic
/// equation u' = u (a0(t) - (a1(t) + |Omega| a2(t)) u).
HomogeneousEntire homogeneous_entire(const Params& p, std::pair<double, double> t_range,
                                     const LogisticOptions& opts = {});

struct StabilityReport {
    std::vector<double> times;
    /// distances[i][k]: sup distance of initial i to the reference at times[k].
    std::vector<std::vector<double>> distances;
    std::vector<double> final_distance;
    std::vector<double> fitted_rate;
    double tolerance = 1e-3;
    bool success = false;

    void write_report(std::ostream& out) const;
    /// t, distance_0, ..., then a footer row "fitted_rate, rate_0, ...".
    void write_csv(std::ostream& out) const;
};

struct StabilityOptions {
    double dt = 1e-3;
    Scheme scheme = Scheme::ars222;
    double sample_spacing = 0.5;
    double tolerance = 1e-3;
    /// Fraction of the run (from the end) used by the decay fit.
    double tail_fraction = 0.5;
};

/// Integrates each initial field from t0 to t_end concurrently and tracks
/// the sup distance to reference(t).
StabilityReport stability_experiment(const Params& p, const std::vector<Field>& initial_family, double t0,
                                     double t_end, const std::function<Field(double)>& reference,
                                     const StabilityOptions& opts = {});

/// Fixed-step integration between two times; throws BlowUpError or StepFailureError.
Field advance(const PdeSolver& solver, const Field& u, double t_from, double t_to, double dt, Scheme scheme,
              FluxScheme flux = FluxScheme::central);

}  // namespace chemolab
