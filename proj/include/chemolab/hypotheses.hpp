#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/coefficients.hpp"
#include "chemolab/grid.hpp"

namespace chemolab {

/// Everything the condition arithmetic and the solvers need.
///
/// `dim_n` is the space dimension used in the dimension-dependent
/// condition; it may exceed the grid dimension (arithmetic only).
struct Params {
    double chi = 0.0;
    int dim_n = 1;
    CoefficientTriple triple;
    Grid grid;
    Horizon horizon;

    double measure() const { return grid.measure(); }
};

inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double neg(double x) { return x < 0.0 ? -x : 0.0; }

/// Horizon-sampled extrema entering every condition. Built once per Params.
struct ConditionTerms {
    Horizon horizon;       ///< effective (possibly period-snapped) horizon
    ExtremaSeries series;  ///< spatial extrema per sample
    double a0_inf, a0_sup, a1_inf, a1_sup;
    double a2_inf, a2_sup;
    double abs_a2_inf, abs_a2_sup;
    /// inf_t { a1_inf(t) - |Omega| (a2_inf(t))_- }
    double positivity_inf;
    /// sup_t { a1_sup(t) - |Omega| (a2_sup(t))_- }
    double upper_sup;
    /// inf_t (a2_inf(t))_+ and sup_t (a2_sup(t))_+
    double a2_inf_pos_inf;
    double a2_sup_pos_sup;
    bool homogeneous;  ///< inf == sup at every sample for all three coefficients

    static ConditionTerms compute(const Params& p);
};

struct R1R2 {
    double r1;
    double r2;
    double h_chi;
};

struct L1L2 {
    double L1;
    double L2;
};

/// inf_t { a1_inf(t) - |Omega| (a2_inf(t))_- } - (chi)_+ ; positive iff the
/// global-existence condition holds on the horizon.
double check_H2(const Params& p);

struct H2PrimeMargins {
    double margin_pos;
    double margin_dim;  ///< +infinity when n <= 2
};
H2PrimeMargins check_H2_prime(const Params& p);

/// inf_t { a1(t) - |Omega| |a2(t)| } - 2 (chi)_+ for spatially homogeneous triples.
double stability_margin_homogeneous(const Params& p);

/// Left side minus right side of the heterogeneous stability condition.
double stability_margin_heterogeneous(const Params& p);

R1R2 compute_r1_r2(const Params& p);
L1L2 compute_L1_L2(const Params& p, const R1R2& r, double t);

/// Largest average of L2 - L1 over windows [s, t] of the horizon with
/// t - s >= min_window; trapezoid rule on the uniform horizon sampling.
double check_time_average_condition(const Params& p, double min_window);

/// (1/P) * integral over one common period P of L2 - L1, when the triple is periodic.
std::optional<double> period_average_condition(const Params& p);

/// a0_sup / (inf_t{ a1_inf - |Omega| (a2_inf)_- } - (chi)_+).
double compute_M(const Params& p);

struct HypothesisReport {
    Horizon horizon_used;
    bool h1_ok = false;
    DeclaredBounds h1_bounds{};
    double h2_margin = 0.0;
    double h2_prime_margin_pos = 0.0;
    double h2_prime_margin_dim = 0.0;
    double thm4_1_margin = 0.0;  ///< NaN when the triple is not homogeneous
    double stab2_eq1_margin = 0.0;
    double stab2_eq2_avg = 0.0;  ///< NaN when r1/r2 are unavailable
    double stab2_eq2_period_avg = 0.0;  ///< NaN for non-periodic triples
    double r1 = 0.0, r2 = 0.0, h_chi = 0.0;  ///< NaN when degenerate
    double M = 0.0;                          ///< NaN when the denominator is not positive
    std::vector<double> series_t, L1_series, L2_series;

    /// True when h_chi > 0 and 0 < r2 <= r1, so [r2, r1] is a usable interval.
    bool interval_valid() const;

    /// Ordered (key, value) pairs shared by both serializations.
    std::vector<std::pair<std::string, std::string>> entries() const;
    void write_key_value(std::ostream& out) const;
    void write_csv_header(std::ostream& out) const;
    void write_csv_row(std::ostream& out) const;
    /// t, L1, L2
    void write_series_csv(std::ostream& out) const;
};

/// Runs every check. `min_window` <= 0 selects a tenth of the horizon.
HypothesisReport evaluate_hypotheses(const Params& p, double min_window = 0.0);

}  // namespace chemolab
