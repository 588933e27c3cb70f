#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab {

/// One cosine c * cos(omega t + phase).
struct Harmonic {
    double amplitude = 1.0;
    double omega = 0.0;
    double phase = 0.0;
};

enum class TemporalKind { constant, cosine, almost_periodic };

/// amplitude * T(t) * S(x).
///
/// T is 1, cos(omega t + phase), or a finite sum of harmonics. S is 1 or the
/// Neumann cosine mode prod_d cos(m_d pi x_d / L_d), which has zero normal
/// derivative on the boundary of the rectangle.
struct CoefficientTerm {
    double amplitude = 1.0;
    TemporalKind temporal = TemporalKind::constant;
    std::vector<Harmonic> harmonics;
    std::array<int, 2> mode{0, 0};

    static CoefficientTerm constant(double amplitude, std::array<int, 2> mode = {0, 0});
    static CoefficientTerm cosine(double amplitude, double omega, double phase = 0.0,
                                  std::array<int, 2> mode = {0, 0});
    static CoefficientTerm almost_periodic(std::vector<Harmonic> harmonics,
                                           std::array<int, 2> mode = {0, 0});

    double temporal_factor(double t) const;
    double spatial_factor(const Point& x, const std::array<double, 2>& lengths) const;
    bool spatially_constant() const noexcept { return mode[0] == 0 && mode[1] == 0; }
    bool time_independent() const noexcept;
    /// sup over (t, x) of |term|.
    double global_bound() const;
};

/// Sum of terms.
struct Coefficient {
    std::vector<CoefficientTerm> terms;

    double eval(double t, const Point& x, const std::array<double, 2>& lengths) const;
    bool spatially_homogeneous() const;
    bool time_independent() const;
    double global_bound() const;
    /// Shift the first spatially and temporally constant term by `delta`
    /// (appending one when absent).
    void add_constant(double delta);
    /// Value of the constant part (sum of constant, spatially flat terms).
    double constant_part() const;
};

/// Optional (alpha_0, A_0, alpha_1, A_1, alpha_2, A_2) bounds of the standing assumption.
struct DeclaredBounds {
    double alpha0, A0, alpha1, A1, alpha2, A2;
};

/// a_0, a_1, a_2 on a rectangle of the given side lengths.
struct CoefficientTriple {
    std::array<Coefficient, 3> a;
    std::array<double, 2> lengths{1.0, 1.0};
    std::optional<DeclaredBounds> declared_bounds;

    static CoefficientTriple constants(double a0, double a1, double a2,
                                       std::array<double, 2> lengths = {1.0, 1.0});

    const Coefficient& operator[](int which) const { return a.at(static_cast<std::size_t>(which)); }
    Coefficient& operator[](int which) { return a.at(static_cast<std::size_t>(which)); }

    bool spatially_homogeneous() const;
    bool time_independent() const;
    /// Every non-zero angular frequency present, across all three coefficients.
    std::vector<double> frequencies() const;
    /// Smallest common period when all frequencies are commensurate; empty
    /// for autonomous or incommensurate triples.
    std::optional<double> common_period() const;
};

/// Finite stand-in for "all t in R".
struct Horizon {
    double t_lo = 0.0;
    double t_hi = 100.0;
    double sample_step = 0.01;

    double length() const { return t_hi - t_lo; }
    void validate() const;
    /// t_lo + k * step for t < t_hi, then t_hi. Halving the step yields a superset.
    std::vector<double> sample_times() const;
    /// Uniform nodes with round(length / step) intervals (trapezoid quadrature).
    std::vector<double> uniform_times() const;
};

struct Extrema {
    double inf;
    double sup;
};

enum class ExtremaMode { of_spatial_inf, of_spatial_sup, pointwise };

double eval(const CoefficientTriple& c, int which, double t, const Point& x);

Extrema spatial_extrema(const CoefficientTriple& c, int which, double t, const Grid& grid);

/// Horizon used for temporal extrema: snapped to [t_lo, t_lo + P] when the
/// triple has common period P. Throws HorizonTooCoarse when the step exceeds a
/// quarter of the shortest period present.
Horizon effective_horizon(const CoefficientTriple& c, const Horizon& h);

Extrema temporal_extrema(const CoefficientTriple& c, int which, const Grid& grid,
                         const Horizon& horizon, ExtremaMode mode);

/// Grid-bound evaluator: spatial factors are tabulated once per node and
/// grouped by mode so per-time evaluation and extrema are cheap.
class SampledTriple {
public:
    SampledTriple(const CoefficientTriple& c, const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    const CoefficientTriple& triple() const noexcept { return triple_; }

    /// Writes a_which(t, x_k) for every node.
    void fill(int which, double t, std::span<double> out) const;
    Extrema spatial_extrema(int which, double t) const;

private:
    struct Group {
        std::vector<double> table;  // empty for the spatially flat group
        double table_min = 1.0;
        double table_max = 1.0;
        std::vector<CoefficientTerm> terms;
        double temporal_sum(double t) const;
    };

    CoefficientTriple triple_;
    Grid grid_;
    std::array<std::vector<Group>, 3> groups_;
};

/// Per-sample spatial extrema of all three coefficients over a horizon.
struct ExtremaSeries {
    std::vector<double> t;
    std::array<std::vector<double>, 3> inf;
    std::array<std::vector<double>, 3> sup;
};

ExtremaSeries sample_spatial_extrema(const CoefficientTriple& c, const Grid& grid,
                                     const std::vector<double>& times);

}  // namespace chemolab
