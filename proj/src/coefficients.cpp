#include "chemolab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "chemolab/errors.hpp"

namespace chemolab {

CoefficientTerm CoefficientTerm::constant(double amplitude, std::array<int, 2> mode) {
    return {amplitude, TemporalKind::constant, {}, mode};
}

CoefficientTerm CoefficientTerm::cosine(double amplitude, double omega, double phase,
                                        std::array<int, 2> mode) {
    return {amplitude, TemporalKind::cosine, {{1.0, omega, phase}}, mode};
}

CoefficientTerm CoefficientTerm::almost_periodic(std::vector<Harmonic> harmonics,
                                                 std::array<int, 2> mode) {
    if (harmonics.empty()) throw InvalidArgument("almost_periodic term needs at least one harmonic");
    return {1.0, TemporalKind::almost_periodic, std::move(harmonics), mode};
}

double CoefficientTerm::temporal_factor(double t) const {
    if (temporal == TemporalKind::constant) return 1.0;
    double s = 0.0;
    for (const auto& h : harmonics) s += h.amplitude * std::cos(h.omega * t + h.phase);
    return s;
}

double CoefficientTerm::spatial_factor(const Point& x, const std::array<double, 2>& lengths) const {
    double s = 1.0;
    for (int d = 0; d < 2; ++d)
        if (mode[d] != 0) s *= std::cos(mode[d] * std::numbers::pi * x[d] / lengths[d]);
    return s;
}

bool CoefficientTerm::time_independent() const noexcept {
    if (temporal == TemporalKind::constant) return true;
    return std::all_of(harmonics.begin(), harmonics.end(),
                       [](const Harmonic& h) { return h.omega == 0.0 || h.amplitude == 0.0; });
}

double CoefficientTerm::global_bound() const {
    double b = std::abs(amplitude);
    if (temporal != TemporalKind::constant) {
        double s = 0.0;
        for (const auto& h : harmonics) s += std::abs(h.amplitude);
        b *= s;
    }
    return b;
}

double Coefficient::eval(double t, const Point& x, const std::array<double, 2>& lengths) const {
    double s = 0.0;
    for (const auto& term : terms)
        s += term.amplitude * term.temporal_factor(t) * term.spatial_factor(x, lengths);
    return s;
}

bool Coefficient::spatially_homogeneous() const {
    return std::all_of(terms.begin(), terms.end(), [](const CoefficientTerm& term) {
        return term.spatially_constant() || term.amplitude == 0.0;
    });
}

bool Coefficient::time_independent() const {
    return std::all_of(terms.begin(), terms.end(),
                       [](const CoefficientTerm& term) { return term.time_independent(); });
}

double Coefficient::global_bound() const {
    double b = 0.0;
    for (const auto& term : terms) b += term.global_bound();
    return b;
}

void Coefficient::add_constant(double delta) {
    for (auto& term : terms)
        if (term.temporal == TemporalKind::constant && term.spatially_constant()) {
            term.amplitude += delta;
            return;
        }
    terms.push_back(CoefficientTerm::constant(delta));
}

double Coefficient::constant_part() const {
    double s = 0.0;
    for (const auto& term : terms)
        if (term.temporal == TemporalKind::constant && term.spatially_constant()) s += term.amplitude;
    return s;
}

CoefficientTriple CoefficientTriple::constants(double a0, double a1, double a2,
                                               std::array<double, 2> lengths) {
    CoefficientTriple c;
    c.a[0].terms = {CoefficientTerm::constant(a0)};
    c.a[1].terms = {CoefficientTerm::constant(a1)};
    c.a[2].terms = {CoefficientTerm::constant(a2)};
    c.lengths = lengths;
    return c;
}

bool CoefficientTriple::spatially_homogeneous() const {
    return std::all_of(a.begin(), a.end(), [](const Coefficient& k) { return k.spatially_homogeneous(); });
}

bool CoefficientTriple::time_independent() const {
    return std::all_of(a.begin(), a.end(), [](const Coefficient& k) { return k.time_independent(); });
}

std::vector<double> CoefficientTriple::frequencies() const {
    std::vector<double> out;
    for (const auto& k : a)
        for (const auto& term : k.terms)
            if (term.temporal != TemporalKind::constant && term.amplitude != 0.0)
                for (const auto& h : term.harmonics)
                    if (h.omega != 0.0 && h.amplitude != 0.0) out.push_back(std::abs(h.omega));
    return out;
}

namespace {

// p/q with q <= max_den approximating r to relative 1e-12, if any.
std::optional<std::pair<long, long>> rational_approx(double r, long max_den) {
    for (long q = 1; q <= max_den; ++q) {
        const double p = std::round(r * static_cast<double>(q));
        if (p >= 1.0 && std::abs(r - p / static_cast<double>(q)) <= 1e-12 * r)
            return std::pair<long, long>{static_cast<long>(p), q};
    }
    return std::nullopt;
}

}  // namespace

std::optional<double> CoefficientTriple::common_period() const {
    const auto freqs = frequencies();
    if (freqs.empty()) return std::nullopt;
    const double base = *std::min_element(freqs.begin(), freqs.end());
    std::vector<std::pair<long, long>> ratios;
    long den_lcm = 1;
    for (double w : freqs) {
        const auto pq = rational_approx(w / base, 64);
        if (!pq) return std::nullopt;
        ratios.push_back(*pq);
        den_lcm = std::lcm(den_lcm, pq->second);
        if (den_lcm > 4096) return std::nullopt;
    }
    // Every frequency is an integer multiple n_k of base / den_lcm.
    long g = 0;
    for (const auto& [p, q] : ratios) g = std::gcd(g, p * (den_lcm / q));
    const double fundamental = base * static_cast<double>(g) / static_cast<double>(den_lcm);
    return 2.0 * std::numbers::pi / fundamental;
}

void Horizon::validate() const {
    if (!std::isfinite(t_lo) || !std::isfinite(t_hi) || !(t_lo < t_hi))
        throw InvalidArgument("horizon needs finite t_lo < t_hi");
    if (!(sample_step > 0.0) || sample_step > length())
        throw InvalidArgument("horizon sample_step must lie in (0, t_hi - t_lo]");
}

std::vector<double> Horizon::sample_times() const {
    validate();
    std::vector<double> ts;
    for (std::size_t k = 0;; ++k) {
        const double t = t_lo + static_cast<double>(k) * sample_step;
        if (t >= t_hi) break;
        ts.push_back(t);
    }
    ts.push_back(t_hi);
    return ts;
}

std::vector<double> Horizon::uniform_times() const {
    validate();
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length() / sample_step)));
    std::vector<double> ts(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        ts[k] = t_lo + length() * static_cast<double>(k) / static_cast<double>(n);
    return ts;
}

double eval(const CoefficientTriple& c, int which, double t, const Point& x) {
    return c[which].eval(t, x, c.lengths);
}

Extrema spatial_extrema(const CoefficientTriple& c, int which, double t, const Grid& grid) {
    return SampledTriple(c, grid).spatial_extrema(which, t);
}

Horizon effective_horizon(const CoefficientTriple& c, const Horizon& h) {
    h.validate();
    const auto freqs = c.frequencies();
    if (!freqs.empty()) {
        const double shortest = 2.0 * std::numbers::pi / *std::max_element(freqs.begin(), freqs.end());
        if (h.sample_step > 0.25 * shortest)
            throw HorizonTooCoarse("sample_step exceeds a quarter of the shortest temporal period");
    }
    Horizon out = h;
    if (const auto period = c.common_period()) {
        out.t_hi = h.t_lo + *period;
        out.sample_step = std::min(h.sample_step, *period);
    }
    return out;
}

Extrema temporal_extrema(const CoefficientTriple& c, int which, const Grid& grid,
                         const Horizon& horizon, ExtremaMode mode) {
    const Horizon eff = effective_horizon(c, horizon);
    const SampledTriple sampled(c, grid);
    Extrema out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double t : eff.sample_times()) {
        const Extrema e = sampled.spatial_extrema(which, t);
        switch (mode) {
            case ExtremaMode::of_spatial_inf:
                out.inf = std::min(out.inf, e.inf);
                out.sup = std::max(out.sup, e.inf);
                break;
            case ExtremaMode::of_spatial_sup:
                out.inf = std::min(out.inf, e.sup);
                out.sup = std::max(out.sup, e.sup);
                break;
            case ExtremaMode::pointwise:
                out.inf = std::min(out.inf, e.inf);
                out.sup = std::max(out.sup, e.sup);
                break;
        }
    }
    return out;
}

double SampledTriple::Group::temporal_sum(double t) const {
    double s = 0.0;
    for (const auto& term : terms) s += term.amplitude * term.temporal_factor(t);
    return s;
}

SampledTriple::SampledTriple(const CoefficientTriple& c, const Grid& grid) : triple_(c), grid_(grid) {
    for (int d = 0; d < grid.dim(); ++d)
        if (std::abs(c.lengths[d] - grid.length(d)) > 1e-12 * grid.length(d))
            throw InvalidArgument("coefficient domain lengths do not match the grid");
    for (int which = 0; which < 3; ++which) {
        std::map<std::array<int, 2>, Group> by_mode;
        for (const auto& term : c[which].terms) {
            if (grid.dim() == 1 && term.mode[1] != 0)
                throw InvalidArgument("y mode on a one-dimensional grid");
            by_mode[term.mode].terms.push_back(term);
        }
        auto& groups = groups_[which];
        if (auto it = by_mode.find({0, 0}); it != by_mode.end()) {
            groups.push_back(std::move(it->second));
            by_mode.erase(it);
        } else {
            groups.push_back(Group{});
        }
        for (auto& [mode, group] : by_mode) {
            group.table.resize(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k)
                group.table[k] = group.terms.front().spatial_factor(grid.node(k), c.lengths);
            const auto [lo, hi] = std::minmax_element(group.table.begin(), group.table.end());
            group.table_min = *lo;
            group.table_max = *hi;
            groups.push_back(std::move(group));
        }
    }
}

void SampledTriple::fill(int which, double t, std::span<double> out) const {
    const auto& groups = groups_[which];
    const double flat = groups.front().temporal_sum(t);
    std::fill(out.begin(), out.end(), flat);
    for (std::size_t g = 1; g < groups.size(); ++g) {
        const double w = groups[g].temporal_sum(t);
        const auto& table = groups[g].table;
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * table[k];
    }
}

Extrema SampledTriple::spatial_extrema(int which, double t) const {
    const auto& groups = groups_[which];
    const double flat = groups.front().temporal_sum(t);
    if (groups.size() == 1) return {flat, flat};
    if (groups.size() == 2) {
        const double w = groups[1].temporal_sum(t);
        const double lo = w * groups[1].table_min;
        const double hi = w * groups[1].table_max;
        return {flat + std::min(lo, hi), flat + std::max(lo, hi)};
    }
    std::vector<double> values(grid_.size());
    fill(which, t, values);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
}

ExtremaSeries sample_spatial_extrema(const CoefficientTriple& c, const Grid& grid,
                                     const std::vector<double>& times) {
    const SampledTriple sampled(c, grid);
    ExtremaSeries s;
    s.t = times;
    for (int i = 0; i < 3; ++i) {
        s.inf[i].resize(times.size());
        s.sup[i].resize(times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            const Extrema e = sampled.spatial_extrema(i, times[k]);
            s.inf[i][k] = e.inf;
            s.sup[i][k] = e.sup;
        }
    }
    return s;
}

}  // namespace chemolab
