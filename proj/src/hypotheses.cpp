#include "chemolab/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "chemolab/csv.hpp"
#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

constexpr double inf_v = std::numeric_limits<double>::infinity();
constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

R1R2 r1_r2_from(const ConditionTerms& c, double chi, double measure) {
    const double cp = pos(chi);
    const double q_inf = c.positivity_inf - cp;
    const double q_sup = c.upper_sup - cp;
    const double b_lo = cp + measure * c.a2_inf_pos_inf;
    const double b_hi = cp + measure * c.a2_sup_pos_sup;
    const double p1 = q_inf * q_sup;
    const double p2 = b_lo * b_hi;
    const double h = p1 - p2;
    if (!(std::abs(h) >= 1e-14 * std::max(std::abs(p1), std::abs(p2))) || h == 0.0)
        throw DegenerateDenominator("h(chi) vanishes");
    return {(q_sup * c.a0_sup - c.a0_inf * b_lo) / h, (q_inf * c.a0_inf - c.a0_sup * b_hi) / h, h};
}

L1L2 l1_l2_from(const R1R2& r, double chi, double measure, double a0_sup_t, double a1_inf_t,
                double a2_inf_t, double a2_sup_t) {
    const double L1 = 2.0 * r.r2 * (a1_inf_t + measure * pos(a2_inf_t));
    const double cr1 = chi * r.r1;
    const double L2 = a0_sup_t + 0.5 * chi * (r.r1 - r.r2) + 0.5 * cr1 * cr1 +
                      measure * r.r1 * (2.0 * neg(a2_inf_t) + pos(a2_sup_t));
    return {L1, L2};
}

// L2 - L1 on the uniform sampling of the configured (unsnapped) horizon.
std::pair<std::vector<double>, std::vector<double>> gap_series(const Params& p, const R1R2& r,
                                                                const Horizon& h) {
    const auto ts = h.uniform_times();
    const auto s = sample_spatial_extrema(p.triple, p.grid, ts);
    std::vector<double> gap(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const L1L2 l = l1_l2_from(r, p.chi, p.measure(), s.sup[0][k], s.inf[1][k], s.inf[2][k],
                                  s.sup[2][k]);
        gap[k] = l.L2 - l.L1;
    }
    return {ts, gap};
}

double max_window_average(const std::vector<double>& ts, const std::vector<double>& f, double min_window) {
    const std::size_t n = ts.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) cum[k] = cum[k - 1] + 0.5 * (f[k] + f[k - 1]) * (ts[k] - ts[k - 1]);
    double best = -inf_v;
    // Windows are evaluated on sample nodes; a tiny slack absorbs round-off in t_j - t_i.
    const double slack = 1e-9 * (ts.back() - ts.front());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const double w = ts[j] - ts[i];
            if (w + slack < min_window) break;
            best = std::max(best, (cum[j] - cum[i]) / w);
        }
    return best;
}

}  // namespace

ConditionTerms ConditionTerms::compute(const Params& p) {
    ConditionTerms c;
    c.horizon = effective_horizon(p.triple, p.horizon);
    c.series = sample_spatial_extrema(p.triple, p.grid, c.horizon.sample_times());
    const auto& s = c.series;
    const double m = p.measure();
    c.a0_inf = min_of(s.inf[0]);
    c.a0_sup = max_of(s.sup[0]);
    c.a1_inf = min_of(s.inf[1]);
    c.a1_sup = max_of(s.sup[1]);
    c.a2_inf = min_of(s.inf[2]);
    c.a2_sup = max_of(s.sup[2]);
    c.positivity_inf = inf_v;
    c.upper_sup = -inf_v;
    c.a2_inf_pos_inf = inf_v;
    c.a2_sup_pos_sup = -inf_v;
    c.homogeneous = true;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        c.positivity_inf = std::min(c.positivity_inf, s.inf[1][k] - m * neg(s.inf[2][k]));
        c.upper_sup = std::max(c.upper_sup, s.sup[1][k] - m * neg(s.sup[2][k]));
        c.a2_inf_pos_inf = std::min(c.a2_inf_pos_inf, pos(s.inf[2][k]));
        c.a2_sup_pos_sup = std::max(c.a2_sup_pos_sup, pos(s.sup[2][k]));
        for (int i = 0; i < 3; ++i) {
            const double scale = std::max({1.0, std::abs(s.inf[i][k]), std::abs(s.sup[i][k])});
            if (s.sup[i][k] - s.inf[i][k] > 1e-14 * scale) c.homogeneous = false;
        }
    }
    // |a2| needs the full node set: inf_x |a2| is not a function of inf and sup.
    const SampledTriple sampled(p.triple, p.grid);
    std::vector<double> values(p.grid.size());
    c.abs_a2_inf = inf_v;
    c.abs_a2_sup = 0.0;
    for (double t : s.t) {
        sampled.fill(2, t, values);
        for (double v : values) {
            c.abs_a2_inf = std::min(c.abs_a2_inf, std::abs(v));
            c.abs_a2_sup = std::max(c.abs_a2_sup, std::abs(v));
        }
    }
    return c;
}

double check_H2(const Params& p) {
    return ConditionTerms::compute(p).positivity_inf - pos(p.chi);
}

H2PrimeMargins check_H2_prime(const Params& p) {
    const auto c = ConditionTerms::compute(p);
    H2PrimeMargins out{c.positivity_inf, inf_v};
    if (p.dim_n >= 3) out.margin_dim = c.a1_inf - p.chi * (p.dim_n - 2) / static_cast<double>(p.dim_n);
    return out;
}

double stability_margin_homogeneous(const Params& p) {
    const auto c = ConditionTerms::compute(p);
    if (!c.homogeneous) throw NotSpatiallyHomogeneous("coefficients vary in space");
    double best = inf_v;
    for (std::size_t k = 0; k < c.series.t.size(); ++k)
        best = std::min(best, c.series.inf[1][k] - p.measure() * std::abs(c.series.inf[2][k]));
    return best - 2.0 * pos(p.chi);
}

double stability_margin_heterogeneous(const Params& p) {
    const auto c = ConditionTerms::compute(p);
    const double cp = pos(p.chi);
    return c.positivity_inf - (cp + c.a0_sup / c.a0_inf * (cp + p.measure() * c.a2_sup_pos_sup));
}

R1R2 compute_r1_r2(const Params& p) {
    return r1_r2_from(ConditionTerms::compute(p), p.chi, p.measure());
}

L1L2 compute_L1_L2(const Params& p, const R1R2& r, double t) {
    const SampledTriple sampled(p.triple, p.grid);
    const Extrema e0 = sampled.spatial_extrema(0, t);
    const Extrema e1 = sampled.spatial_extrema(1, t);
    const Extrema e2 = sampled.spatial_extrema(2, t);
    return l1_l2_from(r, p.chi, p.measure(), e0.sup, e1.inf, e2.inf, e2.sup);
}

double check_time_average_condition(const Params& p, double min_window) {
    p.horizon.validate();
    if (!(min_window > 0.0) || p.horizon.length() < 2.0 * min_window)
        throw HorizonTooShort("horizon must span at least two minimum windows");
    const R1R2 r = compute_r1_r2(p);
    const auto [ts, gap] = gap_series(p, r, p.horizon);
    return max_window_average(ts, gap, min_window);
}

std::optional<double> period_average_condition(const Params& p) {
    const auto period = p.triple.common_period();
    if (!period) return std::nullopt;
    const R1R2 r = compute_r1_r2(p);
    Horizon one{p.horizon.t_lo, p.horizon.t_lo + *period, std::min(p.horizon.sample_step, *period / 64.0)};
    const auto [ts, gap] = gap_series(p, r, one);
    double integral = 0.0;
    for (std::size_t k = 1; k < ts.size(); ++k) integral += 0.5 * (gap[k] + gap[k - 1]) * (ts[k] - ts[k - 1]);
    return integral / *period;
}

double compute_M(const Params& p) {
    const auto c = ConditionTerms::compute(p);
    const double denom = c.positivity_inf - pos(p.chi);
    if (!(denom > 0.0)) throw DenominatorNotPositive("inf_t{a1_inf - |Omega|(a2_inf)_-} - (chi)_+ <= 0");
    return c.a0_sup / denom;
}

HypothesisReport evaluate_hypotheses(const Params& p, double min_window) {
    HypothesisReport rep;
    const auto c = ConditionTerms::compute(p);
    const double m = p.measure();
    const double cp = pos(p.chi);
    rep.horizon_used = c.horizon;

    rep.h1_bounds = {c.a0_inf, c.a0_sup, std::max(0.0, c.a1_inf), c.a1_sup, c.abs_a2_inf, c.abs_a2_sup};
    rep.h1_ok = c.a0_inf > 0.0 && c.a1_inf >= 0.0 && (std::max(0.0, c.a1_inf) + c.abs_a2_inf) > 0.0;
    if (const auto& d = p.triple.declared_bounds) {
        const bool consistent = d->alpha0 > 0.0 && d->alpha0 <= c.a0_inf && c.a0_sup <= d->A0 &&
                                0.0 <= d->alpha1 && d->alpha1 <= c.a1_inf && c.a1_sup <= d->A1 &&
                                0.0 <= d->alpha2 && d->alpha2 <= c.abs_a2_inf && c.abs_a2_sup <= d->A2 &&
                                d->alpha1 + d->alpha2 > 0.0;
        rep.h1_ok = rep.h1_ok && consistent;
    }

    rep.h2_margin = c.positivity_inf - cp;
    rep.h2_prime_margin_pos = c.positivity_inf;
    rep.h2_prime_margin_dim =
        p.dim_n >= 3 ? c.a1_inf - p.chi * (p.dim_n - 2) / static_cast<double>(p.dim_n) : inf_v;

    rep.thm4_1_margin = nan_v;
    if (c.homogeneous) {
        double best = inf_v;
        for (std::size_t k = 0; k < c.series.t.size(); ++k)
            best = std::min(best, c.series.inf[1][k] - m * std::abs(c.series.inf[2][k]));
        rep.thm4_1_margin = best - 2.0 * cp;
    }
    rep.stab2_eq1_margin = c.positivity_inf - (cp + c.a0_sup / c.a0_inf * (cp + m * c.a2_sup_pos_sup));

    rep.r1 = rep.r2 = rep.h_chi = nan_v;
    rep.stab2_eq2_avg = nan_v;
    rep.stab2_eq2_period_avg = nan_v;
    try {
        const R1R2 r = r1_r2_from(c, p.chi, m);
        rep.r1 = r.r1;
        rep.r2 = r.r2;
        rep.h_chi = r.h_chi;
        const auto ts = p.horizon.uniform_times();
        const auto s = sample_spatial_extrema(p.triple, p.grid, ts);
        rep.series_t = ts;
        rep.L1_series.resize(ts.size());
        rep.L2_series.resize(ts.size());
        std::vector<double> gap(ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const L1L2 l = l1_l2_from(r, p.chi, m, s.sup[0][k], s.inf[1][k], s.inf[2][k], s.sup[2][k]);
            rep.L1_series[k] = l.L1;
            rep.L2_series[k] = l.L2;
            gap[k] = l.L2 - l.L1;
        }
        const double w = min_window > 0.0 ? min_window : p.horizon.length() / 10.0;
        if (p.horizon.length() >= 2.0 * w) rep.stab2_eq2_avg = max_window_average(ts, gap, w);
        if (const auto avg = period_average_condition(p)) rep.stab2_eq2_period_avg = *avg;
    } catch (const DegenerateDenominator&) {
    }

    const double denom = c.positivity_inf - cp;
    rep.M = denom > 0.0 ? c.a0_sup / denom : nan_v;
    return rep;
}

bool HypothesisReport::interval_valid() const { return h_chi > 0.0 && r2 > 0.0 && r1 >= r2; }

std::vector<std::pair<std::string, std::string>> HypothesisReport::entries() const {
    using csv::num;
    return {
        {"horizon_t_lo", num(horizon_used.t_lo)},
        {"horizon_t_hi", num(horizon_used.t_hi)},
        {"horizon_step", num(horizon_used.sample_step)},
        {"h1_ok", h1_ok ? "1" : "0"},
        {"alpha0", num(h1_bounds.alpha0)},
        {"A0", num(h1_bounds.A0)},
        {"alpha1", num(h1_bounds.alpha1)},
        {"A1", num(h1_bounds.A1)},
        {"alpha2", num(h1_bounds.alpha2)},
        {"A2", num(h1_bounds.A2)},
        {"h2_margin", num(h2_margin)},
        {"h2_prime_margin_pos", num(h2_prime_margin_pos)},
        {"h2_prime_margin_dim", num(h2_prime_margin_dim)},
        {"thm4_1_margin", num(thm4_1_margin)},
        {"stab2_eq1_margin", num(stab2_eq1_margin)},
        {"stab2_eq2_avg", num(stab2_eq2_avg)},
        {"stab2_eq2_period_avg", num(stab2_eq2_period_avg)},
        {"r1", num(r1)},
        {"r2", num(r2)},
        {"h_chi", num(h_chi)},
        {"interval_valid", interval_valid() ? "1" : "0"},
        {"M", num(M)},
    };
}

void HypothesisReport::write_key_value(std::ostream& out) const {
    for (const auto& [k, v] : entries()) out << k << '=' << v << '\n';
}

void HypothesisReport::write_csv_header(std::ostream& out) const {
    const auto e = entries();
    for (std::size_t k = 0; k < e.size(); ++k) out << (k ? "," : "") << e[k].first;
    out << '\n';
}

void HypothesisReport::write_csv_row(std::ostream& out) const {
    const auto e = entries();
    for (std::size_t k = 0; k < e.size(); ++k) out << (k ? "," : "") << e[k].second;
    out << '\n';
}

void HypothesisReport::write_series_csv(std::ostream& out) const {
    csv::header(out, {"t", "L1", "L2"});
    for (std::size_t k = 0; k < series_t.size(); ++k) csv::row(out, {series_t[k], L1_series[k], L2_series[k]});
}

}  // namespace chemolab
