#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "chemolab/errors.hpp"
#include "chemolab/hypotheses.hpp"

using namespace chemolab;
using std::numbers::pi;

namespace {

Params constant_params(double a0, double a1, double a2, double chi, double length = 1.0) {
    Params p;
    p.chi = chi;
    p.grid = Grid::line(length, 16);
    p.triple = CoefficientTriple::constants(a0, a1, a2, {length, 1.0});
    p.horizon = Horizon{0.0, 10.0, 0.1};
    return p;
}

}  // namespace

TEST_CASE("check_H2 examples") {
    CHECK(check_H2(constant_params(1, 1, 0, 0)) == doctest::Approx(1.0));
    CHECK(check_H2(constant_params(1, 1, -0.5, 0.2)) == doctest::Approx(0.3));
    CHECK(check_H2(constant_params(1, 1, 0, 2)) == doctest::Approx(-1.0));
}

TEST_CASE("check_H2_prime examples") {
    Params p = constant_params(1, 1, 0, 5.0);
    p.dim_n = 2;
    CHECK(check_H2_prime(p).margin_dim == std::numeric_limits<double>::infinity());
    Params q = constant_params(1, 1.5, 0, 2.0);
    q.dim_n = 4;
    CHECK(check_H2_prime(q).margin_dim == doctest::Approx(0.5));
    CHECK(check_H2_prime(constant_params(1, 0.3, -0.5, 0)).margin_pos == doctest::Approx(-0.2));
}

TEST_CASE("stability_margin_homogeneous examples") {
    CHECK(stability_margin_homogeneous(constant_params(1, 3, 0.5, 1)) == doctest::Approx(0.5));
    CHECK(stability_margin_homogeneous(constant_params(1, 2, 0, 1)) == doctest::Approx(0.0));
    Params p = constant_params(1, 2, 0, 1);
    p.triple[1].terms.push_back(CoefficientTerm::constant(0.1, {1, 0}));
    CHECK_THROWS_AS(stability_margin_homogeneous(p), NotSpatiallyHomogeneous);
}

TEST_CASE("compute_r1_r2 examples") {
    const R1R2 a = compute_r1_r2(constant_params(1, 3, 0, 1));
    CHECK(a.r1 == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(a.r2 == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(a.h_chi == doctest::Approx(3.0));
    const R1R2 b = compute_r1_r2(constant_params(2, 5, 1, 0));
    CHECK(b.r1 == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(b.r2 == doctest::Approx(1.0 / 3).epsilon(1e-14));

    Params c = constant_params(1, 3, 0, 0);
    c.triple[1].terms.push_back(CoefficientTerm::cosine(1.0, 1.0));
    c.horizon = Horizon{0.0, 2 * pi, 0.001};
    const R1R2 r = compute_r1_r2(c);
    CHECK(r.r1 >= r.r2);
    CHECK(r.r2 > 0.0);
    CHECK(std::isfinite(r.r1));
    // a1_inf = 2, a1_sup = 4: h = 8, r1 = 4/8, r2 = 2/8.
    CHECK(r.r1 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.r2 == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("compute_r1_r2 guards a vanishing denominator") {
    // q = b = 1 gives h = 0.
    CHECK_THROWS_AS(compute_r1_r2(constant_params(1, 2, 0, 1)), DegenerateDenominator);
}

TEST_CASE("compute_L1_L2 examples") {
    {
        const Params p = constant_params(1, 3, 0, 0);
        const L1L2 l = compute_L1_L2(p, compute_r1_r2(p), 0.0);
        CHECK(l.L1 == doctest::Approx(2.0));
        CHECK(l.L2 == doctest::Approx(1.0));
    }
    {
        const Params p = constant_params(1, 3, 0, 1);
        const L1L2 l = compute_L1_L2(p, compute_r1_r2(p), 0.0);
        CHECK(l.L2 == doctest::Approx(1.0 + 1.0 / 18.0).epsilon(1e-13));
    }
    {
        Params p = constant_params(1, 3, 0.2, 0.5);
        p.triple[2].terms.push_back(CoefficientTerm::cosine(0.1, 1.0));
        p.horizon = Horizon{0.0, 2 * pi, 0.01};
        const R1R2 r = compute_r1_r2(p);
        for (double t : {0.0, 1.0, 2.5})
            CHECK(compute_L1_L2(p, r, t).L1 >= 0.0);
    }
}

TEST_CASE("time-average condition: constant integrand") {
    const Params p = constant_params(1, 3, 0, 0);
    CHECK(check_time_average_condition(p, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(check_time_average_condition(p, 6.0), HorizonTooShort);
}

TEST_CASE("time-average condition: sinusoidal gap against a closed-form window oracle") {
    // chi = 0, a2 = 0, a1 = 1, a0 = 2 + sin t: r2 = a0_inf = 1, so L2 - L1 = sin t.
    Params p = constant_params(2, 1, 0, 0);
    p.triple[0].terms.push_back(CoefficientTerm::cosine(1.0, 1.0, -pi / 2));
    p.horizon = Horizon{0.0, 20 * pi, 0.01};
    const R1R2 r = compute_r1_r2(p);
    CHECK(r.r2 == doctest::Approx(1.0).epsilon(1e-5));
    const double got = check_time_average_condition(p, 2 * pi);

    // Oracle: exact window averages (cos s - cos(s + w)) / w maximized by brute force.
    double oracle = -1.0;
    for (double s = 0.0; s <= 2 * pi; s += 0.002)
        for (double w = 2 * pi; s + w <= 20 * pi && w <= 6 * pi; w += 0.002)
            oracle = std::max(oracle, (std::cos(s) - std::cos(s + w)) / w);
    CHECK(oracle == doctest::Approx(0.2172).epsilon(1e-3));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-3));
    // Longer windows average the oscillation away.
    CHECK(check_time_average_condition(p, 8 * pi) <= 2.0 / (8 * pi));
    CHECK(check_time_average_condition(p, 8 * pi) < got);
}

TEST_CASE("compute_M examples") {
    CHECK(compute_M(constant_params(1, 3, 0, 1)) == doctest::Approx(0.5));
    CHECK(compute_M(constant_params(1, 2, 0, 0)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(compute_M(constant_params(1, 1, 0, 1)), DenominatorNotPositive);
}

TEST_CASE("property: constant-coefficient r reduction on random triples") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int tested = 0;
    while (tested < 100) {
        const double L = 0.5 + 1.5 * U(rng);
        const double chi = -1.0 + 3.0 * U(rng);
        const double a2 = -0.5 + U(rng);
        const double a1 = 2 * std::max(chi, 0.0) + L * std::abs(a2) + 0.05 + 3 * U(rng);
        const double a0 = 0.1 + 3 * U(rng);
        const R1R2 r = compute_r1_r2(constant_params(a0, a1, a2, chi, L));
        const double expect = a0 / (a1 + L * a2);
        CHECK(std::abs(r.r1 - expect) <= 1e-12 * expect);
        CHECK(std::abs(r.r2 - expect) <= 1e-12 * expect);
        ++tested;
    }
}

TEST_CASE("property: time-average sign matches the constant-coefficient closed form") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 120; ++k) {
        const double L = 0.5 + U(rng);
        const double chi = 4.0 * U(rng);
        const double a2 = -0.4 + 0.8 * U(rng);
        const double a1 = 2 * chi + L * std::abs(a2) + 0.05 + 2 * U(rng);
        const double a0 = 0.1 + 20 * U(rng);
        const double closed = chi * chi * a0 / (2 * (a1 + L * a2)) - (a1 - L * std::max(-a2, 0.0));
        if (std::abs(closed) < 1e-6) continue;
        const double avg = check_time_average_condition(constant_params(a0, a1, a2, chi, L), 1.0);
        CHECK((avg < 0) == (closed < 0));
    }
}

TEST_CASE("property: H2 monotone in chi and a1, and H2 implies H2'") {
    double prev = std::numeric_limits<double>::infinity();
    for (double chi = -1.0; chi <= 3.0; chi += 0.25) {
        const double m = check_H2(constant_params(1, 2, -0.3, chi));
        CHECK(m <= prev);
        prev = m;
    }
    prev = -std::numeric_limits<double>::infinity();
    for (double a1 = 0.5; a1 <= 4.0; a1 += 0.5) {
        const double m = check_H2(constant_params(1, a1, -0.3, 1.0));
        CHECK(m >= prev);
        prev = m;
    }
    for (int n = 1; n <= 6; ++n) {
        Params p = constant_params(1, 2.5, 0.2, 1.0);
        p.dim_n = n;
        REQUIRE(check_H2(p) > 0);
        const auto m = check_H2_prime(p);
        CHECK(m.margin_pos > 0);
        CHECK(m.margin_dim > 0);
    }
}

TEST_CASE("evaluate_hypotheses fills the report and serializes") {
    Params p = constant_params(1, 3, 0.5, 1);
    const HypothesisReport rep = evaluate_hypotheses(p);
    CHECK(rep.h2_margin == doctest::Approx(2.0));
    CHECK(rep.thm4_1_margin == doctest::Approx(0.5));
    CHECK(rep.r1 == doctest::Approx(1.0 / 3.5));
    CHECK(rep.M == doctest::Approx(0.5));
    CHECK(std::isnan(rep.stab2_eq2_period_avg));
    CHECK(rep.series_t.size() == rep.L1_series.size());

    std::ostringstream kv, header, row, series;
    rep.write_key_value(kv);
    rep.write_csv_header(header);
    rep.write_csv_row(row);
    rep.write_series_csv(series);
    CHECK(kv.str().find("h2_margin=2") != std::string::npos);
    const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    CHECK(count(header.str()) == count(row.str()));
    CHECK(series.str().rfind("t,L1,L2\n", 0) == 0);
}

TEST_CASE("evaluate_hypotheses reports NaN for unavailable quantities") {
    const HypothesisReport rep = evaluate_hypotheses(constant_params(1, 1, 0, 1));
    CHECK(std::isnan(rep.M));
    CHECK(rep.h2_margin == doctest::Approx(0.0));
    CHECK(std::isnan(evaluate_hypotheses(constant_params(1, 2, 0, 1)).r1));
}
