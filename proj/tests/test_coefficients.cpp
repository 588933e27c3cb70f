#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chemolab/coefficients.hpp"
#include "chemolab/errors.hpp"

using namespace chemolab;
using std::numbers::pi;

namespace {

CoefficientTriple triple_1d() { return CoefficientTriple::constants(1.0, 2.0, 0.0); }

}  // namespace

TEST_CASE("eval: constant, cosine in time, cosine mode in space") {
    const auto c = triple_1d();
    CHECK(eval(c, 0, 3.7, {0.25, 0.0}) == 1.0);

    CoefficientTriple d = c;
    d[0].terms = {CoefficientTerm::constant(1.0), CoefficientTerm::cosine(0.5, 1.0)};
    CHECK(eval(d, 0, 0.0, {0.3, 0.0}) == doctest::Approx(1.5).epsilon(1e-15));

    d[2].terms = {CoefficientTerm::constant(0.2, {1, 0})};
    CHECK(eval(d, 2, 0.0, {1.0, 0.0}) == doctest::Approx(-0.2).epsilon(1e-15));

    // Repeated calls are bit-identical.
    CHECK(eval(d, 0, 1.234, {0.1, 0}) == eval(d, 0, 1.234, {0.1, 0}));
}

TEST_CASE("spatial_extrema") {
    const Grid g = Grid::line(1.0, 1024);
    auto c = CoefficientTriple::constants(1.0, 2.0, 0.0);
    const Extrema e1 = spatial_extrema(c, 1, 5.0, g);
    CHECK(e1.inf == 2.0);
    CHECK(e1.sup == 2.0);

    c[0].terms = {CoefficientTerm::constant(1.0), CoefficientTerm::constant(0.3, {1, 0})};
    const Extrema e0 = spatial_extrema(c, 0, 0.0, g);
    const double h = g.spacing(0);
    CHECK(e0.inf == doctest::Approx(0.7).epsilon(0.3 * h * h));
    CHECK(e0.sup == doctest::Approx(1.3).epsilon(0.3 * h * h));
    CHECK(e0.inf >= 0.7);
    CHECK(e0.sup <= 1.3);

    CoefficientTerm t = CoefficientTerm::cosine(0.1, 1.0, 0.0, {2, 0});
    c[2].terms = {t};
    const Extrema e2 = spatial_extrema(c, 2, pi / 2, g);
    CHECK(std::abs(e2.inf) < 1e-16);
    CHECK(std::abs(e2.sup) < 1e-16);
}

TEST_CASE("spatial extrema bracket every grid value (many groups, 2D)") {
    const Grid g = Grid::rectangle(2.0, 1.0, 16, 12);
    CoefficientTriple c = CoefficientTriple::constants(1.0, 1.0, 0.0, {2.0, 1.0});
    c[0].terms = {CoefficientTerm::constant(1.0), CoefficientTerm::cosine(0.2, 1.0, 0.3, {1, 0}),
                  CoefficientTerm::cosine(0.1, 2.0, 0.0, {0, 1}), CoefficientTerm::constant(0.05, {2, 2})};
    const SampledTriple s(c, g);
    std::vector<double> vals(g.size());
    for (double t : {0.0, 0.7, 2.1, 5.5}) {
        const Extrema e = s.spatial_extrema(0, t);
        s.fill(0, t, vals);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double direct = eval(c, 0, t, g.node(k));
            CHECK(vals[k] == doctest::Approx(direct).epsilon(1e-14));
            CHECK(e.inf <= direct + 1e-15);
            CHECK(direct <= e.sup + 1e-15);
        }
    }
}

TEST_CASE("temporal_extrema") {
    const Grid g = Grid::line(1.0, 64);
    auto c = CoefficientTriple::constants(1.0, 3.0, 0.0);
    const Horizon h{0.0, 100.0, 0.01};
    for (auto mode : {ExtremaMode::of_spatial_inf, ExtremaMode::of_spatial_sup, ExtremaMode::pointwise}) {
        const Extrema e = temporal_extrema(c, 1, g, h, mode);
        CHECK(e.inf == 3.0);
        CHECK(e.sup == 3.0);
    }

    c[0].terms = {CoefficientTerm::constant(1.0), CoefficientTerm::cosine(0.5, 1.0)};
    const Horizon period{0.0, 2 * pi, 2 * pi / 1000};
    const Extrema e0 = temporal_extrema(c, 0, g, period, ExtremaMode::pointwise);
    CHECK(e0.inf == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(e0.sup == doctest::Approx(1.5).epsilon(1e-4));

    c[2].terms = {CoefficientTerm::constant(0.2, {1, 0})};
    const Extrema e2 = temporal_extrema(c, 2, g, h, ExtremaMode::of_spatial_inf);
    const double node_min = 0.2 * std::cos(pi * (63.5 / 64.0));
    CHECK(e2.inf == doctest::Approx(node_min).epsilon(1e-14));
    CHECK(e2.sup == doctest::Approx(node_min).epsilon(1e-14));
    CHECK(e2.inf == doctest::Approx(-0.2).epsilon(1e-3));
}

TEST_CASE("temporal_extrema rejects a coarse horizon") {
    const Grid g = Grid::line(1.0, 16);
    auto c = CoefficientTriple::constants(1.0, 1.0, 0.0);
    c[0].terms.push_back(CoefficientTerm::cosine(0.5, 10.0));
    const Horizon coarse{0.0, 100.0, 0.2};  // period 0.628, quarter 0.157
    CHECK_THROWS_AS(temporal_extrema(c, 0, g, coarse, ExtremaMode::pointwise), HorizonTooCoarse);
}

TEST_CASE("refining the sampling never shrinks the extrema") {
    const Grid g = Grid::line(1.0, 32);
    auto c = CoefficientTriple::constants(1.0, 1.0, 0.0);
    c[0].terms = {CoefficientTerm::constant(1.0),
                  CoefficientTerm::almost_periodic({{0.3, 1.0, 0.1}, {0.2, std::sqrt(2.0), 0.4}}, {1, 0})};
    Horizon h{0.0, 50.0, 0.2};
    Extrema prev = temporal_extrema(c, 0, g, h, ExtremaMode::pointwise);
    for (int k = 0; k < 4; ++k) {
        h.sample_step /= 2;
        const Extrema next = temporal_extrema(c, 0, g, h, ExtremaMode::pointwise);
        CHECK(next.inf <= prev.inf);
        CHECK(next.sup >= prev.sup);
        prev = next;
    }
}

TEST_CASE("common period and horizon snapping") {
    auto c = CoefficientTriple::constants(1.0, 1.0, 0.0);
    CHECK_FALSE(c.common_period().has_value());
    c[0].terms.push_back(CoefficientTerm::cosine(0.5, 2.0));
    c[1].terms.push_back(CoefficientTerm::cosine(0.1, 3.0));
    REQUIRE(c.common_period().has_value());
    CHECK(*c.common_period() == doctest::Approx(2 * pi));
    const Horizon eff = effective_horizon(c, Horizon{1.0, 100.0, 0.01});
    CHECK(eff.t_lo == 1.0);
    CHECK(eff.t_hi == doctest::Approx(1.0 + 2 * pi));

    c[2].terms.push_back(CoefficientTerm::cosine(0.1, std::sqrt(2.0)));
    CHECK_FALSE(c.common_period().has_value());
}

TEST_CASE("global bound and structure queries") {
    CoefficientTerm t = CoefficientTerm::almost_periodic({{0.3, 1.0, 0.0}, {-0.2, std::sqrt(2.0), 0.0}}, {1, 0});
    t.amplitude = 2.0;
    CHECK(t.global_bound() == doctest::Approx(1.0));
    CHECK_FALSE(t.spatially_constant());
    CHECK_FALSE(t.time_independent());
    Coefficient k{{CoefficientTerm::constant(1.0), t}};
    CHECK(k.global_bound() == doctest::Approx(2.0));
    CHECK_FALSE(k.spatially_homogeneous());
    k.add_constant(0.5);
    CHECK(k.constant_part() == 1.5);
}

TEST_CASE("sampled triple validates the domain") {
    auto c = CoefficientTriple::constants(1.0, 1.0, 0.0, {2.0, 1.0});
    CHECK_THROWS_AS(SampledTriple(c, Grid::line(1.0, 16)), InvalidArgument);
    auto d = CoefficientTriple::constants(1.0, 1.0, 0.0);
    d[0].terms.push_back(CoefficientTerm::constant(0.1, {0, 1}));
    CHECK_THROWS_AS(SampledTriple(d, Grid::line(1.0, 16)), InvalidArgument);
}

TEST_CASE("random triples: eval lies within spatial extrema") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid g = Grid::line(1.0, 40);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = CoefficientTriple::constants(2.0, 1.0, 0.0);
        c[0].terms.push_back(CoefficientTerm::cosine(0.5 * U(rng), 1.0 + U(rng), U(rng), {1 + trial % 3, 0}));
        c[0].terms.push_back(CoefficientTerm::constant(0.3 * U(rng), {2, 0}));
        const double t = 10 * U(rng);
        const Extrema e = spatial_extrema(c, 0, t, g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double v = eval(c, 0, t, g.node(k));
            CHECK(e.inf <= v + 1e-14);
            CHECK(v <= e.sup + 1e-14);
        }
    }
}
