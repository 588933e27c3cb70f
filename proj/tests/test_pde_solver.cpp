#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chemolab/errors.hpp"
#include "chemolab/ode_envelopes.hpp"
#include "chemolab/pde_solver.hpp"

using namespace chemolab;
using std::numbers::pi;

namespace {

Params make_params(double a0, double a1, double a2, double chi, const Grid& g) {
    Params p;
    p.chi = chi;
    p.grid = g;
    p.triple = CoefficientTriple::constants(a0, a1, a2, {g.length(0), g.length(1)});
    p.horizon = Horizon{0.0, 10.0, 0.05};
    return p;
}

Field bump(const Grid& g, double base, double amp, int mode = 1) {
    return Field::from_function(g, [&](const Point& x) {
        double c = std::cos(mode * pi * x[0] / g.length(0));
        if (g.dim() == 2) c *= std::cos(pi * x[1] / g.length(1));
        return base + amp * c;
    });
}

Params heterogeneous_params(const Grid& g) {
    Params p = make_params(1.0, 2.0, 0.2, 0.4, g);
    p.triple[0].terms.push_back(CoefficientTerm::cosine(0.3, 1.0, 0.0, {1, 0}));
    p.triple[1].terms.push_back(CoefficientTerm::constant(0.3, {2, 0}));
    p.triple[2].terms.push_back(CoefficientTerm::cosine(0.1, 2.0, 0.5));
    p.horizon = Horizon{0.0, 2 * pi, 0.01};
    return p;
}

}  // namespace

TEST_CASE("quadrature examples") {
    CHECK(quadrature(Field(Grid::line(1.0, 32), 2.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(quadrature(Field(Grid::rectangle(2.0, 1.0, 16, 8), 3.0)) == doctest::Approx(6.0).epsilon(1e-15));
    const Grid g = Grid::line(1.0, 64);
    CHECK(std::abs(quadrature(Field::from_function(g, [](const Point& x) { return std::cos(pi * x[0]); }))) < 1e-12);
    Field bad(g, 1.0);
    bad[0] = INFINITY;
    CHECK_THROWS_AS(quadrature(bad), NonFiniteInput);
}

TEST_CASE("step: homogeneous logistic reduction matches explicit Euler") {
    const Grid g = Grid::line(1.0, 32);
    const Params p = make_params(1.3, 0.7, 0.0, 0.0, g);
    const PdeSolver solver(p);
    const double r = 0.4, dt = 0.01;
    const SimState s = solver.step(solver.make_state(Field(g, r), 0.0), dt);
    const double expect = r + dt * r * (1.3 - 0.7 * r);
    for (double x : s.u.values()) CHECK(std::abs(x - expect) < 1e-12);
    CHECK(s.t == dt);
    CHECK(std::abs(s.v_max - expect) < 1e-12);
}

TEST_CASE("step: homogeneous steady state is preserved by both schemes") {
    for (const Grid& g : {Grid::line(2.0, 64), Grid::rectangle(1.0, 1.0, 16, 16)}) {
        for (double chi : {0.0, 0.7, -1.5}) {
            const Params p = make_params(1.0, 2.0, 0.5, chi, g);
            const double ustar = 1.0 / (2.0 + 0.5 * g.measure());
            const PdeSolver solver(p);
            for (Scheme sc : {Scheme::imex_euler, Scheme::ars222}) {
                SimState s = solver.make_state(Field(g, ustar), 0.0);
                for (int k = 0; k < 5; ++k) {
                    const SimState n = solver.step(s, 0.02, sc);
                    CHECK(sup_distance(n.u, s.u) < 1e-10);
                    s = n;
                }
            }
        }
    }
}

TEST_CASE("step: trivial solution stays zero") {
    const Grid g = Grid::line(1.0, 16);
    const PdeSolver solver(make_params(1.0, 1.0, 0.3, 1.0, g));
    SimState s = solver.make_state(Field(g, 0.0), 0.0);
    for (int k = 0; k < 10; ++k) s = solver.step(s, 0.05, Scheme::ars222);
    for (double x : s.u.values()) CHECK(x == 0.0);
}

TEST_CASE("step: chemotactic flux conserves mass") {
    const Grid g = Grid::rectangle(1.0, 1.0, 16, 16);
    Params p = make_params(0.0, 0.0, 0.0, 3.0, g);
    const PdeSolver solver(p);
    const Field u0 = Field::from_function(g, [](const Point& x) { return 1.0 + 0.8 * std::exp(-20 * ((x[0] - 0.3) * (x[0] - 0.3) + x[1] * x[1])); });
    for (FluxScheme f : {FluxScheme::central, FluxScheme::upwind}) {
        SimState s = solver.make_state(u0, 0.0);
        const double m0 = s.mass;
        for (int k = 0; k < 20; ++k) s = solver.step(s, 1e-3, Scheme::imex_euler, f);
        CHECK(s.mass == doctest::Approx(m0).epsilon(1e-12));
    }
}

TEST_CASE("step: rejection on growth and undershoot") {
    const Grid g = Grid::line(1.0, 16);
    const PdeSolver growth(make_params(50.0, 0.0, 0.0, 0.0, g));
    const SimState s = growth.make_state(Field(g, 1.0), 0.0);
    CHECK_THROWS_AS(growth.step(s, 0.1), StepRejected);  // factor 6 > cap 2
    CHECK_NOTHROW(growth.step(s, 0.001));

    const PdeSolver deplete(make_params(-30.0, 0.0, 0.0, 0.0, g));
    CHECK_THROWS_AS(deplete.step(deplete.make_state(Field(g, 1.0), 0.0), 0.1), StepRejected);
}

TEST_CASE("integrate: boundedness under H2") {
    const Grid g = Grid::line(1.0, 64);
    const Params p = make_params(1.0, 2.0, 0.3, 0.8, g);
    const Field u0 = bump(g, 0.6, 0.5, 2);
    StepController ctrl;
    const Trajectory tr = integrate(p, u0, 0.0, 20.0, ctrl);
    REQUIRE(tr.outcome == Outcome::completed);
    const double bound = std::max(u0.max(), 1.0 / (2.0 - 0.8));
    CHECK(tr.final_state.u.max() <= bound + 1e-6);
    CHECK(tr.max_u_max <= bound + 1e-6);
    CHECK(tr.final_state.t == 20.0);
}

TEST_CASE("integrate: Fisher-KPP relaxes to the carrying capacity") {
    const Grid g = Grid::line(1.0, 64);
    const Params p = make_params(1.0, 1.0, 0.0, 0.0, g);
    const Trajectory tr = integrate(p, bump(g, 1.0, 0.5), 0.0, 20.0, StepController{});
    REQUIRE(tr.outcome == Outcome::completed);
    CHECK(sup_distance(tr.final_state.u, Field(g, 1.0)) < 1e-4);

    // Refined reference agrees.
    StepController fine = StepController::fixed(1e-3);
    const Params pf = make_params(1.0, 1.0, 0.0, 0.0, g.refined(2));
    const Trajectory ref = integrate(pf, bump(g.refined(2), 1.0, 0.5), 0.0, 20.0, fine, 1000);
    CHECK(sup_distance(restrict_average(ref.final_state.u, 2), tr.final_state.u) < 1e-4);
}

TEST_CASE("integrate: blow-up and failure outcomes") {
    const Grid g = Grid::line(1.0, 16);
    const Params p = make_params(1.0, 1.0, 0.0, 0.0, g);
    StepController ctrl;
    ctrl.blowup_threshold = 10.0;
    const Trajectory up = integrate(p, Field(g, 11.0), 0.0, 1.0, ctrl);
    CHECK(up.outcome == Outcome::blow_up);
    CHECK(up.outcome_time == 0.0);
    REQUIRE(detect_blowup(up).has_value());
    CHECK(*detect_blowup(up) == 0.0);

    const Trajectory ok = integrate(p, Field(g, 0.5), 0.0, 1.0, StepController{});
    CHECK(ok.outcome == Outcome::completed);
    CHECK_FALSE(detect_blowup(ok).has_value());

    // Pure growth through an explicit threshold: u = e^{10 t}.
    const Params grow = make_params(10.0, 0.0, 0.0, 0.0, g);
    StepController c2;
    c2.blowup_threshold = 1e4;
    const Trajectory g2 = integrate(grow, Field(g, 1.0), 0.0, 5.0, c2, 1);
    CHECK(g2.outcome == Outcome::blow_up);
    CHECK(g2.outcome_time > 0.9);
    CHECK(g2.outcome_time < 1.5);
    REQUIRE(detect_blowup(g2).has_value());
    CHECK(*detect_blowup(g2) == g2.snapshots.back().t);

    // Fixed steps that the growth cap rejects: StepFailure, not blow-up.
    StepController fixed = StepController::fixed(0.5);
    const Trajectory fail = integrate(grow, Field(g, 1.0), 0.0, 5.0, fixed);
    CHECK(fail.outcome == Outcome::step_failure);
    CHECK_FALSE(detect_blowup(fail).has_value());
}

TEST_CASE("detect_blowup finds the first crossing snapshot") {
    Trajectory tr;
    tr.blowup_threshold = 100.0;
    const Grid g = Grid::line(1.0, 8);
    double u = 1.0;
    for (int k = 0; k < 10; ++k, u *= 2) {
        SimState s;
        s.t = k;
        s.u_max = u;
        s.u_min = 0.0;
        tr.snapshots.push_back(s);
        tr.dt_accepted.push_back(0.1);
    }
    REQUIRE(detect_blowup(tr).has_value());
    CHECK(*detect_blowup(tr) == 7.0);  // 128 >= 100
}

TEST_CASE("integrate rejects bad initial data") {
    const Grid g = Grid::line(1.0, 16);
    const Params p = make_params(1.0, 1.0, 0.0, 0.0, g);
    Field neg(g, 0.5);
    neg[2] = -1e-6;
    CHECK_THROWS_AS(integrate(p, neg, 0.0, 1.0, StepController{}), InvalidInitial);
    CHECK_THROWS_AS(integrate(p, Field(g, 1.0), 1.0, 1.0, StepController{}), InvalidArgument);
    StepController bad;
    bad.dt_min = 1.0;
    CHECK_THROWS_AS(integrate(p, Field(g, 1.0), 0.0, 1.0, bad), InvalidArgument);
}

TEST_CASE("property: nonnegativity, mass bound and envelope sandwich") {
    const Grid g = Grid::line(1.0, 128);
    const Params p = heterogeneous_params(g);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.05, 1.5);
    Field u0(g);
    for (std::size_t k = 0; k < g.size(); ++k) u0[k] = U(rng);
    StepController ctrl;
    const Trajectory tr = integrate(p, u0, 0.0, 15.0, ctrl, 5);
    REQUIRE(tr.outcome == Outcome::completed);
    CHECK(tr.min_u_min >= -ctrl.negativity_tol * std::max(1.0, tr.max_u_max));

    const auto terms = ConditionTerms::compute(p);
    REQUIRE(terms.positivity_inf > 0.0);
    const double mass_bound = std::max(quadrature(u0), g.measure() * terms.a0_sup / terms.positivity_inf);
    CHECK(tr.max_mass <= mass_bound * (1 + 1e-6));

    const EnvelopeSeries env = integrate_envelope(p, u0.max(), u0.min(), 0.0, 15.0);
    for (const auto& s : tr.snapshots) {
        const EnvelopeState e = env.at(s.t);
        CHECK(s.u_max <= e.u_bar + 1e-3);
        CHECK(s.u_min >= e.u_under - 1e-3);
    }
}

TEST_CASE("property: temporal convergence slopes") {
    const Grid g = Grid::line(1.0, 64);
    Params p = heterogeneous_params(g);
    const Field u0 = bump(g, 0.5, 0.3);
    const double T = 2.0;
    for (Scheme sc : {Scheme::imex_euler, Scheme::ars222}) {
        // First order: reference on the doubled grid with dt / 16; second order
        // needs a same-grid reference so spatial mismatch stays below the time error.
        const std::size_t refine = sc == Scheme::imex_euler ? 2 : 1;
        Params pf = p;
        pf.grid = g.refined(refine);
        const Field u0f = bump(pf.grid, 0.5, 0.3);
        const double base = sc == Scheme::imex_euler ? 0.04 : 0.08;
        std::vector<double> errs;
        const Trajectory ref = integrate(pf, u0f, 0.0, T, StepController::fixed(base / 8 / 16, sc), 100000);
        const Field ref_c = refine == 1 ? ref.final_state.u : restrict_average(ref.final_state.u, refine);
        for (double dt : {base, base / 2, base / 4, base / 8}) {
            const Trajectory tr = integrate(p, u0, 0.0, T, StepController::fixed(dt, sc), 100000);
            errs.push_back(sup_distance(tr.final_state.u, ref_c));
        }
        for (std::size_t k = 1; k < errs.size(); ++k) {
            const double slope = std::log2(errs[k - 1] / errs[k]);
            INFO("scheme " << static_cast<int>(sc) << " slope " << slope);
            CHECK(slope >= (sc == Scheme::imex_euler ? 0.9 : 1.8));
        }
    }
}

TEST_CASE("property: cocycle under identical step sequences") {
    const Grid g = Grid::line(1.0, 64);
    const Params p = heterogeneous_params(g);
    const PdeSolver solver(p);
    const Field u0 = bump(g, 0.5, 0.3, 2);
    for (Scheme sc : {Scheme::imex_euler, Scheme::ars222}) {
        const StepController c = StepController::fixed(0.01, sc);
        IntegrateOptions o;
        o.stride = 1000;
        const Trajectory direct = integrate(solver, u0, 0.0, 2.0, c, o);
        const Trajectory first = integrate(solver, u0, 0.0, 1.0, c, o);
        const Trajectory second = integrate(solver, first.final_state.u, 1.0, 2.0, c, o);
        CHECK(sup_distance(direct.final_state.u, second.final_state.u) < 1e-8);
    }
}

TEST_CASE("trajectory csv and snapshot fields") {
    const Grid g = Grid::line(1.0, 16);
    const Params p = make_params(1.0, 1.0, 0.0, 0.0, g);
    const Trajectory tr = integrate(p, Field(g, 0.5), 0.0, 1.0, StepController::fixed(0.1), 3);
    REQUIRE(tr.snapshots.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
    CHECK(tr.snapshots.back().t == 1.0);
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) CHECK(tr.snapshots[k].t > tr.snapshots[k - 1].t);
    std::ostringstream out;
    tr.write_csv(out);
    CHECK(out.str().rfind("t,mass,u_min,u_max,v_min,v_max,dt_accepted\n", 0) == 0);
    for (const auto& s : tr.snapshots) {
        CHECK(s.u.size() == g.size());
        CHECK(sup_distance(s.v, solve_A_inverse(s.u)) < 1e-14);
    }
}

TEST_CASE("adaptive control recovers from rejections") {
    const Grid g = Grid::line(1.0, 32);
    const Params p = make_params(8.0, 1.0, 0.0, 0.0, g);
    StepController c;
    c.dt_init = 0.2;
    c.dt_max = 0.2;
    c.growth_cap = 1.2;
    const Trajectory tr = integrate(p, Field(g, 0.01), 0.0, 3.0, c);
    CHECK(tr.outcome == Outcome::completed);
    CHECK(tr.rejected_steps > 0);
    CHECK(tr.final_state.u.max() == doctest::Approx(8.0).epsilon(1e-3));
}
