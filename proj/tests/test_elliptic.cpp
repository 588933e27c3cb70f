#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chemolab/elliptic.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/oracles.hpp"

using namespace chemolab;
using std::numbers::pi;

TEST_CASE("constant field is a fixed point of the inverse") {
    for (const Grid& g : {Grid::line(1.0, 16), Grid::rectangle(2.0, 1.0, 16, 8)}) {
        const Field v = solve_A_inverse(Field(g, 3.25));
        for (double x : v.values()) CHECK(x == doctest::Approx(3.25).epsilon(1e-14));
    }
}

TEST_CASE("discrete eigenfunction is solved to round-off") {
    const Grid g = Grid::line(1.0, 128);
    const EllipticSolver solver(g);
    const double lambda1 = solver.eigenvalues(0)[1];
    const double h = g.spacing(0);
    CHECK(lambda1 == doctest::Approx(4.0 / (h * h) * std::pow(std::sin(pi / 256.0), 2)));
    const Field phi = Field::from_function(g, [](const Point& x) { return std::cos(pi * x[0]); });
    Field u(g);
    for (std::size_t k = 0; k < g.size(); ++k) u[k] = (1.0 + lambda1) * phi[k];
    CHECK(sup_distance(solver.solve_A_inverse(u), phi) < 1e-12);

    const Grid g2 = Grid::rectangle(1.0, 2.0, 32, 16);
    const EllipticSolver s2(g2);
    const double lam = s2.eigenvalues(0)[2] + s2.eigenvalues(1)[1];
    const Field psi = Field::from_function(g2, [](const Point& x) { return std::cos(2 * pi * x[0]) * std::cos(pi * x[1] / 2); });
    Field u2(g2);
    for (std::size_t k = 0; k < g2.size(); ++k) u2[k] = (1.0 + lam) * psi[k];
    CHECK(sup_distance(s2.solve_A_inverse(u2), psi) < 1e-12);
}

TEST_CASE("spectral solve matches a dense direct solve of the stencil matrix") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid grids[] = {Grid::line(1.0, 16), Grid::line(3.0, 32), Grid::rectangle(1.0, 1.0, 16, 16),
                          Grid::rectangle(2.0, 1.0, 32, 16), Grid::rectangle(1.0, 1.5, 32, 32)};
    for (const Grid& g : grids) {
        Field u(g);
        for (auto& x : u.values()) x = U(rng);
        for (double c : {1.0, 0.013}) {
            const EllipticSolver solver(g);
            const Field spectral = c == 1.0 ? solver.solve_A_inverse(u) : solver.solve_diffusion(u, c);
            const Field dense = oracle::dense_shifted_solve(u, c);
            CHECK(sup_distance(spectral, dense) < 1e-10);
        }
    }
}

TEST_CASE("laplacian stencil inverts the spectral solve") {
    const Grid g = Grid::rectangle(1.0, 2.0, 16, 24);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Field u(g);
    for (auto& x : u.values()) x = U(rng);
    const EllipticSolver s(g);
    const Field v = s.solve_A_inverse(u);
    const Field lap = s.laplacian(v);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(v[k] - lap[k] == doctest::Approx(u[k]).epsilon(1e-10));
}

TEST_CASE("gradient of constants vanishes and boundary faces are zero") {
    const Grid g = Grid::rectangle(1.0, 1.0, 16, 16);
    const EllipticSolver s(g);
    for (const auto& comp : s.gradient(Field(g, 5.0)))
        for (double x : comp.values()) CHECK(x == 0.0);

    const Field v = Field::from_function(g, [](const Point& x) { return std::sin(3 * x[0]) + x[1] * x[1]; });
    const auto fx = s.face_gradient(v, 0);
    const auto fy = s.face_gradient(v, 1);
    for (std::size_t j = 0; j < 16; ++j) {
        CHECK(fx[0 * 16 + j] == 0.0);
        CHECK(fx[16 * 16 + j] == 0.0);
    }
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(fy[i * 17 + 0] == 0.0);
        CHECK(fy[i * 17 + 16] == 0.0);
    }
}

TEST_CASE("gradient of cos(pi x) converges at second order") {
    double prev_err = 0.0;
    for (std::size_t n : {32u, 64u, 128u, 256u}) {
        const Grid g = Grid::line(1.0, n);
        const Field v = Field::from_function(g, [](const Point& x) { return std::cos(pi * x[0]); });
        const Field d = gradient(v)[0];
        double err = 0.0;
        for (std::size_t k = 0; k < n; ++k) err = std::max(err, std::abs(d[k] + pi * std::sin(pi * g.node(k)[0])));
        if (prev_err > 0.0) CHECK(std::log2(prev_err / err) > 1.9);
        prev_err = err;
    }
}

TEST_CASE("non-finite input is rejected") {
    const Grid g = Grid::line(1.0, 16);
    Field u(g, 1.0);
    u[3] = std::nan("");
    CHECK_THROWS_AS(solve_A_inverse(u), NonFiniteInput);
    CHECK_THROWS_AS(gradient(u), NonFiniteInput);
}

TEST_CASE("property: self-adjointness, positivity and the sup bound") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const Grid& g : {Grid::line(2.0, 64), Grid::rectangle(1.0, 1.0, 24, 16)}) {
        const EllipticSolver s(g);
        for (int trial = 0; trial < 10; ++trial) {
            Field f(g), q(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                f[k] = U(rng) - 0.5;
                q[k] = std::pow(U(rng), 4.0);  // nonnegative, spiky
            }
            const Field Af = s.solve_A_inverse(f), Aq = s.solve_A_inverse(q);
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                lhs += Af[k] * q[k];
                rhs += f[k] * Aq[k];
            }
            CHECK(std::abs(lhs - rhs) * g.cell_volume() < 1e-10);
            CHECK(Aq.min() >= -1e-12 * q.max());
            CHECK(Aq.max() <= q.max() * (1 + 1e-12));
            double mq = 0.0, mAq = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                mq += q[k];
                mAq += Aq[k];
            }
            CHECK(mAq == doctest::Approx(mq).epsilon(1e-12));
            CHECK(q.min() <= mAq / static_cast<double>(g.size()));
        }
    }
}

TEST_CASE("manufactured solution converges at second order in 1D and 2D") {
    auto exact1 = [](const Point& x) { return std::cos(pi * x[0]) + 0.4 * std::cos(3 * pi * x[0]); };
    auto rhs1 = [](const Point& x) {
        return (1 + pi * pi) * std::cos(pi * x[0]) + 0.4 * (1 + 9 * pi * pi) * std::cos(3 * pi * x[0]);
    };
    std::vector<double> errs;
    for (std::size_t n : {16u, 32u, 64u, 128u}) {
        const Grid g = Grid::line(1.0, n);
        const Field v = solve_A_inverse(Field::from_function(g, rhs1));
        errs.push_back(sup_distance(v, Field::from_function(g, exact1)));
    }
    for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) >= 1.9);

    auto exact2 = [](const Point& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1] / 2) + x[0] * x[0] * (1 - x[0]) * (1 - x[0]); };
    auto rhs2 = [](const Point& x) {
        const double p = x[0] * x[0] * (1 - x[0]) * (1 - x[0]);
        const double pxx = 2 - 12 * x[0] + 12 * x[0] * x[0];
        return (1 + pi * pi + pi * pi / 4) * std::cos(pi * x[0]) * std::cos(pi * x[1] / 2) + p - pxx;
    };
    errs.clear();
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
        const Grid g = Grid::rectangle(1.0, 2.0, n, 2 * n);
        const Field v = solve_A_inverse(Field::from_function(g, rhs2));
        errs.push_back(sup_distance(v, Field::from_function(g, exact2)));
    }
    for (std::size_t k = 1; k < errs.size(); ++k) CHECK(std::log2(errs[k - 1] / errs[k]) >= 1.9);
}

TEST_CASE("field binary and csv round trip") {
    const Grid g = Grid::rectangle(2.0, 1.0, 8, 9);
    const Field f = Field::from_function(g, [](const Point& x) { return x[0] - 3 * x[1]; });
    std::stringstream ss;
    write_field_binary(ss, f);
    const Field back = read_field_binary(ss);
    CHECK(back.grid() == g);
    CHECK(back.values() == f.values());
    std::ostringstream csv;
    write_field_csv(csv, f);
    CHECK(csv.str().rfind("x,y,value\n", 0) == 0);
}
