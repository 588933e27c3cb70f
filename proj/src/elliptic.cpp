#include "chemolab/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "chemolab/errors.hpp"

namespace chemolab {

namespace {

// The FFTW planner is not re-entrant; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_finite(const Field& f, const char* what) {
    if (!f.all_finite()) throw NonFiniteInput(what);
}

}  // namespace

struct EllipticSolver::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Plans(const Grid& g) {
        std::lock_guard lock(planner_mutex());
        const std::size_t n = g.size();
        double* a = fftw_alloc_real(n);
        double* b = fftw_alloc_real(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (g.dim() == 1) {
            const int n0 = static_cast<int>(g.count(0));
            forward = fftw_plan_r2r_1d(n0, a, b, FFTW_REDFT10, flags);
            backward = fftw_plan_r2r_1d(n0, b, a, FFTW_REDFT01, flags);
        } else {
            const int n0 = static_cast<int>(g.count(0));
            const int n1 = static_cast<int>(g.count(1));
            forward = fftw_plan_r2r_2d(n0, n1, a, b, FFTW_REDFT10, FFTW_REDFT10, flags);
            backward = fftw_plan_r2r_2d(n0, n1, b, a, FFTW_REDFT01, FFTW_REDFT01, flags);
        }
        fftw_free(a);
        fftw_free(b);
        if (!forward || !backward) throw Error("FFTW planning failed");
    }

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

EllipticSolver::EllipticSolver(const Grid& grid)
    : grid_(grid), plans_(std::make_shared<const Plans>(grid)) {
    for (int axis = 0; axis < 2; ++axis) {
        const std::size_t n = grid.count(axis);
        eigen_[axis].assign(n, 0.0);
        if (axis >= grid.dim()) continue;
        const double h = grid.spacing(axis);
        for (std::size_t k = 0; k < n; ++k) {
            const double s = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n)));
            eigen_[axis][k] = 4.0 / (h * h) * s * s;
        }
    }
}

Field EllipticSolver::apply_inverse(const Field& in, double c) const {
    if (!(in.grid() == grid_)) throw InvalidArgument("field grid does not match solver grid");
    const std::size_t n0 = grid_.count(0);
    const std::size_t n1 = grid_.count(1);
    std::vector<double> spec(grid_.size());
    Field out(grid_);
    fftw_execute_r2r(plans_->forward, const_cast<double*>(in.values().data()), spec.data());
    const double norm = grid_.dim() == 1 ? 2.0 * static_cast<double>(n0)
                                         : 4.0 * static_cast<double>(n0) * static_cast<double>(n1);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            const double lambda = eigen_[0][i] + eigen_[1][j];
            spec[i * n1 + j] /= norm * (1.0 + c * lambda);
        }
    fftw_execute_r2r(plans_->backward, spec.data(), out.values().data());
    return out;
}

Field EllipticSolver::solve_A_inverse(const Field& u) const {
    require_finite(u, "solve_A_inverse: non-finite input");
    return apply_inverse(u, 1.0);
}

Field EllipticSolver::solve_diffusion(const Field& rhs, double dt) const {
    require_finite(rhs, "solve_diffusion: non-finite input");
    if (!(dt >= 0.0)) throw InvalidArgument("solve_diffusion: negative dt");
    return apply_inverse(rhs, dt);
}

Field EllipticSolver::laplacian(const Field& u) const {
    const std::size_t n0 = grid_.count(0);
    const std::size_t n1 = grid_.count(1);
    Field out(grid_);
    const double ih0 = 1.0 / (grid_.spacing(0) * grid_.spacing(0));
    const double ih1 = grid_.dim() == 2 ? 1.0 / (grid_.spacing(1) * grid_.spacing(1)) : 0.0;
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            const double c = u[i * n1 + j];
            const double w = i > 0 ? u[(i - 1) * n1 + j] : c;
            const double e = i + 1 < n0 ? u[(i + 1) * n1 + j] : c;
            double lap = (w - 2.0 * c + e) * ih0;
            if (grid_.dim() == 2) {
                const double s = j > 0 ? u[i * n1 + j - 1] : c;
                const double nn = j + 1 < n1 ? u[i * n1 + j + 1] : c;
                lap += (s - 2.0 * c + nn) * ih1;
            }
            out[i * n1 + j] = lap;
        }
    return out;
}

std::vector<double> EllipticSolver::face_gradient(const Field& v, int axis) const {
    require_finite(v, "face_gradient: non-finite input");
    const std::size_t n0 = grid_.count(0);
    const std::size_t n1 = grid_.count(1);
    const double ih = 1.0 / grid_.spacing(axis);
    std::vector<double> out;
    if (axis == 0) {
        out.assign((n0 + 1) * n1, 0.0);
        for (std::size_t f = 1; f < n0; ++f)
            for (std::size_t j = 0; j < n1; ++j) out[f * n1 + j] = (v[f * n1 + j] - v[(f - 1) * n1 + j]) * ih;
    } else {
        out.assign(n0 * (n1 + 1), 0.0);
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t f = 1; f < n1; ++f)
                out[i * (n1 + 1) + f] = (v[i * n1 + f] - v[i * n1 + f - 1]) * ih;
    }
    return out;
}

std::vector<Field> EllipticSolver::gradient(const Field& v) const {
    std::vector<Field> out;
    const std::size_t n0 = grid_.count(0);
    const std::size_t n1 = grid_.count(1);
    for (int axis = 0; axis < grid_.dim(); ++axis) {
        const auto faces = face_gradient(v, axis);
        Field g(grid_);
        // Average of the two adjacent face derivatives: the central difference
        // with the even-reflected ghost v_{-1} = v_0, whose boundary face
        // derivative is exactly zero.
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) {
                double lo, hi;
                if (axis == 0) {
                    lo = faces[i * n1 + j];
                    hi = faces[(i + 1) * n1 + j];
                } else {
                    lo = faces[i * (n1 + 1) + j];
                    hi = faces[i * (n1 + 1) + j + 1];
                }
                g[i * n1 + j] = 0.5 * (lo + hi);
            }
        out.push_back(std::move(g));
    }
    return out;
}

Field solve_A_inverse(const Field& u) { return EllipticSolver(u.grid()).solve_A_inverse(u); }

std::vector<Field> gradient(const Field& v) { return EllipticSolver(v.grid()).gradient(v); }

}  // namespace chemolab
