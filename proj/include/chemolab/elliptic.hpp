#pragma once

#include <array>
#include <memory>
#include <vector>

#include "chemolab/grid.hpp"

namespace chemolab {

/// Spectral solver for I - c * Delta_h under homogeneous Neumann conditions.
///
/// Delta_h is the second-order cell-centred Laplacian with even reflection at
/// the boundary. Its eigenvectors are the DCT-II basis, so the forward cosine
/// transform, a per-mode division by 1 + c * lambda_k, and the inverse
/// transform solve the system exactly up to round-off. The transform plans
/// are immutable and shared between copies; concurrent solves are safe.
class EllipticSolver {
public:
    explicit EllipticSolver(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }

    /// v with (I - Delta_h) v = u.
    Field solve_A_inverse(const Field& u) const;
    /// w with (I - dt Delta_h) w = rhs.
    Field solve_diffusion(const Field& rhs, double dt) const;
    /// Delta_h u by the five/three point stencil.
    Field laplacian(const Field& u) const;

    /// Node-centred gradient, one field per axis: central differences, even
    /// reflection at the first and last node.
    std::vector<Field> gradient(const Field& v) const;
    /// Face-centred derivative along `axis`; boundary faces are exactly zero.
    /// Axis 0 layout is (n_x + 1) x n_y, axis 1 is n_x x (n_y + 1), row-major.
    std::vector<double> face_gradient(const Field& v, int axis) const;

    /// Discrete Neumann eigenvalues (4 / h^2) sin^2(pi k / (2 n)) along `axis`.
    const std::vector<double>& eigenvalues(int axis) const { return eigen_[axis]; }

private:
    struct Plans;
    Field apply_inverse(const Field& in, double c) const;

    Grid grid_;
    std::shared_ptr<const Plans> plans_;
    std::array<std::vector<double>, 2> eigen_;
};

/// Convenience wrapper building a solver for u's grid.
Field solve_A_inverse(const Field& u);
std::vector<Field> gradient(const Field& v);

}  // namespace chemolab
