#pragma once

#include "fracttm/frac_calculus.hpp"
#include "fracttm/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

namespace fracttm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

using SpaceFn = std::function<double(double, double)>;
using SpaceTimeFn = std::function<double(double, double, double)>;

/// FE coefficients on the interior nodes of a TensorMesh2D (x fastest) at
/// one simulation time.
struct StateVector {
    Vector coeffs;
    double time = 0.0;
};

/// Tridiagonal 1-D mass matrix on interior hats (2h/3 diagonal, h/6 off).
Matrix assemble_mass_1d(const Mesh1D& mesh);

/// Unscaled 1-D fractional stiffness
///   s_ij = (D_L phi_j, D_R phi_i) + (D_R phi_j, D_L phi_i),
/// integrated cell by cell on dyadically graded Gauss rules.
Matrix assemble_frac_stiffness_1d(const Mesh1D& mesh, double mu);

/// 3-point Gauss rule on every cell of a 1-D mesh, with interior hat values.
struct QuadGrid1D {
    Vector points;   // 3 * n_cells, ordered by cell
    Vector weights;  // Gauss weight times h / 2
    Matrix basis;    // basis(q, i) = phi_{i+1}(points[q])
};

QuadGrid1D make_quad_grid_1d(const Mesh1D& mesh);

/// Tensor 3x3 Gauss grid. Values on it are stored as a QuadratureField with
/// rows indexed by x points and columns by y points.
struct QuadGrid2D {
    QuadGrid1D x;
    QuadGrid1D y;
};

using QuadratureField = Matrix;

QuadGrid2D make_quad_grid(const TensorMesh2D& mesh);

/// Per-direction operators and the quadrature grid of one discretization.
/// The 2-D form is B = scale * (stiff_x (x) mass_y + mass_x (x) stiff_y).
struct OperatorSet {
    TensorMesh2D mesh;
    Matrix mass_x, mass_y;
    Matrix stiff_x, stiff_y;
    Matrix mass_x_inv, mass_y_inv;
    double scale = 0.0;
    QuadGrid2D quad;
};

/// scale = epsilon^2 / (2 cos(pi mu)).
OperatorSet build_operator_set(const TensorMesh2D& mesh, const FracOrder& order, double epsilon);

/// B u without forming B.
Vector compose_2d_apply(const OperatorSet& ops, const Vector& u);
Vector apply_mass(const OperatorSet& ops, const Vector& u);
/// M^{-1} r.
Vector solve_mass(const OperatorSet& ops, const Vector& r);

Matrix materialize_B(const OperatorSet& ops);
Matrix materialize_mass(const OperatorSet& ops);

/// u_h at every quadrature point.
QuadratureField evaluate_at_quadrature(const QuadGrid2D& quad, const Vector& u);
QuadratureField sample_at_quadrature(const QuadGrid2D& quad, const SpaceFn& f);
/// Vector of (F, phi_ij) for F given at the quadrature points.
Vector integrate_against_basis(const QuadGrid2D& quad, const QuadratureField& values);

/// Sparse 9-point matrix of (w phi_kl, phi_ij) with w given at quadrature points.
SparseMatrix assemble_weighted_mass(const TensorMesh2D& mesh, const QuadGrid2D& quad,
                                    const QuadratureField& weight);
/// Same operator applied matrix-free.
Vector apply_weighted_mass(const QuadGrid2D& quad, const QuadratureField& weight, const Vector& u);

/// (g(., t), phi_ij) by 3x3 Gauss per cell.
Vector assemble_load(const SpaceTimeFn& g, double t, const TensorMesh2D& mesh);

/// Nodal values of f at interior nodes.
StateVector nodal_interpolate(const SpaceFn& f, const TensorMesh2D& mesh, double time = 0.0);

/// L2 projection onto the interior FE space, (f, phi) by 3x3 Gauss per cell.
StateVector l2_project(const SpaceFn& f, const OperatorSet& ops, double time = 0.0);

}  // namespace fracttm
