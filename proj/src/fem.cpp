#include "fracttm/fem.hpp"

#include "fracttm/errors.hpp"
#include "fracttm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fracttm {

namespace {

constexpr int kGradingLevels = 32;

Eigen::Map<const Matrix> as_grid(const Vector& u, int nx, int ny) {
    return Eigen::Map<const Matrix>(u.data(), nx, ny);
}

void check_shape(const Vector& u, const TensorMesh2D& mesh, const char* who) {
    if (u.size() != mesh.dofs()) {
        throw ShapeError(std::string(who) + ": vector length does not match the mesh");
    }
}

}  // namespace

Matrix assemble_mass_1d(const Mesh1D& mesh) {
    if (mesh.n_cells() < 2) {
        throw DomainError("assemble_mass_1d: need at least two cells");
    }
    const int n = mesh.interior_count();
    const double h = mesh.h();
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * h / 3.0;
        if (i + 1 < n) {
            m(i, i + 1) = h / 6.0;
            m(i + 1, i) = h / 6.0;
        }
    }
    return m;
}

Matrix assemble_frac_stiffness_1d(const Mesh1D& mesh, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw DomainError("assemble_frac_stiffness_1d: mu must lie in (0, 1)");
    }
    if (mesh.n_cells() < 2) {
        throw DomainError("assemble_frac_stiffness_1d: need at least two cells");
    }
    const int n = mesh.interior_count();
    Matrix a = Matrix::Zero(n, n);
    std::vector<double> dl(n), dr(n);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const QuadRule rule = graded_cell_rule(mesh.node(c), mesh.node(c + 1), kGradingLevels);
        const auto p = static_cast<Eigen::Index>(rule.size());
        Matrix left(p, n), right(p, n);
        for (Eigen::Index q = 0; q < p; ++q) {
            rl_deriv_all_hats(mesh, mu, rule.nodes[q], Side::left, dl);
            rl_deriv_all_hats(mesh, mu, rule.nodes[q], Side::right, dr);
            const double w = rule.weights[q];
            for (int i = 0; i < n; ++i) {
                left(q, i) = dl[i];
                right(q, i) = w * dr[i];
            }
        }
        a.noalias() += right.transpose() * left;
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a.data()[i])) {
            throw QuadratureError("assemble_frac_stiffness_1d: non-finite entry");
        }
    }
    Matrix s = a + a.transpose();
    return s;
}

QuadGrid1D make_quad_grid_1d(const Mesh1D& mesh) {
    static const QuadRule gauss3 = gauss_legendre(3);
    const int cells = mesh.n_cells();
    const int n = mesh.interior_count();
    const double h = mesh.h();
    QuadGrid1D g;
    g.points.resize(3 * cells);
    g.weights.resize(3 * cells);
    g.basis = Matrix::Zero(3 * cells, n);
    for (int c = 0; c < cells; ++c) {
        const double x0 = mesh.node(c);
        for (int k = 0; k < 3; ++k) {
            const int q = 3 * c + k;
            const double xi = 0.5 * (gauss3.nodes[k] + 1.0);
            g.points[q] = x0 + xi * h;
            g.weights[q] = 0.5 * h * gauss3.weights[k];
            // Node c carries 1 - xi, node c + 1 carries xi.
            if (c >= 1) {
                g.basis(q, c - 1) = 1.0 - xi;
            }
            if (c + 1 <= n) {
                g.basis(q, c) = xi;
            }
        }
    }
    return g;
}

QuadGrid2D make_quad_grid(const TensorMesh2D& mesh) {
    return {make_quad_grid_1d(mesh.x()), make_quad_grid_1d(mesh.y())};
}

OperatorSet build_operator_set(const TensorMesh2D& mesh, const FracOrder& order, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("build_operator_set: epsilon must be positive");
    }
    const double mu = order.mu();
    OperatorSet ops{mesh, {}, {}, {}, {}, {}, {}, 0.0, make_quad_grid(mesh)};
    ops.mass_x = assemble_mass_1d(mesh.x());
    ops.stiff_x = assemble_frac_stiffness_1d(mesh.x(), mu);
    if (mesh.y() == mesh.x()) {
        ops.mass_y = ops.mass_x;
        ops.stiff_y = ops.stiff_x;
    } else {
        ops.mass_y = assemble_mass_1d(mesh.y());
        ops.stiff_y = assemble_frac_stiffness_1d(mesh.y(), mu);
    }
    ops.mass_x_inv = ops.mass_x.llt().solve(Matrix::Identity(mesh.nx(), mesh.nx()));
    ops.mass_y_inv = ops.mass_y.llt().solve(Matrix::Identity(mesh.ny(), mesh.ny()));
    ops.scale = epsilon * epsilon / (2.0 * std::cos(std::numbers::pi * mu));
    return ops;
}

Vector compose_2d_apply(const OperatorSet& ops, const Vector& u) {
    check_shape(u, ops.mesh, "compose_2d_apply");
    const int nx = ops.mesh.nx();
    const int ny = ops.mesh.ny();
    const auto U = as_grid(u, nx, ny);
    Matrix out = ops.stiff_x * U * ops.mass_y;
    out.noalias() += ops.mass_x * U * ops.stiff_y;
    out *= ops.scale;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

Vector apply_mass(const OperatorSet& ops, const Vector& u) {
    check_shape(u, ops.mesh, "apply_mass");
    const auto U = as_grid(u, ops.mesh.nx(), ops.mesh.ny());
    Matrix out = ops.mass_x * U * ops.mass_y;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

Vector solve_mass(const OperatorSet& ops, const Vector& r) {
    check_shape(r, ops.mesh, "solve_mass");
    const auto R = as_grid(r, ops.mesh.nx(), ops.mesh.ny());
    Matrix out = ops.mass_x_inv * R * ops.mass_y_inv;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

Matrix materialize_B(const OperatorSet& ops) {
    // With x fastest, vec(A U C) = kron(C^T, A) vec(U).
    const int nx = ops.mesh.nx();
    const int ny = ops.mesh.ny();
    Matrix b(nx * ny, nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int l = 0; l < ny; ++l) {
            b.block(j * nx, l * nx, nx, nx) =
                ops.scale * (ops.mass_y(j, l) * ops.stiff_x + ops.stiff_y(j, l) * ops.mass_x);
        }
    }
    return b;
}

Matrix materialize_mass(const OperatorSet& ops) {
    const int nx = ops.mesh.nx();
    const int ny = ops.mesh.ny();
    Matrix m(nx * ny, nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int l = 0; l < ny; ++l) {
            m.block(j * nx, l * nx, nx, nx) = ops.mass_y(j, l) * ops.mass_x;
        }
    }
    return m;
}

QuadratureField evaluate_at_quadrature(const QuadGrid2D& quad, const Vector& u) {
    const auto nx = quad.x.basis.cols();
    const auto ny = quad.y.basis.cols();
    if (u.size() != nx * ny) {
        throw ShapeError("evaluate_at_quadrature: vector length does not match the grid");
    }
    const auto U = as_grid(u, static_cast<int>(nx), static_cast<int>(ny));
    return quad.x.basis * U * quad.y.basis.transpose();
}

QuadratureField sample_at_quadrature(const QuadGrid2D& quad, const SpaceFn& f) {
    QuadratureField v(quad.x.points.size(), quad.y.points.size());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            v(i, j) = f(quad.x.points[i], quad.y.points[j]);
        }
    }
    return v;
}

Vector integrate_against_basis(const QuadGrid2D& quad, const QuadratureField& values) {
    if (values.rows() != quad.x.points.size() || values.cols() != quad.y.points.size()) {
        throw ShapeError("integrate_against_basis: field does not match the grid");
    }
    const Matrix weighted = quad.x.weights.asDiagonal() * values * quad.y.weights.asDiagonal();
    Matrix out = quad.x.basis.transpose() * weighted * quad.y.basis;
    return Eigen::Map<const Vector>(out.data(), out.size());
}

SparseMatrix assemble_weighted_mass(const TensorMesh2D& mesh, const QuadGrid2D& quad,
                                    const QuadratureField& weight) {
    if (weight.rows() != quad.x.points.size() || weight.cols() != quad.y.points.size()) {
        throw ShapeError("assemble_weighted_mass: weight does not match the grid");
    }
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.x().n_cells()) * mesh.y().n_cells() * 16);
    for (int cy = 0; cy < mesh.y().n_cells(); ++cy) {
        for (int cx = 0; cx < mesh.x().n_cells(); ++cx) {
            // Local interior indices of the cell corners (-1 on the boundary).
            int ix[2] = {cx - 1, cx};
            int iy[2] = {cy - 1, cy};
            for (int& v : ix) {
                v = (v >= 0 && v < nx) ? v : -1;
            }
            for (int& v : iy) {
                v = (v >= 0 && v < ny) ? v : -1;
            }
            double local[4][4] = {};
            for (int qy = 3 * cy; qy < 3 * cy + 3; ++qy) {
                for (int qx = 3 * cx; qx < 3 * cx + 3; ++qx) {
                    const double w = quad.x.weights[qx] * quad.y.weights[qy] * weight(qx, qy);
                    double phi[4];
                    for (int b = 0; b < 4; ++b) {
                        const int i = ix[b % 2];
                        const int j = iy[b / 2];
                        phi[b] = (i < 0 || j < 0) ? 0.0 : quad.x.basis(qx, i) * quad.y.basis(qy, j);
                    }
                    for (int r = 0; r < 4; ++r) {
                        for (int c = 0; c < 4; ++c) {
                            local[r][c] += w * phi[r] * phi[c];
                        }
                    }
                }
            }
            for (int r = 0; r < 4; ++r) {
                const int ir = ix[r % 2];
                const int jr = iy[r / 2];
                if (ir < 0 || jr < 0) {
                    continue;
                }
                for (int c = 0; c < 4; ++c) {
                    const int ic = ix[c % 2];
                    const int jc = iy[c / 2];
                    if (ic < 0 || jc < 0) {
                        continue;
                    }
                    trip.emplace_back(mesh.dof(ir, jr), mesh.dof(ic, jc), local[r][c]);
                }
            }
        }
    }
    SparseMatrix w(mesh.dofs(), mesh.dofs());
    w.setFromTriplets(trip.begin(), trip.end());
    return w;
}

Vector apply_weighted_mass(const QuadGrid2D& quad, const QuadratureField& weight, const Vector& u) {
    const QuadratureField vals = evaluate_at_quadrature(quad, u);
    return integrate_against_basis(quad, weight.cwiseProduct(vals));
}

Vector assemble_load(const SpaceTimeFn& g, double t, const TensorMesh2D& mesh) {
    const QuadGrid2D quad = make_quad_grid(mesh);
    return integrate_against_basis(quad,
                                   sample_at_quadrature(quad, [&](double x, double y) { return g(x, y, t); }));
}

StateVector nodal_interpolate(const SpaceFn& f, const TensorMesh2D& mesh, double time) {
    StateVector s;
    s.time = time;
    s.coeffs.resize(mesh.dofs());
    for (int j = 0; j < mesh.ny(); ++j) {
        const double y = mesh.y().node(j + 1);
        for (int i = 0; i < mesh.nx(); ++i) {
            s.coeffs[mesh.dof(i, j)] = f(mesh.x().node(i + 1), y);
        }
    }
    return s;
}

StateVector l2_project(const SpaceFn& f, const OperatorSet& ops, double time) {
    return {solve_mass(ops, integrate_against_basis(ops.quad, sample_at_quadrature(ops.quad, f))), time};
}

}  // namespace fracttm
