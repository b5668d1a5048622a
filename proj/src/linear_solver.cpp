#include "fracttm/linear_solver.hpp"

#include "fracttm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace fracttm {

namespace {

bool has_weight(const SystemSpec& sys) {
    return sys.weight_coef != 0.0 && sys.weight.size() > 0;
}

}  // namespace

LinearSolver::LinearSolver(const OperatorSet& ops, LinearSolverConfig config)
    : ops_(ops), config_(config) {
    const int nx = ops.mesh.nx();
    const int ny = ops.mesh.ny();
    switch (config.kind) {
        case SolverKind::dense:
            dense_ = true;
            break;
        case SolverKind::iterative:
            dense_ = false;
            break;
        case SolverKind::automatic:
            dense_ = nx <= config.dense_max_interior && ny <= config.dense_max_interior;
            break;
    }
    if (dense_) {
        mass_dense_ = materialize_mass(ops);
        b_dense_ = materialize_B(ops);
    } else {
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ex(ops.scale * ops.stiff_x, ops.mass_x);
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ey(ops.scale * ops.stiff_y, ops.mass_y);
        if (ex.info() != Eigen::Success || ey.info() != Eigen::Success) {
            throw LinearSolveError("LinearSolver: generalized eigendecomposition failed");
        }
        vx_ = ex.eigenvectors();
        lx_ = ex.eigenvalues();
        vy_ = ey.eigenvectors();
        ly_ = ey.eigenvalues();
        area_ = (ops.mesh.x().b() - ops.mesh.x().a()) * (ops.mesh.y().b() - ops.mesh.y().a());
    }
}

Vector LinearSolver::apply(const SystemSpec& sys, const Vector& u) const {
    Vector out = sys.mass_coef * apply_mass(ops_, u);
    if (sys.stiff_coef != 0.0) {
        out += sys.stiff_coef * compose_2d_apply(ops_, u);
    }
    if (has_weight(sys)) {
        out += sys.weight_coef * apply_weighted_mass(ops_.quad, sys.weight, u);
    }
    return out;
}

Matrix LinearSolver::dense(const SystemSpec& sys) const {
    Matrix k = sys.mass_coef * materialize_mass(ops_) + sys.stiff_coef * materialize_B(ops_);
    if (has_weight(sys)) {
        const SparseMatrix w = assemble_weighted_mass(ops_.mesh, ops_.quad, sys.weight);
        k += sys.weight_coef * Matrix(w);
    }
    return k;
}

const Matrix& LinearSolver::constant_part(double mass_coef, double stiff_coef) {
    for (const auto& c : cache_) {
        if (c.mass_coef == mass_coef && c.stiff_coef == stiff_coef) {
            return c.matrix;
        }
    }
    if (cache_.size() >= 4) {
        cache_.erase(cache_.begin());
    }
    cache_.push_back({mass_coef, stiff_coef, mass_coef * mass_dense_ + stiff_coef * b_dense_});
    return cache_.back().matrix;
}

Vector LinearSolver::solve(const SystemSpec& sys, const Vector& rhs) {
    if (rhs.size() != ops_.mesh.dofs()) {
        throw ShapeError("LinearSolver::solve: right-hand side length does not match the mesh");
    }
    Vector x = dense_ ? solve_dense(sys, rhs) : solve_iterative(sys, rhs);
    if (!x.allFinite()) {
        throw LinearSolveError("LinearSolver::solve: non-finite solution");
    }
    return x;
}

Vector LinearSolver::solve_dense(const SystemSpec& sys, const Vector& rhs) {
    Matrix k = constant_part(sys.mass_coef, sys.stiff_coef);
    if (has_weight(sys)) {
        const SparseMatrix w = assemble_weighted_mass(ops_.mesh, ops_.quad, sys.weight);
        for (int col = 0; col < w.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(w, col); it; ++it) {
                k(it.row(), it.col()) += sys.weight_coef * it.value();
            }
        }
    }
    last_iterations_ = 1;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() == Eigen::Success) {
        return llt.solve(rhs);
    }
    Eigen::PartialPivLU<Matrix> lu(k);
    return lu.solve(rhs);
}

Vector LinearSolver::precondition(double a, double b, const Vector& r) const {
    const int nx = ops_.mesh.nx();
    const int ny = ops_.mesh.ny();
    const Eigen::Map<const Matrix> R(r.data(), nx, ny);
    Matrix z = vx_.transpose() * R * vy_;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            z(i, j) /= a + b * (lx_[i] + ly_[j]);
        }
    }
    Matrix x = vx_ * z * vy_.transpose();
    return Eigen::Map<const Vector>(x.data(), x.size());
}

Vector LinearSolver::solve_iterative(const SystemSpec& sys, const Vector& rhs) {
    // Mean weight folds the weighted mass into the mass coefficient of the
    // preconditioner.
    double a = sys.mass_coef;
    if (has_weight(sys)) {
        const auto& q = ops_.quad;
        const double mean = (q.x.weights.transpose() * sys.weight * q.y.weights).value() / area_;
        a += sys.weight_coef * mean;
    }
    const double b = sys.stiff_coef;

    Vector x = Vector::Zero(rhs.size());
    const double bnorm = rhs.norm();
    last_iterations_ = 0;
    if (bnorm == 0.0) {
        return x;
    }
    Vector r = rhs;
    Vector z = precondition(a, b, r);
    Vector p = z;
    double rz = r.dot(z);
    for (int it = 1; it <= config_.cg_max_iters; ++it) {
        const Vector ap = apply(sys, p);
        const double pap = p.dot(ap);
        if (!(pap > 0.0)) {
            throw LinearSolveError("LinearSolver: system is not positive definite");
        }
        const double step = rz / pap;
        x += step * p;
        r -= step * ap;
        last_iterations_ = it;
        if (r.norm() <= config_.cg_rel_tol * bnorm) {
            return x;
        }
        z = precondition(a, b, r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw LinearSolveError("LinearSolver: CG did not reach the residual tolerance");
}

}  // namespace fracttm
