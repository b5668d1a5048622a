#pragma once

#include "fracttm/fem.hpp"

#include <vector>

namespace fracttm {

/// mass_coef * M + stiff_coef * B + weight_coef * W(weight), where W is the
/// weighted mass built from `weight` sampled at the quadrature points.
/// An empty weight field means weight_coef is ignored.
struct SystemSpec {
    double mass_coef = 0.0;
    double stiff_coef = 0.0;
    double weight_coef = 0.0;
    QuadratureField weight;
};

enum class SolverKind { automatic, dense, iterative };

struct LinearSolverConfig {
    SolverKind kind = SolverKind::automatic;
    /// automatic picks the dense path when both directions have at most
    /// this many interior nodes.
    int dense_max_interior = 40;
    double cg_rel_tol = 1e-11;
    int cg_max_iters = 1000;
};

/// Solves SystemSpec systems on one OperatorSet. The dense path materializes
/// the matrix (constant part cached per coefficient pair) and factorizes it;
/// the iterative path runs preconditioned CG with a fast-diagonalization
/// preconditioner built from the 1-D generalized eigenproblems.
class LinearSolver {
public:
    explicit LinearSolver(const OperatorSet& ops, LinearSolverConfig config = {});

    Vector solve(const SystemSpec& sys, const Vector& rhs);
    Vector apply(const SystemSpec& sys, const Vector& u) const;
    Matrix dense(const SystemSpec& sys) const;

    bool uses_dense() const { return dense_; }
    int last_iterations() const { return last_iterations_; }
    const OperatorSet& ops() const { return ops_; }

private:
    struct ConstantPart {
        double mass_coef;
        double stiff_coef;
        Matrix matrix;
    };

    const Matrix& constant_part(double mass_coef, double stiff_coef);
    Vector solve_dense(const SystemSpec& sys, const Vector& rhs);
    Vector solve_iterative(const SystemSpec& sys, const Vector& rhs);
    Vector precondition(double a, double b, const Vector& r) const;

    const OperatorSet& ops_;
    LinearSolverConfig config_;
    bool dense_ = true;
    int last_iterations_ = 0;

    Matrix mass_dense_;
    Matrix b_dense_;
    std::vector<ConstantPart> cache_;

    // Generalized eigenvectors (V^T M V = I) and eigenvalues of scale*S per direction.
    Matrix vx_, vy_;
    Vector lx_, ly_;
    double area_ = 1.0;
};

}  // namespace fracttm
