#include "fracttm/errors.hpp"
#include "fracttm/linear_solver.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace fracttm;

namespace {

QuadratureField random_weight(const OperatorSet& ops, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    QuadratureField w(ops.quad.x.points.size(), ops.quad.y.points.size());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            w(i, j) = u(rng);
        }
    }
    return w;
}

}  // namespace

TEST_CASE("dense matrix matches the matrix-free apply") {
    std::mt19937 rng(5);
    const OperatorSet ops =
        build_operator_set(TensorMesh2D(Mesh1D(0.0, 1.0, 5), Mesh1D(0.0, 1.0, 7)), FracOrder(1.4), 0.3);
    LinearSolver solver(ops);
    SystemSpec sys{3.0, 0.8, 0.5, random_weight(ops, rng)};
    const Matrix A = solver.dense(sys);
    for (int k = 0; k < 5; ++k) {
        const Vector u = test::random_vector(rng, ops.mesh.dofs());
        CHECK((A * u - solver.apply(sys, u)).norm() <= 1e-12 * (A * u).norm());
    }
    const Matrix expected = 3.0 * materialize_mass(ops) + 0.8 * materialize_B(ops) +
                            0.5 * Matrix(assemble_weighted_mass(ops.mesh, ops.quad, sys.weight));
    CHECK((A - expected).cwiseAbs().maxCoeff() <= 1e-13 * expected.cwiseAbs().maxCoeff());

    SUBCASE("empty weight ignores weight_coef") {
        const SystemSpec plain{3.0, 0.8, 7.0, {}};
        const Matrix P = solver.dense(plain);
        CHECK((P - 3.0 * materialize_mass(ops) - 0.8 * materialize_B(ops)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dense and iterative solves agree") {
    std::mt19937 rng(9);
    for (double alpha : {1.1, 1.5, 1.9}) {
        const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(12), FracOrder(alpha), 0.1);
        LinearSolver dense(ops, {SolverKind::dense});
        LinearSolver iter(ops, {SolverKind::iterative});
        CHECK(dense.uses_dense());
        CHECK_FALSE(iter.uses_dense());
        const SystemSpec sys{20.0, 1.0, 1.0, random_weight(ops, rng)};
        const Vector rhs = test::random_vector(rng, ops.mesh.dofs());
        const Vector a = dense.solve(sys, rhs);
        const Vector b = iter.solve(sys, rhs);
        CHECK((a - b).norm() <= 1e-9 * a.norm());
        CHECK((dense.apply(sys, a) - rhs).norm() <= 1e-10 * rhs.norm());
        CHECK(iter.last_iterations() > 0);
        CHECK(iter.last_iterations() < 100);
    }
}

TEST_CASE("automatic choice follows the interior size") {
    const OperatorSet small = build_operator_set(TensorMesh2D::unit_square(10), FracOrder(1.5), 0.1);
    const OperatorSet large = build_operator_set(TensorMesh2D::unit_square(50), FracOrder(1.5), 0.1);
    CHECK(LinearSolver(small).uses_dense());
    CHECK_FALSE(LinearSolver(large).uses_dense());
}

TEST_CASE("iterative solve reuses the constant part across changing weights") {
    std::mt19937 rng(21);
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(9), FracOrder(1.3), 0.2);
    LinearSolver dense(ops, {SolverKind::dense});
    for (int k = 0; k < 3; ++k) {
        const SystemSpec sys{15.0, 0.75, 0.75, random_weight(ops, rng)};
        const Vector rhs = test::random_vector(rng, ops.mesh.dofs());
        const Vector x = dense.solve(sys, rhs);
        CHECK((dense.dense(sys) * x - rhs).norm() <= 1e-10 * rhs.norm());
    }
}

TEST_CASE("shape mismatch is reported") {
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(4), FracOrder(1.5), 0.1);
    LinearSolver solver(ops);
    CHECK_THROWS_AS(solver.solve({1.0, 1.0, 0.0, {}}, Vector::Ones(3)), ShapeError);
}
