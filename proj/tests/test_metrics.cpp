#include "fracttm/errors.hpp"
#include "fracttm/metrics.hpp"
#include "fracttm/rl_oracle.hpp"
#include "fracttm/ttm.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fracttm;
namespace orc = fracttm::oracle;

namespace {

ProblemSpec zero_exact_problem() {
    ProblemSpec p = example2_spec(1.5);
    auto zero = [](double, double, double) { return 0.0; };
    p.exact = ExactSolution{zero, zero, zero};
    return p;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return k;
}

// G(i, k) = int_0^1 D_L phi_i D_L phi_k, by adaptive quadrature per cell.
Matrix left_gram(const Mesh1D& m, double mu) {
    const int n = m.interior_count();
    Matrix g(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int k = i; k <= n; ++k) {
            double s = 0.0;
            for (int c = 0; c < m.n_cells(); ++c) {
                s += orc::adaptive_integrate(
                         [&](double x) {
                             return rl_deriv_hat(m, i, mu, x, Side::left) * rl_deriv_hat(m, k, mu, x, Side::left);
                         },
                         m.node(c), m.node(c + 1), 1e-13)
                         .value;
            }
            g(i - 1, k - 1) = g(k - 1, i - 1) = s;
        }
    }
    return g;
}

double mass_norm(const OperatorSet& ops, const Vector& u) { return std::sqrt(u.dot(apply_mass(ops, u))); }

}  // namespace

TEST_CASE("error_l2") {
    std::mt19937 rng(3);
    const OperatorSet ops = build_operator_set(TensorMesh2D(Mesh1D(0, 1, 5), Mesh1D(0, 1, 4)), FracOrder(1.5), 0.1);
    const Vector u = test::random_vector(rng, ops.mesh.dofs());
    const SpaceTimeFn same = [&](double x, double y, double) { return fe_value_at(ops.mesh, u, x, y); };
    CHECK(error_l2(ops, u, same, 0.3) <= 1e-14);
    CHECK(error_l2(ops, u, [](double, double, double) { return 0.0; }, 0.0) ==
          doctest::Approx(mass_norm(ops, u)).epsilon(1e-13));
    const Vector v = test::random_vector(rng, ops.mesh.dofs());
    CHECK(error_l2(ops, u, v) == doctest::Approx(mass_norm(ops, u - v)).epsilon(1e-13));
    CHECK(error_l2(ops, u, v) == error_l2(ops, v, u));
    CHECK_THROWS_AS(error_l2(ops, u, Vector::Zero(3)), ShapeError);
}

TEST_CASE("FE point values and restriction") {
    std::mt19937 rng(5);
    const TensorMesh2D coarse = TensorMesh2D::unit_square(4);
    const TensorMesh2D fine = TensorMesh2D::unit_square(12);
    const Vector uc = test::random_vector(rng, coarse.dofs());
    CHECK(fe_value_at(coarse, uc, 0.25, 0.5) == uc[coarse.dof(0, 1)]);
    CHECK(fe_value_at(coarse, uc, 0.0, 0.3) == 0.0);
    CHECK(fe_value_at(coarse, uc, 0.125, 0.25) == doctest::Approx(0.5 * uc[coarse.dof(0, 0)]).epsilon(1e-15));
    // prolongation to a nested mesh is exact, and restriction undoes it
    const Vector uf = nodal_interpolate([&](double x, double y) { return fe_value_at(coarse, uc, x, y); }, fine).coeffs;
    CHECK((restrict_to_mesh(fine, uf, coarse) - uc).norm() <= 1e-14 * uc.norm());
    const OperatorSet ops = build_operator_set(coarse, FracOrder(1.5), 0.1);
    CHECK(error_l2_reference(ops, uc, fine, uf) <= 1e-14);
    CHECK(error_l2_reference(ops, uc, fine, uf, ReferenceMetric::restricted) <= 1e-14);
}

TEST_CASE("continuous reference metric integrates on the merged breakpoints") {
    std::mt19937 rng(6);
    const TensorMesh2D a = TensorMesh2D::unit_square(4);
    const TensorMesh2D b = TensorMesh2D::unit_square(6);
    const OperatorSet ops = build_operator_set(a, FracOrder(1.5), 0.1);
    const Vector u = test::random_vector(rng, a.dofs());
    const Vector v = test::random_vector(rng, b.dofs());
    // both functions are bilinear on the 12 x 12 common refinement
    const OperatorSet common = build_operator_set(TensorMesh2D::unit_square(12), FracOrder(1.5), 0.1);
    const SpaceTimeFn diff = [&](double x, double y, double) {
        return fe_value_at(a, u, x, y) - fe_value_at(b, v, x, y);
    };
    const double expected = error_l2(common, Vector::Zero(common.mesh.dofs()), diff, 0.0);
    CHECK(error_l2_reference(ops, u, b, v) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fractional derivative field") {
    const TensorMesh2D mesh = TensorMesh2D::unit_square(20);
    const double mu = 0.65;
    const FracDerivField zero(mesh, Vector::Zero(mesh.dofs()), mu, Direction::x);
    CHECK(zero(0.3, 0.4) == 0.0);

    SUBCASE("interpolant of x y") {
        const Vector u = nodal_interpolate([](double x, double y) { return x * y; }, mesh).coeffs;
        const FracDerivField dx(mesh, u, mu, Direction::x);
        const FracDerivField dy(mesh, u, mu, Direction::y);
        const QuadGrid1D q = make_quad_grid_1d(mesh.x());
        for (Eigen::Index i = 0; i < q.points.size(); i += 7) {
            for (Eigen::Index j = 0; j < q.points.size(); j += 5) {
                const double x = q.points[i], y = q.points[j];
                if (x > 0.95 || y > 0.95) {
                    continue;  // the interpolant drops to zero in the last cell
                }
                CHECK(dx(x, y) == doctest::Approx(std::pow(x, 1 - mu) * y / std::tgamma(2 - mu)).epsilon(1e-10));
                CHECK(dy(x, y) == doctest::Approx(x * std::pow(y, 1 - mu) / std::tgamma(2 - mu)).epsilon(1e-10));
            }
        }
    }
    SUBCASE("against the oracle") {
        std::mt19937 rng(14);
        const TensorMesh2D m = TensorMesh2D::unit_square(6);
        const Vector u = test::random_vector(rng, m.dofs());
        const FracDerivField dx(m, u, 0.8, Direction::x);
        const FracDerivField dy(m, u, 0.8, Direction::y);
        std::uniform_real_distribution<double> pt(0.01, 0.99);
        for (int k = 0; k < 10; ++k) {
            const double x = pt(rng), y = pt(rng);
            const double ox = orc::numeric_rl_left([&](double s) { return fe_value_at(m, u, s, y); }, 0.8, 0.0, x).value;
            const double oy = orc::numeric_rl_left([&](double s) { return fe_value_at(m, u, x, s); }, 0.8, 0.0, y).value;
            CHECK(std::abs(dx(x, y) - ox) <= 1e-7 * std::max(1.0, std::abs(ox)));
            CHECK(std::abs(dy(x, y) - oy) <= 1e-7 * std::max(1.0, std::abs(oy)));
        }
        Vector xs(3), ys(2);
        xs << 0.1, 0.5, 0.77;
        ys << 0.3, 0.9;
        const Matrix g = dx.on_grid(xs, ys);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 2; ++j) {
                CHECK(g(i, j) == doctest::Approx(dx(xs[i], ys[j])).epsilon(1e-13));
            }
        }
    }
    CHECK_THROWS_AS(FracDerivField(mesh, Vector::Zero(3), mu, Direction::x), ShapeError);
}

TEST_CASE("fractional error norm") {
    std::mt19937 rng(22);
    const double mu = 0.7;
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(4), FracOrder(2 * mu), 0.1);
    const Vector u = test::random_vector(rng, ops.mesh.dofs());
    const ProblemSpec zero = zero_exact_problem();
    const Matrix g = left_gram(ops.mesh.x(), mu);
    const double expected2 = u.dot(apply_mass(ops, u)) + u.dot(kron(ops.mass_y, g) * u) + u.dot(kron(g, ops.mass_x) * u);
    CHECK(error_frac_norm(ops, u, zero, mu, 0.0) == doctest::Approx(std::sqrt(expected2)).epsilon(1e-8));
    CHECK(error_frac_norm(ops, Vector::Zero(ops.mesh.dofs()), zero, mu, 0.0) == 0.0);
    CHECK_THROWS_AS(error_frac_norm(ops, u, example2_spec(1.4), mu, 0.0), UnsupportedProblem);

    SUBCASE("smooth problem, theta = 1/2, alpha = 1.3") {
        const ProblemSpec p = example1_spec(1.3, 0.01);
        DiscretizationConfig disc;
        disc.tau = 1.0 / 200.0;
        disc.M = 10;
        disc.theta = 0.5;
        disc.keep_trajectory = false;
        double errs[2];
        int k = 0;
        for (int n : {10, 20}) {
            disc.n_cells = n;
            const OperatorSet o = build_operator_set(TensorMesh2D::unit_square(n), p.order, p.epsilon);
            errs[k++] = error_frac_norm(o, run_ttm(p, disc, o).fine_states.back().coeffs, p, p.order.mu(), 1.0);
        }
        CHECK(errs[1] >= 3.4253e-4 / 2.0);
        CHECK(errs[1] <= 3.4253e-4 * 2.0);
        CHECK(std::abs(convergence_rate(errs[0], errs[1], 2.0) - 1.429) <= 0.2);
    }
}

TEST_CASE("errors decrease under mesh refinement") {
    const ProblemSpec p = example1_spec(1.5, 0.01);
    DiscretizationConfig disc;
    disc.tau = 1.0 / 20.0;
    disc.M = 2;
    disc.keep_trajectory = false;
    disc.linear.kind = SolverKind::iterative;
    double prev_l2 = 1e300, prev_mu = 1e300;
    for (int n : {10, 20, 40}) {
        disc.n_cells = n;
        const OperatorSet o = build_operator_set(TensorMesh2D::unit_square(n), p.order, p.epsilon);
        const Vector u = run_ttm(p, disc, o).fine_states.back().coeffs;
        const double l2 = error_l2(o, u, p.exact->u, 1.0);
        const double emu = error_frac_norm(o, u, p, p.order.mu(), 1.0);
        CHECK(l2 < prev_l2);
        CHECK(emu < prev_mu);
        prev_l2 = l2;
        prev_mu = emu;
    }
}

TEST_CASE("convergence_rate") {
    CHECK(convergence_rate(4e-4, 1e-4, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(convergence_rate(7.4834e-5, 1.6390e-5, 2.0) == doctest::Approx(2.191).epsilon(5e-4));
    CHECK(convergence_rate(3e-3, 3e-3, 2.5) == 0.0);
    CHECK_THROWS_AS(convergence_rate(0.0, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(convergence_rate(1.0, -1.0, 2.0), DomainError);
    CHECK_THROWS_AS(convergence_rate(1.0, 0.5, 1.0), DomainError);
}

TEST_CASE("discrete energy H") {
    std::mt19937 rng(7);
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(6), FracOrder(1.5), 0.1);
    const Vector c = Vector::Constant(ops.mesh.dofs(), 0.3);
    const double c2 = c.dot(apply_mass(ops, c));
    for (double th : {0.0, 0.2, 0.5}) {
        CHECK(energy_H(ops, c, c, th) == doctest::Approx(2.0 * c2).epsilon(1e-14));
    }
    const Vector a = test::random_vector(rng, ops.mesh.dofs()), b = test::random_vector(rng, ops.mesh.dofs());
    CHECK(energy_H(ops, a, b, 0.5) == doctest::Approx(2.0 * a.dot(apply_mass(ops, a))).epsilon(1e-14));
    for (double th : {0.0, 0.25, 0.5}) {
        for (int k = 0; k < 100; ++k) {
            const Vector x = test::random_vector(rng, ops.mesh.dofs());
            const Vector y = (k % 3 + 0.5) * test::random_vector(rng, ops.mesh.dofs());
            CHECK(energy_H(ops, x, y, th) >= x.dot(apply_mass(ops, x)) / (1.0 - th) * (1.0 - 1e-12));
        }
    }
    CHECK_THROWS_AS(energy_H(ops, a, b, 0.7), DomainError);
    CHECK_THROWS_AS(energy_H(ops, a, Vector::Zero(2), 0.1), ShapeError);
}

TEST_CASE("seminorm") {
    std::mt19937 rng(9);
    const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(7), FracOrder(1.3), 0.5);
    CHECK(seminorm_mu(ops, Vector::Zero(ops.mesh.dofs())) == 0.0);
    for (int k = 0; k < 20; ++k) {
        const Vector u = test::random_vector(rng, ops.mesh.dofs());
        const double s = seminorm_mu(ops, u);
        CHECK(s > 0.0);
        CHECK(seminorm_mu(ops, -2.5 * u) == doctest::Approx(2.5 * s).epsilon(1e-13));
        CHECK(s * s == doctest::Approx(u.dot(materialize_B(ops) * u)).epsilon(1e-12));
    }
}

TEST_CASE("no blow-up without a source") {
    const ProblemSpec base = example2_spec(1.5);
    for (double alpha : {1.1, 1.5, 1.8}) {
        for (double theta : {0.0, 0.25, 0.5}) {
            const ProblemSpec p = example2_spec(alpha, base.epsilon);
            const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(10), p.order, p.epsilon);
            DiscretizationConfig disc;
            disc.n_cells = 10;
            disc.tau = 1.0 / 40.0;
            disc.M = 4;
            disc.theta = theta;
            const FeRun fe = run_standard_fe(p, disc, ops);
            const TtmRun ttm = run_ttm(p, disc, ops);
            const double n0 = mass_norm(ops, fe.states.front().coeffs);
            double worst = 0.0;
            for (const auto& s : fe.states) {
                worst = std::max(worst, mass_norm(ops, s.coeffs));
            }
            for (const auto& s : ttm.fine_states) {
                worst = std::max(worst, mass_norm(ops, s.coeffs));
            }
            CHECK(worst <= 10.0 * n0);
        }
    }
}

TEST_CASE("H is non-increasing for pure diffusion") {
    ProblemSpec p = example2_spec(1.5, 0.3);
    p.reaction_enabled = false;
    for (double theta : {0.0, 0.3, 0.5}) {
        const OperatorSet ops = build_operator_set(TensorMesh2D::unit_square(10), p.order, p.epsilon);
        DiscretizationConfig disc;
        disc.n_cells = 10;
        disc.tau = 1.0 / 50.0;
        disc.theta = theta;
        const FeRun run = run_standard_fe(p, disc, ops);
        double prev = energy_H(ops, run.states[1].coeffs, run.states[0].coeffs, theta);
        for (std::size_t n = 2; n < run.states.size(); ++n) {
            const double h = energy_H(ops, run.states[n].coeffs, run.states[n - 1].coeffs, theta);
            CHECK(h <= prev * (1.0 + 1e-12));
            prev = h;
        }
    }
}
