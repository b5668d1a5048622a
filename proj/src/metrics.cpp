#include "fracttm/metrics.hpp"

#include "fracttm/errors.hpp"
#include "fracttm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fracttm {

namespace {

constexpr int kNormGradingLevels = 18;
constexpr int kNormPointsPerPiece = 5;

/// Interior hat values at x (length interior_count).
Vector hat_values(const Mesh1D& mesh, double x) {
    Vector v = Vector::Zero(mesh.interior_count());
    if (x < mesh.a() || x > mesh.b()) {
        return v;
    }
    const int c = mesh.cell_of(x);
    const double xi = (x - mesh.node(c)) / mesh.h();
    if (c >= 1) {
        v[c - 1] = 1.0 - xi;
    }
    if (c + 1 <= mesh.interior_count()) {
        v[c] = xi;
    }
    return v;
}

Matrix hat_matrix(const Mesh1D& mesh, const Vector& pts) {
    Matrix m(pts.size(), mesh.interior_count());
    for (Eigen::Index q = 0; q < pts.size(); ++q) {
        m.row(q) = hat_values(mesh, pts[q]).transpose();
    }
    return m;
}

Matrix deriv_matrix(const Mesh1D& mesh, double mu, const Vector& pts) {
    Matrix m(pts.size(), mesh.interior_count());
    std::vector<double> buf(mesh.interior_count());
    for (Eigen::Index q = 0; q < pts.size(); ++q) {
        rl_deriv_all_hats(mesh, mu, pts[q], Side::left, buf);
        for (int i = 0; i < mesh.interior_count(); ++i) {
            m(q, i) = buf[i];
        }
    }
    return m;
}

/// Composite rule over all cells of a 1-D mesh.
void composite_rule(const Mesh1D& mesh, bool graded, Vector& pts, Vector& wts) {
    std::vector<double> p, w;
    const QuadRule g6 = gauss_legendre(6);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const QuadRule r = graded ? graded_cell_rule(mesh.node(c), mesh.node(c + 1), kNormGradingLevels,
                                                     kNormPointsPerPiece)
                                  : map_to_interval(g6, mesh.node(c), mesh.node(c + 1));
        p.insert(p.end(), r.nodes.begin(), r.nodes.end());
        w.insert(w.end(), r.weights.begin(), r.weights.end());
    }
    pts = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    wts = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

/// 3-point Gauss on every piece between the union of both meshes' nodes.
void merged_rule(const Mesh1D& a, const Mesh1D& b, Vector& pts, Vector& wts) {
    if (a.a() != b.a() || a.b() != b.b()) {
        throw ShapeError("merged_rule: meshes cover different intervals");
    }
    std::vector<double> knots;
    for (int i = 0; i <= a.n_cells(); ++i) {
        knots.push_back(a.node(i));
    }
    for (int i = 0; i <= b.n_cells(); ++i) {
        knots.push_back(b.node(i));
    }
    std::sort(knots.begin(), knots.end());
    const double tol = 1e-13 * (a.b() - a.a());
    knots.erase(std::unique(knots.begin(), knots.end(), [tol](double p, double q) { return q - p <= tol; }),
                knots.end());
    const QuadRule g3 = gauss_legendre(3);
    std::vector<double> p, w;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const QuadRule r = map_to_interval(g3, knots[k], knots[k + 1]);
        p.insert(p.end(), r.nodes.begin(), r.nodes.end());
        w.insert(w.end(), r.weights.begin(), r.weights.end());
    }
    pts = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
    wts = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

double mass_norm_sq(const OperatorSet& ops, const Vector& u) {
    return u.dot(apply_mass(ops, u));
}

}  // namespace

double fe_value_at(const TensorMesh2D& mesh, const Vector& u, double x, double y) {
    if (u.size() != mesh.dofs()) {
        throw ShapeError("fe_value_at: vector length does not match the mesh");
    }
    const Eigen::Map<const Matrix> U(u.data(), mesh.nx(), mesh.ny());
    return hat_values(mesh.x(), x).dot(U * hat_values(mesh.y(), y));
}

Vector restrict_to_mesh(const TensorMesh2D& fine, const Vector& u_fine, const TensorMesh2D& coarse) {
    if (u_fine.size() != fine.dofs()) {
        throw ShapeError("restrict_to_mesh: vector length does not match the fine mesh");
    }
    Vector xs(coarse.nx()), ys(coarse.ny());
    for (int i = 0; i < coarse.nx(); ++i) {
        xs[i] = coarse.x().node(i + 1);
    }
    for (int j = 0; j < coarse.ny(); ++j) {
        ys[j] = coarse.y().node(j + 1);
    }
    const Eigen::Map<const Matrix> U(u_fine.data(), fine.nx(), fine.ny());
    Matrix out = hat_matrix(fine.x(), xs) * U * hat_matrix(fine.y(), ys).transpose();
    return Eigen::Map<const Vector>(out.data(), out.size());
}

double error_l2(const OperatorSet& ops, const Vector& u, const SpaceTimeFn& exact, double t) {
    const QuadratureField uh = evaluate_at_quadrature(ops.quad, u);
    const QuadratureField ex = sample_at_quadrature(ops.quad, [&](double x, double y) { return exact(x, y, t); });
    const Matrix e2 = (uh - ex).cwiseAbs2();
    return std::sqrt((ops.quad.x.weights.transpose() * e2 * ops.quad.y.weights).value());
}

double error_l2(const OperatorSet& ops, const Vector& u, const Vector& v) {
    if (u.size() != v.size()) {
        throw ShapeError("error_l2: states differ in length");
    }
    return std::sqrt(std::max(mass_norm_sq(ops, u - v), 0.0));
}

double error_l2_reference(const OperatorSet& ops, const Vector& u, const TensorMesh2D& ref_mesh,
                          const Vector& u_ref, ReferenceMetric metric) {
    if (u_ref.size() != ref_mesh.dofs()) {
        throw ShapeError("error_l2_reference: reference length does not match its mesh");
    }
    if (metric == ReferenceMetric::restricted) {
        return error_l2(ops, u, restrict_to_mesh(ref_mesh, u_ref, ops.mesh));
    }
    if (u.size() != ops.mesh.dofs()) {
        throw ShapeError("error_l2_reference: vector length does not match the mesh");
    }
    Vector xs, wx, ys, wy;
    merged_rule(ops.mesh.x(), ref_mesh.x(), xs, wx);
    merged_rule(ops.mesh.y(), ref_mesh.y(), ys, wy);
    const Eigen::Map<const Matrix> U(u.data(), ops.mesh.nx(), ops.mesh.ny());
    const Eigen::Map<const Matrix> R(u_ref.data(), ref_mesh.nx(), ref_mesh.ny());
    const Matrix d = hat_matrix(ops.mesh.x(), xs) * U * hat_matrix(ops.mesh.y(), ys).transpose() -
                     hat_matrix(ref_mesh.x(), xs) * R * hat_matrix(ref_mesh.y(), ys).transpose();
    return std::sqrt((wx.transpose() * d.cwiseAbs2() * wy).value());
}

FracDerivField::FracDerivField(const TensorMesh2D& mesh, const Vector& u, double mu, Direction dir)
    : mesh_(mesh), u_(Eigen::Map<const Matrix>(u.data(), mesh.nx(), mesh.ny())), mu_(mu), dir_(dir) {
    if (u.size() != mesh.dofs()) {
        throw ShapeError("FracDerivField: vector length does not match the mesh");
    }
    if (!(mu > 0.0 && mu < 1.0)) {
        throw DomainError("FracDerivField: mu must lie in (0, 1)");
    }
}

double FracDerivField::operator()(double x, double y) const {
    Vector xs(1), ys(1);
    xs[0] = x;
    ys[0] = y;
    return on_grid(xs, ys)(0, 0);
}

Matrix FracDerivField::on_grid(const Vector& xs, const Vector& ys) const {
    if (dir_ == Direction::x) {
        return deriv_matrix(mesh_.x(), mu_, xs) * u_ * hat_matrix(mesh_.y(), ys).transpose();
    }
    return hat_matrix(mesh_.x(), xs) * u_ * deriv_matrix(mesh_.y(), mu_, ys).transpose();
}

FracDerivField fe_frac_deriv_field(const TensorMesh2D& mesh, const Vector& u, double mu, Direction dir) {
    return FracDerivField(mesh, u, mu, dir);
}

double error_frac_norm(const OperatorSet& ops, const Vector& u, const ProblemSpec& problem, double mu,
                       double t) {
    if (!problem.exact) {
        throw UnsupportedProblem("error_frac_norm: problem '" + problem.name +
                                 "' has no analytic fractional derivatives");
    }
    const ExactSolution& ex = *problem.exact;
    const TensorMesh2D& mesh = ops.mesh;
    const double l2 = error_l2(ops, u, ex.u, t);

    double total = l2 * l2;
    for (Direction dir : {Direction::x, Direction::y}) {
        // Graded rule along the derivative direction, plain Gauss across it.
        Vector xs, wx, ys, wy;
        composite_rule(mesh.x(), dir == Direction::x, xs, wx);
        composite_rule(mesh.y(), dir == Direction::y, ys, wy);
        const Matrix fe = FracDerivField(mesh, u, mu, dir).on_grid(xs, ys);
        const SpaceTimeFn& d = dir == Direction::x ? ex.dx_mu : ex.dy_mu;
        Matrix e(xs.size(), ys.size());
        for (Eigen::Index j = 0; j < ys.size(); ++j) {
            for (Eigen::Index i = 0; i < xs.size(); ++i) {
                e(i, j) = d(xs[i], ys[j], t) - fe(i, j);
            }
        }
        total += (wx.transpose() * e.cwiseAbs2() * wy).value();
    }
    return std::sqrt(total);
}

double convergence_rate(double e_coarse, double e_fine, double ratio) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) {
        throw DomainError("convergence_rate: errors must be positive");
    }
    if (!(ratio > 1.0)) {
        throw DomainError("convergence_rate: ratio must exceed 1");
    }
    return std::log(e_coarse / e_fine) / std::log(ratio);
}

double energy_H(const OperatorSet& ops, const Vector& un, const Vector& un1, double theta) {
    if (!(theta >= 0.0 && theta <= 0.5)) {
        throw DomainError("energy_H: theta must lie in [0, 1/2]");
    }
    if (un.size() != un1.size()) {
        throw ShapeError("energy_H: states differ in length");
    }
    return (3.0 - 2.0 * theta) * mass_norm_sq(ops, un) - (1.0 - 2.0 * theta) * mass_norm_sq(ops, un1) +
           (2.0 - theta) * (1.0 - 2.0 * theta) * mass_norm_sq(ops, un - un1);
}

double seminorm_mu(const OperatorSet& ops, const Vector& u) {
    const double q = u.dot(compose_2d_apply(ops, u));
    if (q < 0.0) {
        if (q < -1e-12 * std::max(1.0, u.squaredNorm())) {
            throw DomainError("seminorm_mu: negative quadratic form (assembly defect)");
        }
        return 0.0;
    }
    return std::sqrt(q);
}

}  // namespace fracttm
