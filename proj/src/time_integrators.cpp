#include "fracttm/time_integrators.hpp"

#include "fracttm/errors.hpp"

#include <cmath>
#include <ctime>
#include <string>

namespace fracttm {

ThetaScheme::ThetaScheme(double theta_, double tau_) : theta(theta_), tau(tau_) {
    if (!(theta_ >= 0.0 && theta_ <= 0.5)) {
        throw DomainError("ThetaScheme: theta must lie in [0, 1/2]");
    }
    if (!(tau_ > 0.0)) {
        throw DomainError("ThetaScheme: tau must be positive");
    }
}

ThetaWeights theta_weights(const ThetaScheme& s) {
    const double d = 2.0 * s.tau;
    return {(3.0 - 2.0 * s.theta) / d, -(4.0 - 4.0 * s.theta) / d, (1.0 - 2.0 * s.theta) / d};
}

Vector theta_blend(const ThetaScheme& s, const Vector& vn, const Vector& vn1) {
    if (vn.size() != vn1.size()) {
        throw ShapeError("theta_blend: vectors differ in length");
    }
    return (1.0 - s.theta) * vn + s.theta * vn1;
}

double theta_blend(const ThetaScheme& s, double vn, double vn1) {
    return (1.0 - s.theta) * vn + s.theta * vn1;
}

FeSystem::FeSystem(const ProblemSpec& problem, const OperatorSet& ops, LinearSolverConfig linear)
    : problem_(problem), ops_(ops), solver_(ops, linear) {}

void FeSystem::set_load(LoadFn fn) {
    custom_load_ = std::move(fn);
    load_cache_valid_[0] = load_cache_valid_[1] = false;
}

Vector FeSystem::load(double t) {
    for (int k = 0; k < 2; ++k) {
        if (load_cache_valid_[k] && load_cache_[k].first == t) {
            return load_cache_[k].second;
        }
    }
    Vector g;
    if (custom_load_) {
        g = custom_load_(t);
    } else if (!problem_.has_source) {
        g = Vector::Zero(ops_.mesh.dofs());
    } else if (problem_.source_on_grid) {
        g = integrate_against_basis(ops_.quad,
                                    problem_.source_on_grid(ops_.quad.x.points, ops_.quad.y.points, t));
    } else {
        const auto& src = problem_.source;
        g = integrate_against_basis(
            ops_.quad, sample_at_quadrature(ops_.quad, [&](double x, double y) { return src(x, y, t); }));
    }
    load_cache_[load_cache_next_] = {t, g};
    load_cache_valid_[load_cache_next_] = true;
    load_cache_next_ = 1 - load_cache_next_;
    return g;
}

Vector FeSystem::reaction(const Vector& u) const {
    if (!problem_.reaction_enabled) {
        return Vector::Zero(u.size());
    }
    const QuadratureField v = evaluate_at_quadrature(ops_.quad, u);
    return integrate_against_basis(ops_.quad, v.unaryExpr([](double s) { return f_eval(s); }));
}

QuadratureField FeSystem::reaction_prime(const Vector& u) const {
    if (!problem_.reaction_enabled) {
        return {};
    }
    const QuadratureField v = evaluate_at_quadrature(ops_.quad, u);
    return v.unaryExpr([](double s) { return f_prime(s); });
}

Vector FeSystem::reaction_remainder(const Vector& u) const {
    if (!problem_.reaction_enabled) {
        return Vector::Zero(u.size());
    }
    const QuadratureField v = evaluate_at_quadrature(ops_.quad, u);
    return integrate_against_basis(ops_.quad,
                                   v.unaryExpr([](double s) { return f_eval(s) - s * f_prime(s); }));
}

double FeSystem::residual_norm(const Vector& r) const {
    const double q = r.dot(solve_mass(ops_, r));
    return std::sqrt(std::max(q, 0.0));
}

Vector nonlinear_residual(FeSystem& fs, const NonlinearSystem& sys, const Vector& u) {
    Vector r = sys.a * apply_mass(fs.ops(), u) + sys.known;
    if (sys.b != 0.0) {
        r += sys.b * compose_2d_apply(fs.ops(), u);
    }
    if (sys.wf != 0.0) {
        r += sys.wf * fs.reaction(u);
    }
    return r;
}

namespace {

SystemSpec jacobian_at(FeSystem& fs, const NonlinearSystem& sys, const Vector& u) {
    SystemSpec j;
    j.mass_coef = sys.a;
    j.stiff_coef = sys.b;
    j.weight_coef = sys.wf;
    if (sys.wf != 0.0) {
        j.weight = fs.reaction_prime(u);
    }
    return j;
}

}  // namespace

LinearizedStep newton_linearization(FeSystem& fs, const NonlinearSystem& sys, const Vector& seed) {
    LinearizedStep out;
    out.matrix = jacobian_at(fs, sys, seed);
    out.rhs = fs.solver().apply(out.matrix, seed) - nonlinear_residual(fs, sys, seed);
    return out;
}

Vector newton_solve(FeSystem& fs, const NonlinearSystem& sys, Vector u, const NewtonConfig& cfg,
                    NewtonReport* report) {
    NewtonReport local;
    NewtonReport& rep = report ? *report : local;
    rep = {};
    Vector r = nonlinear_residual(fs, sys, u);
    const double r0 = fs.residual_norm(r);
    rep.residuals.push_back(r0);
    if (!std::isfinite(r0)) {
        throw NewtonFailure("Newton: non-finite residual", r0, 0);
    }
    if (r0 <= cfg.abs_tol) {
        return u;
    }
    for (int k = 1; k <= cfg.max_iters; ++k) {
        const Vector delta = fs.solver().solve(jacobian_at(fs, sys, u), r);
        u -= delta;
        r = nonlinear_residual(fs, sys, u);
        const double norm = fs.residual_norm(r);
        rep.residuals.push_back(norm);
        rep.iterations = k;
        if (!std::isfinite(norm)) {
            throw NewtonFailure("Newton: non-finite residual", norm, k);
        }
        bool done = false;
        if (cfg.stop == NewtonStop::residual) {
            done = norm <= cfg.abs_tol || norm <= cfg.rel_tol * r0;
        } else {
            const OperatorSet& ops = fs.ops();
            const double step = std::sqrt(delta.dot(apply_mass(ops, delta)));
            const double size = std::sqrt(u.dot(apply_mass(ops, u)));
            done = step <= cfg.abs_tol + cfg.rel_tol * size;
        }
        if (done) {
            return u;
        }
    }
    const double last = rep.residuals.back();
    throw NewtonFailure("Newton: no convergence in " + std::to_string(cfg.max_iters) +
                            " iterations (residual " + std::to_string(last) + ")",
                        last, cfg.max_iters);
}

NonlinearSystem first_step_system(FeSystem& fs, const Vector& u0, double tau) {
    if (!(tau > 0.0)) {
        throw DomainError("first_step_system: tau must be positive");
    }
    const OperatorSet& ops = fs.ops();
    NonlinearSystem s;
    s.a = 1.0 / tau;
    s.b = 0.5;
    s.wf = 0.5;
    s.known = -apply_mass(ops, u0) / tau + 0.5 * compose_2d_apply(ops, u0) + 0.5 * fs.reaction(u0) -
              0.5 * (fs.load(0.0) + fs.load(tau));
    return s;
}

NonlinearSystem theta_step_system(FeSystem& fs, const ThetaScheme& scheme, const Vector& un1,
                                  const Vector& un2, double t_n) {
    const OperatorSet& ops = fs.ops();
    const ThetaWeights w = theta_weights(scheme);
    const double th = scheme.theta;
    NonlinearSystem s;
    s.a = w.c0;
    s.b = 1.0 - th;
    s.wf = 1.0 - th;
    s.known = apply_mass(ops, w.c1 * un1 + w.c2 * un2) - theta_blend(scheme, fs.load(t_n), fs.load(t_n - scheme.tau));
    if (th != 0.0) {
        s.known += th * (compose_2d_apply(ops, un1) + fs.reaction(un1));
    }
    return s;
}

Vector first_step_residual(FeSystem& fs, const Vector& u0, const Vector& u1, double tau) {
    return nonlinear_residual(fs, first_step_system(fs, u0, tau), u1);
}

Vector step_residual(FeSystem& fs, const ThetaScheme& scheme, const Vector& un, const Vector& un1,
                     const Vector& un2, double t_n) {
    return nonlinear_residual(fs, theta_step_system(fs, scheme, un1, un2, t_n), un);
}

StateVector first_step_nonlinear(FeSystem& fs, const StateVector& state0, const ThetaScheme& scheme,
                                 const NewtonConfig& newton, NewtonReport* report) {
    const NonlinearSystem sys = first_step_system(fs, state0.coeffs, scheme.tau);
    return {newton_solve(fs, sys, state0.coeffs, newton, report), state0.time + scheme.tau};
}

StateVector step_nonlinear(FeSystem& fs, const StateVector& un1, const StateVector& un2,
                           const ThetaScheme& scheme, const NewtonConfig& newton, double t_n,
                           NewtonReport* report) {
    const NonlinearSystem sys = theta_step_system(fs, scheme, un1.coeffs, un2.coeffs, t_n);
    return {newton_solve(fs, sys, un1.coeffs, newton, report), t_n};
}

int step_count(double horizon, double tau) {
    if (!(tau > 0.0) || !(horizon > 0.0)) {
        throw DomainError("step_count: horizon and tau must be positive");
    }
    const double n = horizon / tau;
    const long long steps = std::llround(n);
    if (steps < 1 || std::abs(n - static_cast<double>(steps)) > 1e-9 * n) {
        throw DomainError("step_count: tau does not divide the horizon");
    }
    return static_cast<int>(steps);
}

std::vector<StateVector> march_theta_scheme(FeSystem& fs, const StateVector& initial,
                                            const ThetaScheme& scheme, int steps,
                                            const NewtonConfig& newton, bool keep_trajectory,
                                            int* newton_iterations) {
    std::vector<StateVector> out;
    out.push_back(initial);
    if (steps < 1) {
        return out;
    }
    int iters = 0;
    NewtonReport rep;
    StateVector prev2 = initial;
    StateVector prev1;
    try {
        prev1 = first_step_nonlinear(fs, initial, scheme, newton, &rep);
    } catch (const NewtonFailure& e) {
        throw NewtonFailure(std::string(e.what()) + " at step 1", e.last_residual(), e.iterations());
    }
    iters += rep.iterations;
    if (keep_trajectory || steps == 1) {
        out.push_back(prev1);
    }
    for (int n = 2; n <= steps; ++n) {
        const double t_n = n * scheme.tau;
        StateVector next;
        try {
            next = step_nonlinear(fs, prev1, prev2, scheme, newton, t_n, &rep);
        } catch (const NewtonFailure& e) {
            throw NewtonFailure(std::string(e.what()) + " at step " + std::to_string(n), e.last_residual(),
                                e.iterations());
        }
        iters += rep.iterations;
        prev2 = std::move(prev1);
        prev1 = std::move(next);
        if (keep_trajectory || n == steps) {
            out.push_back(prev1);
        }
    }
    if (newton_iterations) {
        *newton_iterations = iters;
    }
    return out;
}

StateVector initial_state(const ProblemSpec& problem, const OperatorSet& ops, InitialDatum kind) {
    if (kind == InitialDatum::nodal) {
        return nodal_interpolate(problem.initial, ops.mesh, 0.0);
    }
    return l2_project(problem.initial, ops, 0.0);
}

double cpu_now() {
    return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

FeRun run_standard_fe(const ProblemSpec& problem, const DiscretizationConfig& disc,
                      const OperatorSet& ops) {
    const ThetaScheme scheme(disc.theta, disc.tau);
    const int steps = step_count(problem.horizon, disc.tau);
    FeSystem fs(problem, ops, disc.linear);
    const StateVector u0 = initial_state(problem, ops, disc.initial);
    FeRun run;
    const double start = cpu_now();
    run.states = march_theta_scheme(fs, u0, scheme, steps, disc.newton, disc.keep_trajectory,
                                    &run.newton_iterations);
    run.cpu_seconds = cpu_now() - start;
    return run;
}

FeRun run_standard_fe(const ProblemSpec& problem, const DiscretizationConfig& disc) {
    const OperatorSet ops =
        build_operator_set(TensorMesh2D::unit_square(disc.n_cells), problem.order, problem.epsilon);
    return run_standard_fe(problem, disc, ops);
}

}  // namespace fracttm
