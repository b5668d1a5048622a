#include "fracttm/ttm.hpp"

#include "fracttm/errors.hpp"

#include <cmath>
#include <string>

namespace fracttm {

TwoMeshGrid::TwoMeshGrid(double tau, int M, double horizon) : tau_(tau), M_(M), horizon_(horizon) {
    if (M < 2) {
        throw DomainError("TwoMeshGrid: M must be at least 2");
    }
    if (!(tau > 0.0)) {
        throw DomainError("TwoMeshGrid: tau must be positive");
    }
    const double tc = M * tau;
    if (M > 1.0 / tc * (1.0 + 1e-12)) {
        throw DomainError("TwoMeshGrid: need M <= 1 / tau_c");
    }
    n_coarse_ = step_count(horizon, tc);
}

InterpolationWeights interpolation_weights(int m, int M) {
    if (m < 1 || M < 1) {
        throw DomainError("interpolation_weights: need m >= 1 and M >= 1");
    }
    const int n = (m + M - 1) / M;
    const int r = n * M - m;  // 0 <= r < M
    return {n, static_cast<double>(r) / M};
}

std::vector<StateVector> coarse_solve(FeSystem& fs, const StateVector& initial, const TwoMeshGrid& grid,
                                      double theta, const NewtonConfig& newton) {
    const ThetaScheme scheme(theta, grid.tau_c());
    try {
        return march_theta_scheme(fs, initial, scheme, grid.coarse_steps(), newton, true);
    } catch (const NewtonFailure& e) {
        throw NewtonFailure(std::string("coarse solve: ") + e.what(), e.last_residual(), e.iterations());
    }
}

StateVector interpolate_to_fine(const std::vector<StateVector>& coarse, const TwoMeshGrid& grid, int m) {
    if (m < 1 || m > grid.fine_steps()) {
        throw DomainError("interpolate_to_fine: fine index " + std::to_string(m) + " out of range");
    }
    const auto [n, lambda] = interpolation_weights(m, grid.M());
    if (static_cast<int>(coarse.size()) <= n) {
        throw ShapeError("interpolate_to_fine: coarse trajectory too short");
    }
    const double t = m * grid.tau();
    if (lambda == 0.0) {
        return {coarse[n].coeffs, t};
    }
    return {lambda * coarse[n - 1].coeffs + (1.0 - lambda) * coarse[n].coeffs, t};
}

LinearizedStep fine_first_step_system(FeSystem& fs, const Vector& uf0, const Vector& ui1, double tau) {
    const OperatorSet& ops = fs.ops();
    LinearizedStep s;
    s.matrix.mass_coef = 1.0 / tau;
    s.matrix.stiff_coef = 0.5;
    s.matrix.weight_coef = 0.5;
    s.matrix.weight = fs.reaction_prime(ui1);
    s.rhs = apply_mass(ops, uf0) / tau - 0.5 * compose_2d_apply(ops, uf0) - 0.5 * fs.reaction(uf0) -
            0.5 * fs.reaction_remainder(ui1) + 0.5 * (fs.load(0.0) + fs.load(tau));
    return s;
}

LinearizedStep fine_step_system(FeSystem& fs, const ThetaScheme& scheme, const Vector& uf1,
                                const Vector& uf2, const Vector& ui, double t_m) {
    const OperatorSet& ops = fs.ops();
    const ThetaWeights w = theta_weights(scheme);
    const double th = scheme.theta;
    LinearizedStep s;
    s.matrix.mass_coef = w.c0;
    s.matrix.stiff_coef = 1.0 - th;
    s.matrix.weight_coef = 1.0 - th;
    s.matrix.weight = fs.reaction_prime(ui);
    s.rhs = theta_blend(scheme, fs.load(t_m), fs.load(t_m - scheme.tau)) -
            apply_mass(ops, w.c1 * uf1 + w.c2 * uf2) - (1.0 - th) * fs.reaction_remainder(ui);
    if (th != 0.0) {
        s.rhs -= th * (compose_2d_apply(ops, uf1) + fs.reaction(uf1));
    }
    return s;
}

StateVector fine_first_step_linear(FeSystem& fs, const StateVector& uf0, const StateVector& ui1,
                                   const ThetaScheme& scheme) {
    const LinearizedStep s = fine_first_step_system(fs, uf0.coeffs, ui1.coeffs, scheme.tau);
    return {fs.solver().solve(s.matrix, s.rhs), uf0.time + scheme.tau};
}

StateVector fine_step_linear(FeSystem& fs, const StateVector& uf1, const StateVector& uf2,
                             const StateVector& ui, const ThetaScheme& scheme, double t_m) {
    const LinearizedStep s = fine_step_system(fs, scheme, uf1.coeffs, uf2.coeffs, ui.coeffs, t_m);
    return {fs.solver().solve(s.matrix, s.rhs), t_m};
}

TtmRun run_ttm(const ProblemSpec& problem, const DiscretizationConfig& disc, const OperatorSet& ops) {
    const TwoMeshGrid grid(disc.tau, disc.M, problem.horizon);
    const ThetaScheme fine_scheme(disc.theta, disc.tau);
    FeSystem fs(problem, ops, disc.linear);
    const StateVector u0 = initial_state(problem, ops, disc.initial);

    TtmRun run;
    double t0 = cpu_now();
    {
        const ThetaScheme coarse_scheme(disc.theta, grid.tau_c());
        try {
            run.coarse_states = march_theta_scheme(fs, u0, coarse_scheme, grid.coarse_steps(), disc.newton,
                                                   true, &run.coarse_newton_iterations);
        } catch (const NewtonFailure& e) {
            throw NewtonFailure(std::string("coarse solve: ") + e.what(), e.last_residual(), e.iterations());
        }
    }
    double t1 = cpu_now();
    run.timings.coarse = t1 - t0;

    const int steps = grid.fine_steps();
    run.fine_states.push_back(u0);
    StateVector prev2 = u0;
    StateVector prev1;
    for (int m = 1; m <= steps; ++m) {
        t0 = cpu_now();
        const StateVector ui = interpolate_to_fine(run.coarse_states, grid, m);
        t1 = cpu_now();
        run.timings.interpolation += t1 - t0;
        StateVector next = m == 1 ? fine_first_step_linear(fs, prev2, ui, fine_scheme)
                                  : fine_step_linear(fs, prev1, prev2, ui, fine_scheme, m * disc.tau);
        run.timings.fine += cpu_now() - t1;
        if (m >= 2) {
            prev2 = std::move(prev1);
        }
        prev1 = std::move(next);
        if (disc.keep_trajectory || m == steps) {
            run.fine_states.push_back(prev1);
        }
    }
    return run;
}

TtmRun run_ttm(const ProblemSpec& problem, const DiscretizationConfig& disc) {
    const OperatorSet ops =
        build_operator_set(TensorMesh2D::unit_square(disc.n_cells), problem.order, problem.epsilon);
    return run_ttm(problem, disc, ops);
}

}  // namespace fracttm
