#pragma once

#include "fracttm/time_integrators.hpp"

#include <vector>

namespace fracttm {

/// Coarse step tau_c = M tau with 2 <= M <= 1/tau_c and N tau_c = horizon.
class TwoMeshGrid {
public:
    TwoMeshGrid(double tau, int M, double horizon = 1.0);

    double tau() const { return tau_; }
    int M() const { return M_; }
    double tau_c() const { return M_ * tau_; }
    int coarse_steps() const { return n_coarse_; }
    int fine_steps() const { return n_coarse_ * M_; }
    double horizon() const { return horizon_; }

private:
    double tau_;
    int M_;
    double horizon_;
    int n_coarse_;
};

/// n = ceil(m / M) and lambda = n - m / M in [0, 1).
struct InterpolationWeights {
    int n;
    double lambda;
};
InterpolationWeights interpolation_weights(int m, int M);

/// Nonlinear theta-scheme trajectory on the coarse step, all levels kept.
std::vector<StateVector> coarse_solve(FeSystem& fs, const StateVector& initial, const TwoMeshGrid& grid,
                                      double theta, const NewtonConfig& newton);

/// lambda U_C^{n-1} + (1 - lambda) U_C^n; an exact copy of U_C^n when M divides m.
StateVector interpolate_to_fine(const std::vector<StateVector>& coarse, const TwoMeshGrid& grid, int m);

/// Linear system of the linearized Crank-Nicolson first fine step.
LinearizedStep fine_first_step_system(FeSystem& fs, const Vector& uf0, const Vector& ui1, double tau);
/// Linear system of the linearized theta step at t_m.
LinearizedStep fine_step_system(FeSystem& fs, const ThetaScheme& scheme, const Vector& uf1,
                                const Vector& uf2, const Vector& ui, double t_m);

StateVector fine_first_step_linear(FeSystem& fs, const StateVector& uf0, const StateVector& ui1,
                                   const ThetaScheme& scheme);
StateVector fine_step_linear(FeSystem& fs, const StateVector& uf1, const StateVector& uf2,
                             const StateVector& ui, const ThetaScheme& scheme, double t_m);

struct TtmTimings {
    double coarse = 0.0;
    double interpolation = 0.0;
    double fine = 0.0;
    double total() const { return coarse + interpolation + fine; }
};

struct TtmRun {
    std::vector<StateVector> coarse_states;
    std::vector<StateVector> fine_states;  // all levels, or first and last without keep_trajectory
    TtmTimings timings;
    int coarse_newton_iterations = 0;
};

TtmRun run_ttm(const ProblemSpec& problem, const DiscretizationConfig& disc, const OperatorSet& ops);
TtmRun run_ttm(const ProblemSpec& problem, const DiscretizationConfig& disc);

}  // namespace fracttm
