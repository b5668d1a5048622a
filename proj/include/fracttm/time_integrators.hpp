#pragma once

#include "fracttm/fem.hpp"
#include "fracttm/linear_solver.hpp"
#include "fracttm/problems.hpp"

#include <array>
#include <functional>
#include <vector>

namespace fracttm {

/// Three-level theta scheme, 0 <= theta <= 1/2, step tau > 0.
struct ThetaScheme {
    ThetaScheme(double theta, double tau);

    double theta;
    double tau;
};

struct ThetaWeights {
    double c0, c1, c2;
};

/// c0 = (3-2 theta)/(2 tau), c1 = -(4-4 theta)/(2 tau), c2 = (1-2 theta)/(2 tau).
ThetaWeights theta_weights(const ThetaScheme& scheme);

/// (1-theta) vn + theta vn1.
Vector theta_blend(const ThetaScheme& scheme, const Vector& vn, const Vector& vn1);
double theta_blend(const ThetaScheme& scheme, double vn, double vn1);

inline double f_eval(double u) { return u * u * u - u; }
inline double f_prime(double u) { return 3.0 * u * u - 1.0; }

/// increment: stop when ||delta||_M <= abs_tol + rel_tol ||U||_M after an update.
/// residual: stop when ||R|| <= abs_tol or ||R|| <= rel_tol ||R_0|| (mass-dual norm).
enum class NewtonStop { increment, residual };

struct NewtonConfig {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    int max_iters = 25;
    NewtonStop stop = NewtonStop::increment;
};

/// residuals[k] is the residual norm at iterate k; iterations counts linear solves.
struct NewtonReport {
    int iterations = 0;
    std::vector<double> residuals;
};

using LoadFn = std::function<Vector(double)>;

/// Discrete problem on one OperatorSet: loads, the reaction term and the
/// linear solver. Keeps references to `problem` and `ops`.
class FeSystem {
public:
    FeSystem(const ProblemSpec& problem, const OperatorSet& ops, LinearSolverConfig linear = {});

    const ProblemSpec& problem() const { return problem_; }
    const OperatorSet& ops() const { return ops_; }
    LinearSolver& solver() { return solver_; }

    /// (g(., t), phi); replaced by `set_load` when a custom source is needed.
    Vector load(double t);
    void set_load(LoadFn fn);

    /// (f(u_h), phi) by 3x3 Gauss, zero when the reaction is disabled.
    Vector reaction(const Vector& u) const;
    /// f'(u_h) at the quadrature points; empty when the reaction is disabled.
    QuadratureField reaction_prime(const Vector& u) const;
    /// (f(u_h) - u_h f'(u_h), phi).
    Vector reaction_remainder(const Vector& u) const;

    /// Mass-dual norm sqrt(r^T M^{-1} r) of a residual vector.
    double residual_norm(const Vector& r) const;

private:
    const ProblemSpec& problem_;
    const OperatorSet& ops_;
    LinearSolver solver_;
    LoadFn custom_load_;
    std::array<std::pair<double, Vector>, 2> load_cache_;
    int load_cache_next_ = 0;
    bool load_cache_valid_[2] = {false, false};
};

/// R(U) = a M U + b B U + wf (f(U), phi) + known.
struct NonlinearSystem {
    double a = 0.0;
    double b = 0.0;
    double wf = 0.0;
    Vector known;
};

Vector nonlinear_residual(FeSystem& fs, const NonlinearSystem& sys, const Vector& u);

/// Newton linearization at `seed`: J(seed) and rhs = J(seed) seed - R(seed),
/// so the first Newton iterate solves J x = rhs.
struct LinearizedStep {
    SystemSpec matrix;
    Vector rhs;
};

LinearizedStep newton_linearization(FeSystem& fs, const NonlinearSystem& sys, const Vector& seed);

/// Newton on R(U) = 0 from `guess`. A guess with ||R|| <= abs_tol is returned
/// unchanged; otherwise iterates until cfg.stop is met and throws
/// NewtonFailure after max_iters updates.
Vector newton_solve(FeSystem& fs, const NonlinearSystem& sys, Vector guess, const NewtonConfig& cfg,
                    NewtonReport* report = nullptr);

/// Crank-Nicolson first step from U0 at t = 0 to t = tau.
NonlinearSystem first_step_system(FeSystem& fs, const Vector& u0, double tau);
/// Theta step for U^n at t_n from U^{n-1}, U^{n-2}.
NonlinearSystem theta_step_system(FeSystem& fs, const ThetaScheme& scheme, const Vector& un1,
                                  const Vector& un2, double t_n);

Vector first_step_residual(FeSystem& fs, const Vector& u0, const Vector& u1, double tau);
Vector step_residual(FeSystem& fs, const ThetaScheme& scheme, const Vector& un, const Vector& un1,
                     const Vector& un2, double t_n);

StateVector first_step_nonlinear(FeSystem& fs, const StateVector& state0, const ThetaScheme& scheme,
                                 const NewtonConfig& newton, NewtonReport* report = nullptr);
StateVector step_nonlinear(FeSystem& fs, const StateVector& un1, const StateVector& un2,
                           const ThetaScheme& scheme, const NewtonConfig& newton, double t_n,
                           NewtonReport* report = nullptr);

enum class InitialDatum { l2_projection, nodal };

struct DiscretizationConfig {
    int n_cells = 10;    // per direction on the unit square
    double tau = 0.01;   // fine (or standard) time step
    int M = 1;           // tau_c = M tau for TT-M
    double theta = 0.0;
    NewtonConfig newton;
    LinearSolverConfig linear;
    bool keep_trajectory = true;
    InitialDatum initial = InitialDatum::l2_projection;

    double h() const { return 1.0 / n_cells; }
    double tau_c() const { return M * tau; }
};

/// Number of steps of size tau covering [0, horizon]; throws if tau does not divide it.
int step_count(double horizon, double tau);

/// Standard theta-scheme trajectory (Crank-Nicolson first step, Newton every
/// step). Returns all levels, or only the first and last if keep_trajectory is false.
std::vector<StateVector> march_theta_scheme(FeSystem& fs, const StateVector& initial,
                                            const ThetaScheme& scheme, int steps,
                                            const NewtonConfig& newton, bool keep_trajectory,
                                            int* newton_iterations = nullptr);

struct FeRun {
    std::vector<StateVector> states;
    double cpu_seconds = 0.0;
    int newton_iterations = 0;
};

/// U^0 for a run: projection or interpolation of the problem's u0.
StateVector initial_state(const ProblemSpec& problem, const OperatorSet& ops, InitialDatum kind);

/// Process CPU seconds.
double cpu_now();

/// Standard FE method; times the stepping only.
FeRun run_standard_fe(const ProblemSpec& problem, const DiscretizationConfig& disc,
                      const OperatorSet& ops);
FeRun run_standard_fe(const ProblemSpec& problem, const DiscretizationConfig& disc);

}  // namespace fracttm
