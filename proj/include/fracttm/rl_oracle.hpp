#pragma once

// Reference evaluators built only from point values of a callable. Used by
// the test suites to check the closed-form calculus and the assembled
// operators; nothing in the solver path depends on this header.

#include <functional>

namespace fracttm::oracle {

using ScalarFn = std::function<double(double)>;

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // accumulated |fine - coarse| over accepted pieces
};

/// Globally adaptive Gauss-Legendre (10 vs 20 points): the piece with the
/// largest error estimate is bisected until the total estimate is <= tol.
/// Tolerates integrable endpoint singularities and interior kinks.
Estimate adaptive_integrate(const ScalarFn& f, double a, double b, double tol = 1e-11,
                            int max_pieces = 100000);

/// Left RL derivative of order mu in (0, 1) at x > a, from the Marchaud form
///   [ f(x) (x-a)^{-mu} + mu int_0^{x-a} (f(x) - f(x-r)) r^{-1-mu} dr ] / Gamma(1-mu).
/// f must be Lipschitz on [a, x] (finitely many kinks allowed) and evaluated
/// to relative accuracy. Pieces near r = 0 whose estimate is within the
/// rounding noise of the difference quotient are not refined further; their
/// estimate is included in `error`. Throws QuadratureError when the remaining
/// refinable pieces miss the tolerance within the piece budget.
Estimate numeric_rl_left(const ScalarFn& f, double mu, double a, double x, double tol = 1e-11);

/// Right RL derivative at x < b by reflection of numeric_rl_left.
Estimate numeric_rl_right(const ScalarFn& f, double mu, double b, double x, double tol = 1e-11);

/// Convenience wrapper returning only the value of numeric_rl_left.
double numeric_rl_oracle(const ScalarFn& f, double mu, double a, double x);

}  // namespace fracttm::oracle
