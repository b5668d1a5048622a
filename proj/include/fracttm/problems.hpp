#pragma once

#include "fracttm/fem.hpp"
#include "fracttm/frac_calculus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fracttm {

/// Dense-coefficient polynomial c[0] + c[1] x + ... on [0, 1].
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    double operator()(double x) const;
    Polynomial derivative() const;
    /// q(z) = p(b - z).
    Polynomial reflect(double b = 1.0) const;
    /// Left RL derivative of any order > 0 with terminal 0, term by term.
    double rl_left(double order, double x) const;
    /// Right RL derivative with terminal b, via reflection.
    double rl_right(double order, double x, double b = 1.0) const;

    const std::vector<double>& coeffs() const { return c_; }

private:
    std::vector<double> c_;
};

/// x^2 (1 - x)^2 = x^2 - 2 x^3 + x^4.
Polynomial quartic_bump();

struct ExactSolution {
    SpaceTimeFn u;
    SpaceTimeFn dx_mu;  // left RL derivative of order mu in x
    SpaceTimeFn dy_mu;  // left RL derivative of order mu in y
};

/// Source sampled on a tensor grid of points (rows x, columns y).
using GridSourceFn = std::function<QuadratureField(const Vector& xs, const Vector& ys, double t)>;

struct ProblemSpec {
    std::string name;
    FracOrder order{1.5};
    double epsilon = 0.01;
    double horizon = 1.0;
    bool has_source = false;
    SpaceTimeFn source;
    /// Optional fast path equal to `source` on a tensor grid.
    GridSourceFn source_on_grid;
    SpaceFn initial;
    std::optional<ExactSolution> exact;
    /// Disables f(u) = u^3 - u when false (used by tests for linear cases).
    bool reaction_enabled = true;
};

/// g = u_t - eps^2 L_alpha u + u^3 - u for u = e^t px(x) py(y) on the unit
/// square. Both polynomials must vanish to second order at 0 and 1.
SpaceTimeFn manufactured_source(const Polynomial& px, const Polynomial& py, const FracOrder& order,
                                double epsilon);

/// The smooth problem u = e^t x^2(1-x)^2 y^2(1-y)^2 with manufactured source.
ProblemSpec example1_spec(double alpha, double epsilon);
/// u0 = x^2(1-x)^2 y^2(1-y)^2, g = 0.
ProblemSpec example2_spec(double alpha, double epsilon = 0.01);
/// Piecewise u0 with a kink in its derivative at x = 1/2, g = 0.
ProblemSpec example3_spec(double alpha, double epsilon = 0.01);
double example3_initial(double x, double y);

/// "example1" | "example2" | "example3"; throws UnsupportedProblem otherwise.
ProblemSpec make_problem(const std::string& name, double alpha, double epsilon);

}  // namespace fracttm
