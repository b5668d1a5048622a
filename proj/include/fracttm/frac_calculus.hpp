#pragma once

#include "fracttm/mesh.hpp"

#include <span>

namespace fracttm {

/// Equation order alpha in (1, 2) and its energy-space order mu = alpha / 2.
class FracOrder {
public:
    explicit FracOrder(double alpha);

    double alpha() const { return alpha_; }
    double mu() const { return alpha_ / 2.0; }

private:
    double alpha_;
};

/// Which Riemann-Liouville terminal: left integrates from a, right up to b.
enum class Side { left, right };

/// c * (x - knot)_+^p on the left side, c * (knot - x)_+^p on the right side.
struct TruncatedPower {
    double knot = 0.0;
    int exponent = 0;
    double coefficient = 1.0;

    double value(double x, Side side) const;
};

/// Gamma(p + 1) / Gamma(p + 1 - order); the power-rule factor of
/// D^order (x - a)^p. Valid for any order > 0 with p + 1 - order not a
/// non-positive integer (returns 0 on those poles).
double power_rule_coefficient(int p, double order);

/// Left RL derivative of order mu of (x - a)^p at x >= a, 0 < mu < 1.
double rl_left_deriv_monomial(int p, double mu, double a, double x);

/// Right RL derivative of order mu of (b - x)^p at x <= b, 0 < mu < 1.
double rl_right_deriv_monomial(int p, double mu, double b, double x);

/// Closed-form RL derivative of a truncated power. The terminal is assumed to
/// lie on the far side of the knot (a <= knot for left, knot <= b for right).
double rl_deriv_truncated_power(const TruncatedPower& tp, double mu, double x, Side side);

/// RL derivative of the hat function of interior node i (1 <= i <= n_cells-1)
/// with terminal at the matching mesh end.
double rl_deriv_hat(const Mesh1D& mesh, int i, double mu, double x, Side side);

/// RL derivatives of every interior hat at x; out[k] belongs to node k + 1.
void rl_deriv_all_hats(const Mesh1D& mesh, double mu, double x, Side side, std::span<double> out);

}  // namespace fracttm
