#include "fracttm/frac_calculus.hpp"

#include "fracttm/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace fracttm {

namespace {

void check_mu(double mu) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw DomainError("fractional order mu must lie in (0, 1), got " + std::to_string(mu));
    }
}

/// 1 / Gamma(z), zero on the poles of Gamma.
double rgamma(double z) {
    if (z <= 0.0 && z == std::floor(z)) {
        return 0.0;
    }
    return 1.0 / std::tgamma(z);
}

}  // namespace

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw DomainError("fractional order alpha must lie in (1, 2), got " + std::to_string(alpha));
    }
}

double TruncatedPower::value(double x, Side side) const {
    const double r = side == Side::left ? x - knot : knot - x;
    if (r <= 0.0) {
        return exponent == 0 && r == 0.0 ? coefficient : 0.0;
    }
    return coefficient * std::pow(r, exponent);
}

double power_rule_coefficient(int p, double order) {
    if (p < 0) {
        throw DomainError("power_rule_coefficient: negative exponent");
    }
    return std::tgamma(p + 1.0) * rgamma(p + 1.0 - order);
}

double rl_left_deriv_monomial(int p, double mu, double a, double x) {
    check_mu(mu);
    if (p < 0) {
        throw DomainError("rl_left_deriv_monomial: negative exponent");
    }
    if (x < a) {
        throw DomainError("rl_left_deriv_monomial: x lies left of the terminal");
    }
    const double r = x - a;
    if (r == 0.0) {
        if (p > mu) {
            return 0.0;
        }
        throw DomainError("rl_left_deriv_monomial: derivative diverges at the terminal");
    }
    return power_rule_coefficient(p, mu) * std::pow(r, p - mu);
}

double rl_right_deriv_monomial(int p, double mu, double b, double x) {
    if (x > b) {
        throw DomainError("rl_right_deriv_monomial: x lies right of the terminal");
    }
    return rl_left_deriv_monomial(p, mu, 0.0, b - x);
}

double rl_deriv_truncated_power(const TruncatedPower& tp, double mu, double x, Side side) {
    check_mu(mu);
    if (tp.exponent < 0) {
        throw DomainError("rl_deriv_truncated_power: negative exponent");
    }
    const double r = side == Side::left ? x - tp.knot : tp.knot - x;
    if (r < 0.0) {
        return 0.0;
    }
    if (r == 0.0) {
        if (tp.exponent > mu) {
            return 0.0;
        }
        throw DomainError("rl_deriv_truncated_power: derivative diverges at the knot");
    }
    return tp.coefficient * power_rule_coefficient(tp.exponent, mu) * std::pow(r, tp.exponent - mu);
}

double rl_deriv_hat(const Mesh1D& mesh, int i, double mu, double x, Side side) {
    if (i < 1 || i > mesh.interior_count()) {
        throw DomainError("rl_deriv_hat: node index " + std::to_string(i) + " is not interior");
    }
    const double inv_h = 1.0 / mesh.h();
    const TruncatedPower pieces[3] = {
        {mesh.node(i - 1), 1, inv_h},
        {mesh.node(i), 1, -2.0 * inv_h},
        {mesh.node(i + 1), 1, inv_h},
    };
    double sum = 0.0;
    for (const auto& tp : pieces) {
        sum += rl_deriv_truncated_power(tp, mu, x, side);
    }
    return sum;
}

void rl_deriv_all_hats(const Mesh1D& mesh, double mu, double x, Side side, std::span<double> out) {
    check_mu(mu);
    const int n = mesh.n_cells();
    if (static_cast<int>(out.size()) != n - 1) {
        throw ShapeError("rl_deriv_all_hats: output span must hold one value per interior node");
    }
    const double scale = power_rule_coefficient(1, mu) / mesh.h();
    const double expo = 1.0 - mu;
    thread_local std::vector<double> powers;
    powers.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double r = side == Side::left ? x - mesh.node(k) : mesh.node(k) - x;
        if (r > 0.0) {
            powers[k] = std::pow(r, expo);
        }
    }
    for (int i = 1; i < n; ++i) {
        out[i - 1] = scale * (powers[i - 1] - 2.0 * powers[i] + powers[i + 1]);
    }
}

}  // namespace fracttm
