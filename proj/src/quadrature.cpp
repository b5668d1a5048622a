#include "fracttm/quadrature.hpp"

#include "fracttm/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace fracttm {

QuadRule gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("gauss_legendre: n must be positive");
    }
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, refined by Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

QuadRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1 || alpha <= -1.0 || beta <= -1.0) {
        throw DomainError("gauss_jacobi: need n >= 1 and alpha, beta > -1");
    }
    const double ab = alpha + beta;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            jac(0, 0) = (beta - alpha) / (ab + 2.0);
        } else {
            const double s = 2.0 * k + ab;
            jac(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double b2 = 0.0;
        if (k == 1) {
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
        } else {
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        jac(k, k - 1) = jac(k - 1, k) = std::sqrt(b2);
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

QuadRule map_to_interval(const QuadRule& ref, double a, double b) {
    QuadRule out;
    out.nodes.resize(ref.size());
    out.weights.resize(ref.size());
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out.nodes[i] = mid + half * ref.nodes[i];
        out.weights[i] = half * ref.weights[i];
    }
    return out;
}

QuadRule graded_cell_rule(double a, double b, int levels, int points_per_piece) {
    if (levels < 1) {
        throw DomainError("graded_cell_rule: levels must be positive");
    }
    const QuadRule ref = gauss_legendre(points_per_piece);
    const double len = b - a;
    std::vector<double> breaks;
    breaks.reserve(2 * levels + 1);
    breaks.push_back(a);
    for (int k = levels; k >= 1; --k) {
        breaks.push_back(a + len * std::ldexp(1.0, -k));
    }
    for (int k = 2; k <= levels; ++k) {
        breaks.push_back(b - len * std::ldexp(1.0, -k));
    }
    breaks.push_back(b);

    QuadRule out;
    out.nodes.reserve(ref.size() * (breaks.size() - 1));
    out.weights.reserve(out.nodes.capacity());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const QuadRule piece = map_to_interval(ref, breaks[p], breaks[p + 1]);
        out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    return out;
}

}  // namespace fracttm
