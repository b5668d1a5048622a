#include "fracttm/problems.hpp"

#include "fracttm/errors.hpp"

#include <cmath>
#include <numbers>

namespace fracttm {

double Polynomial::operator()(double x) const {
    double v = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        v = v * x + *it;
    }
    return v;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) {
        return Polynomial({0.0});
    }
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) {
        d[k - 1] = static_cast<double>(k) * c_[k];
    }
    return Polynomial(std::move(d));
}

Polynomial Polynomial::reflect(double b) const {
    // Expand sum c_k (b - z)^k with binomial coefficients.
    std::vector<double> q(c_.size(), 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) {
        double binom = 1.0;
        for (std::size_t j = 0; j <= k; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            q[j] += c_[k] * binom * std::pow(b, static_cast<double>(k - j)) * sign;
            binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
        }
    }
    return Polynomial(std::move(q));
}

double Polynomial::rl_left(double order, double x) const {
    if (!(order > 0.0)) {
        throw DomainError("Polynomial::rl_left: order must be positive");
    }
    if (x < 0.0) {
        throw DomainError("Polynomial::rl_left: x lies left of the terminal");
    }
    double v = 0.0;
    for (std::size_t k = 0; k < c_.size(); ++k) {
        if (c_[k] == 0.0) {
            continue;
        }
        const double p = static_cast<double>(k);
        if (x == 0.0) {
            if (p > order) {
                continue;
            }
            throw DomainError("Polynomial::rl_left: derivative diverges at the terminal");
        }
        v += c_[k] * power_rule_coefficient(static_cast<int>(k), order) * std::pow(x, p - order);
    }
    return v;
}

double Polynomial::rl_right(double order, double x, double b) const {
    if (x > b) {
        throw DomainError("Polynomial::rl_right: x lies right of the terminal");
    }
    return reflect(b).rl_left(order, b - x);
}

Polynomial quartic_bump() {
    return Polynomial({0.0, 0.0, 1.0, -2.0, 1.0});
}

namespace {

bool vanishes_to_second_order(const Polynomial& p) {
    const Polynomial d = p.derivative();
    const double tol = 1e-14;
    return std::abs(p(0.0)) < tol && std::abs(p(1.0)) < tol && std::abs(d(0.0)) < tol &&
           std::abs(d(1.0)) < tol;
}

/// (D_L^alpha + D_R^alpha) p / (-2 cos(pi alpha / 2)) on [0, 1].
struct FracLaplacian1D {
    Polynomial p;
    Polynomial reflected;
    double alpha;
    double factor;

    FracLaplacian1D(const Polynomial& poly, double a)
        : p(poly),
          reflected(poly.reflect(1.0)),
          alpha(a),
          factor(1.0 / (-2.0 * std::cos(std::numbers::pi * a / 2.0))) {}

    double operator()(double x) const {
        return factor * (p.rl_left(alpha, x) + reflected.rl_left(alpha, 1.0 - x));
    }
};

}  // namespace

SpaceTimeFn manufactured_source(const Polynomial& px, const Polynomial& py, const FracOrder& order,
                                double epsilon) {
    if (!vanishes_to_second_order(px) || !vanishes_to_second_order(py)) {
        throw UnsupportedProblem("manufactured_source: polynomial must vanish to second order at 0 and 1");
    }
    const FracLaplacian1D lx(px, order.alpha());
    const FracLaplacian1D ly(py, order.alpha());
    const double eps2 = epsilon * epsilon;
    return [px, py, lx, ly, eps2](double x, double y, double t) {
        const double et = std::exp(t);
        const double u = et * px(x) * py(y);
        const double lu = et * (lx(x) * py(y) + px(x) * ly(y));
        // u_t = u cancels the linear part of f(u) = u^3 - u.
        return u - eps2 * lu + (u * u * u - u);
    };
}

ProblemSpec example1_spec(double alpha, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("example1_spec: epsilon must be positive");
    }
    ProblemSpec p;
    p.name = "example1";
    p.order = FracOrder(alpha);
    p.epsilon = epsilon;
    const Polynomial x4 = quartic_bump();
    p.initial = [x4](double x, double y) { return x4(x) * x4(y); };
    p.has_source = true;
    p.source = manufactured_source(x4, x4, p.order, epsilon);

    const FracLaplacian1D lap(x4, alpha);
    const double eps2 = epsilon * epsilon;
    p.source_on_grid = [x4, lap, eps2](const Vector& xs, const Vector& ys, double t) {
        const double et = std::exp(t);
        Vector px(xs.size()), lx(xs.size()), py(ys.size()), ly(ys.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i) {
            px[i] = x4(xs[i]);
            lx[i] = lap(xs[i]);
        }
        for (Eigen::Index j = 0; j < ys.size(); ++j) {
            py[j] = x4(ys[j]);
            ly[j] = lap(ys[j]);
        }
        const Matrix u = et * px * py.transpose();
        const Matrix lu = et * (lx * py.transpose() + px * ly.transpose());
        QuadratureField g = u - eps2 * lu;
        g += u.cwiseProduct(u).cwiseProduct(u) - u;
        return g;
    };

    const double mu = p.order.mu();
    p.exact = ExactSolution{
        [x4](double x, double y, double t) { return std::exp(t) * x4(x) * x4(y); },
        [x4, mu](double x, double y, double t) { return std::exp(t) * x4.rl_left(mu, x) * x4(y); },
        [x4, mu](double x, double y, double t) { return std::exp(t) * x4(x) * x4.rl_left(mu, y); },
    };
    return p;
}

ProblemSpec example2_spec(double alpha, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("example2_spec: epsilon must be positive");
    }
    ProblemSpec p;
    p.name = "example2";
    p.order = FracOrder(alpha);
    p.epsilon = epsilon;
    const Polynomial x4 = quartic_bump();
    p.initial = [x4](double x, double y) { return x4(x) * x4(y); };
    p.source = [](double, double, double) { return 0.0; };
    return p;
}

double example3_initial(double x, double y) {
    const double wy = y * (1.0 - y);
    if (x <= 0.5) {
        const double x3 = x * x * x;
        return x3 * (1.0 - x3) * wy;
    }
    return 7.0 / 16.0 * x * (1.0 - x) * wy;
}

ProblemSpec example3_spec(double alpha, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw DomainError("example3_spec: epsilon must be positive");
    }
    ProblemSpec p;
    p.name = "example3";
    p.order = FracOrder(alpha);
    p.epsilon = epsilon;
    p.initial = example3_initial;
    p.source = [](double, double, double) { return 0.0; };
    return p;
}

ProblemSpec make_problem(const std::string& name, double alpha, double epsilon) {
    if (name == "example1") {
        return example1_spec(alpha, epsilon);
    }
    if (name == "example2") {
        return example2_spec(alpha, epsilon);
    }
    if (name == "example3") {
        return example3_spec(alpha, epsilon);
    }
    throw UnsupportedProblem("unknown problem '" + name + "'");
}

}  // namespace fracttm
