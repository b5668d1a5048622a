#include "fracttm/rl_oracle.hpp"

#include "fracttm/errors.hpp"
#include "fracttm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace fracttm::oracle {

namespace {

const QuadRule& gl10() {
    static const QuadRule r = gauss_legendre(10);
    return r;
}
const QuadRule& gl20() {
    static const QuadRule r = gauss_legendre(20);
    return r;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

struct Piece {
    double lo, hi, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

/// Global adaptive quadrature: the piece with the largest error estimate is
/// bisected until the summed estimate meets tol or the piece budget runs out.
/// With a noise model, pieces whose estimate is within the rounding noise of
/// the integrand are settled and no longer bisected.
struct Adaptive {
    const ScalarFn& f;
    double tol;
    int max_pieces;
    // Optional singular rule for the piece that touches 0 (Gauss-Jacobi with
    // weight r^{-mu}); `singular_mu` < 0 disables it.
    double singular_mu = -1.0;
    // Absolute rounding error of f at r given the computed value.
    std::function<double(double, double)> noise;
    Estimate acc{};
    bool failed = false;

    struct Sums {
        double coarse = 0.0, fine = 0.0, noise = 0.0;
    };

    Sums estimate(double lo, double hi) const {
        Sums out;
        auto run_rule = [&](const QuadRule& q, double half, double shift, double scale, bool weight_power,
                            bool fine) {
            double s = 0.0, n = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double r = shift + half * q.nodes[i];
                double w = q.weights[i];
                if (weight_power) {
                    w *= std::pow(r, -singular_mu);
                }
                const double v = f(r);
                s += w * v;
                if (fine && noise) {
                    n += std::abs(w) * noise(r, v);
                }
            }
            (fine ? out.fine : out.coarse) = scale * s;
            if (fine) {
                out.noise = std::abs(scale) * n;
            }
        };
        if (singular_mu > 0.0 && lo == 0.0) {
            static thread_local double cached_mu = -1.0;
            static thread_local QuadRule coarse, fine;
            if (cached_mu != singular_mu) {
                coarse = gauss_jacobi(12, 0.0, -singular_mu);
                fine = gauss_jacobi(24, 0.0, -singular_mu);
                cached_mu = singular_mu;
            }
            // r = hi (1 + t) / 2 ; r^{-mu} dr = (hi/2)^{1-mu} (1+t)^{-mu} dt
            const double half = 0.5 * hi;
            const double scale = std::pow(half, 1.0 - singular_mu);
            run_rule(coarse, half, half, scale, false, false);
            run_rule(fine, half, half, scale, false, true);
            return out;
        }
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        const bool power = singular_mu > 0.0;
        run_rule(gl10(), half, mid, half, power, false);
        run_rule(gl20(), half, mid, half, power, true);
        return out;
    }

    void run(double a, double b) {
        std::priority_queue<Piece> open;
        std::vector<Piece> settled;
        double error = 0.0;
        auto add = [&](double lo, double hi) {
            const Sums e = estimate(lo, hi);
            const Piece p{lo, hi, e.fine, std::abs(e.fine - e.coarse)};
            error += p.error;
            if (p.error <= 10.0 * e.noise) {
                settled.push_back(p);
            } else {
                open.push(p);
            }
        };
        add(a, b);
        int pieces = 1;
        while (error > tol && !open.empty()) {
            const Piece p = open.top();
            const double mid = 0.5 * (p.lo + p.hi);
            if (pieces >= max_pieces || !(mid > p.lo && mid < p.hi)) {
                break;
            }
            open.pop();
            error -= p.error;
            add(p.lo, mid);
            add(mid, p.hi);
            ++pieces;
        }
        // Only pieces that could still be refined count against tol; the
        // settled ones sit at the rounding floor and are reported as is.
        acc = {};
        double open_error = 0.0;
        for (; !open.empty(); open.pop()) {
            acc.value += open.top().value;
            open_error += open.top().error;
        }
        acc.error = open_error;
        for (const Piece& p : settled) {
            acc.value += p.value;
            acc.error += p.error;
        }
        failed = open_error > tol;
    }
};

}  // namespace

Estimate adaptive_integrate(const ScalarFn& f, double a, double b, double tol, int max_pieces) {
    if (a == b) {
        return {};
    }
    Adaptive ad{f, tol, max_pieces, -1.0, {}};
    ad.run(a, b);
    if (ad.failed) {
        throw QuadratureError("adaptive_integrate: tolerance not reached (error estimate " +
                              sci(ad.acc.error) + ")");
    }
    return ad.acc;
}

Estimate numeric_rl_left(const ScalarFn& f, double mu, double a, double x, double tol) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw DomainError("numeric_rl_left: mu must lie in (0, 1)");
    }
    if (!(x > a)) {
        throw DomainError("numeric_rl_left: need x > a");
    }
    const double len = x - a;
    const double fx = f(x);
    // D(r) = (f(x) - f(x - r)) / r, integrated against r^{-mu}.
    // Largest |f| seen so far; rounding inside f gives absolute errors on that
    // scale even where f itself is small. Rounding of the argument adds about
    // eps |x| |f'|, and q is the local slope.
    double scale = std::abs(fx);
    const ScalarFn quotient = [&](double r) {
        const double v = f(x - r);
        scale = std::max(scale, std::abs(v));
        return (fx - v) / r;
    };
    Adaptive ad{quotient, tol, 20000, -1.0, {}};
    ad.singular_mu = mu;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double arg_scale = 2.0 * (std::abs(x) + 1.0);
    ad.noise = [fx, arg_scale, &scale](double r, double q) {
        return 2.0 * eps * (std::abs(fx) + std::abs(fx - r * q) + scale + arg_scale * std::abs(q)) / r;
    };
    ad.run(0.0, len);
    if (ad.failed) {
        throw QuadratureError("numeric_rl_left: adaptive quadrature did not converge (error " +
                              sci(ad.acc.error) + ")");
    }
    const double inv_gamma = 1.0 / std::tgamma(1.0 - mu);
    Estimate out;
    out.value = inv_gamma * (fx * std::pow(len, -mu) + mu * ad.acc.value);
    out.error = inv_gamma * mu * ad.acc.error;
    return out;
}

Estimate numeric_rl_right(const ScalarFn& f, double mu, double b, double x, double tol) {
    if (!(x < b)) {
        throw DomainError("numeric_rl_right: need x < b");
    }
    // D_R f(x) on [x, b] equals D_L g(b - x) on [0, b - x] with g(z) = f(b - z).
    const ScalarFn reflected = [&](double z) { return f(b - z); };
    return numeric_rl_left(reflected, mu, 0.0, b - x, tol);
}

double numeric_rl_oracle(const ScalarFn& f, double mu, double a, double x) {
    return numeric_rl_left(f, mu, a, x).value;
}

}  // namespace fracttm::oracle
