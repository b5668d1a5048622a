#pragma once

#include "fracttm/fem.hpp"
#include "fracttm/mesh.hpp"

#include <cmath>
#include <random>

namespace test {

inline fracttm::Vector random_vector(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    fracttm::Vector v(n);
    for (int k = 0; k < n; ++k) {
        v[k] = u(rng);
    }
    return v;
}

/// Hat of interior node i as a plain function, written without the
/// cancellation of 1 - |x - x_i| / h near the support ends.
inline auto hat(const fracttm::Mesh1D& m, int i) {
    return [m, i](double x) {
        const double l = m.node(i - 1), c = m.node(i), r = m.node(i + 1);
        if (x <= l || x >= r) {
            return 0.0;
        }
        return x <= c ? (x - l) / (c - l) : (r - x) / (r - c);
    };
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace test
