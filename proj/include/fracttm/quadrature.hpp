#pragma once

#include <vector>

namespace fracttm {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int n);

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1 (Golub-Welsch).
QuadRule gauss_jacobi(int n, double alpha, double beta);

/// Map a rule on [-1, 1] affinely onto [a, b].
QuadRule map_to_interval(const QuadRule& ref, double a, double b);

/// Composite Gauss rule on [a, b] with sub-cells graded dyadically toward both
/// ends: breakpoints a + (b-a) 2^{-k} and b - (b-a) 2^{-k}, k = 1..levels.
/// Integrands with (x-a)^beta or (b-x)^beta endpoint behaviour (beta > -1)
/// converge geometrically in `levels`.
QuadRule graded_cell_rule(double a, double b, int levels, int points_per_piece = 6);

}  // namespace fracttm
