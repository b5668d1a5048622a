#pragma once

#include "fracttm/fem.hpp"
#include "fracttm/problems.hpp"

#include <optional>

namespace fracttm {

enum class Direction { x, y };

/// Value of the bilinear FE function with interior coefficients u at (x, y).
double fe_value_at(const TensorMesh2D& mesh, const Vector& u, double x, double y);

/// Nodal values of a fine FE function at the interior nodes of `coarse`.
Vector restrict_to_mesh(const TensorMesh2D& fine, const Vector& u_fine, const TensorMesh2D& coarse);

/// ||u_h - exact(., t)|| by 3x3 Gauss per cell.
double error_l2(const OperatorSet& ops, const Vector& u, const SpaceTimeFn& exact, double t);
/// ||u_h - v_h|| for two states on the same mesh.
double error_l2(const OperatorSet& ops, const Vector& u, const Vector& v);
/// continuous: ||u_h - u_ref|| between the two FE functions, integrated exactly
/// on the merged breakpoints. restricted: ||u_h - I_h u_ref|| with the reference
/// sampled at the nodes of ops.mesh.
enum class ReferenceMetric { continuous, restricted };

double error_l2_reference(const OperatorSet& ops, const Vector& u, const TensorMesh2D& ref_mesh,
                          const Vector& u_ref, ReferenceMetric metric = ReferenceMetric::continuous);

/// Left RL derivative of order mu of u_h in one direction, in closed form.
class FracDerivField {
public:
    FracDerivField(const TensorMesh2D& mesh, const Vector& u, double mu, Direction dir);

    double operator()(double x, double y) const;
    /// Values on a tensor grid (rows xs, columns ys).
    Matrix on_grid(const Vector& xs, const Vector& ys) const;

private:
    TensorMesh2D mesh_;
    Matrix u_;
    double mu_;
    Direction dir_;
};

FracDerivField fe_frac_deriv_field(const TensorMesh2D& mesh, const Vector& u, double mu, Direction dir);

/// (||e||^2 + ||D_x^mu e||^2 + ||D_y^mu e||^2)^{1/2} with e = exact(., t) - u_h.
/// Throws UnsupportedProblem when the problem has no analytic derivatives.
double error_frac_norm(const OperatorSet& ops, const Vector& u, const ProblemSpec& problem, double mu,
                       double t);

/// log(e_coarse / e_fine) / log(ratio).
double convergence_rate(double e_coarse, double e_fine, double ratio);

/// (3-2 theta)|a|^2 - (1-2 theta)|b|^2 + (2-theta)(1-2 theta)|a-b|^2 in the mass inner product.
double energy_H(const OperatorSet& ops, const Vector& un, const Vector& un1, double theta);

/// B(u, u)^{1/2}.
double seminorm_mu(const OperatorSet& ops, const Vector& u);

struct ErrorRecord {
    double h = 0.0;
    double tau = 0.0;
    double tau_c = 0.0;
    int M = 1;
    double err_l2 = 0.0;
    std::optional<double> err_mu;
    std::optional<double> cpu_ttm;
    std::optional<double> cpu_fe;
};

}  // namespace fracttm
