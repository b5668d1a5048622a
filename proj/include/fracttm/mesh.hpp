#pragma once

namespace fracttm {

/// Uniform partition of [a, b] into n_cells cells. Nodes x_i = a + i h,
/// i = 0..n_cells; interior nodes are 1..n_cells-1.
class Mesh1D {
public:
    Mesh1D(double a, double b, int n_cells);

    double a() const { return a_; }
    double b() const { return b_; }
    int n_cells() const { return n_cells_; }
    double h() const { return (b_ - a_) / n_cells_; }
    double node(int i) const;
    int interior_count() const { return n_cells_ - 1; }
    /// Index of the cell containing x (right-closed at b).
    int cell_of(double x) const;

    bool operator==(const Mesh1D&) const = default;

private:
    double a_;
    double b_;
    int n_cells_;
};

/// Tensor-product mesh of two 1-D meshes. Interior dofs are ordered
/// lexicographically with x fastest: dof(i, j) = i + nx * j, where i and j are
/// zero-based interior indices (node indices i + 1 and j + 1).
class TensorMesh2D {
public:
    TensorMesh2D(Mesh1D mesh_x, Mesh1D mesh_y);

    /// Uniform n x n mesh of the unit square.
    static TensorMesh2D unit_square(int n_cells);

    const Mesh1D& x() const { return mesh_x_; }
    const Mesh1D& y() const { return mesh_y_; }
    int nx() const { return mesh_x_.interior_count(); }
    int ny() const { return mesh_y_.interior_count(); }
    int dofs() const { return nx() * ny(); }
    int dof(int i, int j) const { return i + nx() * j; }

    bool operator==(const TensorMesh2D&) const = default;

private:
    Mesh1D mesh_x_;
    Mesh1D mesh_y_;
};

}  // namespace fracttm
