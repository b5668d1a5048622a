#include "fracttm/mesh.hpp"

#include "fracttm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace fracttm {

Mesh1D::Mesh1D(double a, double b, int n_cells) : a_(a), b_(b), n_cells_(n_cells) {
    if (!(b > a)) {
        throw DomainError("Mesh1D: need b > a");
    }
    if (n_cells < 1) {
        throw DomainError("Mesh1D: need at least one cell");
    }
}

double Mesh1D::node(int i) const {
    if (i == n_cells_) {
        return b_;
    }
    return a_ + i * h();
}

int Mesh1D::cell_of(double x) const {
    const int c = static_cast<int>(std::floor((x - a_) / h()));
    return std::clamp(c, 0, n_cells_ - 1);
}

TensorMesh2D::TensorMesh2D(Mesh1D mesh_x, Mesh1D mesh_y)
    : mesh_x_(std::move(mesh_x)), mesh_y_(std::move(mesh_y)) {}

TensorMesh2D TensorMesh2D::unit_square(int n_cells) {
    return TensorMesh2D(Mesh1D(0.0, 1.0, n_cells), Mesh1D(0.0, 1.0, n_cells));
}

}  // namespace fracttm
