#pragma once

// P1 discretisation of the unit square and its boundary circle.
//
// Bulk: structured right-angled triangulation, two triangles per cell, with the
// diagonal running from (x_i, y_j) to (x_{i+1}, y_{j+1}). Boundary: 1D P1
// elements on the closed chain of boundary nodes, counter-clockwise from the
// origin. Only weak forms are assembled; no normal derivative is ever formed.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <iosfwd>
#include <vector>

namespace chbs {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct DiscreteDomain {
    int n = 0;                 // nodes per side
    double h = 0.0;            // mesh width 1/(n-1)
    Vector x, y;               // node coordinates, node index = i + j*n
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary_chain;  // chain position -> bulk node, length 4(n-1)
    std::vector<int> chain_position;  // bulk node -> chain position, -1 for interior nodes

    SparseMatrix K_bulk;  // int grad phi_i . grad phi_j
    SparseMatrix K_surf;  // int_Gamma d_s psi_k d_s psi_l on the chain
    Vector M_bulk;        // lumped mass diagonal, sums to |Omega| = 1
    Vector M_surf;        // lumped mass diagonal, sums to |Gamma| = 4

    int bulk_size() const { return static_cast<int>(x.size()); }
    int boundary_size() const { return static_cast<int>(boundary_chain.size()); }
    const std::vector<int>& trace_map() const { return boundary_chain; }

    /// Restriction of a bulk nodal vector to the boundary chain.
    Vector trace(const Vector& bulk) const;
    /// Adjoint of trace(): adds boundary values onto their bulk nodes.
    Vector scatter(const Vector& boundary) const;
};

/// Builds the unit-square domain with n nodes per side. Throws ConfigError for n < 3.
DiscreteDomain build_unit_square(int n);

/// Lumped quadrature M_bulk^T field. Throws ShapeError on length mismatch.
double integrate_bulk(const DiscreteDomain& dom, const Vector& field);
/// Lumped quadrature M_surf^T field.
double integrate_surf(const DiscreteDomain& dom, const Vector& trace_field);

/// Plain-text mesh listing: node lines "v idx x y", triangle lines "t a b c", chain line "chain ...".
void write_mesh(std::ostream& os, const DiscreteDomain& dom);

}  // namespace chbs
