#pragma once

// Discrete product Hilbert structure on (bulk, boundary) pairs.
//
// An H-pair carries independent bulk and boundary vectors. A V-pair is an
// H-pair whose boundary vector is the trace of its bulk vector; V-pairs are
// therefore determined by their bulk nodal values, and functionals on V (the
// dual space V*) are represented by one coefficient per bulk node:
//     <phi, z> = phi.coeffs . z.bulk.
//
// With the lumped masses the V-level operators are
//     M_V = M_bulk + T^T M_surf T   (diagonal)
//     K_V = K_bulk + T^T K_surf T,
// T the trace.

#include <Eigen/SparseLU>
#include <Eigen/SparseCholesky>
#include <memory>

#include "chbs/domain.hpp"

namespace chbs {

struct FieldPair {
    Vector bulk;
    Vector boundary;

    static FieldPair zeros(const DiscreteDomain& dom);
    static FieldPair constant(const DiscreteDomain& dom, double c);
    /// V-pair built from bulk nodal values (boundary = trace).
    static FieldPair from_bulk(const DiscreteDomain& dom, Vector bulk);

    FieldPair& operator+=(const FieldPair& o);
    FieldPair& operator-=(const FieldPair& o);
    FieldPair& operator*=(double s);
    friend FieldPair operator+(FieldPair a, const FieldPair& b) { return a += b; }
    friend FieldPair operator-(FieldPair a, const FieldPair& b) { return a -= b; }
    friend FieldPair operator*(double s, FieldPair a) { return a *= s; }
};

/// Element of V*, one coefficient per bulk node.
struct DualVector {
    Vector coeffs;

    /// <phi, 1>
    double total() const { return coeffs.sum(); }
};

class PairSpace {
public:
    explicit PairSpace(std::shared_ptr<const DiscreteDomain> dom);

    const DiscreteDomain& domain() const { return *dom_; }
    std::shared_ptr<const DiscreteDomain> domain_ptr() const { return dom_; }
    int size() const { return dom_->bulk_size(); }

    /// M_V diagonal and K_V.
    const Vector& mass_V() const { return mass_V_; }
    const SparseMatrix& stiffness_V() const { return stiffness_V_; }
    /// |Omega| + |Gamma|
    double total_measure() const { return total_measure_; }

    void check_shape(const FieldPair& z) const;
    bool is_trace_consistent(const FieldPair& z, double tol = 0.0) const;
    /// Throws PreconditionError unless trace-consistent to tol.
    void require_trace_consistent(const FieldPair& z, double tol = 1e-12) const;

    double inner_H(const FieldPair& a, const FieldPair& b) const;
    double form_a(const FieldPair& a, const FieldPair& b) const;
    double inner_V(const FieldPair& a, const FieldPair& b) const { return inner_H(a, b) + form_a(a, b); }

    double mean(const FieldPair& z) const;
    FieldPair project_zero_mean(const FieldPair& z) const;

    /// H-pair embedded in V*: M_bulk z + T^T M_surf z_Gamma.
    DualVector embed(const FieldPair& z) const;
    /// <phi, z> for a V-pair z.
    double pair(const DualVector& phi, const FieldPair& z) const;

    /// F z = a(z, .) for zero-mean V-pairs.
    DualVector apply_F(const FieldPair& z) const;
    /// Zero-mean w in V with a(w, .) = rhs on V_0. Requires <rhs, 1> = 0.
    FieldPair solve_F_inverse(const DualVector& rhs) const;

    double norm_V0(const FieldPair& z) const;
    double norm_V0_star(const DualVector& rhs) const;
    /// Dual norm over all of V (not only V_0): sqrt(phi^T (M_V + K_V)^{-1} phi).
    double norm_V_star(const DualVector& rhs) const;
    /// |z|_{V0*} for a zero-mean H-pair, via its embedding.
    double norm_V0_star(const FieldPair& z) const { return norm_V0_star(embed(z)); }

    /// Removes the multiple of M_V 1 so that <phi, 1> = 0; the action on V_0 is unchanged.
    DualVector project_dual(const DualVector& phi) const;

    /// H_0-representer of a(z, .): M_V^{-1} K_V z as a V-pair, mean removed.
    FieldPair subgrad_phi(const FieldPair& z) const;

    /// Residual |K_V w + lambda M_V 1 - rhs| of the last-solved augmented system is below this
    /// relative bound or solve_F_inverse throws.
    static constexpr double kSolveTolerance = 1e-10;

private:
    std::shared_ptr<const DiscreteDomain> dom_;
    Vector mass_V_;
    SparseMatrix stiffness_V_;
    double total_measure_ = 0.0;
    Eigen::SparseLU<SparseMatrix> augmented_;
    Eigen::SimplicialLDLT<SparseMatrix> full_V_;
};

/// Largest c_p with c_p |z|_V^2 <= |z|_{V0}^2 on zero-mean V-pairs: smallest eigenvalue of
/// K_V against M_V + K_V on the M_V-orthogonal complement of the constants.
double poincare_constant(const PairSpace& space);

}  // namespace chbs
