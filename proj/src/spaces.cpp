#include "chbs/spaces.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "chbs/errors.hpp"
#include "chbs/kernels.hpp"

namespace chbs {

namespace {

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double wdot(const Vector& w, const Vector& a, const Vector& b) {
    return kernels::active().weighted_dot(view(w), view(a), view(b));
}

}  // namespace

FieldPair FieldPair::zeros(const DiscreteDomain& dom) {
    return {Vector::Zero(dom.bulk_size()), Vector::Zero(dom.boundary_size())};
}

FieldPair FieldPair::constant(const DiscreteDomain& dom, double c) {
    return {Vector::Constant(dom.bulk_size(), c), Vector::Constant(dom.boundary_size(), c)};
}

FieldPair FieldPair::from_bulk(const DiscreteDomain& dom, Vector bulk) {
    Vector boundary = dom.trace(bulk);
    return {std::move(bulk), std::move(boundary)};
}

FieldPair& FieldPair::operator+=(const FieldPair& o) {
    bulk += o.bulk;
    boundary += o.boundary;
    return *this;
}

FieldPair& FieldPair::operator-=(const FieldPair& o) {
    bulk -= o.bulk;
    boundary -= o.boundary;
    return *this;
}

FieldPair& FieldPair::operator*=(double s) {
    bulk *= s;
    boundary *= s;
    return *this;
}

PairSpace::PairSpace(std::shared_ptr<const DiscreteDomain> dom) : dom_(std::move(dom)) {
    const DiscreteDomain& d = *dom_;
    const int N = d.bulk_size();
    mass_V_ = d.M_bulk + d.scatter(d.M_surf);
    total_measure_ = d.M_bulk.sum() + d.M_surf.sum();

    // K_V = K_bulk + T^T K_surf T
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(d.K_bulk.nonZeros() + d.K_surf.nonZeros());
    for (int c = 0; c < d.K_bulk.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(d.K_bulk, c); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    }
    for (int c = 0; c < d.K_surf.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(d.K_surf, c); it; ++it) {
            trips.emplace_back(d.boundary_chain[it.row()], d.boundary_chain[it.col()], it.value());
        }
    }
    stiffness_V_.resize(N, N);
    stiffness_V_.setFromTriplets(trips.begin(), trips.end());

    // [K_V  M_V 1; (M_V 1)^T 0]
    std::vector<Eigen::Triplet<double>> aug(trips);
    for (int i = 0; i < N; ++i) {
        aug.emplace_back(i, N, mass_V_[i]);
        aug.emplace_back(N, i, mass_V_[i]);
    }
    SparseMatrix A(N + 1, N + 1);
    A.setFromTriplets(aug.begin(), aug.end());
    augmented_.compute(A);
    if (augmented_.info() != Eigen::Success) throw NumericalError("PairSpace: augmented system factorization failed");

    SparseMatrix full = stiffness_V_;
    for (int i = 0; i < N; ++i) full.coeffRef(i, i) += mass_V_[i];
    full_V_.compute(full);
    if (full_V_.info() != Eigen::Success) throw NumericalError("PairSpace: V Gram matrix factorization failed");
}

void PairSpace::check_shape(const FieldPair& z) const {
    if (z.bulk.size() != dom_->bulk_size() || z.boundary.size() != dom_->boundary_size()) {
        throw ShapeError("field pair does not match the domain (bulk " + std::to_string(z.bulk.size()) + ", boundary " +
                         std::to_string(z.boundary.size()) + ")");
    }
}

bool PairSpace::is_trace_consistent(const FieldPair& z, double tol) const {
    check_shape(z);
    for (int k = 0; k < dom_->boundary_size(); ++k) {
        const double a = z.boundary[k];
        const double b = z.bulk[dom_->boundary_chain[k]];
        if (std::abs(a - b) > tol * std::max(1.0, std::abs(b))) return false;
    }
    return true;
}

void PairSpace::require_trace_consistent(const FieldPair& z, double tol) const {
    if (!is_trace_consistent(z, tol)) throw PreconditionError("field pair is not trace-consistent (not in V)");
}

double PairSpace::inner_H(const FieldPair& a, const FieldPair& b) const {
    check_shape(a);
    check_shape(b);
    return wdot(dom_->M_bulk, a.bulk, b.bulk) + wdot(dom_->M_surf, a.boundary, b.boundary);
}

double PairSpace::form_a(const FieldPair& a, const FieldPair& b) const {
    check_shape(a);
    check_shape(b);
    return a.bulk.dot(dom_->K_bulk * b.bulk) + a.boundary.dot(dom_->K_surf * b.boundary);
}

double PairSpace::mean(const FieldPair& z) const {
    check_shape(z);
    return (integrate_bulk(*dom_, z.bulk) + integrate_surf(*dom_, z.boundary)) / total_measure_;
}

FieldPair PairSpace::project_zero_mean(const FieldPair& z) const {
    const double m = mean(z);
    FieldPair out = z;
    out.bulk.array() -= m;
    out.boundary.array() -= m;
    return out;
}

DualVector PairSpace::embed(const FieldPair& z) const {
    check_shape(z);
    Vector c = dom_->M_bulk.cwiseProduct(z.bulk) + dom_->scatter(dom_->M_surf.cwiseProduct(z.boundary));
    return {std::move(c)};
}

double PairSpace::pair(const DualVector& phi, const FieldPair& z) const {
    check_shape(z);
    if (phi.coeffs.size() != size()) throw ShapeError("dual vector has wrong length");
    return phi.coeffs.dot(z.bulk);
}

DualVector PairSpace::apply_F(const FieldPair& z) const {
    require_trace_consistent(z);
    const double m = mean(z);
    const double scale = std::max(1.0, z.bulk.cwiseAbs().maxCoeff());
    if (std::abs(m) > 1e-10 * scale) {
        throw PreconditionError("apply_F: argument must have zero mean (mean = " + std::to_string(m) + ")");
    }
    return {stiffness_V_ * z.bulk};
}

FieldPair PairSpace::solve_F_inverse(const DualVector& rhs) const {
    const int N = size();
    if (rhs.coeffs.size() != N) throw ShapeError("solve_F_inverse: dual vector has wrong length");
    const double scale = std::max(1.0, rhs.coeffs.cwiseAbs().sum());
    if (std::abs(rhs.total()) > 1e-10 * scale) {
        throw PreconditionError("solve_F_inverse: <rhs, 1> must vanish (got " + std::to_string(rhs.total()) + ")");
    }
    Vector b(N + 1);
    b.head(N) = rhs.coeffs;
    b[N] = 0.0;
    Vector sol = augmented_.solve(b);
    if (augmented_.info() != Eigen::Success || !sol.allFinite()) throw NumericalError("solve_F_inverse: solve failed");
    Vector w = sol.head(N);
    const Vector residual = stiffness_V_ * w + sol[N] * mass_V_ - rhs.coeffs;
    if (residual.norm() > kSolveTolerance * std::max(1.0, rhs.coeffs.norm())) {
        throw NumericalError("solve_F_inverse: residual " + std::to_string(residual.norm()) + " above tolerance");
    }
    return FieldPair::from_bulk(*dom_, std::move(w));
}

double PairSpace::norm_V0(const FieldPair& z) const { return std::sqrt(std::max(0.0, form_a(z, z))); }

double PairSpace::norm_V0_star(const DualVector& rhs) const {
    const FieldPair w = solve_F_inverse(rhs);
    return std::sqrt(std::max(0.0, rhs.coeffs.dot(w.bulk)));
}

double PairSpace::norm_V_star(const DualVector& rhs) const {
    if (rhs.coeffs.size() != size()) throw ShapeError("norm_V_star: dual vector has wrong length");
    const Vector w = full_V_.solve(rhs.coeffs);
    return std::sqrt(std::max(0.0, rhs.coeffs.dot(w)));
}

DualVector PairSpace::project_dual(const DualVector& phi) const {
    if (phi.coeffs.size() != size()) throw ShapeError("project_dual: dual vector has wrong length");
    return {phi.coeffs - (phi.total() / total_measure_) * mass_V_};
}

FieldPair PairSpace::subgrad_phi(const FieldPair& z) const {
    require_trace_consistent(z);
    const double m = mean(z);
    if (std::abs(m) > 1e-10 * std::max(1.0, z.bulk.cwiseAbs().maxCoeff())) {
        throw PreconditionError("subgrad_phi: argument must have zero mean");
    }
    const Vector kz = dom_->K_bulk * z.bulk + dom_->scatter(dom_->K_surf * z.boundary);
    return project_zero_mean(FieldPair::from_bulk(*dom_, kz.cwiseQuotient(mass_V_)));
}

double poincare_constant(const PairSpace& space) {
    const int N = space.size();
    const Eigen::MatrixXd K = Eigen::MatrixXd(space.stiffness_V());
    Eigen::MatrixXd G = K;
    G.diagonal() += space.mass_V();

    // Orthonormal basis of {z : (M_V 1)^T z = 0} from a Householder reflection of M_V 1.
    const Vector c = space.mass_V().normalized();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd basis = Q.rightCols(N - 1);

    const Eigen::MatrixXd Kr = basis.transpose() * K * basis;
    const Eigen::MatrixXd Gr = basis.transpose() * G * basis;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(Kr, Gr);
    if (eig.info() != Eigen::Success) throw NumericalError("poincare_constant: eigensolver failed");
    const double cp = eig.eigenvalues().minCoeff();
    if (!(cp > 0.0)) throw NumericalError("poincare_constant: nonpositive eigenvalue");
    return cp;
}

}  // namespace chbs
