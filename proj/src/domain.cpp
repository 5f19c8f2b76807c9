#include "chbs/domain.hpp"

#include <ostream>
#include <string>

#include "chbs/errors.hpp"
#include "chbs/kernels.hpp"

namespace chbs {

namespace {

using Triplet = Eigen::Triplet<double>;

// Boundary chain counter-clockwise from (0,0): bottom, right, top, left edge.
std::vector<int> make_chain(int n) {
    std::vector<int> chain;
    chain.reserve(4 * (n - 1));
    for (int i = 0; i < n - 1; ++i) chain.push_back(i);                      // y = 0
    for (int j = 0; j < n - 1; ++j) chain.push_back((n - 1) + j * n);        // x = 1
    for (int i = n - 1; i > 0; --i) chain.push_back(i + (n - 1) * n);        // y = 1
    for (int j = n - 1; j > 0; --j) chain.push_back(j * n);                  // x = 0
    return chain;
}

void assemble_bulk(DiscreteDomain& dom) {
    const int N = dom.bulk_size();
    std::vector<Triplet> trips;
    trips.reserve(dom.triangles.size() * 9);
    dom.M_bulk = Vector::Zero(N);
    for (const auto& tri : dom.triangles) {
        Eigen::Matrix<double, 3, 2> p;
        for (int a = 0; a < 3; ++a) p.row(a) << dom.x[tri[a]], dom.y[tri[a]];
        Eigen::Matrix2d jac;
        jac.col(0) = (p.row(1) - p.row(0)).transpose();
        jac.col(1) = (p.row(2) - p.row(0)).transpose();
        const double det = jac.determinant();
        const double area = 0.5 * std::abs(det);
        // reference gradients of the three hat functions, mapped by J^{-T}
        Eigen::Matrix<double, 2, 3> ref;
        ref << -1, 1, 0, -1, 0, 1;
        const Eigen::Matrix<double, 2, 3> grad = jac.inverse().transpose() * ref;
        const Eigen::Matrix3d local = area * grad.transpose() * grad;
        for (int a = 0; a < 3; ++a) {
            dom.M_bulk[tri[a]] += area / 3.0;
            for (int b = 0; b < 3; ++b) trips.emplace_back(tri[a], tri[b], local(a, b));
        }
    }
    dom.K_bulk.resize(N, N);
    dom.K_bulk.setFromTriplets(trips.begin(), trips.end());
    dom.K_bulk.prune(0.0);
}

void assemble_surface(DiscreteDomain& dom) {
    const int B = dom.boundary_size();
    std::vector<Triplet> trips;
    trips.reserve(4 * B);
    dom.M_surf = Vector::Zero(B);
    for (int k = 0; k < B; ++k) {
        const int l = (k + 1) % B;
        const int a = dom.boundary_chain[k];
        const int b = dom.boundary_chain[l];
        const double len = std::hypot(dom.x[b] - dom.x[a], dom.y[b] - dom.y[a]);
        const double s = 1.0 / len;
        trips.emplace_back(k, k, s);
        trips.emplace_back(l, l, s);
        trips.emplace_back(k, l, -s);
        trips.emplace_back(l, k, -s);
        dom.M_surf[k] += 0.5 * len;
        dom.M_surf[l] += 0.5 * len;
    }
    dom.K_surf.resize(B, B);
    dom.K_surf.setFromTriplets(trips.begin(), trips.end());
}

}  // namespace

DiscreteDomain build_unit_square(int n) {
    if (n < 3) throw ConfigError("mesh n must be at least 3 (got " + std::to_string(n) + ")");
    DiscreteDomain dom;
    dom.n = n;
    dom.h = 1.0 / (n - 1);
    const int N = n * n;
    dom.x.resize(N);
    dom.y.resize(N);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            // exact endpoints so that boundary detection and integrals see 0 and 1
            dom.x[i + j * n] = (i == n - 1) ? 1.0 : i * dom.h;
            dom.y[i + j * n] = (j == n - 1) ? 1.0 : j * dom.h;
        }
    }
    dom.triangles.reserve(2 * (n - 1) * (n - 1));
    for (int j = 0; j < n - 1; ++j) {
        for (int i = 0; i < n - 1; ++i) {
            const int a = i + j * n, b = a + 1, c = a + n, d = a + n + 1;
            dom.triangles.push_back({a, b, d});
            dom.triangles.push_back({a, d, c});
        }
    }
    dom.boundary_chain = make_chain(n);
    dom.chain_position.assign(N, -1);
    for (int k = 0; k < dom.boundary_size(); ++k) dom.chain_position[dom.boundary_chain[k]] = k;
    assemble_bulk(dom);
    assemble_surface(dom);
    return dom;
}

Vector DiscreteDomain::trace(const Vector& bulk) const {
    if (bulk.size() != bulk_size()) throw ShapeError("trace: bulk vector has wrong length");
    Vector out(boundary_size());
    for (int k = 0; k < boundary_size(); ++k) out[k] = bulk[boundary_chain[k]];
    return out;
}

Vector DiscreteDomain::scatter(const Vector& boundary) const {
    if (boundary.size() != boundary_size()) throw ShapeError("scatter: boundary vector has wrong length");
    Vector out = Vector::Zero(bulk_size());
    for (int k = 0; k < boundary_size(); ++k) out[boundary_chain[k]] += boundary[k];
    return out;
}

double integrate_bulk(const DiscreteDomain& dom, const Vector& field) {
    if (field.size() != dom.M_bulk.size()) throw ShapeError("integrate_bulk: field has wrong length");
    return kernels::active().weighted_sum({dom.M_bulk.data(), static_cast<std::size_t>(field.size())},
                                          {field.data(), static_cast<std::size_t>(field.size())});
}

double integrate_surf(const DiscreteDomain& dom, const Vector& trace_field) {
    if (trace_field.size() != dom.M_surf.size()) throw ShapeError("integrate_surf: field has wrong length");
    return kernels::active().weighted_sum({dom.M_surf.data(), static_cast<std::size_t>(trace_field.size())},
                                          {trace_field.data(), static_cast<std::size_t>(trace_field.size())});
}

void write_mesh(std::ostream& os, const DiscreteDomain& dom) {
    os.precision(17);
    os << "# unit square, n = " << dom.n << "\n";
    for (int i = 0; i < dom.bulk_size(); ++i) os << "v " << i << ' ' << dom.x[i] << ' ' << dom.y[i] << '\n';
    for (const auto& t : dom.triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "chain";
    for (int k : dom.boundary_chain) os << ' ' << k;
    os << '\n';
}

}  // namespace chbs
