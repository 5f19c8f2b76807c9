#include "chbs/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chbs/errors.hpp"

namespace chbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRootIterations = 200;

double log_beta(double r) { return std::log1p(2.0 * r / (1.0 - r)); }

// Solves j + eps*beta(j) = a for a > 0 on [0, hi]. g is increasing and convex on
// j > 0 for both smooth prototypes, so Newton started at a point right of the
// root decreases monotonically; the bracket only guards against rounding.
template <class G, class DG>
double positive_root(G g, DG dg, double hi) {
    double lo = 0.0;
    double ghi = g(hi);
    if (ghi <= 0.0) return hi;
    double j = hi;
    for (int it = 0; it < kMaxRootIterations; ++it) {
        const double gj = g(j);
        if (gj == 0.0) return j;
        if (gj > 0.0) hi = j; else lo = j;
        double next = j - gj / dg(j);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - j) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(j) || next == lo ||
            next == hi) {
            return next;
        }
        j = next;
    }
    throw NumericalError("resolvent: root finder did not converge for a = " + std::to_string(ghi));
}

// Logarithmic graph in the variable s = beta(J): tanh(s/2) + eps*s = a, a > 0.
// The left side is increasing and concave on s >= 0, so Newton started left of
// the root increases monotonically; no clamp near J = +-1 is needed.
struct LogRoot {
    double s;  // beta(J) >= 0
    double t;  // exp(-s)
};

LogRoot log_root(double eps, double a) {
    double lo = std::max(0.0, (a - 1.0) / eps);
    double hi = a / eps;
    double s = lo;
    for (int it = 0; it < kMaxRootIterations; ++it) {
        const double h = std::tanh(0.5 * s) + eps * s - a;
        if (h == 0.0) return {s, std::exp(-s)};
        if (h > 0.0) hi = s; else lo = s;
        const double c = std::cosh(0.5 * s);
        double next = s - h / (0.5 / (c * c) + eps);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next <= lo || next >= hi || std::abs(next - s) <= 2.0 * std::numeric_limits<double>::epsilon() * s) {
            return {next, std::exp(-next)};
        }
        s = next;
    }
    throw NumericalError("resolvent: root finder did not converge for a = " + std::to_string(a));
}

// 1 - J^2 for J = tanh(s/2), without forming J.
double log_gap(const LogRoot& lr) { return 4.0 * lr.t / ((1.0 + lr.t) * (1.0 + lr.t)); }

// beta_hat(J) = sum_k J^(2k) / (k (2k-1)) for small |J|.
double log_potential_series(double j) {
    const double q = j * j;
    double term = q, sum = 0.0;
    for (int k = 1; k < 60; ++k) {
        const double add = term / (k * (2.0 * k - 1.0));
        sum += add;
        if (add <= 1e-18 * sum) break;
        term *= q;
    }
    return sum;
}

double log_potential(const LogRoot& lr) {
    const double j = std::tanh(0.5 * lr.s);
    if (j < 0.5) return log_potential_series(j);
    const double one_minus_j = 2.0 * lr.t / (1.0 + lr.t);
    return 2.0 * (std::log(2.0) - std::log1p(lr.t)) - one_minus_j * lr.s;
}

void check_args(double eps, double r) {
    if (!std::isfinite(r)) throw DomainError("resolvent: non-finite argument");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("resolvent: eps must be positive and finite");
}

double resolvent_root(const GraphSpec& g, double eps, double r) {
    check_args(eps, r);
    if (r == 0.0) return 0.0;
    const double a = std::abs(r);
    const double sign = r < 0 ? -1.0 : 1.0;
    double root = 0.0;
    switch (g.kind) {
        case GraphKind::Obstacle:
            return std::clamp(r, -1.0, 1.0);
        case GraphKind::Polynomial: {
            const double hi = std::min(a, std::cbrt(a / eps));
            root = positive_root([&](double j) { return j + eps * j * j * j - a; },
                                 [&](double j) { return 1.0 + 3.0 * eps * j * j; }, hi);
            break;
        }
        case GraphKind::Logarithmic:
            // Past s ~ 38 tanh rounds to 1; the nearest double inside the domain is returned.
            root = std::min(std::tanh(0.5 * log_root(eps, a).s), std::nextafter(1.0, 0.0));
            break;
    }
    return sign * root;
}

}  // namespace

std::string_view to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::Polynomial: return "polynomial";
        case GraphKind::Logarithmic: return "logarithmic";
        case GraphKind::Obstacle: return "obstacle";
    }
    return "unknown";
}

GraphKind graph_kind_from_string(std::string_view name) {
    if (name == "polynomial") return GraphKind::Polynomial;
    if (name == "logarithmic") return GraphKind::Logarithmic;
    if (name == "obstacle") return GraphKind::Obstacle;
    throw ConfigError("unknown graph kind '" + std::string(name) + "' (expected polynomial, logarithmic or obstacle)");
}

GraphSpec GraphSpec::polynomial(double pi_slope) {
    return {GraphKind::Polynomial, -kInf, kInf, {pi_slope}};
}

GraphSpec GraphSpec::logarithmic(double pi_slope) {
    return {GraphKind::Logarithmic, -1.0, 1.0, {pi_slope}};
}

GraphSpec GraphSpec::obstacle(double pi_slope) {
    return {GraphKind::Obstacle, -1.0, 1.0, {pi_slope}};
}

GraphSpec GraphSpec::of_kind(GraphKind kind, double pi_slope) {
    switch (kind) {
        case GraphKind::Polynomial: return polynomial(pi_slope);
        case GraphKind::Logarithmic: return logarithmic(pi_slope);
        case GraphKind::Obstacle: return obstacle(pi_slope);
    }
    return polynomial(pi_slope);
}

bool GraphSpec::in_domain(double r) const {
    if (kind == GraphKind::Obstacle) return r >= domain_lo && r <= domain_hi;
    return r > domain_lo && r < domain_hi;
}

void validate_pair(const GraphPair& pair) {
    if (!(pair.rho > 0.0)) throw ConfigError("rho must be positive");
    if (!(pair.c0 >= 0.0)) throw ConfigError("c0 must be nonnegative");
    for (const GraphSpec* g : {&pair.bulk, &pair.boundary}) {
        if (!(g->domain_lo < 0.0 && g->domain_hi > 0.0)) throw ConfigError("graph domain must contain 0 in its interior");
    }
    const auto& b = pair.bulk;
    const auto& s = pair.boundary;
    const bool lo_ok = s.domain_lo > b.domain_lo || (s.domain_lo == b.domain_lo && (b.kind == GraphKind::Obstacle || s.kind != GraphKind::Obstacle));
    const bool hi_ok = s.domain_hi < b.domain_hi || (s.domain_hi == b.domain_hi && (b.kind == GraphKind::Obstacle || s.kind != GraphKind::Obstacle));
    if (!lo_ok || !hi_ok) {
        throw ConfigError("boundary graph domain must be contained in the bulk graph domain");
    }
}

double minimal_section(const GraphSpec& g, double r) {
    if (!std::isfinite(r) || !g.in_domain(r)) {
        throw DomainError("minimal_section: " + std::to_string(r) + " outside D(beta) of " + std::string(to_string(g.kind)));
    }
    switch (g.kind) {
        case GraphKind::Polynomial: return r * r * r;
        case GraphKind::Logarithmic: return log_beta(r);
        case GraphKind::Obstacle: return 0.0;
    }
    return 0.0;
}

double graph_slope(const GraphSpec& g, double r) {
    if (!std::isfinite(r) || !g.in_domain(r)) throw DomainError("graph_slope: argument outside D(beta)");
    switch (g.kind) {
        case GraphKind::Polynomial: return 3.0 * r * r;
        case GraphKind::Logarithmic: return 2.0 / ((1.0 - r) * (1.0 + r));
        case GraphKind::Obstacle: return 0.0;
    }
    return 0.0;
}

double convex_potential(const GraphSpec& g, double r) {
    switch (g.kind) {
        case GraphKind::Polynomial: return 0.25 * r * r * r * r;
        case GraphKind::Logarithmic: {
            const double a = std::abs(r);
            if (a > 1.0) return kInf;
            if (a == 1.0) return 2.0 * std::log(2.0);
            return (1.0 + r) * std::log1p(r) + (1.0 - r) * std::log1p(-r);
        }
        case GraphKind::Obstacle: return std::abs(r) <= 1.0 ? 0.0 : kInf;
    }
    return kInf;
}

double resolvent(const GraphSpec& g, double eps, double r) { return resolvent_root(g, eps, r); }

YosidaEval yosida_eval(const GraphSpec& g, double eps, double r) {
    if (g.kind == GraphKind::Logarithmic) {
        check_args(eps, r);
        if (r == 0.0) return {0.0, 1.0 / (0.5 + eps)};
        const LogRoot lr = log_root(eps, std::abs(r));
        return {std::copysign(lr.s, r), 1.0 / (0.5 * log_gap(lr) + eps)};
    }
    const double j = resolvent_root(g, eps, r);
    switch (g.kind) {
        case GraphKind::Obstacle:
            return {(r - j) / eps, std::abs(r) > 1.0 ? 1.0 / eps : 0.0};
        case GraphKind::Polynomial: {
            const double d = 3.0 * j * j;
            return {j * j * j, d / (1.0 + eps * d)};
        }
        case GraphKind::Logarithmic: break;
    }
    return {0.0, 0.0};
}

double yosida(const GraphSpec& g, double eps, double r) { return yosida_eval(g, eps, r).value; }

double yosida_slope(const GraphSpec& g, double eps, double r) { return yosida_eval(g, eps, r).slope; }

double envelope(const GraphSpec& g, double eps, double r) {
    if (g.kind == GraphKind::Logarithmic) {
        check_args(eps, r);
        if (r == 0.0) return 0.0;
        const LogRoot lr = log_root(eps, std::abs(r));
        return 0.5 * eps * lr.s * lr.s + log_potential(lr);
    }
    const double j = resolvent_root(g, eps, r);
    if (g.kind == GraphKind::Obstacle) {
        const double d = r - j;
        return d * d / (2.0 * eps);
    }
    // r - J = eps*beta(J) exactly for single-valued graphs; avoids cancellation at small r.
    const double b = minimal_section(g, j);
    return 0.5 * eps * b * b + convex_potential(g, j);
}

double yosida_boundary(const GraphPair& pair, double eps, double r) { return yosida(pair.boundary, eps * pair.rho, r); }

double yosida_boundary_slope(const GraphPair& pair, double eps, double r) {
    return yosida_slope(pair.boundary, eps * pair.rho, r);
}

double envelope_boundary(const GraphPair& pair, double eps, double r) {
    return envelope(pair.boundary, eps * pair.rho, r);
}

namespace {

void record(CompatibilityReport& rep, double sample, double lhs, double rhs) {
    const double slack = rhs - lhs;
    ++rep.samples;
    if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_sample = sample;
    }
    if (slack < -1e-12 * std::max(1.0, lhs)) rep.pass = false;
}

}  // namespace

CompatibilityReport check_compatibility(const GraphPair& pair, double eps, std::span<const double> samples) {
    CompatibilityReport rep;
    for (double r : samples) {
        const double lhs = std::abs(yosida(pair.bulk, eps, r));
        const double rhs = pair.rho * std::abs(yosida_boundary(pair, eps, r)) + pair.c0;
        record(rep, r, lhs, rhs);
    }
    return rep;
}

CompatibilityReport check_minimal_section_bound(const GraphPair& pair, std::span<const double> samples) {
    CompatibilityReport rep;
    for (double r : samples) {
        if (!pair.boundary.in_domain(r)) continue;
        const double lhs = std::abs(minimal_section(pair.bulk, r));
        const double rhs = pair.rho * std::abs(minimal_section(pair.boundary, r)) + pair.c0;
        record(rep, r, lhs, rhs);
    }
    return rep;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

}  // namespace chbs
