#pragma once

// Scalar maximal monotone graph calculus: resolvents, Yosida approximations and
// Moreau-Yosida envelopes of the three prototype graphs.
//
// All functions are pure; they can be called concurrently.

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chbs {

enum class GraphKind {
    Polynomial,   // beta(r) = r^3 on R
    Logarithmic,  // beta(r) = ln((1+r)/(1-r)) on (-1,1)
    Obstacle,     // beta = subdifferential of the indicator of [-1,1]
};

std::string_view to_string(GraphKind kind);
GraphKind graph_kind_from_string(std::string_view name);

/// Lipschitz perturbation pi(r) = slope * r. The prototypes use slope -1
/// (quartic, obstacle) and -2c (logarithmic).
struct LinearPerturbation {
    double slope = -1.0;

    double value(double r) const { return slope * r; }
    double derivative() const { return slope; }
    double lipschitz() const { return slope < 0 ? -slope : slope; }
    /// Antiderivative normalised to vanish at `anchor`.
    double antiderivative(double r, double anchor) const { return 0.5 * slope * (r * r - anchor * anchor); }
};

struct GraphSpec {
    GraphKind kind = GraphKind::Polynomial;
    double domain_lo = -std::numeric_limits<double>::infinity();
    double domain_hi = std::numeric_limits<double>::infinity();
    LinearPerturbation perturbation{};

    static GraphSpec polynomial(double pi_slope = -1.0);
    static GraphSpec logarithmic(double pi_slope = -2.0);
    static GraphSpec obstacle(double pi_slope = -1.0);
    static GraphSpec of_kind(GraphKind kind, double pi_slope);

    /// Closed domains include their endpoints (obstacle); open ones do not.
    bool in_domain(double r) const;
    bool in_interior(double r) const { return r > domain_lo && r < domain_hi; }
};

/// Bulk and boundary graphs plus the compatibility constants rho and c0.
struct GraphPair {
    GraphSpec bulk = GraphSpec::polynomial();
    GraphSpec boundary = GraphSpec::polynomial();
    double rho = 1.0;
    double c0 = 0.0;
};

/// Throws ConfigError unless rho > 0, c0 >= 0 and D(beta_Gamma) is contained in D(beta).
void validate_pair(const GraphPair& pair);

// ---------------------------------------------------------------------------
// Graph evaluation on D(beta)

/// Minimal section beta°(r). Throws DomainError outside D(beta).
double minimal_section(const GraphSpec& g, double r);

/// Derivative of the single-valued part; 0 for the obstacle interior.
double graph_slope(const GraphSpec& g, double r);

/// Convex potential beta^ with beta^(0) = 0; +inf outside D(beta).
double convex_potential(const GraphSpec& g, double r);

// ---------------------------------------------------------------------------
// Regularisation

/// J_eps(r) = (I + eps beta)^{-1}(r).
double resolvent(const GraphSpec& g, double eps, double r);

/// beta_eps(r) = (r - J_eps(r)) / eps.
double yosida(const GraphSpec& g, double eps, double r);

/// d beta_eps / dr = beta'(J) / (1 + eps beta'(J)); the obstacle uses the
/// generalized derivative {0, 1/eps} (0 on the closed set [-1,1]).
double yosida_slope(const GraphSpec& g, double eps, double r);

/// Moreau-Yosida envelope beta^_eps(r).
double envelope(const GraphSpec& g, double eps, double r);

/// Boundary regularisation: parameter eps*rho instead of eps.
double yosida_boundary(const GraphPair& pair, double eps, double r);
double yosida_boundary_slope(const GraphPair& pair, double eps, double r);
double envelope_boundary(const GraphPair& pair, double eps, double r);

/// Value and slope computed from one resolvent evaluation.
struct YosidaEval {
    double value;
    double slope;
};
YosidaEval yosida_eval(const GraphSpec& g, double eps, double r);

// ---------------------------------------------------------------------------

struct CompatibilityReport {
    bool pass = true;
    /// min over samples of rho*|beta_Gamma,eps(r)| + c0 - |beta_eps(r)|; +inf when empty.
    double worst_slack = std::numeric_limits<double>::infinity();
    double worst_sample = 0.0;
    std::size_t samples = 0;
};

/// Checks |beta_eps(r)| <= rho |beta_Gamma,eps(r)| + c0 at every sample.
CompatibilityReport check_compatibility(const GraphPair& pair, double eps, std::span<const double> samples);

/// Checks the unregularised bound |beta°(r)| <= rho |beta_Gamma°(r)| + c0 on samples in D(beta_Gamma).
CompatibilityReport check_minimal_section_bound(const GraphPair& pair, std::span<const double> samples);

/// Evenly spaced samples of [lo, hi] (inclusive).
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace chbs
