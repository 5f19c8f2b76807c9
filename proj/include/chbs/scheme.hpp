#pragma once

// Backward-Euler discretisation of the eps-regularised evolution.
//
// Unknowns per step are the bulk nodal values of v^{n+1} and mu^{n+1} (both
// V-pairs). With M = M_V (diagonal) and K = K_V the step solves
//
//   M (v - v^n)/tau + K mu                                   = 0
//   M mu - eps M (v - v^n)/tau - K v - B_eps(u) - Pi(u*) + F  = 0
//
// where u = v + m0, B_eps(u) = M_bulk beta_eps(u) + T^T M_surf beta_Gamma,eps(u_Gamma)
// nodewise, Pi likewise with pi, and F = M_bulk f + T^T M_surf f_Gamma at t_{n+1}.
// u* = u^n (convex split) or u (fully implicit). Testing the first row with the
// constant pair shows that the combined mean of v is preserved exactly.

#include <memory>
#include <string>
#include <vector>

#include "chbs/forcing.hpp"
#include "chbs/monitor.hpp"
#include "chbs/monotone.hpp"
#include "chbs/spaces.hpp"

namespace chbs {

enum class Splitting { ConvexSplit, FullyImplicit };

std::string_view to_string(Splitting s);

struct SchemeConfig {
    double eps = 0.01;
    double tau = 1e-3;
    double t_end = 0.5;
    GraphPair graphs{};
    double newton_tol = 1e-10;
    int newton_max = 50;
    Splitting splitting = Splitting::ConvexSplit;
    /// eps = 0 diagnostic: beta itself instead of beta_eps and no eps v' term.
    /// Only with FullyImplicit and single-valued graphs.
    bool unregularized = false;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct SchemeState {
    FieldPair v;      // zero-mean V-pair, u = v + m0
    FieldPair mu;     // V-pair
    FieldPair xi;     // H-pair (beta_eps(u), beta_Gamma,eps(u_Gamma))
    double omega = 0.0;
    double t = 0.0;
    int step_index = 0;
    double m0 = 0.0;
    int newton_iters = 0;

    FieldPair u() const;
};

struct WeakResiduals {
    double r1 = 0.0;  // V0* norm of the mass-balance residual
    double r2 = 0.0;  // H norm of the chemical-potential residual
};

class Stepper {
public:
    Stepper(std::shared_ptr<const PairSpace> space, SchemeConfig config);

    const SchemeConfig& config() const { return config_; }
    const PairSpace& space() const { return *space_; }

    /// v = u0 - m(u0) 1; mu, xi, omega from a zero time derivative.
    SchemeState initialize(const FieldPair& u0, const FieldPair& f0) const;
    SchemeState initialize(const FieldPair& u0) const;

    /// Advances by tau with forcing sampled at t + tau. Throws StepError on non-convergence.
    SchemeState step(const SchemeState& state, const FieldPair& f_next) const;

    WeakResiduals weak_residuals(const SchemeState& prev, const SchemeState& next, const FieldPair& f_next) const;

    /// Nodewise (beta_eps(u), beta_Gamma,eps(u_Gamma)) of a V-pair u.
    FieldPair nonlinearity(const FieldPair& u) const;

    /// K + eps M/tau + D(u), the block multiplying v in the linearised chemical-potential row.
    SparseMatrix chemical_block(const FieldPair& u) const;

    /// m(beta_eps(u) + pi(u) - f)
    double omega(const FieldPair& u, const FieldPair& f) const;

private:
    struct Residual;
    struct NodeEval {
        Vector value;  // B_eps(u) (+ Pi(u) when fully implicit) as dual coefficients
        Vector slope;
    };

    NodeEval eval_nodes(const Vector& u_bulk, bool with_perturbation) const;
    Vector perturbation(const Vector& u_bulk) const;
    void residual(const Vector& v, const Vector& mu, const SchemeState& prev, const Vector& pi_lagged,
                  const Vector& forcing, Vector& r1, Vector& r2) const;
    WeakResiduals measure(const Vector& r1, const Vector& r2) const;

    std::shared_ptr<const PairSpace> space_;
    SchemeConfig config_;
};

struct RunResult {
    std::vector<SchemeState> states;    // index n <-> t_n = n tau
    std::vector<FieldPair> forcing;     // forcing sampled at t_n
    std::vector<MonitorRecord> monitors;
    std::vector<WeakResiduals> residuals;  // residuals[n-1] belongs to step n-1 -> n
    bool failed = false;
    std::string failure;
    double eps = 0.0;
    double tau = 0.0;
};

/// Number of steps to reach t_end with a fixed step tau.
int step_count(double t_end, double tau);

/// Steps from initialize(u0) until t_end. A failing step stops the run with a partial trajectory flagged.
RunResult run(const Stepper& stepper, const FieldPair& u0, const Forcing& forcing);

}  // namespace chbs
