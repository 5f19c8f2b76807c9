#pragma once

// Experiment harness: continuous dependence on data, vanishing-eps Cauchy
// study, eps-uniform bound tables and the functional-analytic identities of
// the discrete spaces. Time integrals are replaced by right-endpoint sums
// (sum_n tau |.|^2)^{1/2} and sup norms by maxima over time levels.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "chbs/scheme.hpp"

namespace chbs {

/// Upper bound on concurrent member runs: CHBS_THREADS if set (>= 1), else the hardware concurrency.
int fanout_threads();

/// Calls job(i) for i in [0, count) on up to fanout_threads() threads. The first exception by index is rethrown.
void fan_out(std::size_t count, const std::function<void(std::size_t)>& job);

struct ProblemData {
    FieldPair u0;
    Forcing forcing;
};

// ---------------------------------------------------------------------------
// Continuous dependence

/// LHS(t_n) = |dv_n|^2_{V0*} + sum_{s<=n} tau |dv_s|^2_{V0},
/// RHS(t_n) = |dv_0|^2_{V0*} + sum_{s<=n} tau |df_s|^2_{V*}; ratio = max_n LHS / max(RHS, floor).
struct DependenceLevel {
    double tau = 0.0;
    double sup_ratio = 0.0;
    double t_at_sup = 0.0;
    double max_lhs = 0.0;
    double max_rhs = 0.0;
    bool failed = false;
    std::string failure;
};

struct DependenceReport {
    std::vector<DependenceLevel> levels;  // tau, tau/2, tau/4, ...
    bool degenerate = false;              // identical data: LHS identically zero
    double tau_variation = 0.0;           // max/min - 1 of the level ratios
    double tau_variation_limit = 0.3;
    bool pass = false;
};

inline constexpr double kRatioFloor = 1e-30;

/// Single-tau comparison of two runs that share the mean value m0.
DependenceLevel dependence_ratio(const PairSpace& space, const RunResult& run1, const RunResult& run2);

/// Runs both data sets at tau / 2^k for k < levels. Throws PreconditionError when the two means differ by > 1e-12.
DependenceReport continuous_dependence_experiment(std::shared_ptr<const PairSpace> space, const SchemeConfig& config,
                                                  const ProblemData& data1, const ProblemData& data2, int levels = 3);

struct ScaleSweepReport {
    std::vector<double> scales;
    std::vector<double> ratios;
    double variation = 0.0;  // (max - min) / min
    double limit = 0.2;
    bool pass = false;
};

/// f2 = f + s g for each scale s, same u0; compares the single-tau sup-ratios.
ScaleSweepReport forcing_scale_sweep(std::shared_ptr<const PairSpace> space, const SchemeConfig& config,
                                     const FieldPair& u0, const Forcing& f, const Forcing& g,
                                     const std::vector<double>& scales);

// ---------------------------------------------------------------------------
// eps-uniform bounds

struct AprioriTable {
    std::vector<std::string> columns;
    std::vector<double> eps;                 // one row per run
    std::vector<std::vector<double>> rows;
    std::vector<double> column_ratio;        // max/min per column (1 when all zero, inf when min is 0 < max)
    double ratio_limit = 10.0;
    bool pass = false;
};

/// Columns: sqrt(eps) max|v|_H, max|v|_{V0*}, L2(V0) of v, L1 of xi (bulk, surf) summed in time, L2(H) of xi,
/// max envelope integral, L2 of omega, L2(V) of mu, L2(V0*) of the difference quotient.
AprioriTable apriori_bound_table(const PairSpace& space, const std::vector<RunResult>& runs);

struct EpsStudyReport {
    std::vector<double> eps;
    std::vector<double> d_max_H0;   // d_k between eps_k and eps_{k+1}
    std::vector<double> d_l2_V0;
    bool cauchy_pass = false;       // d_{k+1} <= 1.1 d_k
    double l2_v_V0_slope = 0.0;     // least-squares slope of log |v|_{L2(V0)} against log eps
    bool slope_pass = false;        // |slope| <= 0.1
    AprioriTable table;
    bool failed = false;            // some member run stopped early
    std::string failure;
    bool pass = false;
};

/// eps_list must be nonincreasing in (0,1] with at least 3 entries.
EpsStudyReport vanishing_eps_study(std::shared_ptr<const PairSpace> space, const SchemeConfig& base,
                                   const std::vector<double>& eps_list, const ProblemData& data);

// ---------------------------------------------------------------------------
// Discrete functional-analytic checks

struct CheckItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct AppendixReport {
    std::vector<CheckItem> items;
    bool pass = false;
};

/// Poincare constant positivity and sampled inequality, adjointness of the subgradient, projection identity,
/// constants in the kernel of the stiffness, and the F roundtrip.
AppendixReport appendix_checks(std::shared_ptr<const DiscreteDomain> dom, int samples = 1000,
                               std::uint64_t seed = 20240607);

/// max over smooth zero-mean probes of (|z|_H0 - delta |z|_V0) / |z|_V0*, cosine modes up to `modes` per direction.
double interpolation_constant(const PairSpace& space, double delta, int modes = 4);

// ---------------------------------------------------------------------------
// Single runs

struct RunSummary {
    int steps_done = 0;
    int steps_planned = 0;
    bool completed = false;
    std::string failure;
    double mass_drift = 0.0;           // max_n |m(u_n) - m0|
    double max_r1 = 0.0;
    double max_r2 = 0.0;
    double residual_limit = 0.0;       // 10 newton_tol
    double max_energy_increase = 0.0;  // max_n E_{n+1} - E_n (negative when strictly decreasing)
    bool energy_applicable = false;    // convex split with zero forcing
    bool mass_pass = false;
    bool residual_pass = false;
    bool energy_pass = false;
    bool pass = false;
};

inline constexpr double kMassDriftLimit = 1e-9;
inline constexpr double kEnergySlack = 1e-10;

RunSummary summarize(const PairSpace& space, const SchemeConfig& config, const RunResult& result, bool zero_forcing);

// ---------------------------------------------------------------------------
// Serialisation

std::string report_text(const DependenceReport& r);
std::string report_csv(const DependenceReport& r);
std::string report_text(const EpsStudyReport& r);
std::string report_csv(const EpsStudyReport& r);
std::string report_text(const AppendixReport& r);
std::string report_csv(const AppendixReport& r);
std::string report_text(const RunSummary& r);
std::string report_csv(const RunSummary& r);
/// Header row then one row per `stride` records; the last record is always written.
std::string monitors_csv(const std::vector<MonitorRecord>& monitors, int stride = 1);
std::string snapshot_csv(const DiscreteDomain& dom, const SchemeState& state);

}  // namespace chbs
