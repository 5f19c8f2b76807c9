#pragma once

#include <array>
#include <string_view>

namespace chbs {

class PairSpace;
struct SchemeConfig;
struct SchemeState;

/// Per-step scalars of a run. Column order of monitors.csv follows declaration order.
struct MonitorRecord {
    double t = 0.0;
    double total_mass = 0.0;  // int u + int u_Gamma
    double energy = 0.0;
    double norm_v_V0 = 0.0;
    double norm_v_V0star = 0.0;
    double norm_mu_V = 0.0;
    double l1_xi_bulk = 0.0;
    double l1_xi_surf = 0.0;
    double envelope_integral_bulk = 0.0;
    double envelope_integral_surf = 0.0;
    double omega = 0.0;
    int newton_iters = 0;
};

inline constexpr std::array<std::string_view, 12> kMonitorColumns = {
    "t",           "total_mass",  "energy",     "norm_v_V0",
    "norm_v_V0star", "norm_mu_V", "l1_xi_bulk", "l1_xi_surf",
    "envelope_integral_bulk", "envelope_integral_surf", "omega", "newton_iters"};

/// Lyapunov functional: 1/2 a(v,v) + lumped envelopes of beta and beta_Gamma + lumped
/// antiderivatives of pi, pi_Gamma (normalised to vanish at m0).
double discrete_energy(const PairSpace& space, const SchemeConfig& config, const SchemeState& state);

MonitorRecord make_monitor(const PairSpace& space, const SchemeConfig& config, const SchemeState& state);

}  // namespace chbs
