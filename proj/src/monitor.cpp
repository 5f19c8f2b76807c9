#include "chbs/monitor.hpp"

#include <cmath>

#include "chbs/kernels.hpp"
#include "chbs/scheme.hpp"

namespace chbs {

namespace {

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

struct Envelopes {
    Vector bulk;
    Vector surf;
};

Envelopes envelopes(const SchemeConfig& cfg, const FieldPair& u) {
    Envelopes e{Vector(u.bulk.size()), Vector(u.boundary.size())};
    for (Eigen::Index i = 0; i < u.bulk.size(); ++i) {
        e.bulk[i] = cfg.unregularized ? convex_potential(cfg.graphs.bulk, u.bulk[i])
                                      : envelope(cfg.graphs.bulk, cfg.eps, u.bulk[i]);
    }
    for (Eigen::Index k = 0; k < u.boundary.size(); ++k) {
        e.surf[k] = cfg.unregularized ? convex_potential(cfg.graphs.boundary, u.boundary[k])
                                      : envelope_boundary(cfg.graphs, cfg.eps, u.boundary[k]);
    }
    return e;
}

double energy_from(const PairSpace& space, const SchemeConfig& cfg, const SchemeState& s, const Envelopes& env) {
    const DiscreteDomain& dom = space.domain();
    const auto& k = kernels::active();
    const FieldPair u = s.u();
    Vector pb(u.bulk.size()), ps(u.boundary.size());
    for (Eigen::Index i = 0; i < pb.size(); ++i) pb[i] = cfg.graphs.bulk.perturbation.antiderivative(u.bulk[i], s.m0);
    for (Eigen::Index i = 0; i < ps.size(); ++i) {
        ps[i] = cfg.graphs.boundary.perturbation.antiderivative(u.boundary[i], s.m0);
    }
    return 0.5 * space.form_a(s.v, s.v) + k.weighted_sum(view(dom.M_bulk), view(env.bulk)) +
           k.weighted_sum(view(dom.M_surf), view(env.surf)) + k.weighted_sum(view(dom.M_bulk), view(pb)) +
           k.weighted_sum(view(dom.M_surf), view(ps));
}

}  // namespace

double discrete_energy(const PairSpace& space, const SchemeConfig& config, const SchemeState& state) {
    return energy_from(space, config, state, envelopes(config, state.u()));
}

MonitorRecord make_monitor(const PairSpace& space, const SchemeConfig& config, const SchemeState& state) {
    const DiscreteDomain& dom = space.domain();
    const auto& k = kernels::active();
    const FieldPair u = state.u();
    const Envelopes env = envelopes(config, u);

    MonitorRecord m;
    m.t = state.t;
    m.total_mass = integrate_bulk(dom, u.bulk) + integrate_surf(dom, u.boundary);
    m.energy = energy_from(space, config, state, env);
    m.norm_v_V0 = space.norm_V0(state.v);
    m.norm_v_V0star = space.norm_V0_star(space.project_dual(space.embed(state.v)));
    m.norm_mu_V = std::sqrt(std::max(0.0, space.inner_V(state.mu, state.mu)));
    m.l1_xi_bulk = k.weighted_abs_sum(view(dom.M_bulk), view(state.xi.bulk));
    m.l1_xi_surf = k.weighted_abs_sum(view(dom.M_surf), view(state.xi.boundary));
    m.envelope_integral_bulk = k.weighted_sum(view(dom.M_bulk), view(env.bulk));
    m.envelope_integral_surf = k.weighted_sum(view(dom.M_surf), view(env.surf));
    m.omega = state.omega;
    m.newton_iters = state.newton_iters;
    return m;
}

}  // namespace chbs
