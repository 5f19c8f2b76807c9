#include "chbs/scheme.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "chbs/errors.hpp"
#include "chbs/kernels.hpp"

namespace chbs {

namespace {

constexpr int kMaxHalvings = 5;
constexpr int kPicardFactor = 20;

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string_view to_string(Splitting s) {
    return s == Splitting::ConvexSplit ? "convex_split" : "fully_implicit";
}

void SchemeConfig::validate() const {
    if (unregularized) {
        if (eps != 0.0) throw ConfigError("eps must be 0 in the unregularized diagnostic mode");
        if (splitting != Splitting::FullyImplicit) {
            throw ConfigError("the unregularized diagnostic mode requires splitting = fully_implicit");
        }
        if (graphs.bulk.kind == GraphKind::Obstacle || graphs.boundary.kind == GraphKind::Obstacle) {
            throw ConfigError("the unregularized diagnostic mode requires single-valued graphs");
        }
    } else if (!(eps > 0.0 && eps <= 1.0)) {
        throw ConfigError("eps must lie in (0,1]");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
    if (newton_max < 1) throw ConfigError("newton_max must be at least 1");
    validate_pair(graphs);
}

FieldPair SchemeState::u() const {
    FieldPair out = v;
    out.bulk.array() += m0;
    out.boundary.array() += m0;
    return out;
}

struct Stepper::Residual {
    Vector r1;
    Vector r2;
    Vector slope;
};

Stepper::Stepper(std::shared_ptr<const PairSpace> space, SchemeConfig config)
    : space_(std::move(space)), config_(std::move(config)) {
    if (!space_) throw PreconditionError("stepper needs a space");
    config_.validate();
}

Stepper::NodeEval Stepper::eval_nodes(const Vector& u_bulk, bool with_perturbation) const {
    const DiscreteDomain& dom = space_->domain();
    const Vector u_surf = dom.trace(u_bulk);
    const double eps_b = config_.eps;
    const double eps_s = config_.eps * config_.graphs.rho;

    auto batch = [&](const GraphSpec& g, double e, const Vector& r, Vector& val, Vector& slope) {
        val.resize(r.size());
        slope.resize(r.size());
        if (config_.unregularized) {
            for (Eigen::Index i = 0; i < r.size(); ++i) {
                val[i] = minimal_section(g, r[i]);
                slope[i] = graph_slope(g, r[i]);
            }
        } else {
            kernels::active().yosida_batch(g, e, view(r), view(val), view(slope));
        }
    };

    Vector vb, sb, vs, ss;
    batch(config_.graphs.bulk, eps_b, u_bulk, vb, sb);
    batch(config_.graphs.boundary, eps_s, u_surf, vs, ss);
    if (with_perturbation) {
        const auto& pb = config_.graphs.bulk.perturbation;
        const auto& ps = config_.graphs.boundary.perturbation;
        vb += pb.slope * u_bulk;
        sb.array() += pb.derivative();
        vs += ps.slope * u_surf;
        ss.array() += ps.derivative();
    }
    NodeEval out;
    out.value = dom.M_bulk.cwiseProduct(vb) + dom.scatter(dom.M_surf.cwiseProduct(vs));
    out.slope = dom.M_bulk.cwiseProduct(sb) + dom.scatter(dom.M_surf.cwiseProduct(ss));
    return out;
}

Vector Stepper::perturbation(const Vector& u_bulk) const {
    const DiscreteDomain& dom = space_->domain();
    const Vector u_surf = dom.trace(u_bulk);
    const double sb = config_.graphs.bulk.perturbation.slope;
    const double ss = config_.graphs.boundary.perturbation.slope;
    return sb * dom.M_bulk.cwiseProduct(u_bulk) + ss * dom.scatter(dom.M_surf.cwiseProduct(u_surf));
}

FieldPair Stepper::nonlinearity(const FieldPair& u) const {
    space_->check_shape(u);
    FieldPair xi{Vector(u.bulk.size()), Vector(u.boundary.size())};
    for (Eigen::Index i = 0; i < u.bulk.size(); ++i) {
        xi.bulk[i] = config_.unregularized ? minimal_section(config_.graphs.bulk, u.bulk[i])
                                           : yosida(config_.graphs.bulk, config_.eps, u.bulk[i]);
    }
    for (Eigen::Index k = 0; k < u.boundary.size(); ++k) {
        xi.boundary[k] = config_.unregularized ? minimal_section(config_.graphs.boundary, u.boundary[k])
                                               : yosida_boundary(config_.graphs, config_.eps, u.boundary[k]);
    }
    return xi;
}

double Stepper::omega(const FieldPair& u, const FieldPair& f) const {
    FieldPair g = nonlinearity(u);
    g.bulk += config_.graphs.bulk.perturbation.slope * u.bulk - f.bulk;
    g.boundary += config_.graphs.boundary.perturbation.slope * u.boundary - f.boundary;
    return space_->mean(g);
}

SparseMatrix Stepper::chemical_block(const FieldPair& u) const {
    space_->check_shape(u);
    const bool fi = config_.splitting == Splitting::FullyImplicit;
    const Vector d = eval_nodes(u.bulk, fi).slope + (config_.eps / config_.tau) * space_->mass_V();
    SparseMatrix A = space_->stiffness_V();
    for (Eigen::Index i = 0; i < d.size(); ++i) A.coeffRef(i, i) += d[i];
    A.makeCompressed();
    return A;
}

void Stepper::residual(const Vector& v, const Vector& mu, const SchemeState& prev, const Vector& pi_lagged,
                       const Vector& forcing, Vector& r1, Vector& r2) const {
    const Vector& M = space_->mass_V();
    const SparseMatrix& K = space_->stiffness_V();
    const bool fi = config_.splitting == Splitting::FullyImplicit;
    const Vector mdv = M.cwiseProduct(v - prev.v.bulk) / config_.tau;
    r1 = mdv + K * mu;
    Vector u = v.array() + prev.m0;
    r2 = M.cwiseProduct(mu) - config_.eps * mdv - K * v - eval_nodes(u, fi).value + forcing;
    if (!fi) r2 -= pi_lagged;
}

WeakResiduals Stepper::measure(const Vector& r1, const Vector& r2) const {
    WeakResiduals w;
    w.r1 = space_->norm_V0_star(space_->project_dual(DualVector{r1}));
    w.r2 = std::sqrt(r2.cwiseAbs2().cwiseQuotient(space_->mass_V()).sum());
    return w;
}

WeakResiduals Stepper::weak_residuals(const SchemeState& prev, const SchemeState& next,
                                      const FieldPair& f_next) const {
    const bool fi = config_.splitting == Splitting::FullyImplicit;
    const Vector pi_lag = fi ? Vector::Zero(space_->size()) : perturbation(prev.u().bulk);
    Vector r1, r2;
    residual(next.v.bulk, next.mu.bulk, prev, pi_lag, space_->embed(f_next).coeffs, r1, r2);
    return measure(r1, r2);
}

SchemeState Stepper::initialize(const FieldPair& u0) const { return initialize(u0, FieldPair::zeros(space_->domain())); }

SchemeState Stepper::initialize(const FieldPair& u0, const FieldPair& f0) const {
    const DiscreteDomain& dom = space_->domain();
    space_->check_shape(u0);
    space_->check_shape(f0);
    space_->require_trace_consistent(u0, 1e-12);
    const GraphPair& gp = config_.graphs;
    for (int i = 0; i < dom.bulk_size(); ++i) {
        if (!gp.bulk.in_domain(u0.bulk[i])) {
            throw CompatibilityError("initial value " + describe(u0.bulk[i]) + " at bulk node " + std::to_string(i) +
                                     " lies outside the domain of the bulk graph (" +
                                     std::string(to_string(gp.bulk.kind)) + ")");
        }
    }
    for (int k = 0; k < dom.boundary_size(); ++k) {
        if (!gp.boundary.in_domain(u0.boundary[k])) {
            throw CompatibilityError("initial value " + describe(u0.boundary[k]) + " at boundary node " +
                                     std::to_string(k) + " (bulk node " + std::to_string(dom.boundary_chain[k]) +
                                     ") lies outside the domain of the boundary graph (" +
                                     std::string(to_string(gp.boundary.kind)) + ")");
        }
    }

    SchemeState s;
    s.m0 = space_->mean(u0);
    if (!gp.boundary.in_interior(s.m0)) {
        throw CompatibilityError("mean value " + describe(s.m0) +
                                 " of the initial data must lie in the interior of the boundary graph domain");
    }
    s.v = FieldPair::from_bulk(dom, u0.bulk.array() - s.m0);
    const Vector u = s.v.bulk.array() + s.m0;
    const Vector rhs = space_->stiffness_V() * s.v.bulk + eval_nodes(u, true).value - space_->embed(f0).coeffs;
    s.mu = FieldPair::from_bulk(dom, rhs.cwiseQuotient(space_->mass_V()));
    const FieldPair uf = s.u();
    s.xi = nonlinearity(uf);
    s.omega = omega(uf, f0);
    return s;
}

SchemeState Stepper::step(const SchemeState& state, const FieldPair& f_next) const {
    const DiscreteDomain& dom = space_->domain();
    const int N = space_->size();
    space_->check_shape(state.v);
    space_->check_shape(state.mu);
    space_->check_shape(f_next);
    const bool fi = config_.splitting == Splitting::FullyImplicit;
    const Vector forcing = space_->embed(f_next).coeffs;
    const Vector pi_lag = fi ? Vector::Zero(N) : perturbation(state.u().bulk);
    const Vector& M = space_->mass_V();
    const SparseMatrix& K = space_->stiffness_V();

    std::vector<Eigen::Triplet<double>> pattern;
    pattern.reserve(static_cast<std::size_t>(3 * N + 2 * K.nonZeros()));
    auto jacobian = [&](const Vector& d) {
        pattern.clear();
        for (int i = 0; i < N; ++i) {
            pattern.emplace_back(i, i, M[i] / config_.tau);
            pattern.emplace_back(N + i, N + i, M[i]);
            pattern.emplace_back(N + i, i, -(config_.eps * M[i] / config_.tau + d[i]));
        }
        for (int c = 0; c < K.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(K, c); it; ++it) {
                pattern.emplace_back(static_cast<int>(it.row()), N + c, it.value());
                pattern.emplace_back(N + static_cast<int>(it.row()), c, -it.value());
            }
        }
        SparseMatrix J(2 * N, 2 * N);
        J.setFromTriplets(pattern.begin(), pattern.end());
        J.makeCompressed();
        return J;
    };

    Eigen::SparseLU<SparseMatrix> lu;
    bool analyzed = false;
    auto newton_direction = [&](const Vector& d, const Vector& r1, const Vector& r2) {
        const SparseMatrix J = jacobian(d);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw NumericalError("step Jacobian factorization failed");
        Vector rhs(2 * N);
        rhs << -r1, -r2;
        Vector dx = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !dx.allFinite()) throw NumericalError("step Jacobian solve failed");
        return dx;
    };

    Vector v = state.v.bulk;
    Vector mu = state.mu.bulk;
    auto evaluate = [&](const Vector& vv, const Vector& mm, Residual& res) {
        residual(vv, mm, state, pi_lag, forcing, res.r1, res.r2);
        res.slope = eval_nodes(vv.array() + state.m0, fi).slope;
        const WeakResiduals w = measure(res.r1, res.r2);
        return std::max(w.r1, w.r2);
    };

    Residual res;
    double merit = evaluate(v, mu, res);
    const double target = config_.newton_tol;

    Vector picard_diag;
    int iters = 0;
    int picard_iters = 0;
    bool picard = false;
    while (!(merit <= target)) {
        if (!std::isfinite(merit)) throw StepError("nonfinite residual in step", merit);
        if (picard) {
            if (picard_iters >= kPicardFactor * config_.newton_max) {
                throw StepError("fixed-point fallback did not converge, residual " + describe(merit), merit);
            }
            ++picard_iters;
            ++iters;
            const Vector dx = newton_direction(picard_diag, res.r1, res.r2);
            v += dx.head(N);
            mu += dx.tail(N);
            merit = evaluate(v, mu, res);
            continue;
        }
        if (iters >= config_.newton_max) {
            throw StepError("Newton did not converge in " + std::to_string(config_.newton_max) +
                                " iterations, residual " + describe(merit),
                            merit);
        }
        ++iters;
        const Vector dx = newton_direction(res.slope, res.r1, res.r2);
        double alpha = 1.0;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h) {
            const Vector vt = v + alpha * dx.head(N);
            const Vector mt = mu + alpha * dx.tail(N);
            Residual trial;
            double m = std::numeric_limits<double>::infinity();
            try {
                m = evaluate(vt, mt, trial);
            } catch (const DomainError&) {
            }
            if (m < (1.0 - 1e-4 * alpha) * merit || m <= target) {
                v = vt;
                mu = mt;
                res = std::move(trial);
                merit = m;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            picard = true;
            if (config_.unregularized) {
                picard_diag = res.slope;
            } else {
                const double eps_b = config_.eps;
                const double eps_s = config_.eps * config_.graphs.rho;
                picard_diag = dom.M_bulk / eps_b + dom.scatter(dom.M_surf / eps_s);
                if (fi) {
                    picard_diag += config_.graphs.bulk.perturbation.lipschitz() * dom.M_bulk +
                                   config_.graphs.boundary.perturbation.lipschitz() * dom.scatter(dom.M_surf);
                }
            }
        }
    }

    SchemeState next;
    next.m0 = state.m0;
    next.v = FieldPair::from_bulk(dom, std::move(v));
    next.mu = FieldPair::from_bulk(dom, std::move(mu));
    next.step_index = state.step_index + 1;
    next.t = next.step_index * config_.tau;
    next.newton_iters = iters;
    const FieldPair u = next.u();
    next.xi = nonlinearity(u);
    next.omega = omega(u, f_next);
    return next;
}

int step_count(double t_end, double tau) {
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (!(t_end > 0.0)) return 0;
    const double q = t_end / tau;
    const double r = std::round(q);
    return static_cast<int>(std::abs(q - r) <= 1e-9 * std::max(1.0, q) ? r : std::ceil(q));
}

RunResult run(const Stepper& stepper, const FieldPair& u0, const Forcing& forcing) {
    const SchemeConfig& cfg = stepper.config();
    RunResult out;
    out.eps = cfg.eps;
    out.tau = cfg.tau;
    FieldPair f = forcing(0.0);
    SchemeState s = stepper.initialize(u0, f);
    out.monitors.push_back(make_monitor(stepper.space(), cfg, s));
    out.states.push_back(s);
    out.forcing.push_back(std::move(f));
    const int steps = step_count(cfg.t_end, cfg.tau);
    for (int n = 1; n <= steps; ++n) {
        FieldPair fn = forcing(n * cfg.tau);
        SchemeState next;
        try {
            next = stepper.step(s, fn);
        } catch (const StepError& e) {
            out.failed = true;
            out.failure = "step " + std::to_string(n) + ": " + e.what();
            break;
        } catch (const NumericalError& e) {
            out.failed = true;
            out.failure = "step " + std::to_string(n) + ": " + e.what();
            break;
        }
        out.residuals.push_back(stepper.weak_residuals(s, next, fn));
        out.monitors.push_back(make_monitor(stepper.space(), cfg, next));
        out.states.push_back(next);
        out.forcing.push_back(std::move(fn));
        s = std::move(next);
    }
    return out;
}

}  // namespace chbs
