#include "chbs/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "chbs/errors.hpp"
#include "chbs/io.hpp"

namespace chbs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_H(const PairSpace& space, const FieldPair& z) { return std::sqrt(std::max(0.0, space.inner_H(z, z))); }

double norm_V0_star_of(const PairSpace& space, const FieldPair& z) {
    return space.norm_V0_star(space.project_dual(space.embed(z)));
}

FieldPair random_zero_mean(const PairSpace& space, std::uint64_t seed, std::uint64_t sample) {
    const DiscreteDomain& dom = space.domain();
    const auto N = static_cast<std::uint64_t>(dom.bulk_size());
    Vector b(dom.bulk_size());
    for (std::uint64_t i = 0; i < N; ++i) b[static_cast<int>(i)] = counter_uniform(seed, sample * N + i);
    return space.project_zero_mean(FieldPair::from_bulk(dom, std::move(b)));
}

std::string yes_no(bool pass) { return pass ? "PASS" : "FAIL"; }

double spread(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi == 0.0) return 0.0;
    if (*lo <= 0.0) return kInf;
    return *hi / *lo - 1.0;
}

}  // namespace

int fanout_threads() {
    if (const char* env = std::getenv("CHBS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void fan_out(std::size_t count, const std::function<void(std::size_t)>& job) {
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(fanout_threads()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------------------

DependenceLevel dependence_ratio(const PairSpace& space, const RunResult& run1, const RunResult& run2) {
    DependenceLevel level;
    level.tau = run1.tau;
    if (run1.failed || run2.failed) {
        level.failed = true;
        level.failure = run1.failed ? run1.failure : run2.failure;
    }
    const std::size_t n_levels = std::min(run1.states.size(), run2.states.size());
    if (n_levels == 0) return level;
    const double tau = run1.tau;

    const double rhs0 = std::pow(norm_V0_star_of(space, run1.states[0].v - run2.states[0].v), 2);
    double lhs_sum = 0.0;
    double rhs_sum = 0.0;
    for (std::size_t n = 0; n < n_levels; ++n) {
        const FieldPair dv = run1.states[n].v - run2.states[n].v;
        if (n > 0) {
            lhs_sum += tau * std::pow(space.norm_V0(dv), 2);
            rhs_sum += tau * std::pow(space.norm_V_star(space.embed(run1.forcing[n] - run2.forcing[n])), 2);
        }
        const double lhs = std::pow(norm_V0_star_of(space, dv), 2) + lhs_sum;
        const double rhs = rhs0 + rhs_sum;
        const double ratio = lhs / std::max(rhs, kRatioFloor);
        level.max_lhs = std::max(level.max_lhs, lhs);
        level.max_rhs = std::max(level.max_rhs, rhs);
        if (ratio > level.sup_ratio) {
            level.sup_ratio = ratio;
            level.t_at_sup = run1.states[n].t;
        }
    }
    return level;
}

DependenceReport continuous_dependence_experiment(std::shared_ptr<const PairSpace> space, const SchemeConfig& config,
                                                  const ProblemData& data1, const ProblemData& data2, int levels) {
    if (levels < 1) throw PreconditionError("continuous dependence: need at least one tau level");
    const double m1 = space->mean(data1.u0);
    const double m2 = space->mean(data2.u0);
    if (std::abs(m1 - m2) > 1e-12) {
        throw PreconditionError("continuous dependence: the two initial data must share the mean value (" +
                                format_double(m1) + " vs " + format_double(m2) + ")");
    }
    std::vector<RunResult> runs(2 * static_cast<std::size_t>(levels));
    fan_out(runs.size(), [&](std::size_t j) {
        SchemeConfig cfg = config;
        cfg.tau = config.tau / std::pow(2.0, static_cast<double>(j / 2));
        const Stepper stepper(space, cfg);
        const ProblemData& d = (j % 2 == 0) ? data1 : data2;
        runs[j] = run(stepper, d.u0, d.forcing);
    });

    DependenceReport report;
    bool all_zero = true;
    std::vector<double> ratios;
    bool any_failed = false;
    for (int k = 0; k < levels; ++k) {
        DependenceLevel level = dependence_ratio(*space, runs[2 * k], runs[2 * k + 1]);
        all_zero = all_zero && level.max_lhs == 0.0;
        any_failed = any_failed || level.failed;
        ratios.push_back(level.sup_ratio);
        report.levels.push_back(std::move(level));
    }
    report.degenerate = all_zero;
    report.tau_variation = spread(ratios);
    report.pass = !any_failed && (report.degenerate || report.tau_variation < report.tau_variation_limit);
    return report;
}

ScaleSweepReport forcing_scale_sweep(std::shared_ptr<const PairSpace> space, const SchemeConfig& config,
                                     const FieldPair& u0, const Forcing& f, const Forcing& g,
                                     const std::vector<double>& scales) {
    std::vector<RunResult> runs(scales.size() + 1);
    const Stepper stepper(space, config);
    fan_out(runs.size(), [&](std::size_t j) {
        runs[j] = j == 0 ? run(stepper, u0, f) : run(stepper, u0, combine(f, scales[j - 1], g));
    });
    ScaleSweepReport report;
    report.scales = scales;
    bool failed = false;
    for (std::size_t j = 1; j < runs.size(); ++j) {
        const DependenceLevel level = dependence_ratio(*space, runs[0], runs[j]);
        failed = failed || level.failed;
        report.ratios.push_back(level.sup_ratio);
    }
    if (!report.ratios.empty()) {
        const auto [lo, hi] = std::minmax_element(report.ratios.begin(), report.ratios.end());
        report.variation = *lo > 0.0 ? (*hi - *lo) / *lo : (*hi > 0.0 ? kInf : 0.0);
    }
    report.pass = !failed && report.variation < report.limit;
    return report;
}

// ---------------------------------------------------------------------------

AprioriTable apriori_bound_table(const PairSpace& space, const std::vector<RunResult>& runs) {
    AprioriTable table;
    table.columns = {"sqrt_eps_max_v_H",  "max_v_V0star",  "l2_v_V0",  "l1_xi_bulk", "l1_xi_surf",
                     "l2_xi_H",           "max_envelope",  "l2_omega", "l2_mu_V",    "l2_dq_V0star"};
    for (const RunResult& r : runs) {
        const double tau = r.tau;
        double max_v_H = 0, max_v_star = 0, v_V0 = 0, xi_b = 0, xi_s = 0, xi_H = 0, env = 0, om = 0, mu_V = 0, dq = 0;
        for (std::size_t n = 0; n < r.states.size(); ++n) {
            const SchemeState& s = r.states[n];
            const MonitorRecord& m = r.monitors[n];
            max_v_H = std::max(max_v_H, norm_H(space, s.v));
            max_v_star = std::max(max_v_star, m.norm_v_V0star);
            env = std::max(env, m.envelope_integral_bulk + m.envelope_integral_surf);
            if (n == 0) continue;
            v_V0 += tau * m.norm_v_V0 * m.norm_v_V0;
            xi_b += tau * m.l1_xi_bulk;
            xi_s += tau * m.l1_xi_surf;
            xi_H += tau * space.inner_H(s.xi, s.xi);
            om += tau * m.omega * m.omega;
            mu_V += tau * m.norm_mu_V * m.norm_mu_V;
            const FieldPair q = (1.0 / tau) * (s.v - r.states[n - 1].v);
            dq += tau * std::pow(norm_V0_star_of(space, q), 2);
        }
        table.eps.push_back(r.eps);
        table.rows.push_back({std::sqrt(r.eps) * max_v_H, max_v_star, std::sqrt(v_V0), xi_b, xi_s, std::sqrt(xi_H), env,
                              std::sqrt(om), std::sqrt(mu_V), std::sqrt(dq)});
    }
    table.pass = !table.rows.empty();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        std::vector<double> col;
        for (const auto& row : table.rows) col.push_back(row[c]);
        const double ratio = col.empty() ? 1.0 : 1.0 + spread(col);
        table.column_ratio.push_back(ratio);
        table.pass = table.pass && ratio <= table.ratio_limit;
    }
    return table;
}

EpsStudyReport vanishing_eps_study(std::shared_ptr<const PairSpace> space, const SchemeConfig& base,
                                   const std::vector<double>& eps_list, const ProblemData& data) {
    if (eps_list.size() < 3) throw ConfigError("eps_list needs at least 3 entries");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0 && eps_list[k] <= 1.0)) throw ConfigError("eps must lie in (0,1]");
        if (k > 0 && eps_list[k] > eps_list[k - 1]) throw ConfigError("eps_list must be nonincreasing");
    }
    std::vector<RunResult> runs(eps_list.size());
    fan_out(runs.size(), [&](std::size_t k) {
        SchemeConfig cfg = base;
        cfg.eps = eps_list[k];
        const Stepper stepper(space, cfg);
        runs[k] = run(stepper, data.u0, data.forcing);
    });

    EpsStudyReport report;
    report.eps = eps_list;
    for (const auto& r : runs) {
        if (r.failed && !report.failed) {
            report.failed = true;
            report.failure = "eps=" + format_double(r.eps) + " " + r.failure;
        }
    }
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        const auto& a = runs[k].states;
        const auto& b = runs[k + 1].states;
        const std::size_t n = std::min(a.size(), b.size());
        double dmax = 0.0, dl2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const FieldPair d = a[i].v - b[i].v;
            dmax = std::max(dmax, norm_H(*space, d));
            if (i > 0) dl2 += base.tau * std::pow(space->norm_V0(d), 2);
        }
        report.d_max_H0.push_back(dmax);
        report.d_l2_V0.push_back(std::sqrt(dl2));
    }
    report.cauchy_pass = true;
    for (std::size_t k = 0; k + 1 < report.d_max_H0.size(); ++k) {
        if (report.d_max_H0[k + 1] > 1.1 * report.d_max_H0[k] + 1e-14) report.cauchy_pass = false;
    }

    report.table = apriori_bound_table(*space, runs);

    // least squares of log |v|_{L2(V0)} on log eps, centred
    const std::size_t col = 2;
    const std::size_t m = runs.size();
    std::vector<double> xs(m), ys(m);
    bool positive = true;
    for (std::size_t k = 0; k < m; ++k) {
        const double y = report.table.rows[k][col];
        if (!(y > 0.0)) positive = false;
        xs[k] = std::log(eps_list[k]);
        ys[k] = y > 0.0 ? std::log(y) : 0.0;
    }
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m);
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(m);
    double var = 0, cov = 0;
    for (std::size_t k = 0; k < m; ++k) {
        var += (xs[k] - xbar) * (xs[k] - xbar);
        cov += (xs[k] - xbar) * (ys[k] - ybar);
    }
    report.l2_v_V0_slope = (positive && var > 0.0) ? cov / var : 0.0;
    report.slope_pass = std::abs(report.l2_v_V0_slope) <= 0.1;
    report.pass = !report.failed && report.cauchy_pass && report.table.pass;
    return report;
}

// ---------------------------------------------------------------------------

AppendixReport appendix_checks(std::shared_ptr<const DiscreteDomain> dom, int samples, std::uint64_t seed) {
    AppendixReport report;
    const auto space = std::make_shared<const PairSpace>(dom);
    auto item = [&](const std::string& name, const std::function<CheckItem()>& body) {
        CheckItem it;
        try {
            it = body();
        } catch (const std::exception& e) {
            it.pass = false;
            it.detail = e.what();
        }
        it.name = name;
        report.items.push_back(std::move(it));
    };

    double cp = 0.0;
    item("poincare_constant_positive", [&] {
        cp = poincare_constant(*space);
        return CheckItem{"", cp > 0.0 && cp <= 1.0, cp, "c_p in (0,1]"};
    });
    item("poincare_inequality", [&] {
        double worst = kInf;
        for (int s = 0; s < samples; ++s) {
            const FieldPair z = random_zero_mean(*space, seed, static_cast<std::uint64_t>(s));
            worst = std::min(worst, space->form_a(z, z) - cp * space->inner_V(z, z));
        }
        return CheckItem{"", cp > 0.0 && worst >= -1e-9, worst, "min of a(z,z) - c_p |z|_V^2"};
    });
    item("subgradient_adjointness", [&] {
        double worst = 0.0;
        const int pairs = std::max(1, samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FieldPair z = random_zero_mean(*space, seed + 1, 2 * static_cast<std::uint64_t>(s));
            const FieldPair w = random_zero_mean(*space, seed + 1, 2 * static_cast<std::uint64_t>(s) + 1);
            const double lhs = space->inner_H(space->subgrad_phi(z), w);
            const double rhs = space->form_a(z, w);
            const double scale = std::max(1.0, space->norm_V0(z) * space->norm_V0(w));
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        return CheckItem{"", worst <= 1e-10, worst, "max |(d phi z, w)_H - a(z,w)| relative to |z|_V0 |w|_V0"};
    });
    item("projection_identity", [&] {
        double worst = 0.0;
        const int pairs = std::max(1, samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FieldPair z = random_zero_mean(*space, seed + 2, static_cast<std::uint64_t>(s));
            FieldPair w = random_zero_mean(*space, seed + 3, static_cast<std::uint64_t>(s));
            w.bulk.array() += 0.7;
            w.boundary.array() -= 0.3;
            const double diff = space->inner_H(z, space->project_zero_mean(w)) - space->inner_H(z, w);
            worst = std::max(worst, std::abs(diff) / std::max(1.0, norm_H(*space, z) * norm_H(*space, w)));
        }
        return CheckItem{"", worst <= 1e-12, worst, "max |(z, P w)_H - (z, w)_H|"};
    });
    item("constants_in_kernel", [&] {
        const Vector one = Vector::Ones(dom->bulk_size());
        const Vector k1 = dom->K_bulk * one + dom->scatter(dom->K_surf * dom->trace(one));
        const double v = k1.cwiseAbs().maxCoeff();
        return CheckItem{"", v <= 1e-12, v, "max |K_V 1|"};
    });
    item("F_roundtrip", [&] {
        double worst = 0.0;
        const int pairs = std::max(1, samples / 10);
        for (int s = 0; s < pairs; ++s) {
            const FieldPair z = random_zero_mean(*space, seed + 4, static_cast<std::uint64_t>(s));
            const FieldPair back = space->solve_F_inverse(space->apply_F(z));
            worst = std::max(worst, (back.bulk - z.bulk).cwiseAbs().maxCoeff());
        }
        return CheckItem{"", worst <= 1e-8, worst, "max |F^-1 F z - z|"};
    });

    report.pass = std::all_of(report.items.begin(), report.items.end(), [](const CheckItem& i) { return i.pass; });
    return report;
}

double interpolation_constant(const PairSpace& space, double delta, int modes) {
    const DiscreteDomain& dom = space.domain();
    double best = -kInf;
    for (int k = 0; k <= modes; ++k) {
        for (int l = 0; l <= modes; ++l) {
            if (k == 0 && l == 0) continue;
            Vector b(dom.bulk_size());
            for (int i = 0; i < dom.bulk_size(); ++i) {
                b[i] = std::cos(k * std::numbers::pi * dom.x[i]) * std::cos(l * std::numbers::pi * dom.y[i]);
            }
            const FieldPair z = space.project_zero_mean(FieldPair::from_bulk(dom, std::move(b)));
            const double star = norm_V0_star_of(space, z);
            if (!(star > 0.0)) continue;
            best = std::max(best, (norm_H(space, z) - delta * space.norm_V0(z)) / star);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

RunSummary summarize(const PairSpace& space, const SchemeConfig& config, const RunResult& result, bool zero_forcing) {
    RunSummary s;
    s.steps_planned = step_count(config.t_end, config.tau);
    s.steps_done = static_cast<int>(result.states.size()) - 1;
    s.completed = !result.failed && s.steps_done == s.steps_planned;
    s.failure = result.failure;
    s.residual_limit = 10.0 * config.newton_tol;
    for (const auto& st : result.states) {
        s.mass_drift = std::max(s.mass_drift, std::abs(space.mean(st.u()) - st.m0));
    }
    for (const auto& r : result.residuals) {
        s.max_r1 = std::max(s.max_r1, r.r1);
        s.max_r2 = std::max(s.max_r2, r.r2);
    }
    s.max_energy_increase = -kInf;
    for (std::size_t n = 1; n < result.monitors.size(); ++n) {
        s.max_energy_increase = std::max(s.max_energy_increase, result.monitors[n].energy - result.monitors[n - 1].energy);
    }
    if (result.monitors.size() < 2) s.max_energy_increase = 0.0;
    s.energy_applicable = zero_forcing && config.splitting == Splitting::ConvexSplit && !config.unregularized;
    s.mass_pass = s.mass_drift <= kMassDriftLimit;
    s.residual_pass = s.max_r1 <= s.residual_limit && s.max_r2 <= s.residual_limit;
    s.energy_pass = !s.energy_applicable || s.max_energy_increase <= kEnergySlack;
    s.pass = s.completed && s.mass_pass && s.residual_pass && s.energy_pass;
    return s;
}

std::string report_text(const RunSummary& r) {
    std::ostringstream os;
    os << "run\n";
    os << "steps: " << r.steps_done << " of " << r.steps_planned << "\n";
    if (!r.failure.empty()) os << "failure: " << r.failure << "\n";
    os << "mass drift: " << format_double(r.mass_drift) << "\n";
    os << "max weak residuals: " << format_double(r.max_r1) << ", " << format_double(r.max_r2) << "\n";
    os << "max energy increase: " << format_double(r.max_energy_increase) << "\n";
    os << yes_no(r.completed) << " run completed\n";
    os << yes_no(r.mass_pass) << " mass conservation (drift <= " << format_double(kMassDriftLimit) << ")\n";
    os << yes_no(r.residual_pass) << " weak residuals (<= " << format_double(r.residual_limit) << ")\n";
    if (r.energy_applicable) {
        os << yes_no(r.energy_pass) << " energy decay (slack " << format_double(kEnergySlack) << ")\n";
    } else {
        os << "SKIP energy decay (forcing or splitting)\n";
    }
    return os.str();
}

std::string report_csv(const RunSummary& r) {
    std::ostringstream os;
    os << "steps_done,steps_planned,completed,mass_drift,max_r1,max_r2,max_energy_increase,pass\n";
    os << r.steps_done << ',' << r.steps_planned << ',' << (r.completed ? 1 : 0) << ',' << format_double(r.mass_drift)
       << ',' << format_double(r.max_r1) << ',' << format_double(r.max_r2) << ','
       << format_double(r.max_energy_increase) << ',' << (r.pass ? 1 : 0) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

std::string report_text(const DependenceReport& r) {
    std::ostringstream os;
    os << "continuous dependence on data\n";
    for (const auto& l : r.levels) {
        os << "tau " << format_double(l.tau) << ": sup ratio " << format_double(l.sup_ratio) << " at t "
           << format_double(l.t_at_sup);
        if (l.failed) os << " (run failed: " << l.failure << ")";
        os << "\n";
    }
    if (r.degenerate) {
        os << "ratio: 0 (degenerate)\n";
    } else if (!r.levels.empty()) {
        os << "ratio: " << format_double(r.levels.front().sup_ratio) << "\n";
        os << "tau variation: " << format_double(r.tau_variation) << " (limit " << format_double(r.tau_variation_limit)
           << ")\n";
    }
    os << yes_no(r.pass) << " continuous dependence\n";
    return os.str();
}

std::string report_csv(const DependenceReport& r) {
    std::ostringstream os;
    os << "tau,sup_ratio,t_at_sup,max_lhs,max_rhs,failed\n";
    for (const auto& l : r.levels) {
        os << format_double(l.tau) << ',' << format_double(l.sup_ratio) << ',' << format_double(l.t_at_sup) << ','
           << format_double(l.max_lhs) << ',' << format_double(l.max_rhs) << ',' << (l.failed ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string report_text(const EpsStudyReport& r) {
    std::ostringstream os;
    os << "vanishing eps study\n";
    for (std::size_t k = 0; k < r.d_max_H0.size(); ++k) {
        os << "d_" << k << " (eps " << format_double(r.eps[k]) << " vs " << format_double(r.eps[k + 1])
           << "): max H0 " << format_double(r.d_max_H0[k]) << ", L2(V0) " << format_double(r.d_l2_V0[k]) << "\n";
    }
    for (std::size_t c = 0; c < r.table.columns.size(); ++c) {
        os << "column " << r.table.columns[c] << ": max/min " << format_double(r.table.column_ratio[c]) << "\n";
    }
    os << "slope of log |v|_L2(V0) against log eps: " << format_double(r.l2_v_V0_slope) << "\n";
    if (r.failed) os << "run failure: " << r.failure << "\n";
    os << yes_no(r.cauchy_pass) << " successive distances nonincreasing\n";
    os << yes_no(r.table.pass) << " bounds uniform in eps (max/min <= " << format_double(r.table.ratio_limit) << ")\n";
    os << yes_no(r.slope_pass) << " no growth trend of |v|_L2(V0) (|slope| <= 0.1)\n";
    os << yes_no(r.pass) << " vanishing eps study\n";
    return os.str();
}

std::string report_csv(const EpsStudyReport& r) {
    std::ostringstream os;
    os << "eps";
    for (const auto& c : r.table.columns) os << ',' << c;
    os << ",d_max_H0,d_l2_V0\n";
    for (std::size_t k = 0; k < r.table.rows.size(); ++k) {
        os << format_double(r.table.eps[k]);
        for (double v : r.table.rows[k]) os << ',' << format_double(v);
        if (k < r.d_max_H0.size()) {
            os << ',' << format_double(r.d_max_H0[k]) << ',' << format_double(r.d_l2_V0[k]);
        } else {
            os << ",,";
        }
        os << "\n";
    }
    return os.str();
}

std::string report_text(const AppendixReport& r) {
    std::ostringstream os;
    os << "discrete space checks\n";
    for (const auto& i : r.items) {
        os << yes_no(i.pass) << ' ' << i.name << ": " << format_double(i.value) << " (" << i.detail << ")\n";
    }
    os << yes_no(r.pass) << " all checks\n";
    return os.str();
}

std::string report_csv(const AppendixReport& r) {
    std::ostringstream os;
    os << "item,pass,value\n";
    for (const auto& i : r.items) os << i.name << ',' << (i.pass ? 1 : 0) << ',' << format_double(i.value) << "\n";
    return os.str();
}

std::string monitors_csv(const std::vector<MonitorRecord>& monitors, int stride) {
    std::ostringstream os;
    for (std::size_t c = 0; c < kMonitorColumns.size(); ++c) os << (c ? "," : "") << kMonitorColumns[c];
    os << "\n";
    const std::size_t step = static_cast<std::size_t>(std::max(1, stride));
    for (std::size_t n = 0; n < monitors.size(); ++n) {
        if (n % step != 0 && n + 1 != monitors.size()) continue;
        const MonitorRecord& m = monitors[n];
        os << format_double(m.t) << ',' << format_double(m.total_mass) << ',' << format_double(m.energy) << ','
           << format_double(m.norm_v_V0) << ',' << format_double(m.norm_v_V0star) << ',' << format_double(m.norm_mu_V)
           << ',' << format_double(m.l1_xi_bulk) << ',' << format_double(m.l1_xi_surf) << ','
           << format_double(m.envelope_integral_bulk) << ',' << format_double(m.envelope_integral_surf) << ','
           << format_double(m.omega) << ',' << m.newton_iters << "\n";
    }
    return os.str();
}

std::string snapshot_csv(const DiscreteDomain& dom, const SchemeState& state) {
    std::ostringstream os;
    os << "node,x,y,u,mu\n";
    for (int i = 0; i < dom.bulk_size(); ++i) {
        os << i << ',' << format_double(dom.x[i]) << ',' << format_double(dom.y[i]) << ','
           << format_double(state.v.bulk[i] + state.m0) << ',' << format_double(state.mu.bulk[i]) << "\n";
    }
    return os.str();
}

}  // namespace chbs
