#include "chbs/cli.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "chbs/config.hpp"
#include "chbs/errors.hpp"
#include "chbs/io.hpp"
#include "chbs/verify.hpp"

namespace chbs {

namespace {

struct Options {
    std::vector<std::string> configs;
    std::string out;
    bool quiet = false;
};

std::filesystem::path out_dir(const Options& o, const RunSpec& spec) {
    return o.out.empty() ? spec.out_dir : std::filesystem::path(o.out);
}

void emit(const Options& o, std::ostream& out, const std::filesystem::path& dir, const std::string& text,
          const std::string& csv) {
    write_file_atomic(dir / "report.txt", text);
    write_file_atomic(dir / "report.csv", csv);
    if (!o.quiet) out << text;
}

RunSpec single_config(const Options& o) {
    if (o.configs.size() != 1) throw ConfigError("expected exactly one --config");
    return load_config(o.configs.front());
}

int cmd_run(const Options& o, std::ostream& out) {
    const RunSpec spec = single_config(o);
    const Problem p = build_problem(spec);
    const Stepper stepper(p.space, spec.scheme);
    const RunResult result = run(stepper, p.u0, p.forcing);
    const std::filesystem::path dir = out_dir(o, spec);

    write_file_atomic(dir / "monitors.csv", monitors_csv(result.monitors, spec.monitor_stride));
    if (spec.snapshot_stride > 0) {
        for (std::size_t n = 0; n < result.states.size(); n += static_cast<std::size_t>(spec.snapshot_stride)) {
            write_file_atomic(dir / ("snapshot_" + std::to_string(n) + ".csv"), snapshot_csv(*p.domain, result.states[n]));
        }
    }
    const RunSummary summary = summarize(*p.space, spec.scheme, result, spec.forcing == ForcingPreset::Zero);
    emit(o, out, dir, report_text(summary), report_csv(summary));
    return summary.pass ? kExitPass : kExitFail;
}

int cmd_eps_study(const Options& o, std::ostream& out) {
    const RunSpec spec = single_config(o);
    const Problem p = build_problem(spec);
    const EpsStudyReport report = vanishing_eps_study(p.space, spec.scheme, spec.eps_list, {p.u0, p.forcing});
    emit(o, out, out_dir(o, spec), report_text(report), report_csv(report));
    return report.pass ? kExitPass : kExitFail;
}

bool same_scheme(const RunSpec& a, const RunSpec& b) {
    const SchemeConfig& x = a.scheme;
    const SchemeConfig& y = b.scheme;
    auto same_graph = [](const GraphSpec& g, const GraphSpec& h) {
        return g.kind == h.kind && g.perturbation.slope == h.perturbation.slope;
    };
    return a.mesh_n == b.mesh_n && x.eps == y.eps && x.tau == y.tau && x.t_end == y.t_end &&
           x.newton_tol == y.newton_tol && x.newton_max == y.newton_max && x.splitting == y.splitting &&
           x.unregularized == y.unregularized && same_graph(x.graphs.bulk, y.graphs.bulk) &&
           same_graph(x.graphs.boundary, y.graphs.boundary) && x.graphs.rho == y.graphs.rho &&
           x.graphs.c0 == y.graphs.c0;
}

int cmd_cont_dep(const Options& o, std::ostream& out) {
    if (o.configs.size() != 2) throw ConfigError("cont-dep needs exactly two --config files");
    const RunSpec a = load_config(o.configs[0]);
    const RunSpec b = load_config(o.configs[1]);
    if (!same_scheme(a, b)) throw ConfigError("cont-dep configs may differ only in [init], [forcing] and [output]");
    const Problem pa = build_problem(a);
    const Problem pb = build_problem(b, pa.space);
    const DependenceReport report =
        continuous_dependence_experiment(pa.space, a.scheme, {pa.u0, pa.forcing}, {pb.u0, pb.forcing});
    emit(o, out, out_dir(o, a), report_text(report), report_csv(report));
    return report.pass ? kExitPass : kExitFail;
}

int cmd_check(const Options& o, std::ostream& out) {
    if (o.configs.size() > 1) throw ConfigError("check takes at most one --config");
    const RunSpec spec = o.configs.empty() ? RunSpec{} : load_config(o.configs.front());
    auto dom = std::make_shared<const DiscreteDomain>(build_unit_square(spec.mesh_n));
    const AppendixReport report = appendix_checks(dom);
    emit(o, out, out_dir(o, spec), report_text(report), report_csv(report));
    return report.pass ? kExitPass : kExitFail;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mass-conserving bulk-surface Cahn-Hilliard simulator", "chbs"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", o.configs, "Config file (repeatable)");
        if (config_required) c->required();
        sub->add_option("--out", o.out, "Output directory (overrides [output] dir)");
        sub->add_flag("--quiet", o.quiet, "Do not print the report");
    };
    auto* run_cmd = app.add_subcommand("run", "Single run: monitors, snapshots and conservation checks");
    auto* eps_cmd = app.add_subcommand("eps-study", "Vanishing-eps study over [scheme] eps_list");
    auto* dep_cmd = app.add_subcommand("cont-dep", "Continuous dependence on data for two configs");
    auto* chk_cmd = app.add_subcommand("check", "Identities and inequalities of the discrete spaces");
    add_common(run_cmd, true);
    add_common(eps_cmd, true);
    add_common(dep_cmd, true);
    add_common(chk_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (app.got_subcommand(run_cmd)) return cmd_run(o, out);
        if (app.got_subcommand(eps_cmd)) return cmd_eps_study(o, out);
        if (app.got_subcommand(dep_cmd)) return cmd_cont_dep(o, out);
        return cmd_check(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CompatibilityError& e) {
        err << "compatibility error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "precondition error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFail;
    }
}

}  // namespace chbs
