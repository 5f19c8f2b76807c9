#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chbs/config.hpp"
#include "chbs/errors.hpp"

using namespace chbs;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
    const RunSpec s = parse_config("[mesh]\nn = 9\n");
    CHECK(s.mesh_n == 9);
    CHECK(s.scheme.eps == 0.1);
    CHECK(s.scheme.tau == 1e-3);
    CHECK(s.scheme.t_end == 0.5);
    CHECK(s.scheme.splitting == Splitting::ConvexSplit);
    CHECK(s.scheme.graphs.bulk.kind == GraphKind::Polynomial);
    CHECK(s.scheme.graphs.boundary.kind == GraphKind::Polynomial);
    CHECK(s.scheme.graphs.rho == 1.0);
    CHECK(s.scheme.graphs.c0 == 0.0);
    CHECK(s.eps_list == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
    CHECK(s.init == InitPreset::Constant);
    CHECK(s.forcing == ForcingPreset::Zero);
    CHECK(s.monitor_stride == 1);
    CHECK(s.snapshot_stride == 0);
    CHECK(s.out_dir == "out");
    CHECK_FALSE(s.seed.has_value());
    CHECK(parse_config("").mesh_n == 17);
}

TEST_CASE("full config") {
    const RunSpec s = parse_config(R"(
# comment line
[mesh]
n = 11            ; trailing comment
[scheme]
eps = 0.05
tau = 2e-3
t_end = 0.1
newton_tol = 1e-9
newton_max = 30
splitting = fully_implicit
eps_list = 0.4, 0.2, 0.2, 0.1
[graphs]
bulk = logarithmic
boundary = logarithmic
bulk_pi_slope = -3
rho = 2
c0 = 0.5
[init]
preset = random
mean = 0.1
amplitude = 0.2
seed = 42
[forcing]
preset = cosine
amplitude = 0.3
[output]
stride = 5
snapshots = 10
dir = results
)",
                                  "/base");
    CHECK(s.mesh_n == 11);
    CHECK(s.scheme.eps == 0.05);
    CHECK(s.scheme.newton_max == 30);
    CHECK(s.scheme.splitting == Splitting::FullyImplicit);
    CHECK(s.eps_list == std::vector<double>{0.4, 0.2, 0.2, 0.1});
    CHECK(s.scheme.graphs.bulk.kind == GraphKind::Logarithmic);
    CHECK(s.scheme.graphs.bulk.perturbation.slope == -3.0);
    // boundary slope follows the bulk slope unless given
    CHECK(s.scheme.graphs.boundary.perturbation.slope == -3.0);
    CHECK(s.scheme.graphs.rho == 2.0);
    CHECK(s.init == InitPreset::Random);
    CHECK(*s.seed == 42u);
    CHECK(s.forcing == ForcingPreset::Cosine);
    CHECK(s.forcing_surface_amplitude == 0.3);
    CHECK(s.monitor_stride == 5);
    CHECK(s.snapshot_stride == 10);
    CHECK(s.out_dir == std::filesystem::path("/base/results"));
}

TEST_CASE("graph defaults follow the kind") {
    const RunSpec s = parse_config("[graphs]\nbulk = logarithmic\n");
    CHECK(s.scheme.graphs.boundary.kind == GraphKind::Logarithmic);
    CHECK(s.scheme.graphs.bulk.perturbation.slope == GraphSpec::logarithmic().perturbation.slope);
}

TEST_CASE("errors name the problem") {
    CHECK(error_of("[scheme]\neps = 0\n").find("eps must lie in (0,1]") != std::string::npos);
    CHECK(error_of("[scheme]\nepsilonn = 0.1\n").find("line 2: unknown key 'epsilonn'") != std::string::npos);
    CHECK(error_of("[scheme]\neps = 0.1\neps = 0.2\n").find("line 3: duplicate key 'eps'") != std::string::npos);
    CHECK(error_of("[solver]\n").find("unknown section [solver]") != std::string::npos);
    CHECK(error_of("n = 3\n").find("outside of any section") != std::string::npos);
    CHECK(error_of("[mesh]\nn\n").find("line 2") != std::string::npos);
    CHECK(error_of("[mesh]\nn = 2\n").find("mesh.n") != std::string::npos);
    CHECK(error_of("[mesh]\nn = 4.5\n").find("not an integer") != std::string::npos);
    CHECK(error_of("[scheme]\ntau = abc\n").find("scheme.tau") != std::string::npos);
    CHECK(error_of("[scheme]\nsplitting = explicit\n").find("convex_split") != std::string::npos);
    CHECK(error_of("[graphs]\nbulk = quartic\n").find("unknown graph kind") != std::string::npos);
    CHECK(error_of("[init]\npreset = random\n").find("init.seed is mandatory") != std::string::npos);
    CHECK(error_of("[init]\npreset = table\n").find("init.file") != std::string::npos);
    CHECK(error_of("[scheme]\neps_list = 0.1, 0.2, 0.05\n").find("nonincreasing") != std::string::npos);
    CHECK(error_of("[scheme]\neps_list = 0.2, 0.1\n").find("at least 3") != std::string::npos);
    CHECK(error_of("[output]\nstride = 0\n").find("output.stride") != std::string::npos);
    CHECK(error_of("[graphs]\nrho = -1\n").find("rho") != std::string::npos);
    // boundary graph domain larger than the bulk one
    CHECK_FALSE(error_of("[graphs]\nbulk = obstacle\nboundary = polynomial\n").empty());
}

TEST_CASE("load_config prefixes the path and resolves files") {
    const auto dir = std::filesystem::temp_directory_path() / "chbs_test_config";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad.cfg") << "[scheme]\nfoo = 1\n";
        std::ofstream(dir / "init.csv") << "node,value\n";
    }
    try {
        load_config(dir / "bad.cfg");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.cfg") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
    {
        std::ofstream(dir / "table.cfg") << "[mesh]\nn = 3\n[init]\npreset = table\nfile = init.csv\n";
        std::ofstream out(dir / "init.csv");
        out << "node,value\n";
        for (int i = 0; i < 9; ++i) out << i << "," << 0.1 * i << "\n";
    }
    const RunSpec s = load_config(dir / "table.cfg");
    CHECK(s.init_file == dir / "init.csv");
    const Problem p = build_problem(s);
    CHECK(p.u0.bulk[4] == doctest::Approx(0.4));
    CHECK(p.u0.boundary[0] == doctest::Approx(0.0));
    std::filesystem::remove_all(dir);
}

TEST_CASE("problem construction") {
    const RunSpec s = parse_config("[mesh]\nn = 6\n[init]\npreset = random\nmean = 0.2\namplitude = 0.3\nseed = 7\n"
                                   "[forcing]\npreset = constant\namplitude = 0.5\nsurface_amplitude = -0.25\n");
    const Problem p = build_problem(s);
    CHECK(p.space->size() == 36);
    CHECK(p.space->mean(p.u0) == doctest::Approx(0.2).epsilon(1e-14));
    const FieldPair f = p.forcing(0.3);
    CHECK(f.bulk[0] == 0.5);
    CHECK(f.boundary[0] == -0.25);
    // same seed, same field
    CHECK(build_problem(s).u0.bulk == p.u0.bulk);
    CHECK_THROWS_AS(build_problem(s, build_problem(parse_config("[mesh]\nn = 5\n")).space), ConfigError);
}

TEST_CASE("counter generator") {
    CHECK(counter_uniform(1, 0) == counter_uniform(1, 0));
    CHECK(counter_uniform(1, 0) != counter_uniform(2, 0));
    CHECK(counter_uniform(1, 0) != counter_uniform(1, 1));
    double sum = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double x = counter_uniform(3, i);
        CHECK(x >= -1.0);
        CHECK(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / 20000) < 0.02);
}

TEST_CASE("forcing tables") {
    const auto dom = std::make_shared<const DiscreteDomain>(build_unit_square(3));
    std::istringstream in("t,node,value\n0.0,0,1.5\n0.0,9,2.0\n0.5,4,-1\n");
    const Forcing f = table_forcing(dom, parse_forcing_table(in));
    const FieldPair a = f(0.2);
    CHECK(a.bulk[0] == 1.5);
    CHECK(a.boundary[0] == 2.0);  // node id N addresses chain position 0
    CHECK(a.bulk[4] == 0.0);
    const FieldPair b = f(0.7);
    CHECK(b.bulk[0] == 0.0);
    CHECK(b.bulk[4] == -1.0);

    std::istringstream bad_node("t,node,value\n0,99,1\n");
    CHECK_THROWS(table_forcing(dom, parse_forcing_table(bad_node))(0.0));
    std::istringstream bad_time("t,node,value\n0.5,0,1\n0.1,0,1\n");
    CHECK_THROWS_AS(parse_forcing_table(bad_time), ConfigError);
    std::istringstream bad_header("time,node,value\n");
    CHECK_THROWS_AS(parse_forcing_table(bad_header), ConfigError);
}

TEST_CASE("initial tables must cover every node") {
    const DiscreteDomain dom = build_unit_square(3);
    std::istringstream missing("node,value\n0,1\n");
    CHECK_THROWS_AS(table_initial(dom, missing), ConfigError);
}
