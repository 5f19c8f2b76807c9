#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "chbs/errors.hpp"
#include "chbs/forcing.hpp"
#include "chbs/scheme.hpp"

using namespace chbs;

namespace {

std::shared_ptr<const PairSpace> make_space(int n) {
    return std::make_shared<const PairSpace>(std::make_shared<const DiscreteDomain>(build_unit_square(n)));
}

FieldPair smooth_initial(const PairSpace& s, double mean, double amp) {
    const auto& dom = s.domain();
    Vector b(s.size());
    for (int i = 0; i < s.size(); ++i) b[i] = mean + amp * std::sin(3 * dom.x[i] + 2 * dom.y[i]);
    return FieldPair::from_bulk(dom, b);
}

SchemeConfig base_config() {
    SchemeConfig c;
    c.eps = 0.2;
    c.tau = 0.01;
    c.t_end = 0.05;
    return c;
}

// One convex-split step at n = 5, see tests/oracles/scheme_oracle.py.
const std::vector<double> kOracleV{
    0.12377890964439205,  0.294948872336669,    0.3869979015820874,   0.2696458703478578,  0.00245981999829192,
    0.24183586417025174,  0.35581289989469356,  0.307460421170517,    0.0674165501965921,  -0.25770129621172094,
    0.3804979406642291,   0.3542266095137513,   0.16165299048156997,  -0.1605044923478806, -0.4861008568617192,
    0.43249117510469026,  0.2625083360960256,   -0.037862593442370064, -0.3731587493452826, -0.6241291552601277,
    0.35725412909758575,  0.10513550715984914,  -0.24825922568053127, -0.5356258021470476, -0.6442040646914625};
const std::vector<double> kOracleMu{
    -0.7040387900958122, 0.11930226543484496,  0.730795870023962,   0.618798829806587,   -0.04230660074432099,
    -0.21809193811342084, 0.5025200262612006,  0.6752131272203381,  0.18071276487168725, -0.636559444061469,
    0.40737425253167187, 0.684821901709066,    0.3846130788915653,  -0.35844978549861145, -1.1215973818477505,
    0.7798082955956914,  0.5547762072831472,   -0.11104532829691709, -0.8889219771486568, -1.3903177229116617,
    0.7507400634825804,  0.17444952184284213,  -0.6744629120054008, -1.2987353605640257, -1.4195016704958425};

}  // namespace

TEST_CASE("one step agrees with the dense reference") {
    const auto space = make_space(5);
    const Stepper stepper(space, base_config());
    const FieldPair u0 = smooth_initial(*space, 0.2, 0.6);
    const Forcing f = cosine_forcing(space->domain_ptr(), 0.3, 0.1);
    const SchemeState s0 = stepper.initialize(u0, f(0.0));
    const SchemeState s1 = stepper.step(s0, f(0.01));
    for (int i = 0; i < space->size(); ++i) {
        CAPTURE(i);
        CHECK(std::abs(s1.v.bulk[i] - kOracleV[i]) <= 1e-8);
        CHECK(std::abs(s1.mu.bulk[i] - kOracleMu[i]) <= 1e-8);
    }
    CHECK(s1.step_index == 1);
    CHECK(s1.t == doctest::Approx(0.01));
}

TEST_CASE("constant states are equilibria") {
    const auto space = make_space(6);
    SchemeConfig c = base_config();
    const Stepper stepper(space, c);
    const FieldPair u0 = FieldPair::constant(space->domain(), 0.3);
    const RunResult r = run(stepper, u0, zero_forcing(space->domain_ptr()));
    REQUIRE_FALSE(r.failed);
    for (const auto& s : r.states) {
        CHECK(s.v.bulk.cwiseAbs().maxCoeff() <= 1e-12);
        // mu is the constant beta_eps(m0) + pi(m0)
        const double expected = yosida(c.graphs.bulk, c.eps, 0.3) - 0.3;
        CHECK((s.mu.bulk.array() - expected).abs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("mass, residuals and energy along a run") {
    for (auto split : {Splitting::ConvexSplit, Splitting::FullyImplicit}) {
        for (auto kind : {GraphKind::Polynomial, GraphKind::Logarithmic, GraphKind::Obstacle}) {
            CAPTURE(to_string(split));
            CAPTURE(to_string(kind));
            const auto space = make_space(9);
            SchemeConfig c = base_config();
            c.splitting = split;
            c.eps = 0.05;
            c.tau = 2e-3;
            c.t_end = 0.04;
            c.graphs.bulk = GraphSpec::of_kind(kind, -1.0);
            c.graphs.boundary = GraphSpec::of_kind(kind, -1.0);
            const Stepper stepper(space, c);
            const FieldPair u0 = random_initial(space->domain(), *space, 0.1, 0.4, 7);
            const RunResult r = run(stepper, u0, zero_forcing(space->domain_ptr()));
            REQUIRE_FALSE(r.failed);
            REQUIRE(r.states.size() == 21u);
            REQUIRE(r.residuals.size() == 20u);
            const double m0 = space->mean(u0);
            for (std::size_t n = 0; n < r.states.size(); ++n) {
                const auto& s = r.states[n];
                CHECK(std::abs(space->mean(s.v)) <= 1e-12);
                CHECK(std::abs(s.m0 - m0) == 0.0);
                CHECK(std::abs(r.monitors[n].total_mass - m0 * space->total_measure()) <= 1e-11);
                CHECK(space->is_trace_consistent(s.v, 1e-14));
                if (n > 0) {
                    CHECK(r.residuals[n - 1].r1 <= 10 * c.newton_tol);
                    CHECK(r.residuals[n - 1].r2 <= 10 * c.newton_tol);
                    if (split == Splitting::ConvexSplit) CHECK(r.monitors[n].energy <= r.monitors[n - 1].energy + 1e-10);
                }
            }
        }
    }
}

TEST_CASE("xi and omega are consistent with the state") {
    const auto space = make_space(7);
    const SchemeConfig c = base_config();
    const Stepper stepper(space, c);
    const Forcing f = cosine_forcing(space->domain_ptr(), 0.5, 0.2);
    const SchemeState s0 = stepper.initialize(smooth_initial(*space, 0.0, 0.8), f(0.0));
    const SchemeState s1 = stepper.step(s0, f(c.tau));
    const FieldPair u = s1.u();
    for (int i = 0; i < space->size(); ++i) {
        CHECK(s1.xi.bulk[i] == doctest::Approx(yosida(c.graphs.bulk, c.eps, u.bulk[i])).epsilon(1e-14));
    }
    for (int k = 0; k < space->domain().boundary_size(); ++k) {
        CHECK(s1.xi.boundary[k] == doctest::Approx(yosida_boundary(c.graphs, c.eps, u.boundary[k])).epsilon(1e-14));
    }
    // omega = m(xi + pi(u) - f), computed independently
    FieldPair g = s1.xi;
    g.bulk += c.graphs.bulk.perturbation.slope * u.bulk - f(c.tau).bulk;
    g.boundary += c.graphs.boundary.perturbation.slope * u.boundary - f(c.tau).boundary;
    CHECK(s1.omega == doctest::Approx(space->mean(g)).epsilon(1e-12));
    CHECK(stepper.omega(u, f(c.tau)) == doctest::Approx(s1.omega).epsilon(1e-14));
}

TEST_CASE("weak residuals detect a perturbed solution") {
    const auto space = make_space(7);
    const SchemeConfig c = base_config();
    const Stepper stepper(space, c);
    const FieldPair zero = FieldPair::zeros(space->domain());
    const SchemeState s0 = stepper.initialize(smooth_initial(*space, 0.1, 0.5));
    const SchemeState s1 = stepper.step(s0, zero);
    const WeakResiduals clean = stepper.weak_residuals(s0, s1, zero);
    CHECK(clean.r1 <= c.newton_tol);
    CHECK(clean.r2 <= c.newton_tol);
    Vector bump(space->size());
    for (int i = 0; i < space->size(); ++i) bump[i] = std::cos(std::numbers::pi * space->domain().x[i]);
    double prev = 0;
    for (double delta : {1e-6, 1e-5, 1e-4}) {
        SchemeState bad = s1;
        bad.mu.bulk += delta * bump;
        bad.mu = FieldPair::from_bulk(space->domain(), bad.mu.bulk);
        const double r1 = stepper.weak_residuals(s0, bad, zero).r1;
        CHECK(r1 > 100 * c.newton_tol);
        if (prev > 0) CHECK(r1 / prev == doctest::Approx(10.0).epsilon(0.01));
        prev = r1;
    }
}

TEST_CASE("chemical block is symmetric positive definite") {
    const auto space = make_space(6);
    for (auto kind : {GraphKind::Polynomial, GraphKind::Logarithmic, GraphKind::Obstacle}) {
        SchemeConfig c = base_config();
        c.graphs.bulk = GraphSpec::of_kind(kind, -1.0);
        c.graphs.boundary = GraphSpec::of_kind(kind, -1.0);
        const Stepper stepper(space, c);
        const Eigen::MatrixXd A(stepper.chemical_block(smooth_initial(*space, 0.0, 1.5)));
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        CHECK(es.eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("unregularized mode uses the graph itself") {
    const auto space = make_space(6);
    SchemeConfig c = base_config();
    c.splitting = Splitting::FullyImplicit;
    c.unregularized = true;
    c.eps = 0.0;
    c.t_end = 0.02;
    const Stepper stepper(space, c);
    const RunResult r = run(stepper, smooth_initial(*space, 0.0, 0.5), zero_forcing(space->domain_ptr()));
    REQUIRE_FALSE(r.failed);
    const FieldPair u = r.states.back().u();
    for (int i = 0; i < space->size(); ++i) CHECK(r.states.back().xi.bulk[i] == doctest::Approx(std::pow(u.bulk[i], 3)));

    SchemeConfig bad = c;
    bad.splitting = Splitting::ConvexSplit;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.graphs.bulk = GraphSpec::obstacle();
    bad.graphs.boundary = GraphSpec::obstacle();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("initial data outside the graph domain") {
    const auto space = make_space(5);
    SchemeConfig c = base_config();
    c.graphs.bulk = GraphSpec::logarithmic();
    c.graphs.boundary = GraphSpec::logarithmic();
    const Stepper stepper(space, c);
    CHECK_THROWS_AS(stepper.initialize(FieldPair::constant(space->domain(), 1.0)), CompatibilityError);
    FieldPair u = FieldPair::constant(space->domain(), 0.2);
    u.bulk[12] = -1.5;
    CHECK_THROWS_WITH_AS(stepper.initialize(u), doctest::Contains("bulk node 12"), CompatibilityError);
}

TEST_CASE("configuration validation") {
    SchemeConfig c = base_config();
    CHECK_NOTHROW(c.validate());
    c.eps = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.eps = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.tau = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_config();
    c.t_end = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("step counts") {
    CHECK(step_count(0.0, 0.1) == 0);
    CHECK(step_count(0.5, 1e-3) == 500);
    CHECK(step_count(0.3, 0.1) == 3);
    CHECK(step_count(0.35, 0.1) == 4);
}

TEST_CASE("zero final time yields the initial record only") {
    const auto space = make_space(5);
    SchemeConfig c = base_config();
    c.t_end = 0.0;
    const Stepper stepper(space, c);
    const RunResult r = run(stepper, smooth_initial(*space, 0.1, 0.3), zero_forcing(space->domain_ptr()));
    CHECK_FALSE(r.failed);
    CHECK(r.states.size() == 1u);
    CHECK(r.monitors.size() == 1u);
    CHECK(r.residuals.empty());
}

TEST_CASE("runs are deterministic") {
    const auto space = make_space(9);
    const Stepper stepper(space, base_config());
    const FieldPair u0 = random_initial(space->domain(), *space, 0.0, 0.5, 99);
    const Forcing f = cosine_forcing(space->domain_ptr(), 0.2, 0.2);
    const RunResult a = run(stepper, u0, f);
    const RunResult b = run(stepper, u0, f);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t n = 0; n < a.states.size(); ++n) {
        CHECK(a.states[n].v.bulk == b.states[n].v.bulk);
        CHECK(a.states[n].mu.bulk == b.states[n].mu.bulk);
    }
}
