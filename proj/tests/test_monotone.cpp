#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chbs/errors.hpp"
#include "chbs/monotone.hpp"

using namespace chbs;

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

std::vector<double> golden_samples(int count, double lo, double hi) {
    std::vector<double> out;
    const double g = 0.6180339887498949;
    for (int k = 1; k <= count; ++k) out.push_back(lo + (hi - lo) * std::fmod(k * g, 1.0));
    return out;
}

const GraphSpec kKinds[] = {GraphSpec::polynomial(), GraphSpec::logarithmic(), GraphSpec::obstacle()};
const double kEps[] = {1.0, 0.1, 0.01};

double beta_single(const GraphSpec& g, double j) {
    return g.kind == GraphKind::Polynomial ? j * j * j : std::log1p(2 * j / (1 - j));
}

}  // namespace

TEST_CASE("resolvent closed-form values") {
    CHECK(resolvent(GraphSpec::polynomial(), 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (const auto& g : kKinds) CHECK(resolvent(g, 0.3, 0.0) == 0.0);
    CHECK(resolvent(GraphSpec::obstacle(), 0.5, 3.0) == 1.0);
    CHECK(resolvent(GraphSpec::obstacle(), 0.5, -3.0) == -1.0);
    CHECK(resolvent(GraphSpec::obstacle(), 0.5, 0.25) == 0.25);
}

TEST_CASE("yosida closed-form values") {
    CHECK(yosida(GraphSpec::obstacle(), 0.5, 3.0) == doctest::Approx(4.0));
    CHECK(yosida(GraphSpec::polynomial(), 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(yosida(GraphSpec::logarithmic(), 0.1, 0.0) == 0.0);
}

TEST_CASE("boundary regularisation uses eps * rho") {
    GraphPair p{GraphSpec::obstacle(), GraphSpec::obstacle(), 2.0, 0.0};
    CHECK(yosida_boundary(p, 0.5, 3.0) == doctest::Approx(2.0));
    CHECK(yosida_boundary(p, 0.5, 0.0) == 0.0);
    for (const auto& g : kKinds) {
        GraphPair same{g, g, 1.0, 0.0};
        for (double r : golden_samples(200, -3, 3)) {
            CHECK(yosida_boundary(same, 0.1, r) == yosida(g, 0.1, r));
            CHECK(envelope_boundary(same, 0.1, r) == envelope(g, 0.1, r));
        }
    }
}

TEST_CASE("envelope closed-form values") {
    CHECK(envelope(GraphSpec::obstacle(), 0.5, 3.0) == doctest::Approx(4.0));
    CHECK(envelope(GraphSpec::polynomial(), 1.0, 2.0) == doctest::Approx(0.75).epsilon(1e-14));
    for (const auto& g : kKinds) CHECK(envelope(g, 0.2, 0.0) == 0.0);
}

TEST_CASE("minimal section") {
    CHECK(minimal_section(GraphSpec::obstacle(), 0.7) == 0.0);
    CHECK(minimal_section(GraphSpec::obstacle(), 1.0) == 0.0);
    CHECK(minimal_section(GraphSpec::obstacle(), -1.0) == 0.0);
    CHECK(minimal_section(GraphSpec::polynomial(), -2.0) == -8.0);
    CHECK(minimal_section(GraphSpec::logarithmic(), 0.5) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(minimal_section(GraphSpec::obstacle(), 1.5), DomainError);
    CHECK_THROWS_AS(minimal_section(GraphSpec::logarithmic(), 1.0), DomainError);
    CHECK(convex_potential(GraphSpec::logarithmic(), 1.0) == doctest::Approx(2 * std::log(2.0)));
    CHECK(convex_potential(GraphSpec::obstacle(), 1.5) == std::numeric_limits<double>::infinity());
}

TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(resolvent(GraphSpec::polynomial(), 0.1, std::nan("")), DomainError);
    CHECK_THROWS_AS(resolvent(GraphSpec::polynomial(), 0.1, std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS(yosida(GraphSpec::logarithmic(), 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(yosida(GraphSpec::logarithmic(), -1.0, 0.5), DomainError);
    CHECK(graph_kind_from_string("logarithmic") == GraphKind::Logarithmic);
    CHECK_THROWS_AS(graph_kind_from_string("quadratic"), ConfigError);
}

TEST_CASE("high-precision oracle values") {
    struct Row {
        GraphKind kind;
        double eps, r, j, y, env;
    };
    // tests/oracles/monotone_oracle.py
    const Row rows[] = {
        {GraphKind::Polynomial, 0.1, 1.5, 1.2868832959384548, 2.1311670406154522, 0.91273446410593518},
        {GraphKind::Polynomial, 0.01, -3, -2.7841799032180995, -21.582009678190051, 17.350965113016261},
        {GraphKind::Polynomial, 1, 0.001, 0.00099999900000299999, 9.9999700001199995e-10, 2.4999950000149999e-13},
        {GraphKind::Logarithmic, 0.1, 0.9, 0.71891914146017892, 1.8108085853982108, 0.73835912914792746},
        {GraphKind::Logarithmic, 0.1, 3, 0.99999999587769293, 20.000000041223071, 21.386294356997583},
        {GraphKind::Logarithmic, 0.01, -2.5, -1.0, -150.0, 113.88629436111989},
        {GraphKind::Logarithmic, 1, 1e-4, 3.3333333325102881e-5, 6.6666666674897119e-5, 3.3333333335390947e-9},
    };
    for (const Row& row : rows) {
        const GraphSpec g = GraphSpec::of_kind(row.kind, -1.0);
        CAPTURE(row.r);
        CAPTURE(row.eps);
        CHECK(resolvent(g, row.eps, row.r) == doctest::Approx(row.j).epsilon(1e-14));
        CHECK(yosida(g, row.eps, row.r) == doctest::Approx(row.y).epsilon(1e-12));
        CHECK(envelope(g, row.eps, row.r) == doctest::Approx(row.env).epsilon(1e-12));
        const YosidaEval ev = yosida_eval(g, row.eps, row.r);
        CHECK(ev.value == doctest::Approx(row.y).epsilon(1e-12));
    }
}

TEST_CASE("resolvent residual and contraction") {
    const auto samples = golden_samples(1000, -5, 5);
    for (const auto& g : kKinds) {
        for (double eps : kEps) {
            double prev_r = 0, prev_j = 0;
            bool first = true;
            for (double r : samples) {
                const double j = resolvent(g, eps, r);
                CHECK(g.in_domain(j));
                // saturated roots are closer to +-1 than any double
                if (g.kind != GraphKind::Obstacle && std::abs(j) < std::nextafter(1.0, 0.0)) {
                    // a half-ulp change of j moves the residual by ulp * (1 + eps * beta'(j))
                    const double b = beta_single(g, j);
                    const double cond = std::abs(r) + std::abs(j) * (1 + eps * graph_slope(g, j)) + eps * std::abs(b);
                    CHECK(std::abs(j + eps * b - r) <= 8 * kUlp * cond);
                }
                if (!first) CHECK(std::abs(j - prev_j) <= std::abs(r - prev_r) * (1 + 1e-12));
                prev_r = r;
                prev_j = j;
                first = false;
            }
        }
    }
}

TEST_CASE("yosida monotone, Lipschitz and bounded by the minimal section") {
    auto samples = golden_samples(1000, -3, 3);
    std::sort(samples.begin(), samples.end());
    for (const auto& g : kKinds) {
        for (double eps : kEps) {
            for (std::size_t k = 1; k < samples.size(); ++k) {
                const double r1 = samples[k - 1], r2 = samples[k];
                const double q = (yosida(g, eps, r2) - yosida(g, eps, r1)) / (r2 - r1);
                CHECK(q >= -1e-8);
                CHECK(q <= 1 / eps + 1e-8);
            }
            for (double r : samples) {
                const double y = yosida(g, eps, r);
                const double s = yosida_slope(g, eps, r);
                CHECK(s >= 0.0);
                CHECK(s <= 1 / eps + 1e-12);
                if (g.in_domain(r)) CHECK(std::abs(y) <= std::abs(minimal_section(g, r)) * (1 + 1e-14) + 1e-300);
            }
        }
    }
}

TEST_CASE("envelope bounds, monotonicity in eps and derivative") {
    const auto samples = golden_samples(1000, -3, 3);
    const double h = 1e-5;
    for (const auto& g : kKinds) {
        for (double eps : kEps) {
            for (double r : samples) {
                const double e = envelope(g, eps, r);
                CHECK(e >= 0.0);
                if (g.in_domain(r)) CHECK(e <= convex_potential(g, r) * (1 + 1e-13) + 1e-15);
                CHECK(envelope(g, eps / 2, r) >= e * (1 - 1e-13));
                if (g.kind == GraphKind::Obstacle && std::abs(std::abs(r) - 1) < 2 * h) continue;
                const double fd = (envelope(g, eps, r + h) - envelope(g, eps, r - h)) / (2 * h);
                const double y = yosida(g, eps, r);
                CHECK(std::abs(fd - y) <= 1e-6 * std::max(1.0, std::abs(y)));
            }
        }
    }
}

TEST_CASE("bulk and boundary yosida share their sign") {
    for (const auto& gb : kKinds) {
        for (const auto& gs : kKinds) {
            GraphPair p{gb, gs, 1.7, 0.0};
            for (double r : golden_samples(300, -3, 3)) {
                const double a = yosida(gb, 0.1, r);
                const double b = yosida_boundary(p, 0.1, r);
                CHECK(a * b >= 0.0);
                CHECK(a * r >= 0.0);
                CHECK(b * r >= 0.0);
            }
        }
    }
}

TEST_CASE("compatibility checks") {
    const auto sweep = linspace(-10, 10, 4001);
    for (const auto& g : kKinds) {
        GraphPair same{g, g, 1.0, 0.0};
        const auto rep = check_compatibility(same, 0.1, sweep);
        CHECK(rep.pass);
        CHECK(rep.worst_slack >= 0.0);
        CHECK(rep.samples == sweep.size());
    }
    const auto empty = check_compatibility(GraphPair{}, 0.1, {});
    CHECK(empty.pass);
    CHECK(empty.worst_slack == std::numeric_limits<double>::infinity());

    // polynomial bulk, obstacle boundary: recompute the slack sample by sample
    for (double c0 : {0.0, 0.5, 1.0}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            GraphPair p{GraphSpec::polynomial(), GraphSpec::obstacle(), rho, c0};
            const double eps = 0.1;
            double worst = std::numeric_limits<double>::infinity();
            for (double r : sweep) {
                const double lhs = std::abs(yosida(p.bulk, eps, r));
                const double rhs = rho * std::abs((r - std::clamp(r, -1.0, 1.0)) / (eps * rho)) + c0;
                worst = std::min(worst, rhs - lhs);
            }
            const auto rep = check_compatibility(p, eps, sweep);
            CHECK(rep.worst_slack == doctest::Approx(worst).epsilon(1e-12));
            CHECK(rep.pass == (worst >= -1e-12 * std::max(1.0, 10.0 / eps)));
        }
    }
    GraphPair none{GraphSpec::polynomial(), GraphSpec::obstacle(), 1.0, 0.0};
    CHECK_FALSE(check_compatibility(none, 0.1, sweep).pass);
}

TEST_CASE("pair validation") {
    CHECK_NOTHROW(validate_pair(GraphPair{}));
    CHECK_THROWS_AS(validate_pair(GraphPair{GraphSpec::polynomial(), GraphSpec::polynomial(), 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(validate_pair(GraphPair{GraphSpec::polynomial(), GraphSpec::polynomial(), 1.0, -1.0}), ConfigError);
    CHECK_THROWS_AS(validate_pair(GraphPair{GraphSpec::obstacle(), GraphSpec::polynomial(), 1.0, 0.0}), ConfigError);
    CHECK_NOTHROW(validate_pair(GraphPair{GraphSpec::obstacle(), GraphSpec::logarithmic(), 1.0, 0.0}));
    CHECK_THROWS_AS(validate_pair(GraphPair{GraphSpec::logarithmic(), GraphSpec::obstacle(), 1.0, 0.0}), ConfigError);
}

TEST_CASE("minimal-section bound sampling") {
    GraphPair same{GraphSpec::logarithmic(), GraphSpec::logarithmic(), 1.0, 0.0};
    CHECK(check_minimal_section_bound(same, linspace(-0.999, 0.999, 1001)).pass);
    GraphPair scaled{GraphSpec::polynomial(), GraphSpec::polynomial(), 0.5, 0.0};
    CHECK_FALSE(check_minimal_section_bound(scaled, linspace(-2, 2, 101)).pass);
}
