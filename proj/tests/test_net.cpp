#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "hullconc/net.hpp"
#include "hullconc/rng.hpp"

using namespace hullconc;

namespace {

Polytope square() {
    Matrix V(4, 2);
    V << 1, 1, 1, -1, -1, 1, -1, -1;
    return {V};
}

Polytope triangle() {
    Matrix V(3, 2);
    V << 2, 0, -1, 1, -1, -1;
    return {V};
}

Polytope interval1d() {
    Matrix V(2, 1);
    V << -1, 1;
    return {V};
}

/// Random boundary point of the gauge's unit body.
Vector boundary_probe(const GaugeOracle& body, Rng& rng) {
    Vector u(body.dim);
    double g = 0.0;
    do {
        for (int i = 0; i < body.dim; ++i) u[i] = normal_quantile_fast(rng.next_open01());
        g = body(u);
    } while (!(g > 1e-9));
    return u / g;
}

}  // namespace

TEST_CASE("build_net: interval boundary is exactly two points", "[net]") {
    const auto body = GaugeOracle::from_polytope(interval1d(), "interval");
    const auto net = build_net(body, 0.4, 1, 2000, 3);
    REQUIRE(net.size() == 2);
    std::vector<double> pts = {net.points[0][0], net.points[1][0]};
    std::sort(pts.begin(), pts.end());
    REQUIRE(pts[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(pts[1] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(net_cardinality_bound(0.4, 1) == Catch::Approx(7.5).margin(1e-12));
}

TEST_CASE("build_net: square net stays under the volumetric ceiling and covers",
          "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    const auto net = build_net(body, 0.5, 2, 5000, 4);
    REQUIRE(net.size() <= 36);
    REQUIRE(net.size() >= 4);  // a 0.5-net of the square boundary cannot be tiny

    // Every net point is on the boundary and pairwise separated.
    for (const auto& w : net.points) REQUIRE(body(w) == Catch::Approx(1.0).margin(1e-9));
    for (std::size_t i = 0; i < net.size(); ++i)
        for (std::size_t j = 0; j < net.size(); ++j)
            if (i != j) REQUIRE(body(net.points[i] - net.points[j]) > 0.5 - 1e-9);

    Rng rng(5);
    for (int k = 0; k < 10000; ++k) {
        const Vector z = boundary_probe(body, rng);
        REQUIRE(net.nearest(z).first <= 0.5 + 1e-9);
    }
}

TEST_CASE("build_net: non-symmetric triangle covering in the ordered gauge", "[net]") {
    const auto body = GaugeOracle::from_polytope(triangle(), "triangle");
    const auto net = build_net(body, 0.25, 2, 5000, 6);
    REQUIRE(static_cast<double>(net.size()) <= net_cardinality_bound(0.25, 2));

    Rng rng(7);
    bool saw_asymmetry = false;
    for (int k = 0; k < 10000; ++k) {
        const Vector z = boundary_probe(body, rng);
        const auto [dist, idx] = net.nearest(z);
        REQUIRE(dist <= 0.25 + 1e-9);
        const double reversed = body(net.points[idx] - z);
        if (std::fabs(reversed - dist) > 1e-6) saw_asymmetry = true;
    }
    REQUIRE(saw_asymmetry);  // the gauge order genuinely matters for this body
}

TEST_CASE("build_net: rejects bad arguments", "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    REQUIRE_THROWS_AS(build_net(body, 0.0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(build_net(body, 1.0, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(build_net(body, 0.3, 3), std::invalid_argument);  // dim mismatch
    REQUIRE_THROWS_AS(build_net(body, 0.3, 2, 0), std::invalid_argument);

    Matrix off(4, 2);
    off << 3, 1, 3, -1, 5, 1, 5, -1;  // 0 outside
    REQUIRE_THROWS_AS(GaugeOracle::from_polytope({off}), std::invalid_argument);
}

TEST_CASE("decompose: net members terminate immediately", "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    const auto net = build_net(body, 0.5, 2, 5000, 4);
    const Vector theta = net.points[net.size() / 2];
    const auto dec = decompose(theta, net);
    REQUIRE((dec.base - theta).norm() == 0.0);
    REQUIRE(dec.terms.empty());
    REQUIRE(dec.final_residual() <= 1e-14);
}

TEST_CASE("decompose: square boundary points reach the geometric residual bound",
          "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    const auto net = build_net(body, 0.5, 2, 5000, 4);
    Rng rng(9);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector theta = boundary_probe(body, rng);
        const auto dec = decompose(theta, net, 10);
        REQUIRE(dec.final_residual() <= std::pow(0.5, 11) + 1e-12);
        // Residuals telescope: the recorded value is the gauge of the
        // reconstruction error.
        REQUIRE(body(theta - dec.reconstruct()) ==
                Catch::Approx(dec.final_residual()).margin(1e-12));
        for (std::size_t i = 0; i < dec.residuals.size(); ++i)
            REQUIRE(dec.residuals[i] <= std::pow(0.5, i + 1) * (1.0 + 1e-9));
    }
}

TEST_CASE("decompose: triangle coefficients decay geometrically", "[net]") {
    const auto body = GaugeOracle::from_polytope(triangle(), "triangle");
    const auto net = build_net(body, 0.25, 2, 5000, 6);
    Rng rng(10);
    for (int rep = 0; rep < 25; ++rep) {
        const Vector theta = boundary_probe(body, rng);
        const auto dec = decompose(theta, net, 5);
        for (std::size_t i = 0; i < dec.terms.size(); ++i) {
            const double eps_i = dec.terms[i].first;
            REQUIRE(eps_i >= 0.0);
            REQUIRE(eps_i <= std::pow(0.25, i + 1) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("decompose: diagnostics on bad input and broken covering", "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    const auto net = build_net(body, 0.5, 2, 5000, 4);
    REQUIRE_THROWS_AS(decompose((Vector(2) << 2.0, 0.0).finished(), net),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(decompose((Vector(2) << 1.0, 0.0).finished(), Net{body, 0.5, {}}),
                      std::invalid_argument);

    // A one-point "net" cannot cover the opposite side; decompose must report
    // the uncovered direction instead of looping.
    Net broken{body, 0.5, {(Vector(2) << 1.0, 0.0).finished()}};
    REQUIRE_THROWS_WITH(decompose((Vector(2) << -1.0, 0.0).finished(), broken),
                        Catch::Matchers::ContainsSubstring("covering violated"));
}

TEST_CASE("net cardinality tracks the epsilon power law", "[net]") {
    const auto body = GaugeOracle::from_polytope(square(), "square");
    std::size_t prev = 0;
    for (double eps : {0.5, 0.25, 0.1}) {
        const auto net = build_net(body, eps, 2, 5000, 11);
        REQUIRE(static_cast<double>(net.size()) <= net_cardinality_bound(eps, 2));
        REQUIRE(net.size() >= prev);  // finer nets cannot shrink
        prev = net.size();
    }
}
