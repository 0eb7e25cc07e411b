#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "hullconc/common.hpp"
#include "hullconc/normal.hpp"
#include "hullconc/quadrature.hpp"
#include "hullconc/rng.hpp"
#include "hullconc/roots.hpp"

using namespace hullconc;

TEST_CASE("rng: sequence is reproducible and counter-addressable", "[rng]") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Rng c(42);
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < 16; ++i) seq.push_back(c.next_u64());
    Rng d(42);
    for (int i = 0; i < 16; ++i) REQUIRE(d.at(static_cast<std::uint64_t>(i)) == seq[static_cast<std::size_t>(i)]);
}

TEST_CASE("rng: derived streams differ from each other and the master", "[rng]") {
    const std::uint64_t master = 7;
    Rng r0(Rng::derive(master, 0)), r1(Rng::derive(master, 1)), rm(master);
    int agree01 = 0, agree0m = 0;
    for (int i = 0; i < 64; ++i) {
        const auto x0 = r0.next_u64(), x1 = r1.next_u64(), xm = rm.next_u64();
        agree01 += (x0 == x1);
        agree0m += (x0 == xm);
    }
    REQUIRE(agree01 == 0);
    REQUIRE(agree0m == 0);
    REQUIRE(Rng::derive(master, 0) != Rng::derive(master, 1));
    REQUIRE(Rng::derive(master, 0) != Rng::derive(master + 1, 0));
}

TEST_CASE("rng: doubles live in the expected ranges with sane moments", "[rng]") {
    Rng r(123);
    const int N = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
        const double u = r.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sumsq += u * u;
    }
    const double mean = sum / N;
    const double var = sumsq / N - mean * mean;
    REQUIRE(std::fabs(mean - 0.5) < 4.0 / std::sqrt(12.0 * N));
    REQUIRE(std::fabs(var - 1.0 / 12.0) < 0.002);

    Rng q(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = q.next_open01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal: cdf/quantile round trip and frozen quantiles", "[normal]") {
    // Phi^-1(0.975) and Phi^-1(11/12), high-precision reference values.
    REQUIRE(normal_quantile(0.975) == Catch::Approx(1.959963984540054).margin(1e-12));
    REQUIRE(normal_quantile(11.0 / 12.0) == Catch::Approx(1.382994127100638).margin(1e-11));
    REQUIRE(normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-15));

    // Round trip through p is information-limited on the right (p near 1
    // has absolute resolution ~1e-16), so cap the two-sided sweep at 4.5
    // and check the far left tail, where p itself stays well-resolved.
    for (double x = -4.5; x <= 4.5; x += 0.25) {
        REQUIRE(normal_cdf(x) + normal_cdf(-x) == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(normal_quantile(normal_cdf(x)) == Catch::Approx(x).margin(1e-10));
    }
    for (double x = -12.0; x <= -5.0; x += 0.5)
        REQUIRE(normal_quantile(normal_cdf(x)) == Catch::Approx(x).margin(1e-9));
    REQUIRE_THROWS_AS(normal_quantile(0.0), std::domain_error);
    REQUIRE_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal: upper quantile keeps precision in deep tails", "[normal]") {
    // sf(normal_upper_quantile(s)) = s even where 1-s rounds to 1.
    for (double s : {1e-3, 1e-6, 1e-9, 1e-12, 1e-15, 1e-30, 1e-100, 1e-250}) {
        const double x = normal_upper_quantile(s);
        REQUIRE(normal_sf(x) == Catch::Approx(s).epsilon(1e-8));
    }
    REQUIRE(normal_upper_quantile(0.5) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("quadrature: exactness and adaptive tolerance", "[quadrature]") {
    using quadrature::integrate;
    REQUIRE(integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
            Catch::Approx(1.0 / 3.0).margin(1e-13));
    REQUIRE(integrate([](double x) { return std::exp(-x); }, 0.0, 50.0, 1e-12) ==
            Catch::Approx(1.0).margin(1e-11));
    REQUIRE(integrate([](double x) { return normal_pdf(x); }, -10.0, 10.0, 1e-12) ==
            Catch::Approx(1.0).margin(1e-11));
    // Kink at 0 forces subdivision.
    REQUIRE(integrate([](double x) { return std::fabs(x); }, -1.0, 1.0, 1e-10) ==
            Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("quadrature: segmented integration splits at given breakpoints", "[quadrature]") {
    using quadrature::integrate_segmented;
    const std::vector<double> breaks{0.0, 1e-6, 1e-3, 1.0, 50.0};
    const double v = integrate_segmented([](double x) { return std::exp(-x); }, breaks, 1e-12);
    REQUIRE(v == Catch::Approx(1.0 - std::exp(-50.0)).margin(1e-11));
}

TEST_CASE("roots: bracketed solve hits tolerance and rejects bad brackets", "[roots]") {
    const double r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14);
    REQUIRE(r == Catch::Approx(0.7390851332151607).margin(1e-12));
    const double q = find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-14);
    REQUIRE(q == Catch::Approx(std::cbrt(2.0)).margin(1e-12));
    REQUIRE_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12),
                      std::runtime_error);
}

TEST_CASE("wilson95: containment, symmetry, degenerate input", "[common]") {
    const auto ci = wilson95(95, 100);
    REQUIRE(ci.lo < 0.95);
    REQUIRE(ci.hi > 0.95);
    REQUIRE(ci.lo > 0.85);
    REQUIRE(ci.hi < 0.99);

    const auto half = wilson95(50, 100);
    REQUIRE(0.5 - half.lo == Catch::Approx(half.hi - 0.5).margin(1e-12));

    const auto all = wilson95(100, 100);
    REQUIRE(all.hi == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(all.lo > 0.95);

    const auto none = wilson95(0, 0);
    REQUIRE(none.lo == 0.0);
    REQUIRE(none.hi == 1.0);
}

TEST_CASE("fnv1a64: reference vectors", "[common]") {
    REQUIRE(fnv1a64(std::string{}) == 0xcbf29ce484222325ULL);
    REQUIRE(fnv1a64(std::string{"a"}) == 0xaf63dc4c8601ec8cULL);
    REQUIRE(fnv1a64(std::string{"foobar"}) == 0x85944171f73967e8ULL);
    REQUIRE(to_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}
