#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hullconc/distributions.hpp"
#include "hullconc/normal.hpp"

using namespace hullconc;

namespace {

Matrix identity_cov(int d) { return Matrix::Identity(d, d); }

double ks_distance(const ScalarLaw& law, const Vector& proj_sorted) {
    // One-sample Kolmogorov-Smirnov statistic against law.cdf.
    const auto n = proj_sorted.size();
    double ks = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double F = law.cdf(proj_sorted[i]);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        ks = std::max({ks, std::fabs(F - lo), std::fabs(F - hi)});
    }
    return ks;
}

double ks_of_model(const DistributionModel& m, const Vector& theta, std::uint64_t seed) {
    const auto law = m.directional_law(theta);
    Vector proj = m.sample(100000, seed) * theta;
    std::sort(proj.data(), proj.data() + proj.size());
    return ks_distance(law, proj);
}

}  // namespace

TEST_CASE("model construction: validation of degenerate inputs", "[distributions]") {
    REQUIRE_THROWS_AS(DistributionModel::uniform_box((Vector(2) << 1.0, 0.0).finished()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(DistributionModel::laplace_product((Vector(1) << -1.0).finished()),
                      std::invalid_argument);

    Matrix bad = identity_cov(2);
    bad(0, 0) = -1.0;  // not positive definite
    REQUIRE_THROWS_AS(DistributionModel::gaussian(bad), std::invalid_argument);

    Matrix asym = identity_cov(2);
    asym(0, 1) = 0.5;  // not symmetric
    REQUIRE_THROWS_AS(DistributionModel::gaussian(asym), std::invalid_argument);

    Matrix singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    REQUIRE_THROWS_AS(DistributionModel::gaussian(singular), std::invalid_argument);
}

TEST_CASE("sampling: pure in (n, seed) and respects box support", "[distributions]") {
    const auto box = DistributionModel::uniform_box((Vector(2) << 1.0, 3.0).finished());
    const Matrix a = box.sample(500, 99);
    const Matrix b = box.sample(500, 99);
    REQUIRE((a - b).cwiseAbs().maxCoeff() == 0.0);
    const Matrix c = box.sample(500, 100);
    REQUIRE((a - c).cwiseAbs().maxCoeff() > 0.0);
    REQUIRE(a.col(0).cwiseAbs().maxCoeff() <= 1.0);
    REQUIRE(a.col(1).cwiseAbs().maxCoeff() <= 3.0);
    REQUIRE(a.col(1).cwiseAbs().maxCoeff() > 1.0);  // actually uses the wider width
}

TEST_CASE("gaussian sampling: empirical covariance matches Sigma", "[distributions]") {
    Matrix cov(2, 2);
    cov << 4.0, 1.2, 1.2, 1.0;
    const auto g = DistributionModel::gaussian(cov);
    const int m = 200000;
    const Matrix X = g.sample(m, 4242);
    const Vector mean = X.colwise().mean();
    REQUIRE(mean.norm() < 0.02);
    const Matrix S = X.transpose() * X / static_cast<double>(m);
    REQUIRE((S - cov).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("directional_law: gaussian closed form through isotropy", "[distributions]") {
    const auto g2 = DistributionModel::gaussian(identity_cov(2));
    const Vector theta = (Vector(2) << 0.6, 0.8).finished();  // unit norm
    const auto law = g2.directional_law(theta);
    REQUIRE(law.cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(law.cdf(1.0) == Catch::Approx(normal_cdf(1.0)).margin(1e-15));
    REQUIRE(law.quantile(0.975) == Catch::Approx(1.959963984540054).margin(1e-11));

    Matrix cov(2, 2);
    cov << 4.0, 0.0, 0.0, 1.0;
    const auto law2 = DistributionModel::gaussian(cov).directional_law(
        (Vector(2) << 1.0, 0.0).finished());
    REQUIRE(law2.scale() == Catch::Approx(2.0).margin(1e-15));

    REQUIRE_THROWS_AS(g2.directional_law(Vector::Zero(2)), std::invalid_argument);
    REQUIRE_THROWS_AS(g2.directional_law(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("directional_law: box marginals, axis and diagonal", "[distributions]") {
    const auto box = DistributionModel::uniform_box((Vector(2) << 1.0, 1.0).finished());
    const auto axis = box.directional_law((Vector(2) << 1.0, 0.0).finished());
    REQUIRE(axis.cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(axis.cdf(0.5) == Catch::Approx(0.75).margin(1e-15));
    REQUIRE(axis.lower() == -1.0);

    const auto diag = box.directional_law((Vector(2) << 1.0, 1.0).finished());
    REQUIRE(diag.cdf(0.0) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(diag.cdf(1.0) == Catch::Approx(7.0 / 8.0).margin(1e-14));
    REQUIRE(diag.lower() == -2.0);
}

TEST_CASE("directional_law: KS fit over fresh draws for every catalog model",
          "[distributions]") {
    const Vector theta = (Vector(2) << 0.8, -0.6).finished();
    const auto gauss = DistributionModel::gaussian(identity_cov(2));
    const auto box = DistributionModel::uniform_box((Vector(2) << 1.0, 2.0).finished());
    const auto lap = DistributionModel::laplace_product((Vector(2) << 1.0, 0.5).finished());
    REQUIRE(ks_of_model(gauss, theta, 11) < 0.01);
    REQUIRE(ks_of_model(box, theta, 12) < 0.01);
    REQUIRE(ks_of_model(lap, theta, 13) < 0.01);
}

TEST_CASE("directional_law: scaling equivariance J_{c theta}(c x) = J_theta(x)",
          "[distributions]") {
    const double c = 2.5;
    const Vector theta = (Vector(2) << 0.3, 1.1).finished();
    const auto box = DistributionModel::uniform_box((Vector(2) << 1.0, 2.0).finished());
    const auto g = DistributionModel::gaussian(identity_cov(2));
    for (const auto& model : {box, g}) {
        const auto law1 = model.directional_law(theta);
        const auto law2 = model.directional_law(c * theta);
        for (double x : {-2.0, -0.5, 0.0, 0.7, 1.9})
            REQUIRE(law2.cdf(c * x) == Catch::Approx(law1.cdf(x)).margin(1e-12));
    }
}

TEST_CASE("directional_law: laplace marginal matches the exact 1D convolution on axes",
          "[distributions]") {
    // Along an axis the projection is a single Laplace(b); compare the
    // calibrated empirical law against the closed-form CDF.
    const auto lap = DistributionModel::laplace_product((Vector(2) << 1.5, 1.0).finished());
    const auto law = lap.directional_law((Vector(2) << 1.0, 0.0).finished());
    auto laplace_cdf = [](double x, double b) {
        return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
    };
    double worst = 0.0;
    for (double x = -6.0; x <= 6.0; x += 0.05)
        worst = std::max(worst, std::fabs(law.cdf(x) - laplace_cdf(x, 1.5)));
    REQUIRE(worst < 0.01);
}

TEST_CASE("directional_law: empirical calibration is deterministic per direction",
          "[distributions]") {
    const auto lap = DistributionModel::laplace_product((Vector(2) << 1.0, 1.0).finished());
    const Vector theta = (Vector(2) << 0.6, 0.8).finished();
    const auto a = lap.directional_law(theta);
    const auto b = lap.directional_law(theta);
    for (double t : {0.01, 0.3, 0.5, 0.9, 0.999})
        REQUIRE(a.quantile(t) == b.quantile(t));
    // A different direction must calibrate a different sample.
    const auto c = lap.directional_law((Vector(2) << 0.8, 0.6).finished());
    REQUIRE(a.quantile(0.9) != c.quantile(0.9));
}

TEST_CASE("empirical_wrapper: recentered projections and shape checks", "[distributions]") {
    // Wrapped sampler: shifted gaussian; the wrapper recenters directional laws.
    auto sampler = [](std::int64_t n, std::uint64_t seed) {
        const auto g = DistributionModel::gaussian(Matrix::Identity(2, 2));
        Matrix X = g.sample(n, seed);
        X.col(0).array() += 0.75;
        return X;
    };
    const auto wrapped = DistributionModel::empirical_wrapper(2, sampler, 100000, 5);
    const auto law = wrapped.directional_law((Vector(2) << 1.0, 0.0).finished());
    REQUIRE(std::fabs(law.quantile(0.5)) < 0.02);  // median back near 0
    REQUIRE_THROWS_AS(DistributionModel::empirical_wrapper(0, sampler), std::invalid_argument);

    auto bad_shape = [](std::int64_t n, std::uint64_t seed) {
        (void)seed;
        return Matrix::Zero(n, 3);
    };
    const auto wrapped_bad = DistributionModel::empirical_wrapper(2, bad_shape, 1000, 5);
    REQUIRE_THROWS_AS(wrapped_bad.sample(10, 1), std::runtime_error);
}

TEST_CASE("validate_model: pass on healthy models, eigenvalue concentration",
          "[distributions]") {
    const auto g2 = DistributionModel::gaussian(identity_cov(2));
    const auto diag = validate_model(g2, 10000, 3);
    REQUIRE(diag.pass);
    REQUIRE(diag.mean_ok);
    REQUIRE(diag.eig_ok);

    const auto g3 = DistributionModel::gaussian(identity_cov(3));
    const auto d3 = validate_model(g3, 10000, 4);
    REQUIRE(d3.min_eigenvalue > 0.9);
    REQUIRE(d3.min_eigenvalue < 1.1);

    REQUIRE_THROWS_AS(validate_model(g2, 10, 1), std::domain_error);
}
