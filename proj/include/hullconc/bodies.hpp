#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hullconc/common.hpp"
#include "hullconc/directions.hpp"
#include "hullconc/distributions.hpp"
#include "hullconc/net.hpp"
#include "hullconc/order_stats.hpp"
#include "hullconc/polytope.hpp"

namespace hullconc {

/// Support oracle of the expected hull of n draws: h(theta) = E max_i <theta, X_i>.
/// Analytic mode evaluates the directional law's expected maximum by
/// quadrature (closed form for Gaussians); Monte Carlo mode averages
/// max_i <theta, X_i> over R replicate samples with common random numbers
/// (replicate r uses the same derived seed for every direction).
///
/// Evaluations are cached by direction; concurrent readers may duplicate a
/// computation but always store identical values (both modes are
/// deterministic in (model, n, mode parameters, theta)).
class ExpectedHullOracle {
public:
    enum class Mode { Analytic, MonteCarlo };

    ExpectedHullOracle(DistributionModel model, std::int64_t n, Mode mode = Mode::Analytic,
                       long replicates = 10000, std::uint64_t seed = 0xc0ffee)
        : model_(std::move(model)),
          n_(n),
          mode_(mode),
          replicates_(replicates),
          seed_(seed),
          state_(std::make_shared<State>()) {
        if (n < 1) throw std::invalid_argument("ExpectedHullOracle: n must be >= 1");
        if (mode == Mode::MonteCarlo && replicates < 2)
            throw std::invalid_argument("ExpectedHullOracle: need >= 2 replicates");
    }

    const DistributionModel& model() const { return model_; }
    std::int64_t n() const { return n_; }
    Mode mode() const { return mode_; }
    int dim() const { return model_.dim(); }

    double support(const Vector& theta) const { return evaluate(theta).first; }
    double operator()(const Vector& theta) const { return support(theta); }

    /// Monte Carlo standard error of the support estimate (0 in analytic mode).
    double standard_error(const Vector& theta) const { return evaluate(theta).second; }

    /// Support values (and MC standard errors) for directions given as columns.
    std::pair<Vector, Vector> support_batch(const Matrix& dirs) const {
        if (dirs.rows() != model_.dim())
            throw std::invalid_argument("support_batch: direction dimension mismatch");
        const Eigen::Index k = dirs.cols();
        if (mode_ == Mode::MonteCarlo) return mc_batch(dirs);
        Vector vals(k);
        for (Eigen::Index j = 0; j < k; ++j) vals[j] = analytic_eval(dirs.col(j));
        return {std::move(vals), Vector::Zero(k)};
    }

private:
    struct State {
        std::mutex mu;
        std::unordered_map<std::uint64_t, std::pair<double, double>> cache;
        double gaussian_cn = -1.0;  // E max of n standard normals, lazily filled
    };

    static std::uint64_t key(const Vector& theta) {
        return fnv1a64(theta.data(), static_cast<std::size_t>(theta.size()) * sizeof(double));
    }

    double gaussian_cn() const {
        {
            std::lock_guard<std::mutex> lk(state_->mu);
            if (state_->gaussian_cn >= 0.0) return state_->gaussian_cn;
        }
        const double cn = n_ == 1 ? 0.0 : expected_max(ScalarLaw::normal(1.0), n_);
        std::lock_guard<std::mutex> lk(state_->mu);
        if (state_->gaussian_cn < 0.0) state_->gaussian_cn = cn;
        return state_->gaussian_cn;
    }

    double analytic_eval(const Vector& theta) const {
        if (theta.norm() == 0.0)
            throw std::invalid_argument("expected_hull_support: zero direction");
        if (model_.kind() == DistributionModel::Kind::Gaussian) {
            // Directional law is N(0, theta' Sigma theta); its expected max
            // scales linearly, so one quadrature serves every direction.
            const double sigma = std::sqrt(theta.dot(model_.covariance() * theta));
            return sigma * gaussian_cn();
        }
        const std::uint64_t k = key(theta);
        {
            std::lock_guard<std::mutex> lk(state_->mu);
            const auto it = state_->cache.find(k);
            if (it != state_->cache.end()) return it->second.first;
        }
        const double v = expected_max(model_.directional_law(theta), n_);
        std::lock_guard<std::mutex> lk(state_->mu);
        state_->cache.emplace(k, std::make_pair(v, 0.0));
        return v;
    }

    std::pair<double, double> evaluate(const Vector& theta) const {
        if (theta.size() != model_.dim())
            throw std::invalid_argument("expected_hull_support: direction dimension mismatch");
        if (mode_ == Mode::Analytic) return {analytic_eval(theta), 0.0};

        if (theta.norm() == 0.0)
            throw std::invalid_argument("expected_hull_support: zero direction");
        const std::uint64_t k = key(theta);
        {
            std::lock_guard<std::mutex> lk(state_->mu);
            const auto it = state_->cache.find(k);
            if (it != state_->cache.end()) return it->second;
        }
        const auto vals_ses = mc_batch(theta);
        std::lock_guard<std::mutex> lk(state_->mu);
        return state_->cache.emplace(k, std::make_pair(vals_ses.first[0], vals_ses.second[0]))
            .first->second;
    }

    std::pair<Vector, Vector> mc_batch(const Matrix& dirs) const {
        const Eigen::Index k = dirs.cols();
        Vector sum = Vector::Zero(k), sumsq = Vector::Zero(k);
        for (long r = 0; r < replicates_; ++r) {
            const Matrix draws = model_.sample(n_, Rng::derive(seed_, static_cast<std::uint64_t>(r)));
            const Vector maxes = (draws * dirs).colwise().maxCoeff();
            sum += maxes;
            sumsq += maxes.cwiseProduct(maxes);
        }
        const double R = static_cast<double>(replicates_);
        Vector mean = sum / R;
        Vector var = (sumsq - R * mean.cwiseProduct(mean)) / (R - 1.0);
        Vector se = (var.cwiseMax(0.0) / R).cwiseSqrt();
        return {std::move(mean), std::move(se)};
    }

    DistributionModel model_;
    std::int64_t n_;
    Mode mode_;
    long replicates_;
    std::uint64_t seed_;
    std::shared_ptr<State> state_;
};

inline double expected_hull_support(const ExpectedHullOracle& oracle, const Vector& theta) {
    return oracle.support(theta);
}

/// Gauge oracle of the polar of the expected hull: |z| w.r.t. (E P_n)-polar
/// equals the expected-hull support at z.
inline GaugeOracle expected_hull_polar_gauge(const ExpectedHullOracle& oracle) {
    return GaugeOracle::from_support([oracle](const Vector& z) { return oracle.support(z); },
                                     oracle.dim(), "expected_hull_polar");
}

/// Directional bound function of the floating body at tail mass delta:
/// g(theta) = J_theta^{-1}(1 - delta). The body itself is the intersection
/// of the half-spaces {x : <theta,x> <= g(theta)}; every containment check
/// reduces to comparing g with another support function directionally.
class FloatingBodyOracle {
public:
    FloatingBodyOracle(DistributionModel model, double delta)
        : model_(std::move(model)), delta_(delta) {
        if (!(delta > 0.0 && delta < std::exp(-1.0)))
            throw std::domain_error("FloatingBodyOracle: delta must lie in (0, e^{-1})");
    }

    const DistributionModel& model() const { return model_; }
    double delta() const { return delta_; }

    double support(const Vector& theta) const {
        if (theta.size() != model_.dim())
            throw std::invalid_argument("floating_support: direction dimension mismatch");
        if (theta.norm() == 0.0) throw std::invalid_argument("floating_support: zero direction");
        if (model_.kind() == DistributionModel::Kind::Gaussian) {
            const double sigma = std::sqrt(theta.dot(model_.covariance() * theta));
            return sigma * normal_upper_quantile(delta_);
        }
        return model_.directional_law(theta).upper_quantile(delta_);
    }
    double operator()(const Vector& theta) const { return support(theta); }

private:
    DistributionModel model_;
    double delta_;
};

inline double floating_support(const FloatingBodyOracle& oracle, const Vector& theta) {
    return oracle.support(theta);
}

/// Net-certified two-sided support comparison. When every net point's
/// ratio h_P(w) / h_EH(w) = h_P(w) (net points are normalized to
/// h_EH = 1) lies in [1 - eps/2, 1 + eps/2] and the net resolution delta
/// is at most eps/5, the decomposition argument promotes the finite check
/// to (1-eps) EH <= P <= (1+eps) EH over all directions.
struct SandwichCertificate {
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t net_size = 0;
    std::vector<double> ratios;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    bool certified = false;
    std::vector<std::size_t> failures;  // indices of net points outside the band
    std::string reason;                 // empty when certified
};

inline SandwichCertificate certify_sandwich(const Polytope& P, const ExpectedHullOracle& EH,
                                            double epsilon, const Net& net, double delta) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw std::invalid_argument("certify_sandwich: epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0 && delta <= epsilon / 5.0 + 1e-15))
        throw std::invalid_argument("certify_sandwich: need 0 < delta <= epsilon/5");
    if (net.epsilon > delta * (1.0 + 1e-12))
        throw std::invalid_argument("certify_sandwich: net resolution coarser than delta");
    if (net.points.empty()) throw std::invalid_argument("certify_sandwich: empty net");
    if (P.dim() != EH.dim()) throw std::invalid_argument("certify_sandwich: dimension mismatch");

    SandwichCertificate cert;
    cert.epsilon = epsilon;
    cert.delta = delta;
    cert.net_size = net.size();

    Matrix dirs(EH.dim(), static_cast<Eigen::Index>(net.size()));
    for (std::size_t i = 0; i < net.size(); ++i)
        dirs.col(static_cast<Eigen::Index>(i)) = net.points[i];
    const Vector h_eh = EH.support_batch(dirs).first;
    for (Eigen::Index i = 0; i < h_eh.size(); ++i) {
        if (std::fabs(h_eh[i] - 1.0) > 1e-6)
            throw std::invalid_argument(
                "certify_sandwich: net point " + std::to_string(i) +
                " is not on the expected-hull polar boundary (h_EH = " +
                std::to_string(h_eh[i]) + ")");
    }

    if (!origin_in_interior(P)) {
        cert.certified = false;
        cert.reason = "origin_not_interior";
        return cert;
    }

    const Vector h_p = support_batch(P, dirs);
    cert.ratios.assign(h_p.data(), h_p.data() + h_p.size());
    cert.min_ratio = h_p.minCoeff();
    cert.max_ratio = h_p.maxCoeff();
    const double lo = 1.0 - epsilon / 2.0, hi = 1.0 + epsilon / 2.0;
    for (std::size_t i = 0; i < cert.ratios.size(); ++i)
        if (!(cert.ratios[i] >= lo && cert.ratios[i] <= hi)) cert.failures.push_back(i);
    cert.certified = cert.failures.empty();
    if (!cert.certified) cert.reason = "ratio_out_of_band";
    return cert;
}

/// Directional lower bounds on the containment defects of P against the
/// expected hull: over random unit directions, eps_out = max h_P/h_EH - 1
/// and eps_in = 1 - min h_P/h_EH. True defects are >= these values.
struct BruteforceDefects {
    double eps_out = 0.0;
    double eps_in = 0.0;
};

inline BruteforceDefects sandwich_bruteforce(const Polytope& P, const ExpectedHullOracle& EH,
                                             long m_dirs, std::uint64_t seed) {
    if (m_dirs < 1000) throw std::invalid_argument("sandwich_bruteforce: need m_dirs >= 1000");
    const Matrix dirs = random_directions(P.dim(), m_dirs, seed);
    const Vector h_p = support_batch(P, dirs);
    const Vector h_eh = EH.support_batch(dirs).first;
    const Eigen::ArrayXd ratio = h_p.array() / h_eh.array();
    return {ratio.maxCoeff() - 1.0, 1.0 - ratio.minCoeff()};
}

/// Monte Carlo estimate of mu((1+eps) E P_n) with per-draw membership
/// verdicts. Exact membership is available for Gaussian models (ellipsoid
/// gauge) and in d=1 (interval body); otherwise the certification net
/// decides: a draw is certified out when one net half-space is violated,
/// certified in when the net maximum is small enough that the
/// decomposition bound closes, and indeterminate in the thin remaining
/// shell. The head estimate counts draws not certified out.
struct InclusionEstimate {
    long draws = 0;
    long certified_in = 0;
    long certified_out = 0;
    long indeterminate = 0;
    double estimate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    bool exact_membership = false;
};

inline InclusionEstimate inclusion_probability(const DistributionModel& model,
                                               const ExpectedHullOracle& EH, double epsilon,
                                               long m, std::uint64_t seed,
                                               const Net* net = nullptr) {
    if (m < 10000) throw std::domain_error("inclusion_probability: need m >= 10^4 draws");
    if (!(epsilon > 0.0)) throw std::domain_error("inclusion_probability: epsilon must be > 0");
    InclusionEstimate est;
    est.draws = m;
    const Matrix X = model.sample(m, seed);
    const double scale = 1.0 + epsilon;

    if (model.kind() == DistributionModel::Kind::Gaussian &&
        EH.mode() == ExpectedHullOracle::Mode::Analytic) {
        est.exact_membership = true;
        const double cn = EH.support(Vector::Unit(model.dim(), 0)) /
                          std::sqrt(model.covariance()(0, 0));
        Eigen::LLT<Matrix> llt(model.covariance());
        const Matrix W = llt.matrixL().solve(X.transpose());  // whitened draws, d x m
        for (long i = 0; i < m; ++i) {
            const double gauge = W.col(i).norm() / cn;
            ++(gauge <= scale ? est.certified_in : est.certified_out);
        }
    } else if (model.dim() == 1) {
        est.exact_membership = true;
        const double hi = scale * EH.support(Vector::Constant(1, 1.0));
        const double lo = -scale * EH.support(Vector::Constant(1, -1.0));
        for (long i = 0; i < m; ++i)
            ++((X(i, 0) >= lo && X(i, 0) <= hi) ? est.certified_in : est.certified_out);
    } else {
        Net local;
        if (net == nullptr) {
            local = build_net(expected_hull_polar_gauge(EH), epsilon / 5.0, model.dim(), 20000,
                              Rng::derive(seed, 0x7e7));
            net = &local;
        }
        Matrix dirs(model.dim(), static_cast<Eigen::Index>(net->size()));
        for (std::size_t i = 0; i < net->size(); ++i)
            dirs.col(static_cast<Eigen::Index>(i)) = net->points[i];
        const double dlt = net->epsilon;
        const Vector peak = (X * dirs).rowwise().maxCoeff();
        for (long i = 0; i < m; ++i) {
            if (peak[i] > scale)
                ++est.certified_out;
            else if (peak[i] * (1.0 + 2.0 * dlt) <= scale)
                ++est.certified_in;
            else
                ++est.indeterminate;
        }
    }

    const auto ci = wilson95(m - est.certified_out, m);
    est.estimate = static_cast<double>(m - est.certified_out) / static_cast<double>(m);
    est.wilson_lo = ci.lo;
    est.wilson_hi = ci.hi;
    return est;
}

}  // namespace hullconc
