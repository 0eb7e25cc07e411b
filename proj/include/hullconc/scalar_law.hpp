#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hullconc/normal.hpp"
#include "hullconc/roots.hpp"

namespace hullconc {

/// One-dimensional law exposing the CDF J, the density f, and quantiles.
/// Instances are immutable; copies share the implementation.
///
/// All catalog laws are log-concave. `upper_quantile(tail)` addresses the
/// quantile by its upper tail mass so that J^-1(1-s) keeps full precision
/// for s near zero, which the order-statistics code depends on.
class ScalarLaw {
public:
    enum class Kind { AnalyticClosedForm, PiecewisePolynomial, Empirical };

    struct Impl {
        virtual ~Impl() = default;
        virtual double cdf(double x) const = 0;
        virtual double sf(double x) const { return 1.0 - cdf(x); }
        virtual double density(double x) const = 0;
        virtual double quantile(double t) const {
            // Generic bracketed inversion; closed-form laws override.
            double a = lower(), b = upper();
            if (!std::isfinite(a)) {
                a = -scale();
                while (cdf(a) > t) a *= 2.0;
            }
            if (!std::isfinite(b)) {
                b = scale();
                while (cdf(b) < t) b *= 2.0;
            }
            return find_root([&](double x) { return cdf(x) - t; }, a, b,
                             cdf(a) - t, cdf(b) - t, 1e-12 * std::max(1.0, scale()));
        }
        virtual double upper_quantile(double tail) const { return quantile(1.0 - tail); }
        virtual double lower() const = 0;
        virtual double upper() const = 0;
        virtual double scale() const = 0;
        virtual Kind kind() const = 0;
        virtual std::string name() const = 0;
    };

    explicit ScalarLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    double cdf(double x) const { return impl_->cdf(x); }
    double sf(double x) const { return impl_->sf(x); }
    double density(double x) const { return impl_->density(x); }
    double quantile(double t) const {
        if (!(t > 0.0 && t < 1.0)) throw std::domain_error("ScalarLaw::quantile: t outside (0,1)");
        return impl_->quantile(t);
    }
    double upper_quantile(double tail) const {
        if (!(tail > 0.0 && tail < 1.0))
            throw std::domain_error("ScalarLaw::upper_quantile: tail outside (0,1)");
        return impl_->upper_quantile(tail);
    }
    double lower() const { return impl_->lower(); }
    double upper() const { return impl_->upper(); }
    double scale() const { return impl_->scale(); }
    Kind kind() const { return impl_->kind(); }
    bool analytic() const { return impl_->kind() != Kind::Empirical; }
    std::string name() const { return impl_->name(); }

    static ScalarLaw uniform(double a, double b);
    static ScalarLaw normal(double sigma);
    static ScalarLaw shifted_exponential();
    static ScalarLaw triangular();
    static ScalarLaw uniform_sum(std::vector<double> coeffs);
    static ScalarLaw empirical(std::vector<double> sample, std::string label = "empirical");

private:
    std::shared_ptr<const Impl> impl_;
};

namespace laws {

class Uniform final : public ScalarLaw::Impl {
public:
    Uniform(double a, double b) : a_(a), b_(b) {
        if (!(b > a)) throw std::invalid_argument("uniform law: need b > a");
    }
    double cdf(double x) const override {
        return std::clamp((x - a_) / (b_ - a_), 0.0, 1.0);
    }
    double sf(double x) const override {
        return std::clamp((b_ - x) / (b_ - a_), 0.0, 1.0);
    }
    double density(double x) const override {
        return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
    }
    double quantile(double t) const override { return a_ + t * (b_ - a_); }
    double upper_quantile(double tail) const override { return b_ - tail * (b_ - a_); }
    double lower() const override { return a_; }
    double upper() const override { return b_; }
    double scale() const override { return 0.5 * (b_ - a_); }
    ScalarLaw::Kind kind() const override { return ScalarLaw::Kind::AnalyticClosedForm; }
    std::string name() const override {
        return "uniform[" + std::to_string(a_) + "," + std::to_string(b_) + "]";
    }

private:
    double a_, b_;
};

class Normal final : public ScalarLaw::Impl {
public:
    explicit Normal(double sigma) : sigma_(sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("normal law: need sigma > 0");
    }
    double cdf(double x) const override { return normal_cdf(x / sigma_); }
    double sf(double x) const override { return normal_sf(x / sigma_); }
    double density(double x) const override { return normal_pdf(x / sigma_) / sigma_; }
    double quantile(double t) const override { return sigma_ * normal_quantile(t); }
    double upper_quantile(double tail) const override {
        return sigma_ * normal_upper_quantile(tail);
    }
    double lower() const override { return -std::numeric_limits<double>::infinity(); }
    double upper() const override { return std::numeric_limits<double>::infinity(); }
    double scale() const override { return sigma_; }
    ScalarLaw::Kind kind() const override { return ScalarLaw::Kind::AnalyticClosedForm; }
    std::string name() const override { return "normal(" + std::to_string(sigma_) + ")"; }

private:
    double sigma_;
};

/// Exponential with unit rate shifted to mean zero: density e^{-(x+1)} on [-1, inf).
class ShiftedExponential final : public ScalarLaw::Impl {
public:
    double cdf(double x) const override { return x <= -1.0 ? 0.0 : -std::expm1(-(x + 1.0)); }
    double sf(double x) const override { return x <= -1.0 ? 1.0 : std::exp(-(x + 1.0)); }
    double density(double x) const override { return x < -1.0 ? 0.0 : std::exp(-(x + 1.0)); }
    double quantile(double t) const override { return -1.0 - std::log1p(-t); }
    double upper_quantile(double tail) const override { return -1.0 - std::log(tail); }
    double lower() const override { return -1.0; }
    double upper() const override { return std::numeric_limits<double>::infinity(); }
    double scale() const override { return 1.0; }
    ScalarLaw::Kind kind() const override { return ScalarLaw::Kind::AnalyticClosedForm; }
    std::string name() const override { return "shifted_exp"; }
};

/// Law of sum_i c_i U_i with U_i iid uniform on [-1,1]; the directional
/// marginal of a box. CDF by inclusion-exclusion over subset sums: with
/// a_i = 2|c_i| and s = x + sum|c_i|,
///   J(x) = sum_T (-1)^{|T|} (s - a_T)_+^m / (m! prod a_i).
/// Symmetric about 0, so the survival function is J(-x) exactly.
class UniformSum final : public ScalarLaw::Impl {
public:
    explicit UniformSum(std::vector<double> coeffs) {
        for (double c : coeffs)
            if (c != 0.0) a_.push_back(2.0 * std::fabs(c));
        m_ = static_cast<int>(a_.size());
        if (m_ == 0) throw std::invalid_argument("uniform_sum: all coefficients zero");
        if (m_ > 15) throw std::invalid_argument("uniform_sum: too many terms (max 15)");
        half_ = 0.0;
        double prod = 1.0;
        for (double ai : a_) {
            half_ += 0.5 * ai;
            prod *= ai;
        }
        double fact = 1.0;
        for (int i = 2; i <= m_; ++i) fact *= i;
        cdf_norm_ = 1.0 / (fact * prod);
        pdf_norm_ = cdf_norm_ * m_;
        subset_sums_.resize(std::size_t{1} << m_);
        subset_sums_[0] = 0.0;
        for (std::size_t mask = 1; mask < subset_sums_.size(); ++mask) {
            const int bit = std::countr_zero(mask);
            subset_sums_[mask] = subset_sums_[mask & (mask - 1)] + a_[static_cast<std::size_t>(bit)];
        }
        min_a_ = *std::min_element(a_.begin(), a_.end());
        // Mass of the first polynomial segment, where the CDF is a single term.
        first_seg_mass_ = cdf_norm_ * powi(min_a_, m_);
    }

    double cdf(double x) const override {
        const double s = x + half_;
        if (s <= 0.0) return 0.0;
        if (x >= half_) return 1.0;
        if (x > 0.0) return 1.0 - raw_cdf(-x + half_);  // symmetry avoids cancellation
        return raw_cdf(s);
    }
    double sf(double x) const override { return cdf(-x); }
    double density(double x) const override {
        const double s = std::fabs(x) >= half_ ? -1.0 : half_ - std::fabs(x);
        if (s <= 0.0) return 0.0;
        double acc = 0.0;
        for (std::size_t mask = 0; mask < subset_sums_.size(); ++mask) {
            const double u = s - subset_sums_[mask];
            if (u > 0.0) acc += sign(mask) * powi(u, m_ - 1);
        }
        return pdf_norm_ * acc;
    }
    double quantile(double t) const override {
        if (t >= 0.5) return t == 0.5 ? 0.0 : -quantile(1.0 - t);
        if (t <= first_seg_mass_) {
            // Single-term segment: J(x) = (x + half)^m / (m! prod a), exact inverse.
            return std::pow(t / cdf_norm_, 1.0 / m_) - half_;
        }
        const double a = min_a_ - half_;
        return find_root([&](double x) { return cdf(x) - t; }, a, 0.0,
                         first_seg_mass_ - t, 0.5 - t, 1e-14 * std::max(1.0, half_));
    }
    double upper_quantile(double tail) const override { return -quantile(tail); }
    double lower() const override { return -half_; }
    double upper() const override { return half_; }
    double scale() const override { return half_; }
    ScalarLaw::Kind kind() const override { return ScalarLaw::Kind::PiecewisePolynomial; }
    std::string name() const override {
        std::string s = "uniform_sum(";
        for (std::size_t i = 0; i < a_.size(); ++i)
            s += (i ? "," : "") + std::to_string(0.5 * a_[i]);
        return s + ")";
    }

private:
    static double powi(double x, int k) {
        double r = 1.0;
        for (; k > 0; --k) r *= x;
        return r;
    }
    static double sign(std::size_t mask) { return (std::popcount(mask) & 1) ? -1.0 : 1.0; }
    double raw_cdf(double s) const {
        double acc = 0.0;
        for (std::size_t mask = 0; mask < subset_sums_.size(); ++mask) {
            const double u = s - subset_sums_[mask];
            if (u > 0.0) acc += sign(mask) * powi(u, m_);
        }
        return std::clamp(cdf_norm_ * acc, 0.0, 1.0);
    }

    std::vector<double> a_;
    std::vector<double> subset_sums_;
    int m_ = 0;
    double half_ = 0.0, cdf_norm_ = 0.0, pdf_norm_ = 0.0, min_a_ = 0.0, first_seg_mass_ = 0.0;
};

/// Piecewise-linear CDF through a sorted calibration sample, with the
/// type-7 order-statistic plug-in as its exact quantile inverse.
class Empirical final : public ScalarLaw::Impl {
public:
    Empirical(std::vector<double> sorted, std::string label)
        : xs_(std::move(sorted)), label_(std::move(label)) {
        if (xs_.size() < 2) throw std::invalid_argument("empirical law: need >= 2 points");
        if (!std::is_sorted(xs_.begin(), xs_.end()))
            throw std::invalid_argument("empirical law: sample not sorted");
        double mean = 0.0;
        for (double x : xs_) mean += x;
        mean /= static_cast<double>(xs_.size());
        double var = 0.0;
        for (double x : xs_) var += (x - mean) * (x - mean);
        scale_ = std::sqrt(var / static_cast<double>(xs_.size() - 1));
        if (scale_ <= 0.0) scale_ = 1.0;
    }
    double cdf(double x) const override {
        if (x <= xs_.front()) return 0.0;
        if (x >= xs_.back()) return 1.0;
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
        const double x0 = xs_[k], x1 = xs_[k + 1];
        const double frac = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        return (static_cast<double>(k) + frac) / static_cast<double>(xs_.size() - 1);
    }
    double density(double x) const override {
        const double h = 1e-3 * scale_;
        return (cdf(x + h) - cdf(x - h)) / (2.0 * h);
    }
    double quantile(double t) const override {
        const double h = t * static_cast<double>(xs_.size() - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(h), xs_.size() - 2);
        return xs_[k] + (h - static_cast<double>(k)) * (xs_[k + 1] - xs_[k]);
    }
    double lower() const override { return xs_.front(); }
    double upper() const override { return xs_.back(); }
    double scale() const override { return scale_; }
    ScalarLaw::Kind kind() const override { return ScalarLaw::Kind::Empirical; }
    std::string name() const override {
        return label_ + "(R=" + std::to_string(xs_.size()) + ")";
    }

private:
    std::vector<double> xs_;
    std::string label_;
    double scale_ = 1.0;
};

}  // namespace laws

inline ScalarLaw ScalarLaw::uniform(double a, double b) {
    return ScalarLaw(std::make_shared<laws::Uniform>(a, b));
}
inline ScalarLaw ScalarLaw::normal(double sigma) {
    return ScalarLaw(std::make_shared<laws::Normal>(sigma));
}
inline ScalarLaw ScalarLaw::shifted_exponential() {
    return ScalarLaw(std::make_shared<laws::ShiftedExponential>());
}
inline ScalarLaw ScalarLaw::triangular() {
    return ScalarLaw(std::make_shared<laws::UniformSum>(std::vector<double>{1.0, 1.0}));
}
inline ScalarLaw ScalarLaw::uniform_sum(std::vector<double> coeffs) {
    double only = 0.0;
    int nonzero = 0;
    for (double c : coeffs) {
        if (c != 0.0) {
            only = c;
            ++nonzero;
        }
    }
    if (nonzero == 1) {
        const double c = std::fabs(only);
        return uniform(-c, c);
    }
    return ScalarLaw(std::make_shared<laws::UniformSum>(std::move(coeffs)));
}
inline ScalarLaw ScalarLaw::empirical(std::vector<double> sample, std::string label) {
    std::sort(sample.begin(), sample.end());
    return ScalarLaw(std::make_shared<laws::Empirical>(std::move(sample), std::move(label)));
}

}  // namespace hullconc
