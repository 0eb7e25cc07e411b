#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hullconc/common.hpp"
#include "hullconc/rng.hpp"
#include "hullconc/scalar_law.hpp"

namespace hullconc {

/// Centered sampling model on R^d. Draws are mean zero by construction
/// (empirical wrappers are re-centered against their calibration run).
/// Sampling is a pure function of (model, n, seed): the same arguments
/// reproduce the same matrix across platforms.
class DistributionModel {
public:
    enum class Kind { Gaussian, UniformBox, LaplaceProduct, EmpiricalWrapper };

    using Sampler = std::function<Matrix(std::int64_t n, std::uint64_t seed)>;

    static DistributionModel gaussian(Matrix covariance) {
        const auto d = covariance.rows();
        if (d < 1 || covariance.cols() != d)
            throw std::invalid_argument("gaussian model: covariance must be square, d >= 1");
        const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * std::max(1.0, covariance.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("gaussian model: covariance not symmetric");
        Eigen::LLT<Matrix> llt(covariance);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("gaussian model: covariance not positive definite");
        DistributionModel m;
        m.kind_ = Kind::Gaussian;
        m.dim_ = static_cast<int>(d);
        m.cov_ = std::move(covariance);
        m.chol_ = llt.matrixL();
        m.label_ = "gaussian(d=" + std::to_string(d) + ")";
        return m;
    }

    static DistributionModel uniform_box(Vector halfwidths) {
        if (halfwidths.size() < 1 || (halfwidths.array() <= 0.0).any())
            throw std::invalid_argument("uniform_box model: half-widths must be positive");
        DistributionModel m;
        m.kind_ = Kind::UniformBox;
        m.dim_ = static_cast<int>(halfwidths.size());
        m.widths_ = std::move(halfwidths);
        m.label_ = "uniform_box(d=" + std::to_string(m.dim_) + ")";
        return m;
    }

    static DistributionModel laplace_product(Vector scales) {
        if (scales.size() < 1 || (scales.array() <= 0.0).any())
            throw std::invalid_argument("laplace_product model: scales must be positive");
        DistributionModel m;
        m.kind_ = Kind::LaplaceProduct;
        m.dim_ = static_cast<int>(scales.size());
        m.widths_ = std::move(scales);
        m.label_ = "laplace_product(d=" + std::to_string(m.dim_) + ")";
        return m;
    }

    /// Wraps a caller-supplied sampler. Directional laws are calibrated
    /// empirically with `calibration_size` projected draws; the wrapped
    /// sampler must itself be pure in (n, seed).
    static DistributionModel empirical_wrapper(int dim, Sampler sampler,
                                               std::int64_t calibration_size = 200000,
                                               std::uint64_t calibration_seed = 0x5ca1ab1e) {
        if (dim < 1) throw std::invalid_argument("empirical_wrapper: dim must be >= 1");
        if (!sampler) throw std::invalid_argument("empirical_wrapper: sampler is empty");
        if (calibration_size < 2)
            throw std::invalid_argument("empirical_wrapper: calibration size too small");
        DistributionModel m;
        m.kind_ = Kind::EmpiricalWrapper;
        m.dim_ = dim;
        m.sampler_ = std::move(sampler);
        m.calib_size_ = calibration_size;
        m.calib_seed_ = calibration_seed;
        m.label_ = "empirical_wrapper(d=" + std::to_string(dim) + ")";
        return m;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::string& label() const { return label_; }
    const Matrix& covariance() const { return cov_; }
    const Vector& widths() const { return widths_; }

    /// n rows, one draw per row.
    Matrix sample(std::int64_t n, std::uint64_t seed) const {
        if (n < 0) throw std::domain_error("sample: n must be >= 0");
        Rng rng(seed);
        Matrix out(n, dim_);
        switch (kind_) {
            case Kind::Gaussian: {
                for (std::int64_t i = 0; i < n; ++i)
                    for (int j = 0; j < dim_; ++j)
                        out(i, j) = normal_quantile_fast(rng.next_open01());
                out = out * chol_.transpose();
                break;
            }
            case Kind::UniformBox: {
                for (std::int64_t i = 0; i < n; ++i)
                    for (int j = 0; j < dim_; ++j)
                        out(i, j) = widths_[j] * (2.0 * rng.next_double() - 1.0);
                break;
            }
            case Kind::LaplaceProduct: {
                for (std::int64_t i = 0; i < n; ++i)
                    for (int j = 0; j < dim_; ++j) {
                        const double u = 2.0 * rng.next_open01() - 1.0;
                        const double mag = -std::log1p(-std::fabs(u));
                        out(i, j) = widths_[j] * (u < 0.0 ? -mag : mag);
                    }
                break;
            }
            case Kind::EmpiricalWrapper: {
                out = sampler_(n, seed);
                if (out.rows() != n || out.cols() != dim_)
                    throw std::runtime_error("empirical_wrapper: sampler returned wrong shape");
                break;
            }
        }
        return out;
    }

    /// Law of <theta, X>. Closed-form for Gaussian (normal with variance
    /// theta' Sigma theta) and boxes (weighted sum of uniforms); otherwise
    /// an empirical law from a calibration run keyed on (seed, theta), so
    /// repeated calls with the same direction agree bit-for-bit.
    ScalarLaw directional_law(const Vector& theta) const {
        if (theta.size() != dim_)
            throw std::invalid_argument("directional_law: direction has wrong dimension");
        if (theta.norm() == 0.0)
            throw std::invalid_argument("directional_law: direction must be nonzero");
        switch (kind_) {
            case Kind::Gaussian:
                return ScalarLaw::normal(std::sqrt(theta.dot(cov_ * theta)));
            case Kind::UniformBox: {
                std::vector<double> coeffs(static_cast<std::size_t>(dim_));
                for (int j = 0; j < dim_; ++j)
                    coeffs[static_cast<std::size_t>(j)] = theta[j] * widths_[j];
                return ScalarLaw::uniform_sum(std::move(coeffs));
            }
            case Kind::LaplaceProduct:
            case Kind::EmpiricalWrapper: {
                const std::int64_t r =
                    kind_ == Kind::LaplaceProduct ? kLaplaceCalibration : calib_size_;
                const std::uint64_t base =
                    kind_ == Kind::LaplaceProduct ? kLaplaceCalibSeed : calib_seed_;
                const Matrix draws = sample(r, Rng::derive(base, direction_key(theta)));
                Vector proj = draws * theta;
                const double mean = proj.mean();
                std::vector<double> xs(proj.data(), proj.data() + proj.size());
                if (kind_ == Kind::EmpiricalWrapper)
                    for (double& x : xs) x -= mean;  // wrapper samplers may be off-center
                return ScalarLaw::empirical(std::move(xs), label_);
            }
        }
        throw std::logic_error("directional_law: unreachable");
    }

private:
    static constexpr std::int64_t kLaplaceCalibration = 200000;
    static constexpr std::uint64_t kLaplaceCalibSeed = 0x1ace5eed;

    static std::uint64_t direction_key(const Vector& theta) {
        return fnv1a64(theta.data(), static_cast<std::size_t>(theta.size()) * sizeof(double));
    }

    Kind kind_ = Kind::Gaussian;
    int dim_ = 0;
    Matrix cov_;
    Matrix chol_;
    Vector widths_;
    Sampler sampler_;
    std::int64_t calib_size_ = 0;
    std::uint64_t calib_seed_ = 0;
    std::string label_;
};

inline Matrix sample(const DistributionModel& model, std::int64_t n, std::uint64_t seed) {
    return model.sample(n, seed);
}

inline ScalarLaw directional_law(const DistributionModel& model, const Vector& theta) {
    return model.directional_law(theta);
}

/// Monte Carlo sanity check of the centering and non-degeneracy
/// assumptions: sample mean close to zero and sample covariance bounded
/// away from singular.
struct ModelDiagnostics {
    double mean_norm = 0.0;
    double min_eigenvalue = 0.0;
    bool mean_ok = false;
    bool eig_ok = false;
    bool pass = false;
};

inline ModelDiagnostics validate_model(const DistributionModel& model, std::int64_t m = 20000,
                                       std::uint64_t seed = 0xda7a) {
    if (m < 1000) throw std::domain_error("validate_model: need m >= 1000");
    const Matrix draws = model.sample(m, seed);
    const Vector mean = draws.colwise().mean();
    const Matrix centered = draws.rowwise() - mean.transpose();
    const Matrix cov =
        centered.transpose() * centered / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    ModelDiagnostics diag;
    diag.mean_norm = mean.norm();
    diag.min_eigenvalue = es.eigenvalues().minCoeff();
    diag.mean_ok = diag.mean_norm <= 5.0 * model.dim() / std::sqrt(static_cast<double>(m));
    diag.eig_ok = diag.min_eigenvalue >= 1e-6;
    diag.pass = diag.mean_ok && diag.eig_ok;
    return diag;
}

}  // namespace hullconc
