#pragma once

#include "surex/kernels.hpp"
#include "surex/types.hpp"

#include <Eigen/Cholesky>

namespace surex {

struct PredictiveDistribution {
    Vector mean;
    Vector variance;  // marginal, clamped at zero
};

struct JointPredictive {
    Vector mean;
    Matrix covariance;
};

struct PredictivePoint {
    double mean = 0.0;
    double variance = 0.0;
};

struct CholeskyResult {
    Eigen::LLT<Matrix> llt;
    double jitter = 0.0;  // absolute diagonal addition that succeeded
};

/// Factor a symmetric matrix, adding scale-relative diagonal jitter. Levels
/// 1e-10*scale up to 1e-4*scale are tried in decade steps; the first is always
/// applied, so even an exactly singular PSD matrix factors. Throws
/// NumericalError listing every attempted level when all fail.
CholeskyResult cholesky_with_jitter(const Matrix& sym, double scale);

/// Zero-mean GP regressor with an optional constant response offset. Direct
/// construction leaves the offset at zero, which makes the marginal likelihood
/// the plain zero-mean expression; the fitting path centres on the response
/// mean instead. Hyperparameters are always in original response units.
class GpModel {
public:
    GpModel(KernelSpec kernel, double noise_variance, Dataset data, double mean_offset = 0.0);

    const KernelSpec& kernel() const { return kernel_; }
    double noise_variance() const { return noise_variance_; }
    double mean_offset() const { return mean_offset_; }
    const Dataset& data() const { return data_; }
    Index size() const { return data_.size(); }
    double jitter() const { return jitter_; }

    double log_marginal_likelihood() const { return lml_; }

    Vector predict_mean(const Matrix& queries) const;
    PredictiveDistribution predict(const Matrix& queries, bool include_noise = false) const;
    JointPredictive predict_joint(const Matrix& queries, bool include_noise = false) const;
    PredictivePoint predict_point(const Vector& query, bool include_noise = false) const;

    /// Same hyperparameters and offset, one more observation, fresh factorization.
    GpModel with_observation(const Vector& x, double y) const;

private:
    KernelSpec kernel_;
    double noise_variance_;
    Dataset data_;
    double mean_offset_;

    Eigen::LLT<Matrix> llt_;
    Vector alpha_;  // (K + sigma^2 I + jitter I)^{-1} (y - offset)
    double jitter_ = 0.0;
    double lml_ = 0.0;

    Matrix cross_gram(const Matrix& queries) const;
};

struct FitConfig {
    KernelKind kind = KernelKind::SquaredExponential;
    double smoothness = 2.5;
    bool fit_noise = false;
    double noise_variance = 0.0;  // held fixed when fit_noise is false
    int multistarts = 5;
    double tol = 1e-6;
    int max_evaluations = 400;  // budget per start
};

/// Maximum-likelihood hyperparameters via multistart Nelder-Mead over log
/// lengthscale and log signal variance (plus log noise variance when fitted).
/// The search runs on mean/scale-standardized responses so the box bounds are
/// data-independent, but the returned model carries original-unit values; with
/// fit_noise false the configured noise variance is passed through untouched.
/// The result's marginal likelihood is never below that of any start point.
GpModel fit_hyperparameters(const Dataset& data, const FitConfig& config);

}  // namespace surex
