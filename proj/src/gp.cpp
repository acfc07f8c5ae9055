#include "surex/gp.hpp"

#include "surex/nelder_mead.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace surex {

CholeskyResult cholesky_with_jitter(const Matrix& sym, double scale) {
    if (sym.rows() != sym.cols()) throw std::invalid_argument("cholesky_with_jitter: matrix not square");
    const double ref = (scale > 0.0 && std::isfinite(scale)) ? scale : 1.0;
    std::vector<double> attempted;
    for (double rel = 1e-10; rel <= 1e-4 * 1.0000001; rel *= 10.0) {
        const double jit = rel * ref;
        attempted.push_back(jit);
        CholeskyResult out;
        out.llt.compute(sym + jit * Matrix::Identity(sym.rows(), sym.cols()));
        if (out.llt.info() == Eigen::Success) {
            out.jitter = jit;
            return out;
        }
    }
    std::ostringstream msg;
    msg << "Cholesky factorization failed after jitter attempts:";
    for (double j : attempted) msg << ' ' << j;
    throw NumericalError(msg.str(), attempted);
}

GpModel::GpModel(KernelSpec kernel, double noise_variance, Dataset data, double mean_offset)
    : kernel_(kernel), noise_variance_(noise_variance), data_(std::move(data)), mean_offset_(mean_offset) {
    kernel_.validate();
    if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_))
        throw std::invalid_argument("GpModel: noise variance must be finite and >= 0");
    data_.validate();
    if (data_.size() == 0) throw std::invalid_argument("GpModel: empty training set");

    const Index n = data_.size();
    Matrix ky = gram_from_sqdist(kernel_, pairwise_sqdist(data_.inputs, data_.inputs));
    ky.diagonal().array() += noise_variance_;
    CholeskyResult chol = cholesky_with_jitter(ky, kernel_.signal_variance);
    llt_ = std::move(chol.llt);
    jitter_ = chol.jitter;

    const Vector residual = data_.responses.array() - mean_offset_;
    alpha_ = llt_.solve(residual);
    const double log_det_half = llt_.matrixLLT().diagonal().array().log().sum();
    lml_ = -0.5 * residual.dot(alpha_) - log_det_half -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Matrix GpModel::cross_gram(const Matrix& queries) const {
    if (queries.cols() != data_.dim())
        throw std::invalid_argument("GpModel: query dimension mismatch");
    return gram(kernel_, data_.inputs, queries);  // n x q
}

Vector GpModel::predict_mean(const Matrix& queries) const {
    Vector mean = cross_gram(queries).transpose() * alpha_;
    mean.array() += mean_offset_;
    return mean;
}

PredictiveDistribution GpModel::predict(const Matrix& queries, bool include_noise) const {
    const Matrix kstar = cross_gram(queries);
    PredictiveDistribution out;
    out.mean = kstar.transpose() * alpha_;
    out.mean.array() += mean_offset_;
    const Matrix v = llt_.matrixL().solve(kstar);
    out.variance =
        (kernel_.signal_variance - v.colwise().squaredNorm().transpose().array()).max(0.0).matrix();
    if (include_noise) out.variance.array() += noise_variance_;
    return out;
}

JointPredictive GpModel::predict_joint(const Matrix& queries, bool include_noise) const {
    const Matrix kstar = cross_gram(queries);
    JointPredictive out;
    out.mean = kstar.transpose() * alpha_;
    out.mean.array() += mean_offset_;
    const Matrix prior = gram_from_sqdist(kernel_, pairwise_sqdist(queries, queries));
    const Matrix v = llt_.matrixL().solve(kstar);
    out.covariance = prior - v.transpose() * v;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    if (include_noise) out.covariance.diagonal().array() += noise_variance_;
    return out;
}

PredictivePoint GpModel::predict_point(const Vector& query, bool include_noise) const {
    const PredictiveDistribution d = predict(query.transpose(), include_noise);
    return {d.mean[0], d.variance[0]};
}

GpModel GpModel::with_observation(const Vector& x, double y) const {
    Dataset extended = data_;
    extended.append(x, y);
    return GpModel(kernel_, noise_variance_, std::move(extended), mean_offset_);
}

namespace {

struct StandardizedView {
    Vector responses;  // centred and scaled
    double mean = 0.0;
    double scale = 1.0;
};

StandardizedView standardize(const Vector& y) {
    StandardizedView out;
    const Index n = y.size();
    out.mean = y.mean();
    const double var = (y.array() - out.mean).square().sum() / static_cast<double>(n);
    out.scale = (var > 1e-300) ? std::sqrt(var) : 1.0;
    out.responses = (y.array() - out.mean) / out.scale;
    return out;
}

double standardized_neg_lml(const Matrix& sqdist, const Vector& ys, const KernelSpec& spec,
                            double noise_variance) {
    const Index n = ys.size();
    Matrix ky = gram_from_sqdist(spec, sqdist);
    ky.diagonal().array() += noise_variance;
    try {
        const CholeskyResult chol = cholesky_with_jitter(ky, spec.signal_variance);
        const Vector alpha = chol.llt.solve(ys);
        const double log_det_half = chol.llt.matrixLLT().diagonal().array().log().sum();
        const double lml = -0.5 * ys.dot(alpha) - log_det_half -
                           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
        return std::isfinite(lml) ? -lml : std::numeric_limits<double>::max();
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::max();
    }
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

GpModel fit_hyperparameters(const Dataset& data, const FitConfig& config) {
    data.validate();
    if (data.size() == 0) throw std::invalid_argument("fit_hyperparameters: empty training set");
    if (config.multistarts < 1) throw std::invalid_argument("fit_hyperparameters: multistarts must be >= 1");
    if (!config.fit_noise && (!(config.noise_variance >= 0.0) || !std::isfinite(config.noise_variance)))
        throw std::invalid_argument("fit_hyperparameters: fixed noise variance must be finite and >= 0");

    const StandardizedView std_view = standardize(data.responses);
    const Matrix sqdist = pairwise_sqdist(data.inputs, data.inputs);

    // Lengthscale box spans two decades below to one above the data diagonal.
    const Vector spread = data.inputs.colwise().maxCoeff() - data.inputs.colwise().minCoeff();
    const double diag = std::max(spread.norm(), 1e-8);
    const double fixed_noise_std = config.fit_noise
                                       ? 0.0
                                       : config.noise_variance / (std_view.scale * std_view.scale);

    const int dims = config.fit_noise ? 3 : 2;
    Vector lo(dims), hi(dims);
    lo[0] = std::log(1e-2 * diag);
    hi[0] = std::log(10.0 * diag);
    lo[1] = std::log(1e-4);  // signal variance relative to unit response variance
    hi[1] = std::log(1e4);
    if (config.fit_noise) {
        lo[2] = std::log(1e-6);
        hi[2] = std::log(1.0);
    }

    auto objective = [&](const Vector& theta) {
        KernelSpec spec;
        spec.kind = config.kind;
        spec.smoothness = config.smoothness;
        spec.lengthscale = std::exp(theta[0]);
        spec.signal_variance = std::exp(theta[1]);
        const double noise = config.fit_noise ? std::exp(theta[2]) : fixed_noise_std;
        return standardized_neg_lml(sqdist, std_view.responses, spec, noise);
    };

    bool have_best = false;
    Vector best_theta;
    double best_value = std::numeric_limits<double>::max();
    for (int k = 0; k < config.multistarts; ++k) {
        Vector start(dims);
        for (int d = 0; d < dims; ++d) {
            // Low-discrepancy fractions keep the starts spread without an RNG.
            const double f = frac(0.5 + 0.6180339887498949 * k + d / 3.0);
            start[d] = lo[d] + f * (hi[d] - lo[d]);
        }
        const NelderMeadResult run =
            nelder_mead(objective, start, lo, hi, config.tol, config.max_evaluations);
        if (!have_best || run.value < best_value) {
            have_best = true;
            best_value = run.value;
            best_theta = run.x;
        }
    }
    if (!have_best || best_value >= std::numeric_limits<double>::max())
        throw NumericalError("fit_hyperparameters: no start produced a usable factorization", {});

    KernelSpec fitted;
    fitted.kind = config.kind;
    fitted.smoothness = config.smoothness;
    fitted.lengthscale = std::exp(best_theta[0]);
    fitted.signal_variance = std::exp(best_theta[1]) * std_view.scale * std_view.scale;
    const double noise = config.fit_noise
                             ? std::exp(best_theta[2]) * std_view.scale * std_view.scale
                             : config.noise_variance;
    return GpModel(fitted, noise, data, std_view.mean);
}

}  // namespace surex
