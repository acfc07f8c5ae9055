#include "surex/surprise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace surex {

double shannon_surprise(double observed, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("shannon_surprise: variance must be > 0");
    const double r = observed - mean;
    return 0.5 * std::log(2.0 * std::numbers::pi * variance) + r * r / (2.0 * variance);
}

double shannon_threshold(double variance, double k) {
    if (!(variance > 0.0)) throw std::invalid_argument("shannon_threshold: variance must be > 0");
    return 0.5 * std::log(2.0 * std::numbers::pi * variance) + 0.5 * k * k;
}

double gaussian_kl(const Vector& mean_p, const Matrix& cov_p, const Vector& mean_q,
                   const Matrix& cov_q) {
    const Index d = mean_p.size();
    if (mean_q.size() != d || cov_p.rows() != d || cov_p.cols() != d || cov_q.rows() != d ||
        cov_q.cols() != d)
        throw std::invalid_argument("gaussian_kl: dimension mismatch");

    const double scale_p = cov_p.diagonal().mean();
    const double scale_q = cov_q.diagonal().mean();
    const CholeskyResult lp = cholesky_with_jitter(cov_p, scale_p);
    const CholeskyResult lq = cholesky_with_jitter(cov_q, scale_q);

    // tr(Sq^-1 Sp) = ||Lq^-1 Lp||_F^2 and both log-dets come from the factors.
    const Matrix a = lq.llt.matrixL().solve(Matrix(lp.llt.matrixL()));
    const double trace_term = a.squaredNorm();
    const Vector w = lq.llt.matrixL().solve(mean_q - mean_p);
    const double log_det_p = 2.0 * lp.llt.matrixLLT().diagonal().array().log().sum();
    const double log_det_q = 2.0 * lq.llt.matrixLLT().diagonal().array().log().sum();
    return 0.5 * (trace_term + w.squaredNorm() - static_cast<double>(d) + log_det_q - log_det_p);
}

double gaussian_kl_1d(double mean_p, double var_p, double mean_q, double var_q) {
    if (!(var_p > 0.0) || !(var_q > 0.0))
        throw std::invalid_argument("gaussian_kl_1d: variances must be > 0");
    const double diff = mean_q - mean_p;
    return 0.5 * (var_p / var_q + diff * diff / var_q - 1.0 + std::log(var_q / var_p));
}

Matrix cap_reference(const Matrix& pool, Index max_rows) {
    if (max_rows < 1) throw std::invalid_argument("cap_reference: max_rows must be >= 1");
    const Index n = pool.rows();
    if (n <= max_rows) return pool;
    Matrix out(max_rows, pool.cols());
    for (Index j = 0; j < max_rows; ++j) out.row(j) = pool.row((j * n) / max_rows);
    return out;
}

SurpriseAssessment assess_shannon(const GpModel& model, const Vector& x, double observed,
                                  const SurpriseConfig& config) {
    const PredictivePoint p = model.predict_point(x, config.include_noise_in_band);
    SurpriseAssessment out;
    out.score = shannon_surprise(observed, p.mean, p.variance);
    out.threshold = shannon_threshold(p.variance, config.shannon_k);
    out.surprised = out.score > out.threshold;
    return out;
}

SurpriseAssessment assess_bayesian(const GpModel& before, const GpModel& after,
                                   const Matrix& reference, const SurpriseConfig& config) {
    if (reference.rows() == 0)
        throw std::invalid_argument("assess_bayesian: empty reference set");
    const Matrix ref = cap_reference(reference, config.max_reference_points);
    const JointPredictive p = before.predict_joint(ref, config.include_noise_in_band);
    const JointPredictive q = after.predict_joint(ref, config.include_noise_in_band);
    SurpriseAssessment out;
    out.score = gaussian_kl(p.mean, p.covariance, q.mean, q.covariance);
    out.threshold = config.bayesian_threshold;
    out.surprised = out.score > out.threshold;
    return out;
}

}  // namespace surex
