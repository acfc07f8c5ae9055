#pragma once

#include "surex/gp.hpp"
#include "surex/types.hpp"

namespace surex {

enum class SurpriseKind { Shannon, Bayesian };

struct SurpriseConfig {
    SurpriseKind kind = SurpriseKind::Shannon;
    double shannon_k = 1.96;          // band half-width in predictive standard deviations
    double bayesian_threshold = 0.5;  // nats
    bool include_noise_in_band = true;
    Index max_reference_points = 256;
};

/// Negative log density of the observation under N(mean, variance).
double shannon_surprise(double observed, double mean, double variance);

/// Score of an observation exactly k standard deviations from the mean.
/// An observation is surprising when its score exceeds this.
double shannon_threshold(double variance, double k);

/// KL divergence KL(p || q) between multivariate Gaussians, closed form.
double gaussian_kl(const Vector& mean_p, const Matrix& cov_p, const Vector& mean_q,
                   const Matrix& cov_q);

double gaussian_kl_1d(double mean_p, double var_p, double mean_q, double var_q);

/// Deterministic cap: evenly strided row subset when the pool exceeds max_rows.
Matrix cap_reference(const Matrix& pool, Index max_rows);

struct SurpriseAssessment {
    double score = 0.0;
    double threshold = 0.0;
    bool surprised = false;
};

/// Shannon verdict for one observation against the model's predictive band at x.
SurpriseAssessment assess_shannon(const GpModel& model, const Vector& x, double observed,
                                  const SurpriseConfig& config);

/// Bayesian verdict: KL between the two models' joint predictive beliefs over
/// the reference locations, before relative to after. The reference covariance
/// includes observation noise when configured, which also keeps it well
/// conditioned for smooth kernels.
SurpriseAssessment assess_bayesian(const GpModel& before, const GpModel& after,
                                   const Matrix& reference, const SurpriseConfig& config);

}  // namespace surex
