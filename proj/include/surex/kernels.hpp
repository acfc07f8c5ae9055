#pragma once

#include "surex/types.hpp"

#include <cmath>
#include <stdexcept>

namespace surex {

enum class KernelKind { SquaredExponential, Matern };

struct KernelSpec {
    KernelKind kind = KernelKind::SquaredExponential;
    double lengthscale = 1.0;      // input-space units
    double signal_variance = 1.0;  // response-units^2
    double smoothness = 2.5;       // Matern only; 1.5 or 2.5, never fitted

    void validate() const {
        if (!(lengthscale > 0.0)) throw std::invalid_argument("KernelSpec: lengthscale must be > 0");
        if (!(signal_variance > 0.0)) throw std::invalid_argument("KernelSpec: signal variance must be > 0");
        if (kind == KernelKind::Matern && smoothness != 1.5 && smoothness != 2.5)
            throw std::invalid_argument("KernelSpec: Matern smoothness must be 1.5 or 2.5");
    }
};

namespace detail {

inline double se_from_sqdist(double d2, double l, double s2) {
    return s2 * std::exp(-d2 / (2.0 * l * l));
}

inline double matern_from_dist(double d, double l, double s2, double nu) {
    if (nu == 2.5) {
        const double r = std::sqrt(5.0) * d / l;
        return s2 * (1.0 + r + r * r / 3.0) * std::exp(-r);
    }
    const double r = std::sqrt(3.0) * d / l;
    return s2 * (1.0 + r) * std::exp(-r);
}

}  // namespace detail

/// Covariance between two points. Accepts any vector expressions of equal size.
template <typename A, typename B>
double kernel_eval(const KernelSpec& spec, const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    spec.validate();
    if (a.size() != b.size()) throw std::invalid_argument("kernel_eval: dimension mismatch");
    const double d2 = (a.derived() - b.derived()).squaredNorm();
    if (spec.kind == KernelKind::SquaredExponential)
        return detail::se_from_sqdist(d2, spec.lengthscale, spec.signal_variance);
    return detail::matern_from_dist(std::sqrt(d2), spec.lengthscale, spec.signal_variance, spec.smoothness);
}

/// Pairwise squared Euclidean distances between the rows of A and B.
Matrix pairwise_sqdist(const Matrix& a, const Matrix& b);

/// Gram matrix from precomputed squared distances. Distances do not depend on
/// hyperparameters, so callers cache them across repeated evaluations.
Matrix gram_from_sqdist(const KernelSpec& spec, const Matrix& sqdist);

/// Convenience: gram matrix between two point sets (rows are points).
Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

}  // namespace surex
