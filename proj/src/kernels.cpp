#include "surex/kernels.hpp"

namespace surex {

Matrix pairwise_sqdist(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_sqdist: dimension mismatch");
    const Vector na = a.rowwise().squaredNorm();
    const Vector nb = b.rowwise().squaredNorm();
    Matrix d2 = na.replicate(1, b.rows()) + nb.transpose().replicate(a.rows(), 1) - 2.0 * (a * b.transpose());
    // Cancellation can push tiny distances slightly negative.
    return d2.cwiseMax(0.0);
}

Matrix gram_from_sqdist(const KernelSpec& spec, const Matrix& sqdist) {
    spec.validate();
    const double l = spec.lengthscale;
    const double s2 = spec.signal_variance;
    if (spec.kind == KernelKind::SquaredExponential)
        return s2 * (-sqdist / (2.0 * l * l)).array().exp().matrix();
    Eigen::ArrayXXd r = sqdist.array().sqrt() * (std::sqrt(spec.smoothness == 2.5 ? 5.0 : 3.0) / l);
    if (spec.smoothness == 2.5) return (s2 * (1.0 + r + r.square() / 3.0) * (-r).exp()).matrix();
    return (s2 * (1.0 + r) * (-r).exp()).matrix();
}

Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
    return gram_from_sqdist(spec, pairwise_sqdist(a, b));
}

}  // namespace surex
