#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace surex {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A point in the design space. Rows of a Matrix are also accepted wherever
/// a Location is expected; free functions take Eigen expressions directly.
using Location = Eigen::VectorXd;

/// Thrown when a linear-algebra step cannot be stabilized. Carries the
/// diagonal jitter levels that were attempted before giving up.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::vector<double> jitter_attempts = {})
        : std::runtime_error(what), jitter_attempts_(std::move(jitter_attempts)) {}

    const std::vector<double>& jitter_attempts() const { return jitter_attempts_; }

private:
    std::vector<double> jitter_attempts_;
};

/// Training data: one input row per observation.
struct Dataset {
    Matrix inputs;     // n x P
    Vector responses;  // n

    Index size() const { return inputs.rows(); }
    Index dim() const { return inputs.cols(); }

    void validate() const {
        if (inputs.rows() != responses.size())
            throw std::invalid_argument("Dataset: |X| and |y| differ");
        if (inputs.rows() > 0 && inputs.cols() == 0)
            throw std::invalid_argument("Dataset: zero-dimensional inputs");
    }

    void append(const Eigen::Ref<const Vector>& x, double y) {
        if (inputs.rows() > 0 && x.size() != inputs.cols())
            throw std::invalid_argument("Dataset: appended point has wrong dimension");
        inputs.conservativeResize(inputs.rows() + 1, inputs.rows() == 0 ? x.size() : inputs.cols());
        inputs.row(inputs.rows() - 1) = x.transpose();
        responses.conservativeResize(responses.size() + 1);
        responses(responses.size() - 1) = y;
    }
};

/// Affine response transform applied inside a model: internal = (y - mean) / scale.
struct Standardization {
    double mean = 0.0;
    double scale = 1.0;
};

}  // namespace surex
