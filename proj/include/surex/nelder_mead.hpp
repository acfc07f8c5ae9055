#pragma once

#include "surex/types.hpp"

#include <functional>

namespace surex {

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free minimization with the standard reflect/expand/contract/shrink
/// moves. Iterates are clamped to [lower, upper] before evaluation, so the
/// objective is never called outside the box. Stops when the value spread across
/// the simplex falls below tol or the evaluation budget runs out. The best vertex
/// never worsens, so the result is at least as good as the start point.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& start,
                             const Vector& lower,
                             const Vector& upper,
                             double tol = 1e-6,
                             int max_evaluations = 2000);

}  // namespace surex
