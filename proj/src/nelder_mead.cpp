#include "surex/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace surex {

namespace {

Vector clamp_box(Vector x, const Vector& lo, const Vector& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& start,
                             const Vector& lower,
                             const Vector& upper,
                             double tol,
                             int max_evaluations) {
    const Index n = start.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("nelder_mead: bound dimension mismatch");
    if ((lower.array() > upper.array()).any())
        throw std::invalid_argument("nelder_mead: lower bound exceeds upper bound");

    NelderMeadResult res;
    res.evaluations = 0;
    auto eval = [&](const Vector& x) {
        ++res.evaluations;
        return f(x);
    };

    // Initial simplex: start point plus one perturbed vertex per coordinate.
    std::vector<Vector> verts(static_cast<size_t>(n) + 1);
    std::vector<double> vals(static_cast<size_t>(n) + 1);
    verts[0] = clamp_box(start, lower, upper);
    vals[0] = eval(verts[0]);
    for (Index i = 0; i < n; ++i) {
        Vector v = verts[0];
        double step = 0.05 * (upper[i] - lower[i]);
        if (step <= 0.0) step = 0.05 * std::max(1.0, std::abs(v[i]));
        v[i] = (v[i] + step <= upper[i]) ? v[i] + step : v[i] - step;
        verts[static_cast<size_t>(i) + 1] = clamp_box(v, lower, upper);
        vals[static_cast<size_t>(i) + 1] = eval(verts[static_cast<size_t>(i) + 1]);
    }

    std::vector<size_t> order(verts.size());
    std::iota(order.begin(), order.end(), size_t{0});
    auto sort_order = [&] {
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    };

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (res.evaluations < max_evaluations) {
        sort_order();
        const size_t best = order.front(), worst = order.back();
        if (std::abs(vals[worst] - vals[best]) <= tol * (std::abs(vals[best]) + tol)) {
            res.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (size_t k = 0; k + 1 < order.size(); ++k) centroid += verts[order[k]];
        centroid /= static_cast<double>(n);

        const Vector reflected = clamp_box(centroid + alpha * (centroid - verts[worst]), lower, upper);
        const double fr = eval(reflected);
        const size_t second_worst = order[order.size() - 2];

        if (fr < vals[best]) {
            const Vector expanded = clamp_box(centroid + gamma * (reflected - centroid), lower, upper);
            const double fe = eval(expanded);
            if (fe < fr) {
                verts[worst] = expanded;
                vals[worst] = fe;
            } else {
                verts[worst] = reflected;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const Vector contracted = clamp_box(centroid + rho * (verts[worst] - centroid), lower, upper);
            const double fc = eval(contracted);
            if (fc < vals[worst]) {
                verts[worst] = contracted;
                vals[worst] = fc;
            } else {
                for (size_t k = 1; k < order.size(); ++k) {
                    const size_t i = order[k];
                    verts[i] = clamp_box(verts[best] + sigma * (verts[i] - verts[best]), lower, upper);
                    vals[i] = eval(verts[i]);
                }
            }
        }
    }

    sort_order();
    res.x = verts[order.front()];
    res.value = vals[order.front()];
    return res;
}

}  // namespace surex
